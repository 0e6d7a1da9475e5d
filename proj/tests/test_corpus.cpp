#include <doctest.h>

#include "bmq/corpus.hpp"

#include "support/helpers.hpp"

using namespace bmq;
using bmq::testing::TempDir;
using bmq::testing::write_file;

TEST_CASE("load_corpus reads JSONL records in order") {
    TempDir tmp;
    write_file(tmp / "corpus.jsonl",
               "{\"_id\":\"d1\",\"title\":\"t1\",\"text\":\"b1\"}\n"
               "{\"_id\":\"d2\",\"title\":\"t2\",\"text\":\"b2\"}\n"
               "{\"_id\":\"d3\",\"title\":\"t3\",\"text\":\"b3\"}\n");
    Corpus c = load_corpus(tmp / "corpus.jsonl");
    REQUIRE(c.size() == 3);
    CHECK(c.at(0).id == "d1");
    CHECK(c.at(2).body == "b3");
    CHECK(c.find("d2") == 1);
    CHECK_FALSE(c.find("dX").has_value());
}

TEST_CASE("empty file gives an empty corpus") {
    TempDir tmp;
    write_file(tmp / "corpus.jsonl", "");
    CHECK(load_corpus(tmp / "corpus.jsonl").size() == 0);
}

TEST_CASE("empty title is preserved and indexed text keeps the single separator") {
    TempDir tmp;
    write_file(tmp / "corpus.jsonl", "{\"_id\":\"d1\",\"title\":\"\",\"text\":\"aspirin\"}\n");
    Corpus c = load_corpus(tmp / "corpus.jsonl");
    REQUIRE(c.size() == 1);
    CHECK(c.at(0).title.empty());
    CHECK(c.at(0).body == "aspirin");
    CHECK(c.indexed_text(0) == " aspirin");
}

TEST_CASE("extra fields are ignored") {
    TempDir tmp;
    write_file(tmp / "corpus.jsonl",
               "{\"_id\":\"d1\",\"title\":\"t\",\"text\":\"b\",\"metadata\":{\"x\":1}}\n");
    CHECK(load_corpus(tmp / "corpus.jsonl").size() == 1);
}

TEST_CASE("ingestion error taxonomy") {
    TempDir tmp;

    SUBCASE("missing _id") {
        write_file(tmp / "c.jsonl", "{\"title\":\"t\",\"text\":\"b\"}\n");
        CHECK_THROWS_AS(load_corpus(tmp / "c.jsonl"), MissingField);
    }
    SUBCASE("missing text") {
        write_file(tmp / "c.jsonl", "{\"_id\":\"d1\",\"title\":\"t\"}\n");
        CHECK_THROWS_AS(load_corpus(tmp / "c.jsonl"), MissingField);
    }
    SUBCASE("duplicate id") {
        write_file(tmp / "c.jsonl",
                   "{\"_id\":\"d1\",\"text\":\"a\"}\n{\"_id\":\"d1\",\"text\":\"b\"}\n");
        CHECK_THROWS_AS(load_corpus(tmp / "c.jsonl"), DuplicateId);
    }
    SUBCASE("malformed JSON carries the line number") {
        write_file(tmp / "c.jsonl", "{\"_id\":\"d1\",\"text\":\"a\"}\nnot json at all\n");
        try {
            load_corpus(tmp / "c.jsonl");
            FAIL("expected MalformedJson");
        } catch (const MalformedJson& e) {
            CHECK(e.line() == 2);
            CHECK(std::string(e.what()).find(":2:") != std::string::npos);
        }
    }
}

TEST_CASE("load_queries preserves file order and rejects duplicates") {
    TempDir tmp;
    write_file(tmp / "queries.jsonl",
               "{\"_id\":\"q2\",\"text\":\"second\"}\n{\"_id\":\"q1\",\"text\":\"first\"}\n");
    auto qs = load_queries(tmp / "queries.jsonl");
    REQUIRE(qs.size() == 2);
    CHECK(qs[0].id == "q2");
    CHECK(qs[1].text == "first");

    write_file(tmp / "dup.jsonl",
               "{\"_id\":\"q1\",\"text\":\"a\"}\n{\"_id\":\"q1\",\"text\":\"b\"}\n");
    CHECK_THROWS_AS(load_queries(tmp / "dup.jsonl"), DuplicateId);
}

TEST_CASE("single-line query file") {
    TempDir tmp;
    write_file(tmp / "q.jsonl", "{\"_id\":\"q1\",\"text\":\"BPH\"}\n");
    auto qs = load_queries(tmp / "q.jsonl");
    REQUIRE(qs.size() == 1);
    CHECK(qs[0].text == "BPH");
}

TEST_CASE("qrels parsing") {
    TempDir tmp;

    SUBCASE("direct field mapping") {
        write_file(tmp / "q.tsv", "query-id\tcorpus-id\tscore\nq1\td1\t2\n");
        Qrels q = load_qrels(tmp / "q.tsv");
        CHECK(q.grade("q1", "d1") == 2);
        CHECK(q.grade("q1", "dX") == 0);  // absent pairs mean grade 0
        CHECK(q.judgment_count() == 1);
    }
    SUBCASE("header only gives empty qrels") {
        write_file(tmp / "q.tsv", "query-id\tcorpus-id\tscore\n");
        CHECK(load_qrels(tmp / "q.tsv").query_count() == 0);
    }
    SUBCASE("bad header") {
        write_file(tmp / "q.tsv", "qid\tdid\trel\nq1\td1\t1\n");
        CHECK_THROWS_AS(load_qrels(tmp / "q.tsv"), BadHeader);
    }
    SUBCASE("negative grade rejected") {
        write_file(tmp / "q.tsv", "query-id\tcorpus-id\tscore\nq1\td1\t-1\n");
        CHECK_THROWS_AS(load_qrels(tmp / "q.tsv"), NonIntegerGrade);
    }
    SUBCASE("non-integer grade rejected") {
        write_file(tmp / "q.tsv", "query-id\tcorpus-id\tscore\nq1\td1\t1.5\n");
        CHECK_THROWS_AS(load_qrels(tmp / "q.tsv"), NonIntegerGrade);
    }
    SUBCASE("duplicate judgment rejected") {
        write_file(tmp / "q.tsv", "query-id\tcorpus-id\tscore\nq1\td1\t1\nq1\td1\t2\n");
        CHECK_THROWS_AS(load_qrels(tmp / "q.tsv"), DuplicateJudgment);
    }
}

TEST_CASE("corpus round-trips through write_corpus/load_corpus") {
    TempDir tmp;
    Corpus c;
    c.add({"d1", "Title One", "body with \"quotes\" and\ttabs"});
    c.add({"d2", "", "unicode: naïve £ ∟"});
    write_corpus(tmp / "c.jsonl", c);
    Corpus back = load_corpus(tmp / "c.jsonl");
    REQUIRE(back.size() == c.size());
    for (size_t i = 0; i < c.size(); ++i) {
        CHECK(back.at(i).id == c.at(i).id);
        CHECK(back.at(i).title == c.at(i).title);
        CHECK(back.at(i).body == c.at(i).body);
    }
}

TEST_CASE("qrels round-trip is identity") {
    TempDir tmp;
    Qrels q;
    q.add("q1", "d1", 2);
    q.add("q1", "d2", 0);
    q.add("q2", "d9", 1);
    write_qrels(tmp / "q.tsv", q);
    Qrels back = load_qrels(tmp / "q.tsv");
    CHECK(back.judgment_count() == q.judgment_count());
    CHECK(back.grade("q1", "d1") == 2);
    CHECK(back.grade("q1", "d2") == 0);
    CHECK(back.grade("q2", "d9") == 1);
}

TEST_CASE("queries round-trip") {
    TempDir tmp;
    std::vector<Query> qs{{"q1", "what causes death from Covid-19?"}, {"q2", "BPH"}};
    write_queries(tmp / "q.jsonl", qs);
    auto back = load_queries(tmp / "q.jsonl");
    REQUIRE(back.size() == 2);
    CHECK(back[0].id == qs[0].id);
    CHECK(back[0].text == qs[0].text);
    CHECK(back[1].text == qs[1].text);
}
