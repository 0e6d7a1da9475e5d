#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "bmq/pipeline.hpp"

#include "support/helpers.hpp"

using namespace bmq;
namespace bt = bmq::testing;

namespace {

/// Minimal snapshot covering two concepts the canned extractor will find.
SnapshotStore test_ontology() {
    SnapshotRecord diabetes;
    diabetes.cui = "C0011849";
    diabetes.name = "Diabetes Mellitus";
    diabetes.definitions = {{"A metabolic disorder characterized by high blood sugar.", "MSH"},
                            {"A disease of impaired insulin secretion.", "NCI"}};
    diabetes.relations = {{"C0011860", "Type 2 Diabetes", "CHD"},
                          {"C0020456", "Hyperglycemia", "RO"},
                          {"C0000000", "Noise", "AQ"}};

    SnapshotRecord asthma;
    asthma.cui = "C0004096";
    asthma.name = "Asthma";
    asthma.definitions = {{"A chronic respiratory disease.", "CSP"}};
    asthma.relations = {{"C0006266", "Bronchospasm", "RO:has_associated_morphology"}};

    return SnapshotStore::from_records({diabetes, asthma});
}

Corpus small_corpus() {
    Corpus c;
    c.add({"doc_dm1", "diabetes overview", "diabetes mellitus insulin blood sugar glucose"});
    c.add({"doc_dm2", "type 2", "type 2 diabetes hyperglycemia metabolic disorder"});
    c.add({"doc_as1", "asthma care", "asthma bronchospasm inhaler respiratory disease"});
    c.add({"doc_other", "gardening", "tomato seeds watering schedule"});
    return c;
}

std::multiset<std::string> token_multiset(const std::string& text) {
    auto tokens = tokenize(text);
    return {tokens.begin(), tokens.end()};
}

}  // namespace

TEST_CASE("compose_expanded_query joins alpha copies then the pseudo-document") {
    CHECK(compose_expanded_query("BPH", std::optional<std::string_view>("context text"), 2) ==
          "BPH BPH context text");
    CHECK(compose_expanded_query("q", std::nullopt, 3) == "q q q");
    CHECK(compose_expanded_query("q", std::optional<std::string_view>("p"), 1) == "q p");
    CHECK_THROWS_AS(compose_expanded_query("q", std::nullopt, 0), InvalidAlpha);
    CHECK_THROWS_AS(compose_expanded_query("q", std::nullopt, -2), InvalidAlpha);
}

TEST_CASE("composition algebra: token multiset of q' = alpha x tokens(q) + tokens(p)") {
    std::mt19937 rng(31);
    for (int round = 0; round < 200; ++round) {
        auto q_tokens = bt::random_tokens(rng, 8, 30);
        auto p_tokens = bt::random_tokens(rng, 40, 30);
        int alpha = 1 + int(rng() % 50);
        std::string q, p;
        for (const auto& t : q_tokens) q += t + " ";
        for (const auto& t : p_tokens) p += t + " ";
        q = trim(q);
        p = trim(p);

        std::string composed =
            compose_expanded_query(q, std::optional<std::string_view>(p), alpha);

        std::multiset<std::string> expected;
        for (int i = 0; i < alpha; ++i)
            for (const auto& t : tokenize(q)) expected.insert(t);
        for (const auto& t : tokenize(p)) expected.insert(t);
        CHECK(token_multiset(composed) == expected);
    }
}

TEST_CASE("effective alpha: 5 for LLM modes, 50 for no_llm unless overridden") {
    PipelineConfig cfg;
    CHECK(cfg.effective_alpha() == 5);
    cfg.mode = Mode::no_llm;
    CHECK(cfg.effective_alpha() == 50);
    cfg.alpha = 7;
    cfg.alpha_overridden = true;
    CHECK(cfg.effective_alpha() == 7);
    cfg.mode = Mode::full;
    CHECK(cfg.effective_alpha() == 7);
}

TEST_CASE("mode names round-trip") {
    for (Mode m : {Mode::full, Mode::no_llm, Mode::definitions_only, Mode::relations_only,
                   Mode::plain_bm25}) {
        auto parsed = parse_mode(mode_name(m));
        REQUIRE(parsed.has_value());
        CHECK(*parsed == m);
    }
    CHECK_FALSE(parse_mode("bogus").has_value());
}

TEST_CASE("expand: plain_bm25 is the identity expansion") {
    PipelineConfig cfg;
    cfg.mode = Mode::plain_bm25;
    ExpandedQuery eq = expand({"q1", "anything at all"}, cfg, {nullptr, nullptr});
    CHECK(eq.composed_text == "anything at all");
    CHECK_FALSE(eq.pseudo_doc.has_value());
    CHECK_FALSE(eq.fell_back);
}

TEST_CASE("expand: full mode runs all five stages") {
    SnapshotStore ontology = test_ontology();
    CannedLlm llm;
    PipelineConfig cfg;
    cfg.mode = Mode::full;

    ExpandedQuery eq = expand({"q1", "managing Diabetes Mellitus day to day"}, cfg,
                              {&ontology, &llm});
    CHECK(eq.terms.terms == std::vector<std::string>{"Diabetes Mellitus"});
    CHECK(eq.alpha == 5);
    REQUIRE(eq.pseudo_doc.has_value());
    CHECK(eq.context.definitions_text.find("Diabetes Mellitus:") == 0);
    CHECK(eq.context.definitions_text.find("(Source: MeSH)") != std::string::npos);
    CHECK(eq.context.relations_text.find("has child: Type 2 Diabetes") != std::string::npos);
    // pruned: the AQ edge never reaches serialization
    CHECK(eq.context.relations_text.find("Noise") == std::string::npos);

    // composed = 5 copies of q + pseudo-doc
    std::string five;
    for (int i = 0; i < 5; ++i) five += (i ? " " : "") + std::string("managing Diabetes Mellitus day to day");
    CHECK(eq.composed_text.rfind(five, 0) == 0);
    CHECK(eq.composed_text.size() > five.size());
}

TEST_CASE("expand: terms sharing a CUI are linked once") {
    SnapshotRecord flu;
    flu.cui = "C0021400";
    flu.name = "Influenza";
    flu.definitions = {{"An acute viral infection.", "MSH"}};
    flu.aliases = {"Flu"};
    auto ontology = SnapshotStore::from_records({flu});
    CannedLlm llm;
    PipelineConfig cfg;
    cfg.mode = Mode::full;
    ExpandedQuery eq = expand({"q1", "Flu season Influenza precautions"}, cfg, {&ontology, &llm});
    CHECK(eq.terms.terms == std::vector<std::string>{"Flu", "Influenza"});
    // one concept block, not two
    CHECK(eq.context.definitions_text ==
          "Influenza: An acute viral infection. (Source: MeSH);");
}

TEST_CASE("expand: empty term set short-circuits to the raw query") {
    SnapshotStore ontology = test_ontology();
    CannedLlm llm;
    PipelineConfig cfg;
    cfg.mode = Mode::full;
    ExpandedQuery eq = expand({"q1", "Native Americans"}, cfg, {&ontology, &llm});
    CHECK(eq.composed_text == "Native Americans");
    CHECK_FALSE(eq.pseudo_doc.has_value());
    CHECK_FALSE(eq.fell_back);
}

TEST_CASE("expand: definitions_only and relations_only are projections of full") {
    SnapshotStore ontology = test_ontology();
    CannedLlm llm;
    Query q{"q1", "managing Diabetes Mellitus day to day"};

    PipelineConfig full_cfg;
    full_cfg.mode = Mode::full;
    ExpandedQuery full = expand(q, full_cfg, {&ontology, &llm});

    PipelineConfig defs_cfg;
    defs_cfg.mode = Mode::definitions_only;
    ExpandedQuery defs = expand(q, defs_cfg, {&ontology, &llm});
    CHECK(defs.context.definitions_text == full.context.definitions_text);
    CHECK(defs.context.relations_text.empty());

    PipelineConfig rels_cfg;
    rels_cfg.mode = Mode::relations_only;
    ExpandedQuery rels = expand(q, rels_cfg, {&ontology, &llm});
    CHECK(rels.context.relations_text == full.context.relations_text);
    CHECK(rels.context.definitions_text.empty());
}

TEST_CASE("expand: no_llm uses the serialized ontology text with alpha 50") {
    SnapshotStore ontology = test_ontology();
    CannedLlm llm;
    PipelineConfig cfg;
    cfg.mode = Mode::no_llm;
    Query q{"q1", "managing Diabetes Mellitus day to day"};
    ExpandedQuery eq = expand(q, cfg, {&ontology, &llm});
    CHECK(eq.alpha == 50);
    REQUIRE(eq.pseudo_doc.has_value());
    CHECK(eq.pseudo_doc->model == "ontology");
    CHECK(eq.pseudo_doc->text.find("metabolic disorder") != std::string::npos);
    CHECK(eq.pseudo_doc->text.find("has child: Type 2 Diabetes") != std::string::npos);

    // composed contains exactly 50 copies of the query followed by the material
    std::multiset<std::string> toks = token_multiset(eq.composed_text);
    CHECK(toks.count("managing") == 50);
}

TEST_CASE("expand: backend failure falls back to plain BM25 and records why") {
    class FailingOntology : public OntologyBackend {
    public:
        std::optional<std::pair<Cui, std::string>> link_concept(std::string_view) override {
            throw BackendUnavailable("synthetic outage");
        }
        std::vector<DefinitionEntry> fetch_definitions(const Cui&) override { return {}; }
        SemanticGraph fetch_neighborhood(const Cui& c) override { return SemanticGraph(c); }
    };
    FailingOntology ontology;
    CannedLlm llm;
    PipelineConfig cfg;
    cfg.mode = Mode::full;
    ExpandedQuery eq = expand({"q1", "Diabetes Mellitus"}, cfg, {&ontology, &llm});
    CHECK(eq.fell_back);
    CHECK(eq.composed_text == "Diabetes Mellitus");
    CHECK(eq.failure.find("synthetic outage") != std::string::npos);
}

TEST_CASE("run_batch produces canonical query order and a valid TREC file") {
    SnapshotStore ontology = test_ontology();
    CannedLlm llm;
    Corpus corpus = small_corpus();
    InvertedIndex index = InvertedIndex::build(corpus);
    std::vector<Query> queries{{"q_dm", "managing Diabetes Mellitus day to day"},
                               {"q_as", "Asthma triggers"},
                               {"q_none", "tomato care"}};

    PipelineConfig cfg;
    cfg.mode = Mode::full;
    cfg.k = 10;

    BatchReport report;
    RunResult run = run_batch(queries, index, cfg, {&ontology, &llm}, &report);
    CHECK(run.tag == "full");
    REQUIRE(run.per_query.size() == 3);
    CHECK(run.per_query[0].first == "q_dm");
    CHECK(run.per_query[1].first == "q_as");
    CHECK(run.per_query[2].first == "q_none");
    CHECK(report.fallback_count == 0);
    CHECK(run.per_query[0].second.size() >= 1);
    CHECK(run.per_query[0].second[0].doc_id.rfind("doc_dm", 0) == 0);

    bt::TempDir tmp;
    write_trec_run(tmp / "run.trec", run);
    std::string raw = bt::read_file(tmp / "run.trec");
    CHECK(raw.find(" Q0 ") != std::string::npos);
    CHECK(raw.find(" full\n") != std::string::npos);
    RunResult parsed = read_trec_run(tmp / "run.trec");
    CHECK(parsed.per_query.size() == 3);
}

TEST_CASE("run_batch is deterministic across thread counts") {
    SnapshotStore ontology = test_ontology();
    CannedLlm llm;
    Corpus corpus = small_corpus();
    InvertedIndex index = InvertedIndex::build(corpus);
    std::vector<Query> queries;
    for (int i = 0; i < 12; ++i)
        queries.push_back({"q" + std::to_string(i),
                           i % 2 ? "Diabetes Mellitus insulin" : "Asthma inhaler"});

    bt::TempDir tmp;
    for (unsigned jobs : {1u, 4u}) {
        PipelineConfig cfg;
        cfg.mode = Mode::full;
        cfg.jobs = jobs;
        RunResult run = run_batch(queries, index, cfg, {&ontology, &llm});
        write_trec_run(tmp / ("run" + std::to_string(jobs) + ".trec"), run);
    }
    CHECK(bt::read_file(tmp / "run1.trec") == bt::read_file(tmp / "run4.trec"));
}

TEST_CASE("run_batch: zero queries give an empty but valid run") {
    Corpus corpus = small_corpus();
    InvertedIndex index = InvertedIndex::build(corpus);
    PipelineConfig cfg;
    cfg.mode = Mode::plain_bm25;
    RunResult run = run_batch({}, index, cfg, {nullptr, nullptr});
    CHECK(run.per_query.empty());
    bt::TempDir tmp;
    write_trec_run(tmp / "empty.trec", run);
    CHECK(bt::read_file(tmp / "empty.trec").empty());
}

TEST_CASE("run_batch collects replay misses for the whole batch") {
    bt::TempDir tmp;
    SnapshotStore ontology = test_ontology();
    ReplayLlm llm(tmp.path());  // empty fixture dir: every prompt misses
    Corpus corpus = small_corpus();
    InvertedIndex index = InvertedIndex::build(corpus);
    std::vector<Query> queries{{"q1", "Diabetes Mellitus"}, {"q2", "Asthma attack"}};

    PipelineConfig cfg;
    cfg.mode = Mode::full;
    BatchReport report;
    RunResult run = run_batch(queries, index, cfg, {&ontology, &llm}, &report);
    CHECK(report.replay_misses.size() == 2);
    CHECK(report.fallback_count == 2);
    CHECK(run.per_query.size() == 2);  // fallbacks still searched
}

TEST_CASE("monotone anchoring: repeated copies never lower an original term's contribution") {
    Corpus corpus = small_corpus();
    InvertedIndex index = InvertedIndex::build(corpus);
    const std::string q = "diabetes insulin";
    const std::string p = "metabolic disorder glucose";

    double prev = -1.0;
    for (int alpha = 1; alpha <= 50; alpha += 7) {
        std::string composed =
            compose_expanded_query(q, std::optional<std::string_view>(p), alpha);
        auto tokens = tokenize(composed);
        // contribution of the original query terms alone, holding doc 0 fixed
        std::vector<std::string> originals;
        for (const auto& t : tokens)
            if (t == "diabetes" || t == "insulin") originals.push_back(t);
        double score = index.bm25_score(originals, 0);
        CHECK(score >= prev);
        prev = score;
    }
}
