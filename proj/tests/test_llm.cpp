#include <doctest.h>

#include <thread>

#include "bmq/llm.hpp"

#include "support/helpers.hpp"
#include "support/stub_http.hpp"

using namespace bmq;
namespace bt = bmq::testing;

namespace {

/// Scripted backend: returns queued replies in order.
class ScriptedLlm : public LlmBackend {
public:
    explicit ScriptedLlm(std::vector<std::string> replies) : replies_(std::move(replies)) {}
    ChatReply complete(const ChatRequest& req) override {
        REQUIRE(calls_ < replies_.size());
        return {replies_[calls_++], false, prompt_cache_key(req)};
    }
    std::string name() const override { return "scripted"; }
    size_t calls() const { return calls_; }
    std::vector<std::string> replies_;
    size_t calls_ = 0;
};

}  // namespace

TEST_CASE("term extraction prompt carries the five in-context examples verbatim") {
    std::string p = render_term_extraction_prompt("Preventing Brain Loss with B Vitamins?");
    CHECK(p.rfind("Your task: Extract key medical terms from the query.", 0) == 0);
    CHECK(p.find("Query: Dietary Treatment of Crohn's Disease\n"
                 "Terms: [Dietary Treatment, Crohn's Disease]") != std::string::npos);
    CHECK(p.find("Query: Neurobiology of Artificial Sweeteners\n"
                 "Terms: [Neurobiology, Artificial Sweeteners]") != std::string::npos);
    CHECK(p.find("Query: Boosting Good Bacteria in the Colon Without Probiotics\n"
                 "Terms: [Good Bacteria, Probiotics]") != std::string::npos);
    CHECK(p.find("Query: Veggies vs. Cancer\nTerms: [Cancer]") != std::string::npos);
    CHECK(p.find("Query: Native Americans\nTerms: []") != std::string::npos);
    CHECK(p.find("Strictly follow the output format.\nOutput format:\nTerms: [term1, term2, "
                 "...]") != std::string::npos);
    CHECK(p.find("Query: Preventing Brain Loss with B Vitamins?\nTerms: [...]") !=
          std::string::npos);
}

TEST_CASE("generation prompt golden, with and without the rationale suffix") {
    SerializedContext ctx{"D-TEXT", "R-TEXT"};
    CHECK(render_generation_prompt("BPH", ctx, false) ==
          "Given a query, relevant medical definitions and relationships; write an answer to "
          "the query.\n\nQuery: BPH\n\nDefinitions: D-TEXT\n\nRelationships: R-TEXT");
    std::string cot = render_generation_prompt("BPH", ctx, true);
    CHECK(cot.size() > 0);
    CHECK(cot.rfind("Give the rationale before answering") ==
          cot.size() - std::string("Give the rationale before answering").size());
}

TEST_CASE("empty context keeps the labels with empty bodies") {
    std::string p = render_generation_prompt("q", SerializedContext{}, false);
    CHECK(p.find("\n\nDefinitions: \n\nRelationships: ") != std::string::npos);
}

TEST_CASE("paraphrase prompt is the three-line template") {
    CHECK(render_paraphrase_prompt("BPH") ==
          "Paraphrase the following query.\nQuery: BPH\nParaphrased query:");
}

TEST_CASE("parse_terms_response handles the appendix examples") {
    CHECK(parse_terms_response("Terms: [Dietary Treatment, Crohn's Disease]").terms ==
          std::vector<std::string>{"Dietary Treatment", "Crohn's Disease"});
    CHECK(parse_terms_response("Terms: [Neurobiology, Artificial Sweeteners]").terms ==
          std::vector<std::string>{"Neurobiology", "Artificial Sweeteners"});
    CHECK(parse_terms_response("Terms: [Good Bacteria, Probiotics]").terms ==
          std::vector<std::string>{"Good Bacteria", "Probiotics"});
    CHECK(parse_terms_response("Terms: [Cancer]").terms == std::vector<std::string>{"Cancer"});
    CHECK(parse_terms_response("Terms: []").terms.empty());
}

TEST_CASE("parse_terms_response takes the last matching line and trims") {
    std::string reply =
        "Sure! Here is my reasoning.\n"
        "Terms: [Wrong, Guess]\n"
        "Actually, the final answer:\n"
        "Terms: [ Breast Cancer ,  Mammography ]\n";
    CHECK(parse_terms_response(reply).terms ==
          std::vector<std::string>{"Breast Cancer", "Mammography"});
}

TEST_CASE("parse_terms_response failure modes") {
    CHECK_THROWS_AS(parse_terms_response("I cannot help with that"), ParseFailure);
    CHECK_THROWS_AS(parse_terms_response(""), ParseFailure);
    CHECK_THROWS_AS(parse_terms_response("Terms: none"), ParseFailure);
    CHECK(parse_terms_response("Terms: [   ]").terms.empty());
}

TEST_CASE("terms round-trip through render and parse") {
    std::vector<std::vector<std::string>> cases = {
        {},
        {"One"},
        {"Breast Cancer", "Chemotherapy"},
        {"a", "b", "c", "d"},
        {"Type 1 Diabetes", "Insulin Deficiency", "Ketoacidosis"},
    };
    for (const auto& terms : cases) {
        std::string rendered = "Terms: [";
        for (size_t i = 0; i < terms.size(); ++i) {
            if (i) rendered += ", ";
            rendered += terms[i];
        }
        rendered += "]";
        CHECK(parse_terms_response(rendered).terms == terms);
    }
}

TEST_CASE("extract_terms parses a good first reply") {
    ScriptedLlm llm({"Terms: [Cancer]"});
    TermExtraction r = extract_terms("Veggies vs. Cancer", llm);
    CHECK(r.terms.terms == std::vector<std::string>{"Cancer"});
    CHECK(r.attempts == 1);
    CHECK_FALSE(r.fallback);
}

TEST_CASE("extract_terms retries once with the suffix re-appended, then degrades to empty") {
    SUBCASE("second attempt succeeds") {
        ScriptedLlm llm({"no list here", "Terms: [Aspirin]"});
        TermExtraction r = extract_terms("q", llm);
        CHECK(r.terms.terms == std::vector<std::string>{"Aspirin"});
        CHECK(r.attempts == 2);
        CHECK_FALSE(r.fallback);
        CHECK(llm.calls() == 2);
    }
    SUBCASE("both attempts fail") {
        ScriptedLlm llm({"nope", "still nope"});
        TermExtraction r = extract_terms("q", llm);
        CHECK(r.terms.terms.empty());
        CHECK(r.fallback);
        CHECK(llm.calls() == 2);
    }
}

TEST_CASE("canned mock echoes the in-context mapping") {
    CannedLlm llm;
    CHECK(extract_terms("Dietary Treatment of Crohn's Disease", llm).terms.terms ==
          std::vector<std::string>{"Dietary Treatment", "Crohn's Disease"});
    CHECK(extract_terms("Native Americans", llm).terms.terms.empty());
    CHECK(extract_terms("Veggies vs. Cancer", llm).terms.terms ==
          std::vector<std::string>{"Cancer"});
    // generic queries: maximal capitalized runs
    CHECK(extract_terms("managing Type 1 Diabetes with insulin", llm).terms.terms ==
          std::vector<std::string>{"Type 1 Diabetes"});
}

TEST_CASE("generate_pseudo_document uses 512 tokens and returns the full text") {
    ScriptedLlm llm({"a grounded answer"});
    PseudoDocument p =
        generate_pseudo_document("q", SerializedContext{"defs", "rels"}, llm, false);
    CHECK(p.text == "a grounded answer");
    CHECK_FALSE(p.cache_hit);
    CHECK_FALSE(p.prompt_hash.empty());

    ScriptedLlm empty({"   "});
    CHECK_THROWS_AS(generate_pseudo_document("q", SerializedContext{}, empty, false),
                    EmptyGeneration);
}

TEST_CASE("paraphrase returns the reply line, stripping an echoed prefix") {
    ScriptedLlm a({"What is benign prostatic hyperplasia?"});
    CHECK(paraphrase_query("BPH", a) == "What is benign prostatic hyperplasia?");

    ScriptedLlm b({"Paraphrased query: What factors lead to fatalities in Covid-19 cases?"});
    CHECK(paraphrase_query("what causes death from Covid-19?", b) ==
          "What factors lead to fatalities in Covid-19 cases?");

    CannedLlm identity;
    CHECK(paraphrase_query("BPH", identity) == "BPH");

    ScriptedLlm blank({"\n  \n"});
    CHECK_THROWS_AS(paraphrase_query("q", blank), EmptyGeneration);
}

TEST_CASE("requests with invalid bounds are rejected") {
    CannedLlm llm;
    CHECK_THROWS_AS(llm.complete({"m", "s", "u", 0.0, 0}), FormatError);
    CHECK_THROWS_AS(llm.complete({"m", "s", "u", -0.5, 64}), FormatError);
}

TEST_CASE("prompt cache key covers model, temperature, max_tokens and prompt") {
    ChatRequest base{"m", "s", "u", 0.0, 512};
    ChatRequest other = base;
    CHECK(prompt_cache_key(base) == prompt_cache_key(other));
    other.model = "m2";
    CHECK(prompt_cache_key(base) != prompt_cache_key(other));
    other = base;
    other.temperature = 1.0;
    CHECK(prompt_cache_key(base) != prompt_cache_key(other));
    other = base;
    other.max_tokens = 128;
    CHECK(prompt_cache_key(base) != prompt_cache_key(other));
    other = base;
    other.user = "different";
    CHECK(prompt_cache_key(base) != prompt_cache_key(other));
}

TEST_CASE("cache wrapper: miss then hit, records under llm/<2>/<hash>.json") {
    bt::TempDir tmp;
    auto inner = std::make_shared<ScriptedLlm>(std::vector<std::string>{"fixture-text"});
    CachedLlm cached(inner, tmp.path());

    ChatRequest req{"m", "s", "u", 0.0, 64};
    ChatReply first = cached.complete(req);
    CHECK(first.text == "fixture-text");
    CHECK_FALSE(first.cache_hit);
    ChatReply second = cached.complete(req);
    CHECK(second.text == "fixture-text");
    CHECK(second.cache_hit);
    CHECK(inner->calls() == 1);

    const std::string hash = prompt_cache_key(req);
    CHECK(std::filesystem::exists(tmp.path() / "llm" / hash.substr(0, 2) / (hash + ".json")));
}

TEST_CASE("concurrent cache writers do not corrupt records") {
    bt::TempDir tmp;
    ChatRequest req{"m", "s", "user prompt", 0.0, 64};
    std::vector<std::thread> threads;
    for (int t = 0; t < 8; ++t)
        threads.emplace_back([&] {
            auto inner = std::make_shared<CannedLlm>();
            CachedLlm cached(inner, tmp.path());
            ChatReply r = cached.complete(req);
            CHECK(!r.text.empty());
        });
    for (auto& t : threads) t.join();

    ReplayLlm replay(tmp.path());
    CHECK(replay.complete(req).text == CannedLlm{}.complete(req).text);
}

TEST_CASE("replay serves recorded fixtures and errors on misses") {
    bt::TempDir tmp;
    auto inner = std::make_shared<ScriptedLlm>(std::vector<std::string>{"recorded"});
    CachedLlm recorder(inner, tmp.path());
    ChatRequest req{"m", "s", "u", 0.0, 64};
    recorder.complete(req);

    ReplayLlm replay(tmp.path());
    ChatReply r = replay.complete(req);
    CHECK(r.text == "recorded");
    CHECK(r.cache_hit);

    ChatRequest missing{"m", "s", "unseen prompt", 0.0, 64};
    CHECK_THROWS_AS(replay.complete(missing), ReplayMiss);
    try {
        replay.complete(missing);
    } catch (const ReplayMiss& e) {
        CHECK(e.hash() == prompt_cache_key(missing));
    }
}

TEST_CASE("http backend speaks the chat-completions shape") {
    bt::StubServer stub;
    stub.server().Post("/v1/chat/completions",
                       [](const httplib::Request& req, httplib::Response& res) {
                           CHECK(req.get_header_value("Authorization") == "Bearer sk-test");
                           CHECK(req.body.find("\"messages\"") != std::string::npos);
                           CHECK(req.body.find("\"max_tokens\":77") != std::string::npos);
                           res.set_content(
                               R"({"choices":[{"message":{"role":"assistant",
                                  "content":"hello from the stub"}}]})",
                               "application/json");
                       });
    std::string base = stub.start();

    HttpLlmConfig cfg;
    cfg.base_url = base + "/v1";
    cfg.api_key = "sk-test";
    cfg.max_retries = 0;
    HttpLlmBackend llm(cfg);
    ChatReply r = llm.complete({"model-x", "sys", "user", 0.5, 77});
    CHECK(r.text == "hello from the stub");
}

TEST_CASE("http backend retries 5xx and surfaces 429 as RateLimited") {
    bt::StubServer stub;
    std::atomic<int> calls{0};
    stub.server().Post("/v1/chat/completions",
                       [&](const httplib::Request&, httplib::Response& res) {
                           if (calls++ == 0) {
                               res.status = 500;
                               return;
                           }
                           res.set_content(R"({"choices":[{"message":{"content":"ok"}}]})",
                                           "application/json");
                       });
    std::string base = stub.start();

    HttpLlmConfig cfg;
    cfg.base_url = base + "/v1";
    cfg.max_retries = 2;
    HttpLlmBackend llm(cfg);
    CHECK(llm.complete({"m", "s", "u", 0.0, 16}).text == "ok");
    CHECK(calls == 2);

    bt::StubServer limited;
    limited.server().Post("/v1/chat/completions",
                          [](const httplib::Request&, httplib::Response& res) {
                              res.status = 429;
                              res.set_header("Retry-After", "0");
                          });
    std::string base2 = limited.start();
    HttpLlmConfig cfg2;
    cfg2.base_url = base2 + "/v1";
    cfg2.max_retries = 1;
    HttpLlmBackend llm2(cfg2);
    CHECK_THROWS_AS(llm2.complete({"m", "s", "u", 0.0, 16}), RateLimited);
}
