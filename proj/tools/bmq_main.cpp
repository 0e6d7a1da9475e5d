// bmq: ontology-guided biomedical query expansion over a BM25 engine.
//
// Subcommands: index (build/search), snapshot, context dump, expand, run,
// perturb, eval, ablate, config show. Exit codes: 0 success, 1 data error,
// 2 configuration/backend error, 3 run completed with per-query fallbacks.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "bmq/ablation.hpp"
#include "bmq/corpus.hpp"
#include "bmq/evalkit.hpp"
#include "bmq/hashutil.hpp"
#include "bmq/index.hpp"
#include "bmq/llm.hpp"
#include "bmq/ontology.hpp"
#include "bmq/pipeline.hpp"

#include "cli_config.hpp"

namespace {

using namespace bmq;
using cli::LayeredConfig;

class ConfigUsageError : public Error {
public:
    using Error::Error;
};

LayeredConfig declare_settings() {
    LayeredConfig cfg;
    cfg.declare("bm25.k1", "0.9");
    cfg.declare("bm25.b", "0.4");
    cfg.declare("bm25.stem", "false");
    cfg.declare("llm.backend", "mock:canned");
    cfg.declare("llm.model", "default", "LLM_MODEL");
    cfg.declare("llm.api_base", "", "LLM_API_BASE");
    cfg.declare("llm.api_key", "", "LLM_API_KEY");
    cfg.declare("llm.cache_dir", "");
    cfg.declare("llm.gen_temperature", "1.0");
    cfg.declare("ontology.backend", "");
    cfg.declare("ontology.cache_dir", "");
    cfg.declare("ontology.edge_cap", "50");
    cfg.declare("ontology.api_key", "", "UMLS_API_KEY");
    cfg.declare("ontology.refresh", "false");
    cfg.declare("pipeline.mode", "full");
    cfg.declare("pipeline.alpha", "5");
    cfg.declare("pipeline.cot", "false");
    cfg.declare("pipeline.k", "1000");
    cfg.declare("pipeline.jobs", "1");
    return cfg;
}

Bm25Params bm25_params(const LayeredConfig& cfg) {
    return {cfg.get_double("bm25.k1"), cfg.get_double("bm25.b")};
}

TokenizerOptions tokenizer_options(const LayeredConfig& cfg) {
    return {cfg.get_bool("bm25.stem")};
}

std::unique_ptr<OntologyBackend> make_ontology(const LayeredConfig& cfg) {
    const std::string spec = cfg.get("ontology.backend");
    if (spec.empty())
        throw ConfigUsageError(
            "no ontology backend configured (use --ontology snapshot:<path> or --ontology umls)");
    const size_t edge_cap = static_cast<size_t>(cfg.get_int("ontology.edge_cap"));
    if (spec.rfind("snapshot:", 0) == 0)
        return std::make_unique<SnapshotStore>(spec.substr(9), edge_cap);
    if (spec == "umls" || spec.rfind("umls:", 0) == 0) {
        UmlsClientConfig c;
        if (spec.size() > 5) c.base_url = spec.substr(5);
        c.api_key = cfg.get("ontology.api_key");
        c.max_edges = edge_cap;
        c.cache_dir = cfg.get("ontology.cache_dir");
        c.refresh = cfg.get_bool("ontology.refresh");
        return std::make_unique<UmlsRestClient>(std::move(c));
    }
    throw ConfigUsageError("unknown ontology backend '" + spec + "'");
}

std::shared_ptr<LlmBackend> make_llm(const LayeredConfig& cfg) {
    const std::string spec = cfg.get("llm.backend");
    std::shared_ptr<LlmBackend> backend;
    bool cacheable = true;
    if (spec == "mock:canned" || spec == "mock:identity") {
        backend = std::make_shared<CannedLlm>();
    } else if (spec.rfind("mock:replay:", 0) == 0) {
        backend = std::make_shared<ReplayLlm>(spec.substr(12));
        cacheable = false;  // replay already reads recorded files
    } else if (spec == "http") {
        HttpLlmConfig c;
        c.base_url = cfg.get("llm.api_base");
        c.api_key = cfg.get("llm.api_key");
        if (c.base_url.empty())
            throw ConfigUsageError("llm backend 'http' needs llm.api_base (or LLM_API_BASE)");
        backend = std::make_shared<HttpLlmBackend>(std::move(c));
    } else {
        throw ConfigUsageError("unknown llm backend '" + spec + "'");
    }
    const std::string cache_dir = cfg.get("llm.cache_dir");
    if (cacheable && !cache_dir.empty())
        backend = std::make_shared<CachedLlm>(backend, cache_dir);
    return backend;
}

LlmOptions llm_options(const LayeredConfig& cfg) {
    LlmOptions opts;
    opts.model = cfg.get("llm.model");
    opts.generation_temperature = cfg.get_double("llm.gen_temperature");
    return opts;
}

PipelineConfig pipeline_config(const LayeredConfig& cfg, bool alpha_overridden) {
    PipelineConfig pc;
    auto mode = parse_mode(cfg.get("pipeline.mode"));
    if (!mode) throw ConfigUsageError("unknown mode '" + cfg.get("pipeline.mode") + "'");
    pc.mode = *mode;
    pc.alpha = cfg.get_int("pipeline.alpha");
    pc.alpha_overridden = alpha_overridden;
    pc.cot = cfg.get_bool("pipeline.cot");
    pc.edge_cap = static_cast<size_t>(cfg.get_int("ontology.edge_cap"));
    pc.bm25 = bm25_params(cfg);
    pc.k = static_cast<size_t>(cfg.get_int("pipeline.k"));
    pc.jobs = static_cast<unsigned>(cfg.get_int("pipeline.jobs"));
    pc.llm = llm_options(cfg);
    return pc;
}

std::filesystem::path corpus_file(const std::filesystem::path& path) {
    if (std::filesystem::is_directory(path)) return path / "corpus.jsonl";
    return path;
}

InvertedIndex open_or_build_index(const std::string& index_path,
                                  const std::filesystem::path& dataset,
                                  const LayeredConfig& cfg) {
    if (!index_path.empty()) return InvertedIndex::load(index_path);
    std::cerr << "building index from " << corpus_file(dataset).string() << "\n";
    Corpus corpus = load_corpus(corpus_file(dataset));
    return InvertedIndex::build(corpus, tokenizer_options(cfg),
                                static_cast<unsigned>(cfg.get_int("pipeline.jobs")));
}

int finish_run(const BatchReport& report) {
    if (!report.failures.empty()) {
        auto failures = report.failures;
        std::sort(failures.begin(), failures.end());
        for (const auto& [qid, reason] : failures)
            std::cerr << "fallback " << qid << ": " << reason << "\n";
    }
    return report.fallback_count > 0 ? 3 : 0;
}

// Sorted unique missing-fixture hashes, then exit 2.
int report_replay_misses(const BatchReport& report) {
    std::set<std::string> misses(report.replay_misses.begin(), report.replay_misses.end());
    std::cerr << "missing replay fixtures (" << misses.size() << "):\n";
    for (const std::string& h : misses) std::cerr << "  " << h << "\n";
    return 2;
}

std::vector<std::string> read_term_lines(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::vector<std::string> terms;
    std::string line;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (!t.empty()) terms.push_back(std::move(t));
    }
    return terms;
}

double mean_token_length(const std::vector<Query>& queries) {
    if (queries.empty()) return 0.0;
    size_t total = 0;
    for (const Query& q : queries) total += tokenize(q.text).size();
    return static_cast<double>(total) / static_cast<double>(queries.size());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ontology-guided biomedical query expansion and BM25 retrieval"};
    app.require_subcommand(1);
    app.fallthrough(true);

    LayeredConfig cfg = declare_settings();

    std::string config_file;
    app.add_option("--config", config_file, "config file (bmq.toml or .json)");

    // Config-bound flags; applied over file/env after parsing.
    std::string f_k1, f_b, f_stem, f_llm, f_model, f_llm_cache, f_gen_temp, f_ontology,
        f_ontology_cache, f_edge_cap, f_refresh, f_mode, f_alpha, f_cot, f_k, f_jobs;
    auto* o_k1 = app.add_option("--k1", f_k1, "BM25 k1 (default 0.9)");
    auto* o_b = app.add_option("--b", f_b, "BM25 b (default 0.4)");
    auto* o_stem = app.add_flag("--stem{true}", f_stem, "enable Porter stemming");
    auto* o_llm = app.add_option("--llm", f_llm,
                                 "llm backend: mock:canned | mock:replay:<dir> | http");
    auto* o_model = app.add_option("--model", f_model, "llm model name");
    auto* o_llm_cache = app.add_option("--llm-cache", f_llm_cache, "llm cache directory");
    auto* o_gen_temp =
        app.add_option("--gen-temperature", f_gen_temp, "generation temperature (default 1.0)");
    auto* o_ontology = app.add_option("--ontology", f_ontology,
                                      "ontology backend: snapshot:<path> | umls[:<base-url>]");
    auto* o_ontology_cache =
        app.add_option("--ontology-cache", f_ontology_cache, "ontology cache directory");
    auto* o_edge_cap = app.add_option("--edge-cap", f_edge_cap, "max edges per concept");
    auto* o_refresh = app.add_flag("--refresh{true}", f_refresh, "bypass ontology cache reads");
    auto* o_mode = app.add_option("--mode", f_mode,
                                  "full | no_llm | definitions_only | relations_only | plain_bm25");
    auto* o_alpha = app.add_option("--alpha", f_alpha, "query repetition weight");
    auto* o_cot = app.add_flag("--cot{true}", f_cot, "append the chain-of-thought suffix");
    auto* o_k = app.add_option("--k", f_k, "retrieval depth (default 1000)");
    auto* o_jobs = app.add_option("--jobs", f_jobs, "worker cap for batch stages");

    // index
    auto* cmd_index = app.add_subcommand("index", "build or query a BM25 index");
    cmd_index->require_subcommand(1);
    std::string ib_corpus, ib_out;
    auto* cmd_index_build = cmd_index->add_subcommand("build", "build an index snapshot");
    cmd_index_build->add_option("--corpus", ib_corpus, "corpus.jsonl or dataset directory")
        ->required();
    cmd_index_build->add_option("--out", ib_out, "output index path")->required();
    std::string is_index, is_query;
    int is_k = 10;
    auto* cmd_index_search = cmd_index->add_subcommand("search", "search an index snapshot");
    cmd_index_search->add_option("--index", is_index, "index path")->required();
    cmd_index_search->add_option("--query", is_query, "query text")->required();
    cmd_index_search->add_option("--k", is_k, "top-k (default 10)");

    // snapshot
    std::string sn_terms, sn_out;
    auto* cmd_snapshot =
        app.add_subcommand("snapshot", "materialize an ontology snapshot for a term list");
    cmd_snapshot->add_option("--terms", sn_terms, "file with one term per line")->required();
    cmd_snapshot->add_option("--out", sn_out, "output snapshot.jsonl")->required();

    // context dump
    auto* cmd_context = app.add_subcommand("context", "inspect serialized prompt context");
    std::string cd_query;
    auto* cmd_context_dump =
        cmd_context->add_subcommand("dump", "print definitions and relations for a query");
    cmd_context_dump->add_option("--query", cd_query, "query text")->required();

    // expand
    std::string ex_query;
    auto* cmd_expand = app.add_subcommand("expand", "print the expanded form of one query");
    cmd_expand->add_option("--query", ex_query, "query text")->required();

    // run
    std::string run_dataset, run_out = "run.trec", run_qrels, run_index, run_tag;
    auto* cmd_run = app.add_subcommand("run", "batch expansion + retrieval over a dataset");
    cmd_run->add_option("--dataset", run_dataset, "BEIR-layout dataset directory")->required();
    cmd_run->add_option("--out", run_out, "output TREC run file (default run.trec)");
    cmd_run->add_option("--qrels", run_qrels, "evaluate against these qrels after the run");
    cmd_run->add_option("--index", run_index, "prebuilt index (default: build from corpus)");
    cmd_run->add_option("--tag", run_tag, "run tag (default: mode name)");
    bool run_exp_gain = false;
    cmd_run->add_flag("--ndcg-exp-gain", run_exp_gain, "exponential NDCG gains for --qrels");

    // perturb
    std::string pq_in, pq_out;
    bool pq_strict = false;
    auto* cmd_perturb = app.add_subcommand("perturb", "paraphrase a query set");
    cmd_perturb->add_option("--queries", pq_in, "queries.jsonl")->required();
    cmd_perturb->add_option("--out", pq_out, "output queries jsonl")->required();
    cmd_perturb->add_flag("--strict", pq_strict, "fail on any paraphrase error");

    // eval
    std::string ev_run, ev_qrels, ev_format = "text";
    int ev_k = 10;
    bool ev_exp_gain = false;
    auto* cmd_eval = app.add_subcommand("eval", "score a TREC run against qrels");
    cmd_eval->add_option("--run", ev_run, "TREC run file")->required();
    cmd_eval->add_option("--qrels", ev_qrels, "qrels TSV")->required();
    cmd_eval->add_option("--metric-k", ev_k, "metric cut (default 10)");
    cmd_eval->add_option("--format", ev_format, "text | json");
    cmd_eval->add_flag("--ndcg-exp-gain", ev_exp_gain, "exponential NDCG gains");

    // ablate
    std::string ab_dataset, ab_qrels, ab_out, ab_index;
    auto* cmd_ablate = app.add_subcommand("ablate", "run the five-mode ablation ladder");
    cmd_ablate->add_option("--dataset", ab_dataset, "BEIR-layout dataset directory")->required();
    cmd_ablate->add_option("--qrels", ab_qrels, "qrels TSV (default <dataset>/qrels/test.tsv)");
    cmd_ablate->add_option("--out", ab_out, "also write the table as TSV");
    cmd_ablate->add_option("--index", ab_index, "prebuilt index (default: build from corpus)");

    // config
    auto* cmd_config = app.add_subcommand("config", "configuration inspection");
    auto* cmd_config_show =
        cmd_config->add_subcommand("show", "print every effective value with provenance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // unknown flags and bad usage are hard configuration errors
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (config_file.empty() && std::filesystem::exists("bmq.toml")) config_file = "bmq.toml";
        if (!config_file.empty()) cfg.apply_file(config_file);
        cfg.apply_env();

        auto bind = [&](CLI::Option* opt, const char* key, const std::string& value) {
            if (opt->count() > 0) cfg.apply_flag(key, value);
        };
        bind(o_k1, "bm25.k1", f_k1);
        bind(o_b, "bm25.b", f_b);
        bind(o_stem, "bm25.stem", f_stem);
        bind(o_llm, "llm.backend", f_llm);
        bind(o_model, "llm.model", f_model);
        bind(o_llm_cache, "llm.cache_dir", f_llm_cache);
        bind(o_gen_temp, "llm.gen_temperature", f_gen_temp);
        bind(o_ontology, "ontology.backend", f_ontology);
        bind(o_ontology_cache, "ontology.cache_dir", f_ontology_cache);
        bind(o_edge_cap, "ontology.edge_cap", f_edge_cap);
        bind(o_refresh, "ontology.refresh", f_refresh);
        bind(o_mode, "pipeline.mode", f_mode);
        bind(o_alpha, "pipeline.alpha", f_alpha);
        bind(o_cot, "pipeline.cot", f_cot);
        bind(o_k, "pipeline.k", f_k);
        bind(o_jobs, "pipeline.jobs", f_jobs);

        const bool alpha_overridden = o_alpha->count() > 0;

        if (cmd_config_show->parsed()) {
            std::cout << cfg.render_show();
            return 0;
        }

        if (cmd_index_build->parsed()) {
            Corpus corpus = load_corpus(corpus_file(ib_corpus));
            InvertedIndex index = InvertedIndex::build(
                corpus, tokenizer_options(cfg), static_cast<unsigned>(cfg.get_int("pipeline.jobs")));
            index.save(ib_out);
            std::cout << index.doc_count() << " documents indexed\n";
            std::cout << "vocabulary size: " << index.vocab_size() << "\n";
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.3f", index.avg_doc_len());
            std::cout << "average document length: " << buf << "\n";
            std::cout << "index written to " << ib_out << " (sha256 " << sha256_file_hex(ib_out)
                      << ")\n";
            return 0;
        }

        if (cmd_index_search->parsed()) {
            if (is_k < 1) throw ConfigUsageError("--k must be >= 1");
            InvertedIndex index = InvertedIndex::load(is_index);
            auto hits = index.search(is_query, static_cast<size_t>(is_k), bm25_params(cfg));
            char buf[64];
            for (const ScoredHit& h : hits) {
                std::snprintf(buf, sizeof(buf), "%.6f", h.score);
                std::cout << h.rank << " " << h.doc_id << " " << buf << "\n";
            }
            return 0;
        }

        if (cmd_snapshot->parsed()) {
            auto ontology = make_ontology(cfg);
            std::vector<std::string> terms = read_term_lines(sn_terms);
            std::vector<SnapshotRecord> records = build_snapshot(*ontology, terms);
            write_snapshot(sn_out, records);
            std::cout << records.size() << " concepts materialized from " << terms.size()
                      << " terms\n";
            return 0;
        }

        if (cmd_context_dump->parsed()) {
            auto ontology = make_ontology(cfg);
            auto llm = make_llm(cfg);
            PipelineConfig pc = pipeline_config(cfg, alpha_overridden);
            pc.mode = Mode::full;  // context is only assembled on the full path
            Backends backends{ontology.get(), llm.get()};
            ExpandedQuery eq = expand({"q", cd_query}, pc, backends);
            std::cout << "Definitions:\n" << eq.context.definitions_text << "\n\n";
            std::cout << "Relationships:\n" << eq.context.relations_text << "\n";
            return 0;
        }

        if (cmd_expand->parsed()) {
            auto ontology = make_ontology(cfg);
            auto llm = make_llm(cfg);
            PipelineConfig pc = pipeline_config(cfg, alpha_overridden);
            Backends backends{ontology.get(), llm.get()};
            ExpandedQuery eq = expand({"q", ex_query}, pc, backends);
            if (eq.fell_back) std::cerr << "fallback: " << eq.failure << "\n";
            std::cout << eq.composed_text << "\n";
            return eq.fell_back ? 3 : 0;
        }

        if (cmd_run->parsed()) {
            PipelineConfig pc = pipeline_config(cfg, alpha_overridden);
            std::unique_ptr<OntologyBackend> ontology;
            std::shared_ptr<LlmBackend> llm;
            if (pc.mode != Mode::plain_bm25) {
                ontology = make_ontology(cfg);
                llm = make_llm(cfg);
            }
            InvertedIndex index = open_or_build_index(run_index, run_dataset, cfg);
            std::vector<Query> queries =
                load_queries(std::filesystem::path(run_dataset) / "queries.jsonl");

            BatchReport report;
            RunResult run = run_batch(queries, index, pc, {ontology.get(), llm.get()}, &report);
            if (!report.replay_misses.empty()) return report_replay_misses(report);
            if (!run_tag.empty()) run.tag = run_tag;
            write_trec_run(run_out, run);
            std::cout << "run written to " << run_out << " (sha256 " << sha256_file_hex(run_out)
                      << ")\n";

            if (!run_qrels.empty()) {
                Qrels qrels = load_qrels(run_qrels);
                MetricReport metrics = evaluate(run, qrels, 10, run_exp_gain);
                std::cout << format_report_text(metrics);
            }
            return finish_run(report);
        }

        if (cmd_perturb->parsed()) {
            auto llm = make_llm(cfg);
            LlmOptions opts = llm_options(cfg);
            std::vector<Query> queries = load_queries(pq_in);
            std::vector<Query> paraphrased;
            size_t failures = 0;
            std::ofstream out(pq_out, std::ios::binary);
            if (!out) throw Error("cannot write " + pq_out);
            for (const Query& q : queries) {
                std::string text;
                try {
                    text = paraphrase_query(q.text, *llm, opts);
                } catch (const Error& e) {
                    ++failures;
                    if (pq_strict) throw;
                    std::cerr << "paraphrase failed for " << q.id << ": " << e.what()
                              << " (passing query through)\n";
                    text = q.text;
                }
                nlohmann::json rec{{"_id", q.id}, {"text", text}, {"original", q.text}};
                out << rec.dump() << "\n";
                paraphrased.push_back({q.id, text});
            }
            char buf[128];
            std::snprintf(buf, sizeof(buf),
                          "%zu queries paraphrased (%zu failures)\n"
                          "mean token length: %.3f original, %.3f paraphrased\n",
                          queries.size(), failures, mean_token_length(queries),
                          mean_token_length(paraphrased));
            std::cout << buf;
            return failures > 0 ? 3 : 0;
        }

        if (cmd_eval->parsed()) {
            if (ev_format != "text" && ev_format != "json")
                throw ConfigUsageError("--format must be text or json");
            RunResult run = read_trec_run(ev_run);
            Qrels qrels = load_qrels(ev_qrels);
            MetricReport report = evaluate(run, qrels, ev_k, ev_exp_gain);
            std::cout << (ev_format == "json" ? format_report_json(report)
                                              : format_report_text(report));
            return 0;
        }

        if (cmd_ablate->parsed()) {
            PipelineConfig pc = pipeline_config(cfg, alpha_overridden);
            auto ontology = make_ontology(cfg);
            auto llm = make_llm(cfg);
            InvertedIndex index = open_or_build_index(ab_index, ab_dataset, cfg);
            std::vector<Query> queries =
                load_queries(std::filesystem::path(ab_dataset) / "queries.jsonl");
            std::filesystem::path qrels_path =
                ab_qrels.empty() ? std::filesystem::path(ab_dataset) / "qrels" / "test.tsv"
                                 : std::filesystem::path(ab_qrels);
            Qrels qrels = load_qrels(qrels_path);

            BatchReport report;
            std::vector<AblationRow> rows =
                ablation_report(queries, index, qrels, pc, {ontology.get(), llm.get()}, 10,
                                &report);
            if (!report.replay_misses.empty()) return report_replay_misses(report);
            std::cout << format_ablation_table(rows, 10);
            if (!ab_out.empty()) {
                std::ofstream out(ab_out, std::ios::binary);
                if (!out) throw Error("cannot write " + ab_out);
                out << format_ablation_tsv(rows);
            }
            return finish_run(report);
        }

        std::cerr << app.help();
        return 2;
    } catch (const ConfigUsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ReplayMiss& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const BackendUnavailable& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const RateLimited& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
