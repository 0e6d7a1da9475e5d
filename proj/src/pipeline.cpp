#include "bmq/pipeline.hpp"

#include <atomic>
#include <mutex>
#include <set>
#include <thread>

namespace bmq {

std::string mode_name(Mode mode) {
    switch (mode) {
        case Mode::full: return "full";
        case Mode::no_llm: return "no_llm";
        case Mode::definitions_only: return "definitions_only";
        case Mode::relations_only: return "relations_only";
        case Mode::plain_bm25: return "plain_bm25";
    }
    return "unknown";
}

std::optional<Mode> parse_mode(std::string_view name) {
    if (name == "full") return Mode::full;
    if (name == "no_llm") return Mode::no_llm;
    if (name == "definitions_only") return Mode::definitions_only;
    if (name == "relations_only") return Mode::relations_only;
    if (name == "plain_bm25") return Mode::plain_bm25;
    return std::nullopt;
}

int PipelineConfig::effective_alpha() const {
    if (alpha_overridden) return alpha;
    return mode == Mode::no_llm ? 50 : alpha;
}

std::string compose_expanded_query(std::string_view query, std::optional<std::string_view> pseudo,
                                   int alpha) {
    if (alpha < 1) throw InvalidAlpha();
    std::string out;
    out.reserve((query.size() + 1) * alpha + (pseudo ? pseudo->size() : 0));
    for (int i = 0; i < alpha; ++i) {
        if (i > 0) out += " ";
        out += query;
    }
    if (pseudo) {
        out += " ";
        out += *pseudo;
    }
    return out;
}

namespace {

/// Stages 1-3: terms -> concepts -> definitions + pruned graphs -> context.
struct OntologyContext {
    TermSet terms;
    std::vector<Concept> concepts;
    std::vector<SemanticGraph> pruned_graphs;
    SerializedContext context;
};

OntologyContext gather_context(const Query& query, const PipelineConfig& config,
                               Backends backends) {
    OntologyContext out;
    TermExtraction extraction = extract_terms(query.text, *backends.llm, config.llm);
    out.terms = extraction.terms;
    if (out.terms.terms.empty()) return out;

    RelationFilter filter;
    std::set<std::string> seen;  // C_q is a set: distinct terms may share a CUI
    for (const std::string& term : out.terms.terms) {
        auto linked = backends.ontology->link_concept(term);
        if (!linked) continue;  // no exact match: term discarded
        const auto& [cui, name] = *linked;
        if (!seen.insert(cui.value()).second) continue;
        out.concepts.push_back({cui, name, backends.ontology->fetch_definitions(cui)});
        out.pruned_graphs.push_back(prune_edges(backends.ontology->fetch_neighborhood(cui), filter));
    }

    out.context.definitions_text = serialize_definitions(out.concepts);
    out.context.relations_text = serialize_relations(out.pruned_graphs);
    return out;
}

ExpandedQuery plain_expansion(const Query& query) {
    ExpandedQuery eq;
    eq.original = query;
    eq.alpha = 1;
    eq.composed_text = query.text;
    return eq;
}

}  // namespace

ExpandedQuery expand(const Query& query, const PipelineConfig& config, Backends backends) {
    if (config.mode == Mode::plain_bm25) return plain_expansion(query);

    try {
        OntologyContext ctx = gather_context(query, config, backends);
        // An empty term set short-circuits to plain BM25 for this query.
        if (ctx.terms.terms.empty()) {
            ExpandedQuery eq = plain_expansion(query);
            return eq;
        }

        switch (config.mode) {
            case Mode::definitions_only:
                ctx.context.relations_text.clear();
                break;
            case Mode::relations_only:
                ctx.context.definitions_text.clear();
                break;
            default:
                break;
        }

        ExpandedQuery eq;
        eq.original = query;
        eq.terms = ctx.terms;
        eq.context = ctx.context;
        eq.alpha = config.effective_alpha();

        if (config.mode == Mode::no_llm) {
            // The serialized ontology text itself is the expansion material.
            std::string material = ctx.context.definitions_text;
            if (!material.empty() && !ctx.context.relations_text.empty()) material += "\n";
            material += ctx.context.relations_text;
            if (trim(material).empty()) return plain_expansion(query);
            eq.pseudo_doc = PseudoDocument{material, "ontology", "", false};
        } else {
            eq.pseudo_doc = generate_pseudo_document(query.text, ctx.context, *backends.llm,
                                                     config.cot, config.llm);
        }
        eq.composed_text =
            compose_expanded_query(query.text, std::string_view(eq.pseudo_doc->text), eq.alpha);
        return eq;
    } catch (const ReplayMiss&) {
        throw;  // missing fixtures are a configuration error, not a per-query failure
    } catch (const Error& e) {
        ExpandedQuery eq = plain_expansion(query);
        eq.fell_back = true;
        eq.failure = e.what();
        return eq;
    }
}

RunResult run_batch(const std::vector<Query>& queries, const InvertedIndex& index,
                    const PipelineConfig& config, Backends backends, BatchReport* report) {
    RunResult run;
    run.tag = mode_name(config.mode);
    run.per_query.resize(queries.size());

    std::mutex report_mutex;
    BatchReport local_report;

    auto process = [&](size_t i) {
        const Query& q = queries[i];
        std::vector<ScoredHit> hits;
        try {
            ExpandedQuery eq = expand(q, config, backends);
            if (eq.fell_back) {
                std::lock_guard lock(report_mutex);
                ++local_report.fallback_count;
                local_report.failures.emplace_back(q.id, eq.failure);
            }
            hits = index.search(eq.composed_text, config.k, config.bm25);
        } catch (const ReplayMiss& miss) {
            std::lock_guard lock(report_mutex);
            local_report.replay_misses.push_back(miss.hash());
            ++local_report.fallback_count;
            local_report.failures.emplace_back(q.id, miss.what());
            hits = index.search(q.text, config.k, config.bm25);
        }
        run.per_query[i] = {q.id, std::move(hits)};
    };

    const unsigned jobs = std::max(1u, config.jobs);
    if (jobs == 1 || queries.size() < 2) {
        for (size_t i = 0; i < queries.size(); ++i) process(i);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> workers;
        for (unsigned w = 0; w < std::min<size_t>(jobs, queries.size()); ++w) {
            workers.emplace_back([&] {
                for (size_t i = next.fetch_add(1); i < queries.size(); i = next.fetch_add(1))
                    process(i);
            });
        }
        for (auto& t : workers) t.join();
    }

    if (report) *report = std::move(local_report);
    return run;
}

}  // namespace bmq
