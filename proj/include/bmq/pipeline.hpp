#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bmq/context.hpp"
#include "bmq/evalkit.hpp"
#include "bmq/index.hpp"
#include "bmq/llm.hpp"
#include "bmq/ontology.hpp"

namespace bmq {

enum class Mode { full, no_llm, definitions_only, relations_only, plain_bm25 };

std::string mode_name(Mode mode);
std::optional<Mode> parse_mode(std::string_view name);

struct PipelineConfig {
    Mode mode = Mode::full;
    int alpha = 5;               // effective default depends on mode, see effective_alpha()
    bool alpha_overridden = false;
    bool cot = false;
    size_t edge_cap = 50;
    Bm25Params bm25;
    size_t k = 1000;             // retrieved depth; metrics cut at 10 downstream
    unsigned jobs = 1;
    LlmOptions llm;

    /// no_llm defaults to alpha = 50 unless explicitly overridden.
    int effective_alpha() const;
};

struct Backends {
    OntologyBackend* ontology = nullptr;
    LlmBackend* llm = nullptr;
};

struct ExpandedQuery {
    Query original;
    std::optional<PseudoDocument> pseudo_doc;  // absent for plain_bm25 / empty-term fallback
    int alpha = 1;
    std::string composed_text;
    TermSet terms;
    SerializedContext context;
    bool fell_back = false;          // a backend failure degraded this query to plain BM25
    std::string failure;             // what went wrong, when fell_back
};

/// alpha copies of q then p, single-space separators. Throws InvalidAlpha
/// when alpha < 1.
std::string compose_expanded_query(std::string_view query, std::optional<std::string_view> pseudo,
                                   int alpha);

/// The five-stage expansion for one query. Backend failures never escape:
/// the query degrades to its raw text with fell_back set. ReplayMiss is the
/// exception — it signals missing fixtures, a configuration error.
ExpandedQuery expand(const Query& query, const PipelineConfig& config, Backends backends);

struct BatchReport {
    size_t fallback_count = 0;
    std::vector<std::pair<std::string, std::string>> failures;  // (query_id, reason)
    std::vector<std::string> replay_misses;                     // missing fixture hashes
};

/// Expands and searches every query; ranked lists are assembled in input
/// query order regardless of worker interleaving.
RunResult run_batch(const std::vector<Query>& queries, const InvertedIndex& index,
                    const PipelineConfig& config, Backends backends,
                    BatchReport* report = nullptr);

}  // namespace bmq
