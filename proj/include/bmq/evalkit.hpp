#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "bmq/corpus.hpp"
#include "bmq/index.hpp"

namespace bmq {

/// Ranked lists for a set of queries, in canonical (insertion) query order.
/// Within a query: descending score, ties by ascending doc_id, no duplicates.
struct RunResult {
    std::vector<std::pair<std::string, std::vector<ScoredHit>>> per_query;
    std::string tag;

    const std::vector<ScoredHit>* find(const std::string& query_id) const;
};

struct MetricValues {
    double ndcg = 0.0;
    double map = 0.0;
    double recall = 0.0;
};

struct MetricReport {
    int k = 10;
    std::map<std::string, MetricValues> per_query;
    MetricValues mean;
    size_t evaluated_queries = 0;   // queries contributing to the means
    size_t run_only_queries = 0;    // in run but not qrels: skipped with a warning count
};

/// NDCG@k with linear gains (rel / log2(rank+1)); IDCG from grades sorted
/// descending, cut at k. Queries with no relevant documents score 0.
/// `exp_gain` switches to (2^rel - 1) gains.
double ndcg_at_k(const std::vector<ScoredHit>& ranking,
                 const std::map<std::string, int>& qrels_for_query, int k,
                 bool exp_gain = false);

/// AP@k = (1/R) * sum over relevant ranks i <= k of Precision@i, with R the
/// total relevant count in the qrels (binary: grade > 0).
double map_at_k(const std::vector<ScoredHit>& ranking,
                const std::map<std::string, int>& qrels_for_query, int k);

/// |relevant in top-k| / R.
double recall_at_k(const std::vector<ScoredHit>& ranking,
                   const std::map<std::string, int>& qrels_for_query, int k);

/// Joins a run with qrels. Queries judged but absent from the run score 0 and
/// are averaged; queries in the run without judgments are counted and skipped.
/// Throws EmptyIntersection when no query id is shared.
MetricReport evaluate(const RunResult& run, const Qrels& qrels, int k = 10,
                      bool exp_gain = false);

// TREC run files: "qid Q0 docid rank score tag", 6-decimal fixed-point score.
void write_trec_run(const std::filesystem::path& path, const RunResult& run);
RunResult read_trec_run(const std::filesystem::path& path);

std::string format_report_text(const MetricReport& report);
std::string format_report_json(const MetricReport& report);

}  // namespace bmq
