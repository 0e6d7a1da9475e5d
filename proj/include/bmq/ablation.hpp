#pragma once

#include <string>
#include <vector>

#include "bmq/evalkit.hpp"
#include "bmq/pipeline.hpp"

namespace bmq {

struct AblationRow {
    Mode mode;
    MetricValues metrics;
};

/// Runs all five pipeline configurations over the same index and query set
/// and evaluates each against the qrels at cut `metric_k`.
std::vector<AblationRow> ablation_report(const std::vector<Query>& queries,
                                         const InvertedIndex& index, const Qrels& qrels,
                                         PipelineConfig base, Backends backends,
                                         int metric_k = 10, BatchReport* report = nullptr);

/// Aligned-column table: Configuration | NDCG@k | mAP@k | Recall@k.
std::string format_ablation_table(const std::vector<AblationRow>& rows, int metric_k);

/// Tab-separated, 4-decimal values; stable for golden comparisons.
std::string format_ablation_tsv(const std::vector<AblationRow>& rows);

}  // namespace bmq
