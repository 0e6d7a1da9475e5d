#include "bmq/ablation.hpp"

#include <cstdio>
#include <sstream>

namespace bmq {

std::vector<AblationRow> ablation_report(const std::vector<Query>& queries,
                                         const InvertedIndex& index, const Qrels& qrels,
                                         PipelineConfig base, Backends backends, int metric_k,
                                         BatchReport* report) {
    static constexpr Mode kLadder[] = {Mode::plain_bm25, Mode::no_llm, Mode::definitions_only,
                                       Mode::relations_only, Mode::full};
    std::vector<AblationRow> rows;
    for (Mode mode : kLadder) {
        PipelineConfig config = base;
        config.mode = mode;
        BatchReport mode_report;
        RunResult run = run_batch(queries, index, config, backends, &mode_report);
        if (report) {
            report->fallback_count += mode_report.fallback_count;
            report->failures.insert(report->failures.end(), mode_report.failures.begin(),
                                    mode_report.failures.end());
            report->replay_misses.insert(report->replay_misses.end(),
                                         mode_report.replay_misses.begin(),
                                         mode_report.replay_misses.end());
        }
        MetricReport metrics = evaluate(run, qrels, metric_k);
        rows.push_back({mode, metrics.mean});
    }
    return rows;
}

std::string format_ablation_table(const std::vector<AblationRow>& rows, int metric_k) {
    std::ostringstream out;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-18s %10s %10s %10s\n", "Configuration",
                  ("NDCG@" + std::to_string(metric_k)).c_str(),
                  ("mAP@" + std::to_string(metric_k)).c_str(),
                  ("Recall@" + std::to_string(metric_k)).c_str());
    out << buf;
    for (const AblationRow& row : rows) {
        std::snprintf(buf, sizeof(buf), "%-18s %10.4f %10.4f %10.4f\n",
                      mode_name(row.mode).c_str(), row.metrics.ndcg, row.metrics.map,
                      row.metrics.recall);
        out << buf;
    }
    return out.str();
}

std::string format_ablation_tsv(const std::vector<AblationRow>& rows) {
    std::ostringstream out;
    out << "configuration\tndcg\tmap\trecall\n";
    char buf[96];
    for (const AblationRow& row : rows) {
        std::snprintf(buf, sizeof(buf), "%s\t%.4f\t%.4f\t%.4f\n", mode_name(row.mode).c_str(),
                      row.metrics.ndcg, row.metrics.map, row.metrics.recall);
        out << buf;
    }
    return out.str();
}

}  // namespace bmq
