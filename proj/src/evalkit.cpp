#include "bmq/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "bmq/errors.hpp"

namespace bmq {

const std::vector<ScoredHit>* RunResult::find(const std::string& query_id) const {
    for (const auto& [qid, hits] : per_query)
        if (qid == query_id) return &hits;
    return nullptr;
}

namespace {

inline double gain(int grade, bool exp_gain) {
    return exp_gain ? std::exp2(static_cast<double>(grade)) - 1.0
                    : static_cast<double>(grade);
}

inline double discount(size_t rank1) {  // 1-based rank
    return std::log2(static_cast<double>(rank1) + 1.0);
}

}  // namespace

double ndcg_at_k(const std::vector<ScoredHit>& ranking,
                 const std::map<std::string, int>& qrels_for_query, int k, bool exp_gain) {
    std::vector<int> grades;
    for (const auto& [doc, g] : qrels_for_query)
        if (g > 0) grades.push_back(g);
    if (grades.empty()) return 0.0;

    std::sort(grades.rbegin(), grades.rend());
    double idcg = 0.0;
    for (size_t i = 0; i < grades.size() && i < static_cast<size_t>(k); ++i)
        idcg += gain(grades[i], exp_gain) / discount(i + 1);
    if (idcg <= 0.0) return 0.0;

    double dcg = 0.0;
    for (size_t i = 0; i < ranking.size() && i < static_cast<size_t>(k); ++i) {
        auto it = qrels_for_query.find(ranking[i].doc_id);
        if (it != qrels_for_query.end() && it->second > 0)
            dcg += gain(it->second, exp_gain) / discount(i + 1);
    }
    return dcg / idcg;
}

double map_at_k(const std::vector<ScoredHit>& ranking,
                const std::map<std::string, int>& qrels_for_query, int k) {
    size_t total_relevant = 0;
    for (const auto& [doc, g] : qrels_for_query)
        if (g > 0) ++total_relevant;
    if (total_relevant == 0) return 0.0;

    double sum = 0.0;
    size_t hits = 0;
    for (size_t i = 0; i < ranking.size() && i < static_cast<size_t>(k); ++i) {
        auto it = qrels_for_query.find(ranking[i].doc_id);
        if (it != qrels_for_query.end() && it->second > 0) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
    }
    return sum / static_cast<double>(total_relevant);
}

double recall_at_k(const std::vector<ScoredHit>& ranking,
                   const std::map<std::string, int>& qrels_for_query, int k) {
    size_t total_relevant = 0;
    for (const auto& [doc, g] : qrels_for_query)
        if (g > 0) ++total_relevant;
    if (total_relevant == 0) return 0.0;

    size_t hits = 0;
    for (size_t i = 0; i < ranking.size() && i < static_cast<size_t>(k); ++i) {
        auto it = qrels_for_query.find(ranking[i].doc_id);
        if (it != qrels_for_query.end() && it->second > 0) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(total_relevant);
}

MetricReport evaluate(const RunResult& run, const Qrels& qrels, int k, bool exp_gain) {
    MetricReport report;
    report.k = k;

    std::set<std::string> judged;
    for (const std::string& qid : qrels.query_ids()) judged.insert(qid);

    bool any_shared = false;
    for (const auto& [qid, hits] : run.per_query) {
        if (judged.count(qid)) any_shared = true;
        else ++report.run_only_queries;
    }
    if (!any_shared) throw EmptyIntersection();

    static const std::vector<ScoredHit> no_hits;
    // Aggregation runs in sorted query-id order so the means are bit-stable
    // regardless of how the run was assembled.
    double sum_ndcg = 0.0, sum_map = 0.0, sum_recall = 0.0;
    for (const std::string& qid : qrels.query_ids()) {
        const std::vector<ScoredHit>* hits = run.find(qid);
        if (!hits) hits = &no_hits;
        const auto& judgments = qrels.for_query(qid);
        MetricValues v;
        v.ndcg = ndcg_at_k(*hits, judgments, k, exp_gain);
        v.map = map_at_k(*hits, judgments, k);
        v.recall = recall_at_k(*hits, judgments, k);
        report.per_query.emplace(qid, v);
        sum_ndcg += v.ndcg;
        sum_map += v.map;
        sum_recall += v.recall;
        ++report.evaluated_queries;
    }
    if (report.evaluated_queries > 0) {
        const double n = static_cast<double>(report.evaluated_queries);
        report.mean = {sum_ndcg / n, sum_map / n, sum_recall / n};
    }
    return report;
}

void write_trec_run(const std::filesystem::path& path, const RunResult& run) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    char score_buf[64];
    for (const auto& [qid, hits] : run.per_query) {
        for (const ScoredHit& h : hits) {
            std::snprintf(score_buf, sizeof(score_buf), "%.6f", h.score);
            out << qid << " Q0 " << h.doc_id << ' ' << h.rank << ' ' << score_buf << ' '
                << (run.tag.empty() ? "bmq" : run.tag) << "\n";
        }
    }
    if (!out) throw Error("write failed: " + path.string());
}

RunResult read_trec_run(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    RunResult run;
    std::map<std::string, size_t> slot;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string qid, q0, did, rank_s, score_s, tag;
        if (!(ss >> qid >> q0 >> did >> rank_s >> score_s >> tag))
            throw FormatError(path.string() + ":" + std::to_string(line_no) +
                              ": expected 'qid Q0 docid rank score tag'");
        ScoredHit hit;
        hit.doc_id = did;
        try {
            hit.rank = static_cast<uint32_t>(std::stoul(rank_s));
            hit.score = std::stod(score_s);
        } catch (const std::exception&) {
            throw FormatError(path.string() + ":" + std::to_string(line_no) +
                              ": bad rank or score");
        }
        auto [it, inserted] = slot.emplace(qid, run.per_query.size());
        if (inserted) run.per_query.emplace_back(qid, std::vector<ScoredHit>{});
        auto& hits = run.per_query[it->second].second;
        hits.push_back(std::move(hit));
        if (run.tag.empty()) run.tag = tag;
    }
    for (auto& [qid, hits] : run.per_query) {
        std::sort(hits.begin(), hits.end(), [](const ScoredHit& a, const ScoredHit& b) {
            if (a.score != b.score) return a.score > b.score;
            return a.doc_id < b.doc_id;
        });
        std::set<std::string> seen;
        for (size_t i = 0; i < hits.size(); ++i) {
            if (!seen.insert(hits[i].doc_id).second)
                throw FormatError(path.string() + ": duplicate doc '" + hits[i].doc_id +
                                  "' for query '" + qid + "'");
            hits[i].rank = static_cast<uint32_t>(i + 1);
        }
    }
    return run;
}

std::string format_report_text(const MetricReport& report) {
    std::ostringstream out;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%-12s %8s %8s %8s\n", "metric@k", "NDCG", "mAP", "Recall");
    out << buf;
    std::snprintf(buf, sizeof(buf), "mean@%-7d %8.4f %8.4f %8.4f\n", report.k,
                  report.mean.ndcg, report.mean.map, report.mean.recall);
    out << buf;
    out << "queries evaluated: " << report.evaluated_queries;
    if (report.run_only_queries > 0)
        out << "  (skipped " << report.run_only_queries << " unjudged run-only queries)";
    out << "\n";
    return out.str();
}

std::string format_report_json(const MetricReport& report) {
    nlohmann::json j;
    j["k"] = report.k;
    j["mean"] = {{"ndcg", report.mean.ndcg},
                 {"map", report.mean.map},
                 {"recall", report.mean.recall}};
    j["evaluated_queries"] = report.evaluated_queries;
    j["run_only_queries"] = report.run_only_queries;
    nlohmann::json per;
    for (const auto& [qid, v] : report.per_query)
        per[qid] = {{"ndcg", v.ndcg}, {"map", v.map}, {"recall", v.recall}};
    j["per_query"] = per;
    return j.dump(2) + "\n";
}

}  // namespace bmq
