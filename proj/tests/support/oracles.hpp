// Independent brute-force reference implementations used as test oracles.
// These are written directly from the scoring/metric formulas and stay
// independent of the engine code paths they check.

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace bmq::testing {

struct OracleHit {
    std::string doc_id;
    double score;
};

/// BM25 from raw token lists: df/tf/lengths recomputed from scratch here.
/// Per-document score sums unique query terms in sorted order, one full
/// contribution per repeated query token.
inline std::vector<double> oracle_bm25_scores(
    const std::vector<std::vector<std::string>>& docs_tokens,
    const std::vector<std::string>& query_tokens, double k1, double b) {
    const size_t n = docs_tokens.size();
    double total_len = 0;
    for (const auto& d : docs_tokens) total_len += static_cast<double>(d.size());
    const double avg_len = total_len / static_cast<double>(n);

    std::map<std::string, size_t> qtf;
    for (const auto& t : query_tokens) ++qtf[t];

    std::vector<double> scores(n, 0.0);
    for (const auto& [term, reps] : qtf) {
        size_t df = 0;
        for (const auto& d : docs_tokens)
            if (std::find(d.begin(), d.end(), term) != d.end()) ++df;
        if (df == 0) continue;
        const double idf =
            std::log(1.0 + (static_cast<double>(n) - static_cast<double>(df) + 0.5) /
                               (static_cast<double>(df) + 0.5));
        for (size_t i = 0; i < n; ++i) {
            const double tf = static_cast<double>(
                std::count(docs_tokens[i].begin(), docs_tokens[i].end(), term));
            if (tf == 0) continue;
            const double len = static_cast<double>(docs_tokens[i].size());
            scores[i] += static_cast<double>(reps) * idf * (tf * (k1 + 1.0)) /
                         (tf + k1 * (1.0 - b + b * len / avg_len));
        }
    }
    return scores;
}

/// Score-everything-and-sort: descending score, ties by ascending doc id,
/// zero scores excluded, truncated to k.
inline std::vector<OracleHit> oracle_search(
    const std::vector<std::vector<std::string>>& docs_tokens,
    const std::vector<std::string>& doc_ids, const std::vector<std::string>& query_tokens,
    size_t k, double k1, double b) {
    auto scores = oracle_bm25_scores(docs_tokens, query_tokens, k1, b);
    std::vector<OracleHit> hits;
    for (size_t i = 0; i < scores.size(); ++i)
        if (scores[i] > 0.0) hits.push_back({doc_ids[i], scores[i]});
    std::sort(hits.begin(), hits.end(), [](const OracleHit& a, const OracleHit& b2) {
        if (a.score != b2.score) return a.score > b2.score;
        return a.doc_id < b2.doc_id;
    });
    if (hits.size() > k) hits.resize(k);
    return hits;
}

// ---- rank metrics, straight from the formulas ----

inline double oracle_ndcg(const std::vector<std::string>& ranked_ids,
                          const std::map<std::string, int>& judgments, int k,
                          bool exp_gain = false) {
    auto gain = [exp_gain](int g) {
        return exp_gain ? std::pow(2.0, g) - 1.0 : static_cast<double>(g);
    };
    std::vector<int> grades;
    for (const auto& [d, g] : judgments)
        if (g > 0) grades.push_back(g);
    if (grades.empty()) return 0.0;
    std::sort(grades.begin(), grades.end(), std::greater<int>());
    double idcg = 0.0;
    for (size_t i = 0; i < grades.size() && i < size_t(k); ++i)
        idcg += gain(grades[i]) / std::log2(double(i) + 2.0);
    double dcg = 0.0;
    for (size_t i = 0; i < ranked_ids.size() && i < size_t(k); ++i) {
        auto it = judgments.find(ranked_ids[i]);
        if (it != judgments.end() && it->second > 0)
            dcg += gain(it->second) / std::log2(double(i) + 2.0);
    }
    return idcg > 0 ? dcg / idcg : 0.0;
}

inline double oracle_map(const std::vector<std::string>& ranked_ids,
                         const std::map<std::string, int>& judgments, int k) {
    size_t relevant_total = 0;
    for (const auto& [d, g] : judgments)
        if (g > 0) ++relevant_total;
    if (relevant_total == 0) return 0.0;
    double sum = 0.0;
    size_t seen = 0;
    for (size_t i = 0; i < ranked_ids.size() && i < size_t(k); ++i) {
        auto it = judgments.find(ranked_ids[i]);
        if (it != judgments.end() && it->second > 0) {
            ++seen;
            sum += double(seen) / double(i + 1);
        }
    }
    return sum / double(relevant_total);
}

inline double oracle_recall(const std::vector<std::string>& ranked_ids,
                            const std::map<std::string, int>& judgments, int k) {
    std::set<std::string> relevant;
    for (const auto& [d, g] : judgments)
        if (g > 0) relevant.insert(d);
    if (relevant.empty()) return 0.0;
    size_t seen = 0;
    for (size_t i = 0; i < ranked_ids.size() && i < size_t(k); ++i)
        if (relevant.count(ranked_ids[i])) ++seen;
    return double(seen) / double(relevant.size());
}

}  // namespace bmq::testing
