#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bmq/corpus.hpp"
#include "bmq/tokenize.hpp"

namespace bmq {

struct Posting {
    uint32_t doc;  // document ordinal
    uint32_t tf;   // term frequency, >= 1
    bool operator==(const Posting&) const = default;
};

struct Bm25Params {
    double k1 = 0.9;
    double b = 0.4;
};

struct ScoredHit {
    std::string doc_id;
    double score = 0.0;
    uint32_t rank = 0;  // 1-based
    bool operator==(const ScoredHit&) const = default;
};

/// Immutable inverted index with BM25 scoring. Postings are keyed by term in
/// lexicographic order so serialization and rebuilds are byte-stable.
class InvertedIndex {
public:
    /// `jobs` partitions documents across workers; the merged result is
    /// canonical regardless of partitioning.
    static InvertedIndex build(const Corpus& corpus, TokenizerOptions tok = {},
                               unsigned jobs = 1);

    size_t doc_count() const { return doc_ids_.size(); }
    double avg_doc_len() const { return avg_doc_len_; }
    uint32_t doc_length(size_t ordinal) const;
    const std::string& doc_id(size_t ordinal) const;
    size_t vocab_size() const { return postings_.size(); }
    const TokenizerOptions& tokenizer() const { return tok_; }

    /// nullptr when the term is not in the vocabulary.
    const std::vector<Posting>* postings(const std::string& term) const;

    /// Lucene-style non-negative IDF: ln(1 + (N - df + 0.5) / (df + 0.5)).
    /// Unknown terms get df = 0.
    double idf(const std::string& term) const;

    /// BM25 over the given token list; repeated query tokens each contribute a
    /// full per-term score. Unique terms are summed in sorted order so results
    /// do not depend on token order or thread count.
    double bm25_score(std::span<const std::string> query_tokens, size_t ordinal,
                      const Bm25Params& params = {}) const;

    /// Top-k by score, ties broken by ascending doc_id; zero scores excluded.
    std::vector<ScoredHit> search(std::string_view query_text, size_t k,
                                  const Bm25Params& params = {}) const;
    std::vector<ScoredHit> search_tokens(std::span<const std::string> query_tokens, size_t k,
                                         const Bm25Params& params = {}) const;

    void save(const std::filesystem::path& path) const;
    static InvertedIndex load(const std::filesystem::path& path);

private:
    std::map<std::string, std::vector<Posting>> postings_;
    std::vector<uint32_t> doc_lengths_;
    std::vector<std::string> doc_ids_;
    double avg_doc_len_ = 0.0;
    TokenizerOptions tok_;
};

}  // namespace bmq
