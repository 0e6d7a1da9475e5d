#include "bmq/index.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <fstream>
#include <thread>

#include "bmq/errors.hpp"

namespace bmq {

namespace {

std::map<std::string, uint32_t> term_counts(std::span<const std::string> tokens) {
    std::map<std::string, uint32_t> counts;
    for (const std::string& t : tokens) ++counts[t];
    return counts;
}

}  // namespace

InvertedIndex InvertedIndex::build(const Corpus& corpus, TokenizerOptions tok, unsigned jobs) {
    if (corpus.empty()) throw EmptyCorpus();

    InvertedIndex index;
    index.tok_ = tok;
    const size_t n = corpus.size();
    index.doc_ids_.resize(n);
    index.doc_lengths_.resize(n);

    // Per-document term counts are independent; compute them in parallel and
    // merge into the sorted postings map in ordinal order afterwards.
    std::vector<std::map<std::string, uint32_t>> per_doc(n);
    jobs = std::max(1u, jobs);
    if (jobs == 1 || n < 2 * jobs) {
        for (size_t i = 0; i < n; ++i) {
            auto tokens = tokenize(corpus.indexed_text(i), tok);
            index.doc_lengths_[i] = static_cast<uint32_t>(tokens.size());
            per_doc[i] = term_counts(tokens);
        }
    } else {
        std::vector<std::thread> workers;
        std::atomic<size_t> next{0};
        for (unsigned w = 0; w < jobs; ++w) {
            workers.emplace_back([&] {
                for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                    auto tokens = tokenize(corpus.indexed_text(i), tok);
                    index.doc_lengths_[i] = static_cast<uint32_t>(tokens.size());
                    per_doc[i] = term_counts(tokens);
                }
            });
        }
        for (auto& t : workers) t.join();
    }

    uint64_t total_len = 0;
    for (size_t i = 0; i < n; ++i) {
        index.doc_ids_[i] = corpus.at(i).id;
        total_len += index.doc_lengths_[i];
        for (const auto& [term, tf] : per_doc[i])
            index.postings_[term].push_back({static_cast<uint32_t>(i), tf});
    }
    index.avg_doc_len_ = static_cast<double>(total_len) / static_cast<double>(n);
    return index;
}

uint32_t InvertedIndex::doc_length(size_t ordinal) const {
    if (ordinal >= doc_lengths_.size()) throw OrdinalOutOfRange(ordinal, doc_lengths_.size());
    return doc_lengths_[ordinal];
}

const std::string& InvertedIndex::doc_id(size_t ordinal) const {
    if (ordinal >= doc_ids_.size()) throw OrdinalOutOfRange(ordinal, doc_ids_.size());
    return doc_ids_[ordinal];
}

const std::vector<Posting>* InvertedIndex::postings(const std::string& term) const {
    auto it = postings_.find(term);
    return it == postings_.end() ? nullptr : &it->second;
}

double InvertedIndex::idf(const std::string& term) const {
    const auto* plist = postings(term);
    const double df = plist ? static_cast<double>(plist->size()) : 0.0;
    const double n = static_cast<double>(doc_count());
    return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

double InvertedIndex::bm25_score(std::span<const std::string> query_tokens, size_t ordinal,
                                 const Bm25Params& params) const {
    if (ordinal >= doc_count()) throw OrdinalOutOfRange(ordinal, doc_count());
    const auto counts = term_counts(query_tokens);
    const double len = doc_lengths_[ordinal];
    const double norm = params.k1 * (1.0 - params.b + params.b * len / avg_doc_len_);
    double score = 0.0;
    for (const auto& [term, qtf] : counts) {
        const auto* plist = postings(term);
        if (!plist) continue;
        auto it = std::lower_bound(plist->begin(), plist->end(),
                                   static_cast<uint32_t>(ordinal),
                                   [](const Posting& p, uint32_t doc) { return p.doc < doc; });
        if (it == plist->end() || it->doc != ordinal) continue;
        const double tf = it->tf;
        score += qtf * idf(term) * (tf * (params.k1 + 1.0)) / (tf + norm);
    }
    return score;
}

std::vector<ScoredHit> InvertedIndex::search_tokens(std::span<const std::string> query_tokens,
                                                    size_t k, const Bm25Params& params) const {
    std::vector<ScoredHit> hits;
    if (k == 0 || query_tokens.empty()) return hits;

    const auto counts = term_counts(query_tokens);
    std::vector<double> scores(doc_count(), 0.0);
    std::vector<char> touched(doc_count(), 0);

    // Term-at-a-time in sorted term order: same summation order as bm25_score.
    for (const auto& [term, qtf] : counts) {
        const auto* plist = postings(term);
        if (!plist) continue;
        const double w = qtf * idf(term);
        for (const Posting& p : *plist) {
            const double len = doc_lengths_[p.doc];
            const double norm =
                params.k1 * (1.0 - params.b + params.b * len / avg_doc_len_);
            const double tf = p.tf;
            scores[p.doc] += w * (tf * (params.k1 + 1.0)) / (tf + norm);
            touched[p.doc] = 1;
        }
    }

    for (size_t i = 0; i < scores.size(); ++i)
        if (touched[i] && scores[i] > 0.0)
            hits.push_back({doc_ids_[i], scores[i], 0});

    std::sort(hits.begin(), hits.end(), [](const ScoredHit& a, const ScoredHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc_id < b.doc_id;
    });
    if (hits.size() > k) hits.resize(k);
    for (size_t i = 0; i < hits.size(); ++i) hits[i].rank = static_cast<uint32_t>(i + 1);
    return hits;
}

std::vector<ScoredHit> InvertedIndex::search(std::string_view query_text, size_t k,
                                             const Bm25Params& params) const {
    return search_tokens(tokenize(query_text, tok_), k, params);
}

// ---- on-disk snapshot ----
//
// Little-endian binary: magic, format version, tokenizer flags, doc table
// (id + length per ordinal), then postings sorted by term.

namespace {

constexpr char kMagic[8] = {'B', 'M', 'Q', 'I', 'N', 'D', 'E', 'X'};
constexpr uint32_t kVersion = 1;

void put_u32(std::ostream& out, uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw FormatError("truncated index file");
    return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
           (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

void put_string(std::ostream& out, const std::string& s) {
    put_u32(out, static_cast<uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& in) {
    uint32_t len = get_u32(in);
    std::string s(len, '\0');
    in.read(s.data(), len);
    if (!in) throw FormatError("truncated index file");
    return s;
}

}  // namespace

void InvertedIndex::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out.write(kMagic, sizeof(kMagic));
    put_u32(out, kVersion);
    put_u32(out, tok_.stem ? 1 : 0);
    put_u32(out, static_cast<uint32_t>(doc_count()));
    for (size_t i = 0; i < doc_count(); ++i) {
        put_string(out, doc_ids_[i]);
        put_u32(out, doc_lengths_[i]);
    }
    put_u32(out, static_cast<uint32_t>(postings_.size()));
    for (const auto& [term, plist] : postings_) {
        put_string(out, term);
        put_u32(out, static_cast<uint32_t>(plist.size()));
        for (const Posting& p : plist) {
            put_u32(out, p.doc);
            put_u32(out, p.tf);
        }
    }
    if (!out) throw Error("write failed: " + path.string());
}

InvertedIndex InvertedIndex::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw FormatError(path.string() + ": not an index file (bad magic)");
    uint32_t version = get_u32(in);
    if (version != kVersion)
        throw FormatError(path.string() + ": unsupported index format version " +
                          std::to_string(version));
    InvertedIndex index;
    index.tok_.stem = get_u32(in) != 0;
    uint32_t n = get_u32(in);
    index.doc_ids_.resize(n);
    index.doc_lengths_.resize(n);
    uint64_t total = 0;
    for (uint32_t i = 0; i < n; ++i) {
        index.doc_ids_[i] = get_string(in);
        index.doc_lengths_[i] = get_u32(in);
        total += index.doc_lengths_[i];
    }
    index.avg_doc_len_ = n ? static_cast<double>(total) / n : 0.0;
    uint32_t vocab = get_u32(in);
    for (uint32_t t = 0; t < vocab; ++t) {
        std::string term = get_string(in);
        uint32_t m = get_u32(in);
        std::vector<Posting> plist(m);
        for (uint32_t j = 0; j < m; ++j) {
            plist[j].doc = get_u32(in);
            plist[j].tf = get_u32(in);
        }
        index.postings_.emplace(std::move(term), std::move(plist));
    }
    return index;
}

}  // namespace bmq
