#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "bmq/errors.hpp"

namespace bmq {

struct Document {
    std::string id;     // non-empty, unique within a corpus
    std::string title;  // may be empty
    std::string body;
};

struct Query {
    std::string id;
    std::string text;
};

/// An ordered, immutable-after-load document collection.
class Corpus {
public:
    void add(Document doc);

    size_t size() const { return docs_.size(); }
    bool empty() const { return docs_.empty(); }
    const Document& at(size_t ordinal) const { return docs_.at(ordinal); }
    std::optional<size_t> find(const std::string& doc_id) const;

    /// The exact text fed to the indexer: title + " " + body, nothing else.
    std::string indexed_text(size_t ordinal) const;

    auto begin() const { return docs_.begin(); }
    auto end() const { return docs_.end(); }

private:
    std::vector<Document> docs_;
    std::unordered_map<std::string, size_t> by_id_;
};

/// Per-(query, document) relevance grades. Absent pairs read as grade 0.
class Qrels {
public:
    void add(const std::string& query_id, const std::string& doc_id, int grade);

    int grade(const std::string& query_id, const std::string& doc_id) const;
    bool has_query(const std::string& query_id) const;
    /// Judged documents for one query (empty map if the query is unknown).
    const std::map<std::string, int>& for_query(const std::string& query_id) const;
    /// Number of documents with grade > 0 for this query.
    size_t relevant_count(const std::string& query_id) const;

    std::vector<std::string> query_ids() const;  // sorted
    size_t query_count() const { return by_query_.size(); }
    size_t judgment_count() const;

private:
    std::map<std::string, std::map<std::string, int>> by_query_;
};

// BEIR on-disk layout: corpus.jsonl / queries.jsonl / qrels/*.tsv.

Corpus load_corpus(const std::filesystem::path& path);
std::vector<Query> load_queries(const std::filesystem::path& path);
Qrels load_qrels(const std::filesystem::path& path);

void write_corpus(const std::filesystem::path& path, const Corpus& corpus);
void write_queries(const std::filesystem::path& path, const std::vector<Query>& queries);
void write_qrels(const std::filesystem::path& path, const Qrels& qrels);

}  // namespace bmq
