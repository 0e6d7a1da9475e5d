#include "bmq/corpus.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace bmq {

using nlohmann::json;

void Corpus::add(Document doc) {
    if (doc.id.empty()) throw MissingField("<memory>", docs_.size() + 1, "_id");
    auto [it, inserted] = by_id_.emplace(doc.id, docs_.size());
    if (!inserted) throw DuplicateId(doc.id);
    docs_.push_back(std::move(doc));
}

std::optional<size_t> Corpus::find(const std::string& doc_id) const {
    auto it = by_id_.find(doc_id);
    if (it == by_id_.end()) return std::nullopt;
    return it->second;
}

std::string Corpus::indexed_text(size_t ordinal) const {
    const Document& d = docs_.at(ordinal);
    return d.title + " " + d.body;
}

void Qrels::add(const std::string& query_id, const std::string& doc_id, int grade) {
    if (grade < 0) throw NonIntegerGrade("<memory>", 0, std::to_string(grade));
    auto [it, inserted] = by_query_[query_id].emplace(doc_id, grade);
    if (!inserted) throw DuplicateJudgment(query_id, doc_id);
}

int Qrels::grade(const std::string& query_id, const std::string& doc_id) const {
    auto q = by_query_.find(query_id);
    if (q == by_query_.end()) return 0;
    auto d = q->second.find(doc_id);
    return d == q->second.end() ? 0 : d->second;
}

bool Qrels::has_query(const std::string& query_id) const {
    return by_query_.count(query_id) > 0;
}

const std::map<std::string, int>& Qrels::for_query(const std::string& query_id) const {
    static const std::map<std::string, int> empty;
    auto q = by_query_.find(query_id);
    return q == by_query_.end() ? empty : q->second;
}

size_t Qrels::relevant_count(const std::string& query_id) const {
    size_t n = 0;
    for (const auto& [doc, grade] : for_query(query_id))
        if (grade > 0) ++n;
    return n;
}

std::vector<std::string> Qrels::query_ids() const {
    std::vector<std::string> ids;
    ids.reserve(by_query_.size());
    for (const auto& [q, _] : by_query_) ids.push_back(q);
    return ids;
}

size_t Qrels::judgment_count() const {
    size_t n = 0;
    for (const auto& [_, docs] : by_query_) n += docs.size();
    return n;
}

namespace {

// Parses one JSONL line; `line_no` is 1-based for error messages.
json parse_line(const std::string& path, size_t line_no, const std::string& line) {
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object())
        throw MalformedJson(path, line_no, "not a JSON object");
    return rec;
}

std::string require_string(const std::string& path, size_t line_no, const json& rec,
                           const char* field) {
    auto it = rec.find(field);
    if (it == rec.end() || it->is_null()) throw MissingField(path, line_no, field);
    if (it->is_string()) return it->get<std::string>();
    if (it->is_number_integer()) return std::to_string(it->get<long long>());
    throw MalformedJson(path, line_no, std::string("field '") + field + "' is not a string");
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    return in;
}

// JSON string escaping is delegated to nlohmann; we only control field order.
std::string dump_record(std::initializer_list<std::pair<const char*, const std::string*>> fields) {
    std::string out = "{";
    bool first = true;
    for (const auto& [key, value] : fields) {
        if (!first) out += ", ";
        first = false;
        out += json(key).dump();
        out += ": ";
        out += json(*value).dump();
    }
    out += "}";
    return out;
}

}  // namespace

Corpus load_corpus(const std::filesystem::path& path) {
    std::ifstream in = open_or_throw(path);
    Corpus corpus;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json rec = parse_line(path.string(), line_no, line);
        Document d;
        d.id = require_string(path.string(), line_no, rec, "_id");
        if (d.id.empty()) throw MissingField(path.string(), line_no, "_id");
        d.body = require_string(path.string(), line_no, rec, "text");
        if (rec.contains("title") && rec["title"].is_string())
            d.title = rec["title"].get<std::string>();
        corpus.add(std::move(d));
    }
    return corpus;
}

std::vector<Query> load_queries(const std::filesystem::path& path) {
    std::ifstream in = open_or_throw(path);
    std::vector<Query> queries;
    std::unordered_map<std::string, size_t> seen;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json rec = parse_line(path.string(), line_no, line);
        Query q;
        q.id = require_string(path.string(), line_no, rec, "_id");
        if (q.id.empty()) throw MissingField(path.string(), line_no, "_id");
        q.text = require_string(path.string(), line_no, rec, "text");
        if (!seen.emplace(q.id, line_no).second) throw DuplicateId(q.id);
        queries.push_back(std::move(q));
    }
    return queries;
}

Qrels load_qrels(const std::filesystem::path& path) {
    std::ifstream in = open_or_throw(path);
    std::string line;
    if (!std::getline(in, line)) throw BadHeader("empty qrels file " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "query-id\tcorpus-id\tscore")
        throw BadHeader("expected 'query-id\\tcorpus-id\\tscore', got '" + line + "'");

    Qrels qrels;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string qid, did, grade_str;
        if (!std::getline(ss, qid, '\t') || !std::getline(ss, did, '\t') ||
            !std::getline(ss, grade_str))
            throw FormatError(path.string() + ":" + std::to_string(line_no) +
                              ": expected three tab-separated columns");
        size_t pos = 0;
        int grade = 0;
        try {
            grade = std::stoi(grade_str, &pos);
        } catch (const std::exception&) {
            throw NonIntegerGrade(path.string(), line_no, grade_str);
        }
        if (pos != grade_str.size() || grade < 0)
            throw NonIntegerGrade(path.string(), line_no, grade_str);
        qrels.add(qid, did, grade);
    }
    return qrels;
}

void write_corpus(const std::filesystem::path& path, const Corpus& corpus) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    for (const Document& d : corpus)
        out << dump_record({{"_id", &d.id}, {"title", &d.title}, {"text", &d.body}}) << "\n";
}

void write_queries(const std::filesystem::path& path, const std::vector<Query>& queries) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    for (const Query& q : queries)
        out << dump_record({{"_id", &q.id}, {"text", &q.text}}) << "\n";
}

void write_qrels(const std::filesystem::path& path, const Qrels& qrels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << "query-id\tcorpus-id\tscore\n";
    for (const std::string& qid : qrels.query_ids())
        for (const auto& [did, grade] : qrels.for_query(qid))
            out << qid << '\t' << did << '\t' << grade << "\n";
}

}  // namespace bmq
