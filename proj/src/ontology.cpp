#include "bmq/ontology.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

#include <json.hpp>

namespace bmq {

using nlohmann::json;

Cui::Cui(std::string value) : value_(std::move(value)) {
    bool ok = value_.size() == 8 && value_[0] == 'C';
    for (size_t i = 1; ok && i < 8; ++i) ok = value_[i] >= '0' && value_[i] <= '9';
    if (!ok) throw FormatError("'" + value_ + "' is not a CUI (expected C followed by 7 digits)");
}

bool is_allowed_vocabulary(std::string_view code) {
    return code == "MSH" || code == "SNOMEDCT_US" || code == "NCI" || code == "CSP";
}

std::string vocabulary_display_name(std::string_view code) {
    if (code == "MSH") return "MeSH";
    if (code == "SNOMEDCT_US") return "SNOMED CT, US Edition";
    if (code == "NCI") return "National Cancer Institute (NCI) Thesaurus";
    if (code == "CSP") return "CRISP Thesaurus";
    throw FormatError("unknown vocabulary code '" + std::string(code) + "'");
}

RelationLabel RelationLabel::parse(std::string_view text) {
    auto colon = text.find(':');
    if (colon == std::string_view::npos) return {std::string(text), ""};
    return {std::string(text.substr(0, colon)), std::string(text.substr(colon + 1))};
}

const std::string* SemanticGraph::node_name(const Cui& cui) const {
    for (const GraphNode& n : nodes)
        if (n.cui == cui) return &n.name;
    return nullptr;
}

RelationFilter::RelationFilter()
    : whitelist_{{"CHD", ""},
                 {"PAR", ""},
                 {"SY", ""},
                 {"RO", ""},
                 {"RO", "has_associated_morphology"}} {}

bool RelationFilter::allows(const RelationLabel& label) const {
    return std::find(whitelist_.begin(), whitelist_.end(), label) != whitelist_.end();
}

SemanticGraph prune_edges(const SemanticGraph& graph, const RelationFilter& filter) {
    SemanticGraph pruned(graph.center, graph.center_name);
    for (const GraphEdge& e : graph.edges)
        if (filter.allows(e.label)) pruned.edges.push_back(e);

    std::set<std::string> touched;
    touched.insert(graph.center.value());
    for (const GraphEdge& e : pruned.edges) {
        touched.insert(e.from.value());
        touched.insert(e.to.value());
    }
    for (const GraphNode& n : graph.nodes)
        if (touched.count(n.cui.value())) pruned.nodes.push_back(n);
    return pruned;
}

std::string trim(std::string_view s) {
    size_t begin = 0, end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return std::string(s.substr(begin, end - begin));
}

std::string casefold_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

// ---- snapshot store ----

SnapshotStore::SnapshotStore(const std::filesystem::path& path, size_t max_edges) {
    records_ = read_snapshot(path);
    max_edges_ = max_edges;
    build_lookup();
}

SnapshotStore SnapshotStore::from_records(std::vector<SnapshotRecord> records,
                                          size_t max_edges) {
    SnapshotStore store;
    store.records_ = std::move(records);
    store.max_edges_ = max_edges;
    store.build_lookup();
    return store;
}

void SnapshotStore::build_lookup() {
    for (size_t i = 0; i < records_.size(); ++i) {
        const SnapshotRecord& r = records_[i];
        by_cui_.emplace(r.cui, i);
        // first record wins, mirroring "select the top concept"
        by_term_.emplace(casefold_ascii(trim(r.name)), i);
        for (const std::string& alias : r.aliases)
            by_term_.emplace(casefold_ascii(trim(alias)), i);
    }
}

std::optional<std::pair<Cui, std::string>> SnapshotStore::link_concept(std::string_view term) {
    auto it = by_term_.find(casefold_ascii(trim(term)));
    if (it == by_term_.end()) return std::nullopt;
    const SnapshotRecord& r = records_[it->second];
    return std::make_pair(Cui(r.cui), r.name);
}

std::vector<DefinitionEntry> SnapshotStore::fetch_definitions(const Cui& cui) {
    auto it = by_cui_.find(cui.value());
    if (it == by_cui_.end()) return {};
    std::vector<DefinitionEntry> out;
    for (const DefinitionEntry& d : records_[it->second].definitions)
        if (is_allowed_vocabulary(d.source)) out.push_back(d);
    return out;
}

SemanticGraph SnapshotStore::fetch_neighborhood(const Cui& cui) {
    SemanticGraph g(cui);
    auto it = by_cui_.find(cui.value());
    if (it == by_cui_.end()) {
        g.center_name = cui.value();
        g.nodes.push_back({cui, g.center_name});
        return g;
    }
    const SnapshotRecord& r = records_[it->second];
    g.center_name = r.name;
    g.nodes.push_back({cui, r.name});
    std::set<std::string> node_set{cui.value()};
    for (const auto& rel : r.relations) {
        if (g.edges.size() >= max_edges_) break;
        Cui to(rel.to);
        g.edges.push_back({cui, to, RelationLabel::parse(rel.label)});
        if (node_set.insert(rel.to).second) g.nodes.push_back({to, rel.to_name});
    }
    return g;
}

// ---- snapshot file I/O ----

void write_snapshot(const std::filesystem::path& path,
                    const std::vector<SnapshotRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    for (const SnapshotRecord& r : records) {
        json defs = json::array();
        for (const DefinitionEntry& d : r.definitions)
            defs.push_back({{"text", d.text}, {"source", d.source}});
        json rels = json::array();
        for (const auto& rel : r.relations)
            rels.push_back({{"to", rel.to}, {"to_name", rel.to_name}, {"label", rel.label}});
        json rec{{"cui", r.cui}, {"name", r.name}, {"definitions", defs}, {"relations", rels}};
        if (!r.aliases.empty()) rec["aliases"] = r.aliases;
        out << rec.dump() << "\n";
    }
}

std::vector<SnapshotRecord> read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::vector<SnapshotRecord> records;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json rec = json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.is_object())
            throw MalformedJson(path.string(), line_no, "not a JSON object");
        if (!rec.contains("cui")) throw MissingField(path.string(), line_no, "cui");
        if (!rec.contains("name")) throw MissingField(path.string(), line_no, "name");
        SnapshotRecord r;
        r.cui = rec["cui"].get<std::string>();
        (void)Cui(r.cui);  // validate format
        r.name = rec["name"].get<std::string>();
        for (const json& d : rec.value("definitions", json::array()))
            r.definitions.push_back(
                {d.at("text").get<std::string>(), d.at("source").get<std::string>()});
        for (const json& e : rec.value("relations", json::array()))
            r.relations.push_back({e.at("to").get<std::string>(),
                                   e.value("to_name", std::string{}),
                                   e.at("label").get<std::string>()});
        for (const json& a : rec.value("aliases", json::array()))
            r.aliases.push_back(a.get<std::string>());
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<SnapshotRecord> build_snapshot(OntologyBackend& backend,
                                           const std::vector<std::string>& terms) {
    std::vector<SnapshotRecord> records;
    std::unordered_map<std::string, size_t> by_cui;
    for (const std::string& term : terms) {
        const std::string trimmed = trim(term);
        if (trimmed.empty()) continue;
        auto linked = backend.link_concept(trimmed);
        if (!linked) continue;
        const auto& [cui, name] = *linked;
        auto it = by_cui.find(cui.value());
        if (it != by_cui.end()) {
            SnapshotRecord& existing = records[it->second];
            if (casefold_ascii(trimmed) != casefold_ascii(existing.name) &&
                std::find(existing.aliases.begin(), existing.aliases.end(), trimmed) ==
                    existing.aliases.end())
                existing.aliases.push_back(trimmed);
            continue;
        }
        SnapshotRecord r;
        r.cui = cui.value();
        r.name = name;
        if (casefold_ascii(trimmed) != casefold_ascii(name)) r.aliases.push_back(trimmed);
        r.definitions = backend.fetch_definitions(cui);
        SemanticGraph g = backend.fetch_neighborhood(cui);
        for (const GraphEdge& e : g.edges) {
            const std::string* to_name = g.node_name(e.to);
            r.relations.push_back({e.to.value(), to_name ? *to_name : e.to.value(),
                                   e.label.canonical()});
        }
        by_cui.emplace(r.cui, records.size());
        records.push_back(std::move(r));
    }
    return records;
}

}  // namespace bmq
