#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bmq/errors.hpp"

namespace bmq {

/// Concept Unique Identifier: C followed by exactly 7 digits.
class Cui {
public:
    explicit Cui(std::string value);
    const std::string& value() const { return value_; }
    auto operator<=>(const Cui&) const = default;

private:
    std::string value_;
};

/// The four vocabularies definitions are drawn from.
bool is_allowed_vocabulary(std::string_view code);  // MSH, SNOMEDCT_US, NCI, CSP
std::string vocabulary_display_name(std::string_view code);

struct DefinitionEntry {
    std::string text;
    std::string source;  // one of the four allowed codes
    bool operator==(const DefinitionEntry&) const = default;
};

struct Concept {
    Cui cui;
    std::string preferred_name;
    std::vector<DefinitionEntry> definitions;  // retrieval order preserved
};

/// "PAR", "RO", or qualified "RO:has_associated_morphology".
struct RelationLabel {
    std::string code;
    std::string qualifier;  // empty when unqualified

    std::string canonical() const { return qualifier.empty() ? code : code + ":" + qualifier; }
    static RelationLabel parse(std::string_view text);
    bool operator==(const RelationLabel&) const = default;
    auto operator<=>(const RelationLabel&) const = default;
};

struct GraphNode {
    Cui cui;
    std::string name;
    bool operator==(const GraphNode&) const = default;
};

struct GraphEdge {
    Cui from;
    Cui to;
    RelationLabel label;
    bool operator==(const GraphEdge&) const = default;
};

/// One-hop neighborhood around a center concept. Every edge endpoint is in
/// `nodes`; after pruning only whitelisted labels remain.
struct SemanticGraph {
    Cui center;
    std::string center_name;
    std::vector<GraphNode> nodes;  // includes the center
    std::vector<GraphEdge> edges;

    explicit SemanticGraph(Cui center_cui, std::string name = "")
        : center(std::move(center_cui)), center_name(std::move(name)) {}

    const std::string* node_name(const Cui& cui) const;
};

/// The pruning whitelist: CHD, PAR, SY, RO, RO:has_associated_morphology.
class RelationFilter {
public:
    RelationFilter();  // default whitelist
    bool allows(const RelationLabel& label) const;
    const std::vector<RelationLabel>& whitelist() const { return whitelist_; }

private:
    std::vector<RelationLabel> whitelist_;
};

/// Keeps whitelisted edges; drops nodes (except the center) no edge touches.
SemanticGraph prune_edges(const SemanticGraph& graph, const RelationFilter& filter);

/// Concept lookup, definitions, and one-hop relation retrieval.
class OntologyBackend {
public:
    virtual ~OntologyBackend() = default;

    /// Exact-match lookup; multiple hits resolve to the backend's first
    /// result. Returns nullopt when nothing matches. Trims the term first.
    virtual std::optional<std::pair<Cui, std::string>> link_concept(std::string_view term) = 0;

    /// Definitions restricted to the four allowed vocabularies, backend order.
    virtual std::vector<DefinitionEntry> fetch_definitions(const Cui& cui) = 0;

    /// Unpruned one-hop graph, edges capped at max_edges in backend order.
    virtual SemanticGraph fetch_neighborhood(const Cui& cui) = 0;
};

/// One JSONL record per concept:
/// {"cui":..,"name":..,"definitions":[{"text","source"}],
///  "relations":[{"to","to_name","label"}],"aliases":[..]}
struct SnapshotRecord {
    std::string cui;
    std::string name;
    std::vector<DefinitionEntry> definitions;  // unfiltered as stored
    struct Relation {
        std::string to;
        std::string to_name;
        std::string label;  // canonical text form
    };
    std::vector<Relation> relations;
    std::vector<std::string> aliases;  // extra lexical forms that link here
};

/// Offline backend over a snapshot file. Immutable after load; safe to share.
class SnapshotStore : public OntologyBackend {
public:
    explicit SnapshotStore(const std::filesystem::path& path, size_t max_edges = 50);
    static SnapshotStore from_records(std::vector<SnapshotRecord> records,
                                      size_t max_edges = 50);

    std::optional<std::pair<Cui, std::string>> link_concept(std::string_view term) override;
    std::vector<DefinitionEntry> fetch_definitions(const Cui& cui) override;
    SemanticGraph fetch_neighborhood(const Cui& cui) override;

    size_t size() const { return records_.size(); }

private:
    SnapshotStore() = default;
    void build_lookup();

    std::vector<SnapshotRecord> records_;
    std::unordered_map<std::string, size_t> by_cui_;
    std::unordered_map<std::string, size_t> by_term_;  // casefolded name/alias -> record
    size_t max_edges_ = 50;
};

void write_snapshot(const std::filesystem::path& path,
                    const std::vector<SnapshotRecord>& records);
std::vector<SnapshotRecord> read_snapshot(const std::filesystem::path& path);

struct UmlsClientConfig {
    std::string base_url = "https://uts-ws.nlm.nih.gov/rest";
    std::string api_key;          // from UMLS_API_KEY when empty
    size_t max_edges = 50;
    int max_retries = 4;          // exponential backoff on 429/5xx
    int timeout_s = 30;
    int max_in_flight = 4;
    std::filesystem::path cache_dir;  // empty disables the on-disk cache
    bool refresh = false;             // bypass cache reads
};

/// Live UMLS REST client. Responses are cached on disk when cache_dir is set,
/// keyed by SHA-256 of the request path+query.
class UmlsRestClient : public OntologyBackend {
public:
    explicit UmlsRestClient(UmlsClientConfig config);
    ~UmlsRestClient() override;

    std::optional<std::pair<Cui, std::string>> link_concept(std::string_view term) override;
    std::vector<DefinitionEntry> fetch_definitions(const Cui& cui) override;
    SemanticGraph fetch_neighborhood(const Cui& cui) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Materializes a snapshot covering every term in `terms`: links each term,
/// fetches definitions and the one-hop neighborhood. Terms that fail to link
/// are skipped. Returns one record per distinct concept.
std::vector<SnapshotRecord> build_snapshot(OntologyBackend& backend,
                                           const std::vector<std::string>& terms);

std::string trim(std::string_view s);
std::string casefold_ascii(std::string_view s);

}  // namespace bmq
