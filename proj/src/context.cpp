#include "bmq/context.hpp"

namespace bmq {

std::string serialize_definitions(const std::vector<Concept>& concepts) {
    std::string out;
    for (const Concept& c : concepts) {
        if (c.definitions.empty()) continue;
        if (!out.empty()) out += "\n";
        out += c.preferred_name;
        out += ": ";
        bool first = true;
        for (const DefinitionEntry& d : c.definitions) {
            if (!first) out += " ";
            first = false;
            out += d.text;
            out += " (Source: ";
            out += vocabulary_display_name(d.source);
            out += ");";
        }
    }
    return out;
}

std::string relation_phrase(const RelationLabel& label) {
    const std::string canonical = label.canonical();
    if (canonical == "PAR") return "has parent";
    if (canonical == "CHD") return "has child";
    if (canonical == "SY") return "is synonymous with";
    if (canonical == "RO") return "is related to";
    if (canonical == "RO:has_associated_morphology") return "has associated morphology";
    throw UnknownLabel(canonical);
}

std::string serialize_relations(const std::vector<SemanticGraph>& graphs) {
    std::string out;
    for (const SemanticGraph& g : graphs) {
        if (g.edges.empty()) continue;
        if (!out.empty()) out += "\n";
        out += g.center_name;
        out += ":";
        for (const GraphEdge& e : g.edges) {
            const std::string* neighbor = g.node_name(e.to);
            out += "\n    ∟ ";
            out += relation_phrase(e.label);
            out += ": ";
            out += neighbor ? *neighbor : e.to.value();
        }
    }
    return out;
}

}  // namespace bmq
