#pragma once

#include <string>
#include <vector>

#include "bmq/ontology.hpp"

namespace bmq {

/// The textual prompt context distilled from the ontology for one query.
struct SerializedContext {
    std::string definitions_text;  // may be empty when the query yielded no concepts
    std::string relations_text;
};

/// One block per concept with at least one definition:
///   Name: def1 (Source: MeSH); def2 (Source: CRISP Thesaurus);
/// Blocks are joined by single newlines; definitions appear verbatim.
std::string serialize_definitions(const std::vector<Concept>& concepts);

/// One block per pruned graph with at least one edge:
///   CenterName:
///       ∟ has parent: Neighbor
/// Four-space indent before the corner glyph. Throws UnknownLabel when a
/// non-whitelisted label reaches serialization.
std::string serialize_relations(const std::vector<SemanticGraph>& graphs);

/// Phrase for a whitelisted relation label ("PAR" -> "has parent", ...).
std::string relation_phrase(const RelationLabel& label);

}  // namespace bmq
