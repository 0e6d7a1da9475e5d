"""BM25 retrieval with ontology-guided query expansion.

The heavy lifting lives in the compiled `_bmq` extension; this package
re-exports its public surface.
"""

from ._bmq import (  # noqa: F401
    BmqError,
    Bm25Params,
    Corpus,
    DefinitionEntry,
    Document,
    InvertedIndex,
    ScoredHit,
    compose_expanded_query,
    evaluate_files,
    load_corpus,
    load_queries,
    map_at_k,
    ndcg_at_k,
    parse_terms_response,
    porter_stem,
    recall_at_k,
    render_generation_prompt,
    render_paraphrase_prompt,
    render_term_extraction_prompt,
    serialize_definitions,
    serialize_relations,
    tokenize,
)

__all__ = [
    "BmqError",
    "Bm25Params",
    "Corpus",
    "DefinitionEntry",
    "Document",
    "InvertedIndex",
    "ScoredHit",
    "compose_expanded_query",
    "evaluate_files",
    "load_corpus",
    "load_queries",
    "map_at_k",
    "ndcg_at_k",
    "parse_terms_response",
    "porter_stem",
    "recall_at_k",
    "render_generation_prompt",
    "render_paraphrase_prompt",
    "render_term_extraction_prompt",
    "serialize_definitions",
    "serialize_relations",
    "tokenize",
]
