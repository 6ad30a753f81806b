"""Knowledge-graph retrieval for multi-document question answering."""

from ._core import (
    Corpus,
    CorruptFileError,
    DataError,
    Engine,
    Error,
    NetworkError,
    ProvenanceError,
    UsageError,
    build_graph,
    generate_synthetic,
    hash_embed,
    parse_decision,
    rouge1_f,
    rougeL_f,
    tfidf_top_k,
    tokenize,
)

__all__ = [
    "Corpus",
    "CorruptFileError",
    "DataError",
    "Engine",
    "Error",
    "NetworkError",
    "ProvenanceError",
    "UsageError",
    "build_graph",
    "generate_synthetic",
    "hash_embed",
    "parse_decision",
    "rouge1_f",
    "rougeL_f",
    "tfidf_top_k",
    "tokenize",
]
