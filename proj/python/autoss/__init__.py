"""Authenticated edit-distance similarity search."""

from ._core import (
    Counters,
    Embedding,
    Error,
    Index,
    ParseError,
    Report,
    attack,
    dst_min,
    edit_distance,
    euclid,
    generate_corpus,
    generate_keys,
    generate_queries,
    response_results,
    verify,
)

__all__ = [
    "Counters",
    "Embedding",
    "Error",
    "Index",
    "ParseError",
    "Report",
    "attack",
    "dst_min",
    "edit_distance",
    "euclid",
    "generate_corpus",
    "generate_keys",
    "generate_queries",
    "response_results",
    "verify",
]
