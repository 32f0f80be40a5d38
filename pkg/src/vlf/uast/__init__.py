"""Universal Abstract Syntax Tree: parsing, taxonomy, documents."""

from .document import (
    content_hash,
    load_document,
    node_at,
    node_source,
    query_by_category,
    serialize_document,
    validate_schema,
)
from .parse import detect_language, parse_to_uast
from .taxonomy import CATEGORY_COUNT, UniversalCategory, categorize_node
from .types import Language, SourceSpan, UastDocument, UastNode, ValidationReport

__all__ = [
    "CATEGORY_COUNT",
    "Language",
    "SourceSpan",
    "UastDocument",
    "UastNode",
    "UniversalCategory",
    "ValidationReport",
    "categorize_node",
    "content_hash",
    "detect_language",
    "load_document",
    "node_at",
    "node_source",
    "parse_to_uast",
    "query_by_category",
    "serialize_document",
    "validate_schema",
]
