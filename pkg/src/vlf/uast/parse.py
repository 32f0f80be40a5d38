"""Front end: language detection and source -> UastDocument construction.

The construction pipeline runs the deterministic stages in order: extraction
(grammar adapter), categorization, cross-language semantic mapping, and
schema assembly. Validation and serialization live in document.py.
"""

from __future__ import annotations

import posixpath

from ..errors import EncodingError, GrammarUnavailable, UnknownLanguage
from . import cparse, pyparse
from .document import content_hash, validate_schema
from .taxonomy import (
    CPP_RAII_TYPE_MARKERS,
    ROLE_ENTRY_POINT,
    ROLE_SCOPED_RESOURCE,
    SCOPED_RESOURCE_KINDS,
    UniversalCategory,
    categorize_node,
)
from .tokens import LineIndex
from .tree import T
from .types import SCHEMA_VERSION, TEXT_CAP_BYTES, Language, SourceSpan, UastDocument, UastNode

_EXTENSION_TABLE = {
    ".java": Language.JAVA,
    ".py": Language.PYTHON,
    ".cpp": Language.CPP,
    ".cc": Language.CPP,
    ".cxx": Language.CPP,
    ".hpp": Language.CPP,
    ".h": Language.CPP,
}

_ADAPTERS = {
    Language.PYTHON: pyparse.parse_python,
    Language.JAVA: cparse.parse_java,
    Language.CPP: cparse.parse_cpp,
}


def detect_language(path: str, content: bytes = b"") -> Language:
    """Extension-based detection; content is reserved for future heuristics."""
    _, ext = posixpath.splitext(path.replace("\\", "/").lower())
    lang = _EXTENSION_TABLE.get(ext)
    if lang is None:
        raise UnknownLanguage(f"no language mapping for extension {ext!r} ({path})")
    return lang


def parse_to_uast(source: bytes, language: Language) -> UastDocument:
    try:
        source.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise EncodingError(f"source is not valid UTF-8: {exc}") from exc
    adapter = _ADAPTERS.get(language)
    if adapter is None:
        raise GrammarUnavailable(f"no grammar adapter for {language}")

    root, has_errors = adapter(source)
    nodes = _linearize(root, source, language)
    index: dict[UniversalCategory, list[int]] = {}
    for node in nodes:
        index.setdefault(node.universal_category, []).append(node.index)
    doc = UastDocument(
        language=language,
        schema_version=SCHEMA_VERSION,
        node_count=len(nodes),
        content_hash=content_hash(source),
        nodes=tuple(nodes),
        category_index={cat: tuple(ix) for cat, ix in index.items()},
        has_errors=has_errors,
    )
    report = validate_schema(doc)
    if not report.ok:  # defensive: adapters must always produce valid trees
        raise AssertionError(f"adapter produced invalid tree: {report.violations[:3]}")
    return doc


def _leaf_text(source: bytes, sb: int, eb: int) -> str:
    raw = source[sb:eb]
    if len(raw) <= TEXT_CAP_BYTES:
        return raw.decode("utf-8", "replace")
    prefix = raw[:TEXT_CAP_BYTES].decode("utf-8", "replace")
    return f"{prefix}<+{len(raw) - TEXT_CAP_BYTES} bytes>"


def _linearize(root: T, source: bytes, language: Language) -> list[UastNode]:
    lines = LineIndex(source)
    stack: list[tuple[T, int | None]] = [(root, None)]
    order: list[tuple[T, int | None, int]] = []
    # iterative pre-order with stable child order
    while stack:
        node, parent = stack.pop()
        idx = len(order)
        order.append((node, parent, idx))
        for child in reversed(node.children):
            stack.append((child, idx))
    children_map: dict[int, list[int]] = {i: [] for i in range(len(order))}
    for node, parent, idx in order:
        if parent is not None:
            children_map[parent].append(idx)

    nodes: list[UastNode] = []
    for node, parent, idx in order:
        sl, sc = lines.position(node.sb)
        el, ec = lines.position(node.eb)
        span = SourceSpan(node.sb, node.eb, sl, sc, el, ec)
        is_leaf = not node.children
        text = _leaf_text(source, node.sb, node.eb) if is_leaf else ""
        nodes.append(
            UastNode(
                index=idx,
                universal_category=categorize_node(node.kind, language),
                native_type=node.kind,
                text=text,
                span=span,
                parent=parent,
                children=tuple(children_map[idx]),
                semantic_role=_semantic_role(node, source, language),
            )
        )
    return nodes


def _semantic_role(node: T, source: bytes, language: Language) -> str | None:
    kind = node.kind
    if kind in SCOPED_RESOURCE_KINDS[language]:
        return ROLE_SCOPED_RESOURCE
    if language is Language.CPP and kind == "declaration":
        head = source[node.sb : min(node.eb, node.sb + 160)].decode("utf-8", "replace")
        if any(marker in head for marker in CPP_RAII_TYPE_MARKERS):
            return ROLE_SCOPED_RESOURCE
    if kind in ("function_definition", "method_declaration") and language is not Language.PYTHON:
        if _declared_name(node, source) == "main":
            return ROLE_ENTRY_POINT
    if language is Language.PYTHON and kind == "if_statement":
        head = source[node.sb : min(node.eb, node.sb + 60)].decode("utf-8", "replace")
        if "__name__" in head and "__main__" in head:
            return ROLE_ENTRY_POINT
    return None


def _declared_name(node: T, source: bytes) -> str | None:
    for child in node.children:
        if child.kind == "identifier":
            return source[child.sb : child.eb].decode("utf-8", "replace")
    return None
