"""Document-level operations: addressing, hashing, validation, serialization.

Canonical serialization is compact JSON with sorted keys; the category index
is rebuilt on load rather than stored.
"""

from __future__ import annotations

import hashlib
import json

from ..errors import DocumentParseError, SchemaInvalid
from .taxonomy import CATEGORY_COUNT, UniversalCategory
from .types import Language, SourceSpan, UastDocument, UastNode, ValidationReport


def content_hash(source: bytes) -> str:
    return hashlib.sha256(source).hexdigest()


def node_at(doc: UastDocument, index: int) -> UastNode:
    if not 0 <= index < doc.node_count:
        raise IndexError(f"node index {index} out of range [0, {doc.node_count})")
    return doc.nodes[index]


def query_by_category(doc: UastDocument, cat: UniversalCategory) -> tuple[int, ...]:
    return doc.category_index.get(cat, ())


def node_source(doc: UastDocument, source: bytes, index: int) -> str:
    """Reconstruct any node's full text from the original source bytes."""
    span = node_at(doc, index).span
    return source[span.start_byte : span.end_byte].decode("utf-8", "replace")


def validate_schema(doc: UastDocument) -> ValidationReport:
    report = ValidationReport()
    nodes = doc.nodes

    if doc.node_count != len(nodes):
        report.add(None, "node_count", f"node_count {doc.node_count} != len(nodes) {len(nodes)}")
    if len(doc.content_hash) != 64 or any(c not in "0123456789abcdef" for c in doc.content_hash):
        report.add(None, "content_hash", "content_hash is not 64 lowercase hex chars")
    if not nodes:
        report.add(None, "root", "document has no nodes")
        return report
    if nodes[0].parent is not None:
        report.add(0, "root", "node 0 must have no parent")

    for i, node in enumerate(nodes):
        if node.index != i:
            report.add(i, "index", f"node.index {node.index} != position {i}")
        if node.span.start_byte > node.span.end_byte:
            report.add(i, "span", "start_byte > end_byte")
        if i > 0:
            p = node.parent
            if p is None:
                report.add(i, "parent", "non-root node with no parent")
            elif not 0 <= p < len(nodes):
                report.add(i, "parent", f"parent {p} out of range")
            elif p >= i:
                report.add(i, "parent", f"parent {p} does not precede node {i} (cycle risk)")
            elif i not in nodes[p].children:
                report.add(i, "parent", f"node missing from parent {p} child list")
            elif not nodes[p].span.contains(node.span):
                report.add(i, "containment", f"span not contained in parent {p} span")
        for c in node.children:
            if not 0 <= c < len(nodes):
                report.add(i, "children", f"child {c} out of range")
            elif nodes[c].parent != i:
                report.add(i, "children", f"child {c} does not point back to {i}")
        starts = [nodes[c].span.start_byte for c in node.children if 0 <= c < len(nodes)]
        if starts != sorted(starts):
            report.add(i, "child_order", "children not ordered by start_byte")

    seen: dict[UniversalCategory, list[int]] = {}
    for i, node in enumerate(nodes):
        seen.setdefault(node.universal_category, []).append(i)
    for cat, expected in seen.items():
        actual = list(doc.category_index.get(cat, ()))
        if actual != expected:
            report.add(None, "category_index", f"index for {cat.name} is {actual}, expected {expected}")
    for cat in doc.category_index:
        if cat not in seen:
            report.add(None, "category_index", f"index lists absent category {cat.name}")

    derived_errors = any(n.native_type in ("ERROR", "ERROR_TOKEN") for n in nodes)
    if derived_errors and not doc.has_errors:
        report.add(None, "has_errors", "error nodes present but has_errors is false")
    return report


def serialize_document(doc: UastDocument) -> bytes:
    report = validate_schema(doc)
    if not report.ok:
        raise SchemaInvalid(report.violations)
    payload = {
        "schema_version": doc.schema_version,
        "language": doc.language.value,
        "node_count": doc.node_count,
        "content_hash": doc.content_hash,
        "has_errors": doc.has_errors,
        "nodes": [_node_to_json(n) for n in doc.nodes],
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def _node_to_json(node: UastNode) -> dict:
    return {
        "index": node.index,
        "category": node.universal_category.name,
        "native_type": node.native_type,
        "text": node.text,
        "span": {
            "sb": node.span.start_byte,
            "eb": node.span.end_byte,
            "sl": node.span.start_line,
            "sc": node.span.start_col,
            "el": node.span.end_line,
            "ec": node.span.end_col,
        },
        "parent": node.parent,
        "children": list(node.children),
        "role": node.semantic_role,
    }


def load_document(data: bytes) -> UastDocument:
    try:
        payload = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise DocumentParseError(f"malformed document bytes: {exc}") from exc
    try:
        nodes = tuple(_node_from_json(obj) for obj in payload["nodes"])
        index: dict[UniversalCategory, list[int]] = {}
        for node in nodes:
            index.setdefault(node.universal_category, []).append(node.index)
        doc = UastDocument(
            language=Language(payload["language"]),
            schema_version=payload["schema_version"],
            node_count=payload["node_count"],
            content_hash=payload["content_hash"],
            nodes=nodes,
            category_index={cat: tuple(ix) for cat, ix in index.items()},
            has_errors=payload["has_errors"],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DocumentParseError(f"document JSON missing or mistyped field: {exc}") from exc
    report = validate_schema(doc)
    if not report.ok:
        raise SchemaInvalid(report.violations)
    return doc


def _node_from_json(obj: dict) -> UastNode:
    span = obj["span"]
    return UastNode(
        index=obj["index"],
        universal_category=UniversalCategory[obj["category"]],
        native_type=obj["native_type"],
        text=obj["text"],
        span=SourceSpan(span["sb"], span["eb"], span["sl"], span["sc"], span["el"], span["ec"]),
        parent=obj["parent"],
        children=tuple(obj["children"]),
        semantic_role=obj["role"],
    )


def taxonomy_is_closed() -> bool:
    """True when the category set is exactly {0..46} with unique names."""
    codes = sorted(int(c) for c in UniversalCategory)
    names = {c.name for c in UniversalCategory}
    return codes == list(range(CATEGORY_COUNT)) and len(names) == CATEGORY_COUNT
