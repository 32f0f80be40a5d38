"""Core uAST data model: language tag, spans, nodes, documents."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Optional

if TYPE_CHECKING:
    from .taxonomy import UniversalCategory

SCHEMA_VERSION = "1.0"

# Leaf text longer than this stores a prefix plus a byte-length marker.
TEXT_CAP_BYTES = 4096


class Language(enum.Enum):
    JAVA = "java"
    PYTHON = "python"
    CPP = "cpp"

    @classmethod
    def from_name(cls, name: str) -> "Language":
        return cls(name)


@dataclass(frozen=True, slots=True)
class SourceSpan:
    """Byte offsets plus 0-based line/column positions into the source."""

    start_byte: int
    end_byte: int
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def contains(self, other: "SourceSpan") -> bool:
        return self.start_byte <= other.start_byte and other.end_byte <= self.end_byte

    def length(self) -> int:
        return self.end_byte - self.start_byte


@dataclass(frozen=True, slots=True)
class UastNode:
    index: int
    universal_category: "UniversalCategory"
    native_type: str
    text: str
    span: SourceSpan
    parent: Optional[int]
    children: tuple[int, ...]
    semantic_role: Optional[str] = None

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass(frozen=True, slots=True)
class UastDocument:
    language: Language
    schema_version: str
    node_count: int
    content_hash: str
    nodes: tuple[UastNode, ...]
    category_index: dict
    has_errors: bool

    @property
    def root(self) -> UastNode:
        return self.nodes[0]


@dataclass(frozen=True, slots=True)
class Violation:
    node_index: Optional[int]
    rule: str
    message: str


@dataclass(slots=True)
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, node_index: Optional[int], rule: str, message: str) -> None:
        self.violations.append(Violation(node_index, rule, message))
