"""Lightweight concrete-syntax tree shared by the grammar adapters."""

from __future__ import annotations


class T:
    """Mutable tree node used during parsing; linearized afterwards."""

    __slots__ = ("kind", "sb", "eb", "children")

    def __init__(self, kind: str, sb: int, eb: int, children: list | None = None):
        self.kind = kind
        self.sb = sb
        self.eb = eb
        self.children = children if children is not None else []

    def __repr__(self) -> str:  # debugging aid
        return f"T({self.kind}, {self.sb}:{self.eb}, {len(self.children)} kids)"


def wrap(kind: str, children: list[T]) -> T:
    """Internal node covering its (non-empty, ordered) children."""
    assert children, f"empty {kind}"
    return T(kind, children[0].sb, children[-1].eb, children)


def leaf(kind: str, sb: int, eb: int) -> T:
    return T(kind, sb, eb, [])


class Mismatch(Exception):
    """Internal parser signal: current tokens do not fit the expected form."""
