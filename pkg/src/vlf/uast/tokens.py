"""Byte-level tokenizers for the three grammar adapters.

All offsets are byte offsets into the original source. Tokens never split a
multi-byte UTF-8 sequence because every token delimiter is ASCII; bytes >=
0x80 are treated as identifier or literal content.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass

# token kinds
NAME = "name"
NUMBER = "number"
STRING = "string"
CHAR = "char"
OP = "op"
COMMENT = "comment"
NEWLINE = "newline"
INDENT = "indent"
DEDENT = "dedent"
PREPROC = "preproc"
BAD = "bad"
EOF = "eof"


@dataclass(frozen=True, slots=True)
class Token:
    kind: str
    sb: int
    eb: int


class LineIndex:
    """Maps byte offsets to 0-based (line, column) pairs."""

    def __init__(self, src: bytes):
        starts = [0]
        pos = src.find(b"\n")
        while pos != -1:
            starts.append(pos + 1)
            pos = src.find(b"\n", pos + 1)
        self._starts = starts

    def position(self, offset: int) -> tuple[int, int]:
        line = bisect.bisect_right(self._starts, offset) - 1
        return line, offset - self._starts[line]


def _is_ident_start(b: int) -> bool:
    return b == 0x5F or 0x41 <= b <= 0x5A or 0x61 <= b <= 0x7A or b >= 0x80


def _is_ident_cont(b: int) -> bool:
    return _is_ident_start(b) or 0x30 <= b <= 0x39


def _is_digit(b: int) -> bool:
    return 0x30 <= b <= 0x39


def _scan_number(src: bytes, i: int) -> int:
    n = len(src)
    j = i
    if src[j : j + 2].lower() in (b"0x", b"0b", b"0o"):
        j += 2
        while j < n and (_is_ident_cont(src[j])):
            j += 1
        return j
    seen_dot = False
    while j < n:
        b = src[j]
        if _is_digit(b) or b == 0x5F:  # _
            j += 1
        elif b == 0x2E and not seen_dot:  # .
            seen_dot = True
            j += 1
        elif b in (0x65, 0x45):  # e E
            if j + 1 < n and (_is_digit(src[j + 1]) or src[j + 1] in (0x2B, 0x2D)):
                j += 2
            else:
                break
        elif _is_ident_start(b):  # suffixes: j, L, f, u, ll ...
            j += 1
        else:
            break
    return j


_PY_STR_PREFIXES = {
    b"r", b"b", b"u", b"f", b"rb", b"br", b"rf", b"fr", b"bR", b"Rb",
}


def _scan_py_string(src: bytes, i: int) -> tuple[int, bool]:
    """Returns (end, ok). i points at an optional prefix then a quote."""
    n = len(src)
    j = i
    while j < n and j - i < 2 and src[j : j + 1].lower() in (b"r", b"b", b"u", b"f"):
        j += 1
    raw = b"r" in src[i:j].lower()
    if j >= n or src[j] not in (0x22, 0x27):
        return i, False
    quote = src[j]
    if src[j : j + 3] in (b'"""', b"'''"):
        close = src[j : j + 3]
        j += 3
        end = src.find(close, j)
        if end == -1:
            return n, False
        return end + 3, True
    j += 1
    while j < n:
        b = src[j]
        if b == 0x5C and not raw:  # backslash escape
            j += 2
            continue
        if b == 0x5C and raw:
            j += 2
            continue
        if b == quote:
            return j + 1, True
        if b == 0x0A:
            return j, False  # unterminated single-quoted string
        j += 1
    return n, False


def tokenize_python(src: bytes) -> list[Token]:
    toks: list[Token] = []
    n = len(src)
    i = 0
    depth = 0
    at_line_start = True
    indents = [0]

    def emit(kind: str, sb: int, eb: int) -> None:
        toks.append(Token(kind, sb, eb))

    while i < n:
        if at_line_start and depth == 0:
            line_begin = i
            col = 0
            while i < n and src[i] in (0x20, 0x09):
                col = col + 1 if src[i] == 0x20 else (col // 8 + 1) * 8
                i += 1
            if i >= n:
                break
            if src[i] == 0x0A or src[i] == 0x0D:
                i += 1
                continue
            if src[i] == 0x23:  # comment-only line
                end = src.find(b"\n", i)
                end = n if end == -1 else end
                emit(COMMENT, i, end)
                i = end
                continue
            if col > indents[-1]:
                indents.append(col)
                emit(INDENT, line_begin, i)
            else:
                while col < indents[-1]:
                    indents.pop()
                    emit(DEDENT, line_begin, line_begin)
            at_line_start = False
            continue

        b = src[i]
        if b == 0x0A:
            if depth == 0:
                emit(NEWLINE, i, i + 1)
                at_line_start = True
            i += 1
            continue
        if b in (0x20, 0x09, 0x0D):
            i += 1
            continue
        if b == 0x5C and i + 1 < n and src[i + 1] == 0x0A:
            i += 2
            continue
        if b == 0x23:
            end = src.find(b"\n", i)
            end = n if end == -1 else end
            emit(COMMENT, i, end)
            i = end
            continue
        if b in (0x22, 0x27) or (
            _is_ident_start(b)
            and src[i : i + 2].lower() in _PY_STR_PREFIXES | {b'r"', b"r'", b'b"', b"b'", b'f"', b"f'", b'u"', b"u'"}
            and _looks_like_py_string(src, i)
        ):
            end, ok = _scan_py_string(src, i)
            emit(STRING if ok else BAD, i, end)
            i = end if end > i else i + 1
            continue
        if _is_digit(b) or (b == 0x2E and i + 1 < n and _is_digit(src[i + 1])):
            end = _scan_number(src, i)
            emit(NUMBER, i, end)
            i = end
            continue
        if _is_ident_start(b):
            j = i + 1
            while j < n and _is_ident_cont(src[j]):
                j += 1
            emit(NAME, i, j)
            i = j
            continue
        op = _match_op(src, i, _PY_OPS)
        if op:
            if b in (0x28, 0x5B, 0x7B):
                depth += 1
            elif b in (0x29, 0x5D, 0x7D):
                depth = max(0, depth - 1)
            emit(OP, i, i + len(op))
            i += len(op)
            continue
        emit(BAD, i, i + 1)
        i += 1

    if toks and toks[-1].kind not in (NEWLINE, DEDENT):
        emit(NEWLINE, n, n)
    while len(indents) > 1:
        indents.pop()
        emit(DEDENT, n, n)
    emit(EOF, n, n)
    return toks


def _looks_like_py_string(src: bytes, i: int) -> bool:
    j = i
    n = len(src)
    while j < n and j - i < 2 and src[j : j + 1].lower() in (b"r", b"b", b"u", b"f"):
        j += 1
    return j < n and src[j] in (0x22, 0x27)


def _sorted_ops(ops: set[str]) -> list[bytes]:
    return [o.encode() for o in sorted(ops, key=len, reverse=True)]


_PY_OPS_SET = {
    "**=", "//=", ">>=", "<<=", "...", "->", ":=", "==", "!=", "<=", ">=",
    "**", "//", "<<", ">>", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=",
    "@=", "+", "-", "*", "/", "%", "@", "&", "|", "^", "~", "<", ">", "=",
    "(", ")", "[", "]", "{", "}", ",", ":", ".", ";",
}
_PY_OPS = _sorted_ops(_PY_OPS_SET)

_C_OPS_SET = {
    ">>>=", "<<=", ">>=", ">>>", "->*", "<=>", "...", "::", "->", "++", "--",
    "<<", ">>", "<=", ">=", "==", "!=", "&&", "||", "+=", "-=", "*=", "/=",
    "%=", "&=", "|=", "^=", "+", "-", "*", "/", "%", "&", "|", "^", "~", "!",
    "<", ">", "=", "?", "(", ")", "[", "]", "{", "}", ",", ";", ":", ".", "@",
}
_C_OPS = _sorted_ops(_C_OPS_SET)


def _match_op(src: bytes, i: int, ops: list[bytes]) -> str | None:
    for op in ops:
        if src.startswith(op, i):
            return op.decode()
    return None


def _scan_c_string(src: bytes, i: int, cpp: bool) -> tuple[int, str, bool]:
    """Scan string/char starting at an optional prefix. Returns (end, kind, ok)."""
    n = len(src)
    j = i
    # prefixes: L u U u8 R LR uR ...
    while j < n and src[j : j + 1] in (b"L", b"u", b"U", b"R") and j - i < 3:
        if src[j] == 0x52:  # R -> raw string
            j += 1
            break
        if src[j : j + 2] == b"u8":
            j += 2
        else:
            j += 1
    if j < n and cpp and src[j - 1 : j] == b"R" and src[j] == 0x22:
        # raw string R"delim( ... )delim"
        k = j + 1
        while k < n and src[k] != 0x28:
            k += 1
        delim = src[j + 1 : k]
        close = b")" + delim + b'"'
        end = src.find(close, k + 1)
        if end == -1:
            return n, STRING, False
        return end + len(close), STRING, True
    if j >= n or src[j] not in (0x22, 0x27):
        return i, STRING, False
    quote = src[j]
    if quote == 0x22 and src[j : j + 3] == b'"""' and not cpp:
        end = src.find(b'"""', j + 3)  # Java text block
        if end == -1:
            return n, STRING, False
        return end + 3, STRING, True
    j += 1
    while j < n:
        b = src[j]
        if b == 0x5C:
            j += 2
            continue
        if b == quote:
            return j + 1, (STRING if quote == 0x22 else CHAR), True
        if b == 0x0A:
            return j, STRING, False
        j += 1
    return n, STRING, False


def tokenize_cfamily(src: bytes, cpp: bool) -> list[Token]:
    toks: list[Token] = []
    n = len(src)
    i = 0
    at_line_start = True

    while i < n:
        b = src[i]
        if b == 0x0A:
            at_line_start = True
            i += 1
            continue
        if b in (0x20, 0x09, 0x0D):
            i += 1
            continue
        if b == 0x23 and at_line_start and cpp:
            end = i
            while end < n:
                nl = src.find(b"\n", end)
                if nl == -1:
                    end = n
                    break
                if src[nl - 1 : nl] == b"\\":
                    end = nl + 1
                    continue
                end = nl
                break
            toks.append(Token(PREPROC, i, end))
            i = end
            continue
        at_line_start = False
        if src.startswith(b"//", i):
            end = src.find(b"\n", i)
            end = n if end == -1 else end
            toks.append(Token(COMMENT, i, end))
            i = end
            continue
        if src.startswith(b"/*", i):
            end = src.find(b"*/", i + 2)
            end = n if end == -1 else end + 2
            toks.append(Token(COMMENT, i, end))
            i = end
            continue
        if b in (0x22, 0x27) or (
            src[i : i + 1] in (b"L", b"u", b"U", b"R")
            and i + 1 < n
            and src[i + 1] in (0x22, 0x27, 0x38, 0x52)
            and _c_string_ahead(src, i)
        ):
            end, kind, ok = _scan_c_string(src, i, cpp)
            if end > i:
                toks.append(Token(kind if ok else BAD, i, end))
                i = end
                continue
        if _is_digit(b) or (b == 0x2E and i + 1 < n and _is_digit(src[i + 1])):
            end = _scan_number(src, i)
            toks.append(Token(NUMBER, i, end))
            i = end
            continue
        if _is_ident_start(b):
            j = i + 1
            while j < n and _is_ident_cont(src[j]):
                j += 1
            toks.append(Token(NAME, i, j))
            i = j
            continue
        op = _match_op(src, i, _C_OPS)
        if op:
            toks.append(Token(OP, i, i + len(op)))
            i += len(op)
            continue
        toks.append(Token(BAD, i, i + 1))
        i += 1

    toks.append(Token(EOF, n, n))
    return toks


def _c_string_ahead(src: bytes, i: int) -> bool:
    j = i
    n = len(src)
    while j < n and src[j : j + 1] in (b"L", b"u", b"U", b"R", b"8") and j - i < 3:
        j += 1
    return j < n and src[j] in (0x22, 0x27)
