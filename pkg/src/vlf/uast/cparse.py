"""Java and C++ grammar adapters sharing C-family parsing machinery.

Both parsers are tolerant recursive-descent: anything that does not fit the
expected shape is wrapped in an ERROR node and parsing resumes at the next
`;` or brace boundary. Disambiguation between declarations and expressions
uses bounded token lookahead, never backtracking over consumed output.
"""

from __future__ import annotations

from . import tokens as tk
from .taxonomy import KEYWORDS
from .tree import Mismatch, T, leaf, wrap
from .types import Language

_JAVA_MODIFIERS = {
    "public", "private", "protected", "static", "final", "abstract", "native",
    "synchronized", "transient", "volatile", "strictfp", "default",
}

_CPP_SPECIFIERS = {
    "const", "constexpr", "consteval", "constinit", "static", "inline",
    "extern", "mutable", "volatile", "register", "thread_local", "virtual",
    "explicit", "friend", "typename", "unsigned", "signed", "long", "short",
}

_CPP_PRIMITIVES = {"void", "bool", "char", "int", "float", "double", "wchar_t", "auto", "long", "short", "unsigned", "signed"}

_JAVA_PRIMITIVES = {
    "int": "integral_type", "long": "integral_type", "short": "integral_type",
    "byte": "integral_type", "char": "integral_type",
    "float": "floating_point_type", "double": "floating_point_type",
    "boolean": "boolean_type", "void": "void_type",
}

_ASSIGN_OPS = {"=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", ">>>="}

_BIN_BP = {
    "||": 10, "&&": 12, "|": 14, "^": 16, "&": 18,
    "==": 20, "!=": 20,
    "<": 24, ">": 24, "<=": 24, ">=": 24, "<=>": 24,
    "<<": 28, ">>": 28, ">>>": 28,
    "+": 30, "-": 30,
    "*": 34, "/": 34, "%": 34,
}

_COMPARE = {"==", "!=", "<", ">", "<=", ">=", "<=>"}
_LOGICAL = {"||", "&&"}


class CFamilyParser:
    language: Language
    KIND_CALL = "call_expression"
    KIND_FIELD = "field_expression"
    KIND_SUBSCRIPT = "subscript_expression"

    def __init__(self, src: bytes, toks: list[tk.Token]):
        self.src = src
        self.toks = toks
        self.pos = 0
        self.had_error = False
        self.keywords = KEYWORDS[self.language]

    # --- token utilities ---

    def peek(self, off: int = 0) -> tk.Token:
        i = min(self.pos + off, len(self.toks) - 1)
        return self.toks[i]

    def text(self, t: tk.Token) -> str:
        return self.src[t.sb : t.eb].decode("utf-8", "replace")

    def at_kw(self, *words: str) -> bool:
        t = self.peek()
        return t.kind == tk.NAME and self.text(t) in words

    def at_op(self, *ops: str) -> bool:
        t = self.peek()
        return t.kind == tk.OP and self.text(t) in ops

    def at_name(self) -> bool:
        t = self.peek()
        return t.kind == tk.NAME and self.text(t) not in self.keywords

    def take(self) -> T:
        t = self.toks[self.pos]
        self.pos += 1
        return self._leaf_for(t)

    def _leaf_for(self, t: tk.Token) -> T:
        if t.kind == tk.NAME:
            word = self.text(t)
            if word in ("true", "false"):
                return leaf(word, t.sb, t.eb)
            if word == "null" and self.language is Language.JAVA:
                return leaf("null_literal", t.sb, t.eb)
            if word == "nullptr" and self.language is Language.CPP:
                return leaf("nullptr", t.sb, t.eb)
            if word in self.keywords:
                return leaf(word, t.sb, t.eb)
            return leaf("identifier", t.sb, t.eb)
        if t.kind == tk.NUMBER:
            return leaf(self.number_kind(self.text(t)), t.sb, t.eb)
        if t.kind == tk.STRING:
            return leaf(self.string_kind(self.text(t)), t.sb, t.eb)
        if t.kind == tk.CHAR:
            return leaf(self.char_kind(), t.sb, t.eb)
        if t.kind == tk.COMMENT:
            return leaf(self.comment_kind(self.text(t)), t.sb, t.eb)
        if t.kind == tk.PREPROC:
            body = self.text(t)
            if body.startswith("#include"):
                return leaf("preproc_include", t.sb, t.eb)
            if body.startswith("#define"):
                return leaf("preproc_def", t.sb, t.eb)
            return leaf("preproc_call", t.sb, t.eb)
        if t.kind == tk.OP:
            return leaf(self.text(t), t.sb, t.eb)
        return leaf("ERROR_TOKEN", t.sb, t.eb)

    def expect_op(self, op: str) -> T:
        if not self.at_op(op):
            raise Mismatch(op)
        return self.take()

    def expect_name(self) -> T:
        if self.peek().kind != tk.NAME:
            raise Mismatch("name")
        return self.take()

    def number_kind(self, body: str) -> str:
        raise NotImplementedError

    def string_kind(self, body: str) -> str:
        raise NotImplementedError

    def char_kind(self) -> str:
        raise NotImplementedError

    def comment_kind(self, body: str) -> str:
        raise NotImplementedError

    # --- recovery ---

    def recover(self) -> T:
        kids: list[T] = []
        depth = 0
        while True:
            t = self.peek()
            if t.kind == tk.EOF:
                break
            txt = self.text(t) if t.kind == tk.OP else ""
            if depth == 0 and txt == ";":
                kids.append(self.take())
                break
            if depth == 0 and txt == "}":
                break
            if txt in ("(", "[", "{"):
                depth += 1
            elif txt in (")", "]", "}"):
                depth = max(0, depth - 1)
            kids.append(self.take())
        self.had_error = True
        if not kids:
            t = self.peek()
            return T("ERROR", t.sb, t.eb, [])
        return wrap("ERROR", kids)

    # --- lookahead scans ---

    def scan_index_past_balanced(self, i: int) -> int:
        """Given toks[i] an opening bracket, return index just past its close."""
        opens = {"(": ")", "[": "]", "{": "}"}
        t = self.toks[i]
        close = opens[self.text(t)]
        open_txt = self.text(t)
        depth = 1
        i += 1
        while i < len(self.toks) - 1 and depth:
            tt = self.toks[i]
            if tt.kind == tk.OP:
                txt = self.text(tt)
                if txt == open_txt:
                    depth += 1
                elif txt == close:
                    depth -= 1
            i += 1
        return i

    def scan_index_past_angles(self, i: int) -> int | None:
        """From toks[i] == '<', return index past the matching '>' or None."""
        depth = 0
        steps = 0
        while i < len(self.toks) - 1 and steps < 400:
            t = self.toks[i]
            steps += 1
            if t.kind == tk.OP:
                txt = self.text(t)
                if txt == "<":
                    depth += 1
                elif txt == ">":
                    depth -= 1
                elif txt == ">>":
                    depth -= 2
                elif txt == ">>>":
                    depth -= 3
                elif txt in (";", "{", "}") or txt in _ASSIGN_OPS:
                    return None
                if depth <= 0:
                    return i + 1
            i += 1
        return None

    # --- expressions (shared Pratt core) ---

    def expression(self, rbp: int = 0) -> T:
        left = self.nud()
        while True:
            t = self.peek()
            if t.kind == tk.NAME:
                if self.language is Language.JAVA and self.text(t) == "instanceof" and rbp < 24:
                    kw = self.take()
                    ty = self.parse_type_loose()
                    left = wrap("instanceof_expression", [left, kw, ty])
                    continue
                break
            if t.kind != tk.OP:
                break
            txt = self.text(t)
            if txt in _ASSIGN_OPS and rbp < 3:
                op = self.take()
                right = self.expression(2)
                kind = "assignment_expression" if txt == "=" else "augmented_assignment"
                left = wrap(kind, [left, op, right])
                continue
            if txt == "?" and rbp < 5:
                q = self.take()
                then = self.expression(0)
                colon = self.expect_op(":")
                other = self.expression(4)
                left = wrap(self.ternary_kind(), [left, q, then, colon, other])
                continue
            bp = _BIN_BP.get(txt)
            if bp is None or bp <= rbp:
                break
            op = self.take()
            right = self.expression(bp)
            if txt in _COMPARE:
                left = wrap("comparison_expression", [left, op, right])
            elif txt in _LOGICAL:
                left = wrap("logical_expression", [left, op, right])
            else:
                left = wrap("binary_expression", [left, op, right])
        return left

    def ternary_kind(self) -> str:
        return "conditional_expression"

    def argument_list(self) -> T:
        kids = [self.expect_op("(")]
        while not self.at_op(")"):
            if self.peek().kind == tk.EOF:
                raise Mismatch(")")
            kids.append(self.expression())
            if self.at_op(","):
                kids.append(self.take())
        kids.append(self.take())
        return wrap("argument_list", kids)

    def postfix(self, base: T) -> T:
        while True:
            if self.at_op("("):
                base = wrap(self.KIND_CALL, [base, self.argument_list()])
                continue
            if self.at_op(".", "->"):
                dot = self.take()
                if self.peek().kind != tk.NAME:
                    raise Mismatch("member name")
                name = self.take()
                if self.at_op("(") and self.language is Language.JAVA:
                    args = self.argument_list()
                    base = wrap("method_invocation", [base, dot, name, args])
                else:
                    base = wrap(self.KIND_FIELD, [base, dot, name])
                continue
            if self.at_op("::"):
                sep = self.take()
                if self.peek().kind != tk.NAME:
                    raise Mismatch("qualified name")
                name = self.take()
                kind = "method_reference" if self.language is Language.JAVA else "qualified_identifier"
                base = wrap(kind, [base, sep, name])
                continue
            if self.at_op("["):
                opened = self.take()
                kids = [base, opened]
                if not self.at_op("]"):
                    kids.append(self.expression())
                kids.append(self.expect_op("]"))
                base = wrap(self.KIND_SUBSCRIPT, kids)
                continue
            if self.at_op("++", "--"):
                base = wrap("update_expression", [base, self.take()])
                continue
            break
        return base

    def paren_or_cast(self) -> T:
        """'(' ... ')' as cast, lambda (java), or parenthesized expression."""
        close_i = self.scan_index_past_balanced(self.pos)
        after = self.toks[close_i] if close_i < len(self.toks) else self.toks[-1]
        after_txt = self.text(after) if after.kind == tk.OP else ""
        if self.language is Language.JAVA and after_txt == "->":
            return self.java_lambda()
        if self._cast_ahead(close_i):
            open_p = self.take()
            ty = self.parse_type_loose()
            close_p = self.expect_op(")")
            operand = self.expression(40)
            return wrap("cast_expression", [open_p, ty, close_p, operand])
        open_p = self.take()
        inner = self.expression()
        close_p = self.expect_op(")")
        return wrap(inner.kind, [open_p, inner, close_p])

    def _cast_ahead(self, close_i: int) -> bool:
        # (Type) followed by a primary-start token, with only type-shaped
        # tokens inside the parens.
        inner = self.toks[self.pos + 1 : close_i - 1]
        if not inner or close_i >= len(self.toks):
            return False
        for t in inner:
            if t.kind == tk.NAME:
                word = self.text(t)
                if word in self.keywords and not self.is_type_word(word):
                    return False
                continue
            if t.kind == tk.OP and self.text(t) in ("*", "&", "<", ">", ">>", "::", "[", "]", ","):
                continue
            return False
        last = inner[-1]
        if not (last.kind == tk.NAME or (last.kind == tk.OP and self.text(last) in ("*", "&", ">", ">>", "]"))):
            return False
        after = self.toks[close_i]
        if after.kind in (tk.NAME, tk.NUMBER, tk.STRING, tk.CHAR):
            word = self.text(after) if after.kind == tk.NAME else ""
            if word in self.keywords and word not in ("new", "this", "true", "false", "nullptr", "sizeof"):
                return False
            return True
        if after.kind == tk.OP and self.text(after) in ("!", "~", "(", "*", "&"):
            # require an explicit type word inside to accept these
            return any(t.kind == tk.NAME and self.is_type_word(self.text(t)) for t in inner)
        return False

    def is_type_word(self, word: str) -> bool:
        raise NotImplementedError

    def parse_type_loose(self) -> T:
        """Type reference: qualified name / primitive with generics, arrays, refs."""
        kids: list[T] = []
        while self.at_kw(*self.type_specifier_words()):
            kids.append(self.take())
        if self.peek().kind == tk.NAME:
            word = self.text(self.peek())
            if self.primitive_kind(word):
                tok = self.toks[self.pos]
                self.pos += 1
                kids.append(leaf(self.primitive_kind(word), tok.sb, tok.eb))
            else:
                kids.append(self.take())
                while self.at_op(".", "::") and self.peek(1).kind == tk.NAME:
                    kids.append(self.take())
                    kids.append(self.take())
        elif not kids:
            raise Mismatch("type")
        if self.at_op("<"):
            end = self.scan_index_past_angles(self.pos)
            if end is not None:
                while self.pos < end:
                    kids.append(self.take())
        while self.at_op("[", "*", "&", "...") or self.at_op("&&"):
            if self.at_op("["):
                kids.append(self.take())
                if self.at_op("]"):
                    kids.append(self.take())
                else:
                    break
            else:
                kids.append(self.take())
        return wrap(self.type_node_kind(kids), kids)

    def type_specifier_words(self) -> tuple[str, ...]:
        return ()

    def primitive_kind(self, word: str) -> str | None:
        raise NotImplementedError

    def type_node_kind(self, kids: list[T]) -> str:
        raise NotImplementedError


class JavaParser(CFamilyParser):
    language = Language.JAVA

    def number_kind(self, body: str) -> str:
        low = body.lower()
        if not low.startswith("0x") and (("." in low) or ("e" in low) or low.endswith(("f", "d"))):
            return "decimal_floating_point_literal"
        return "decimal_integer_literal"

    def string_kind(self, body: str) -> str:
        return "string_literal"

    def char_kind(self) -> str:
        return "character_literal"

    def comment_kind(self, body: str) -> str:
        return "line_comment" if body.startswith("//") else "block_comment"

    def is_type_word(self, word: str) -> bool:
        return word in _JAVA_PRIMITIVES or word == "var"

    def primitive_kind(self, word: str) -> str | None:
        return _JAVA_PRIMITIVES.get(word)

    def type_node_kind(self, kids: list[T]) -> str:
        texts = {k.kind for k in kids}
        if "[" in texts:
            return "array_type"
        if "<" in texts:
            return "generic_type"
        if len(kids) == 1 and kids[0].kind.endswith("_type"):
            return kids[0].kind
        return "type_identifier"

    # --- program structure ---

    def parse_program(self) -> T:
        kids: list[T] = []
        while self.peek().kind != tk.EOF:
            t = self.peek()
            if t.kind == tk.COMMENT:
                kids.append(self.take())
                continue
            try:
                if self.at_kw("package"):
                    kids.append(self._line_decl("package_declaration"))
                elif self.at_kw("import"):
                    kids.append(self._line_decl("import_declaration"))
                else:
                    kids.append(self._type_declaration())
            except Mismatch:
                kids.append(self.recover())
                if self.at_op("}"):
                    kids.append(self.take())
        return T("program", 0, len(self.src), kids)

    def _line_decl(self, kind: str) -> T:
        kids = [self.take()]
        while not self.at_op(";"):
            if self.peek().kind == tk.EOF:
                raise Mismatch(";")
            kids.append(self.take())
        kids.append(self.take())
        return wrap(kind, kids)

    def _annotations_and_modifiers(self) -> list[T]:
        lead: list[T] = []
        while True:
            if self.at_op("@"):
                at = self.take()
                name = self.expect_name()
                if self.at_op("("):
                    args = self.argument_list()
                    lead.append(wrap("annotation", [at, name, args]))
                else:
                    lead.append(wrap("marker_annotation", [at, name]))
                continue
            if self.peek().kind == tk.NAME and self.text(self.peek()) in _JAVA_MODIFIERS:
                nxt = self.peek(1)
                if self.text(self.peek()) == "static" and nxt.kind == tk.OP and self.text(nxt) == "{":
                    break
                lead.append(self.take())
                continue
            break
        return lead

    def _type_declaration(self) -> T:
        lead = self._annotations_and_modifiers()
        if self.at_kw("class"):
            return self._class_like("class_declaration", lead)
        if self.at_kw("interface"):
            return self._class_like("interface_declaration", lead)
        if self.at_kw("enum"):
            return self._enum(lead)
        if self.at_kw("record"):
            return self._class_like("record_declaration", lead)
        raise Mismatch("type declaration")

    def _class_like(self, kind: str, lead: list[T]) -> T:
        kids = lead + [self.take(), self.expect_name()]
        if self.at_op("<"):
            end = self.scan_index_past_angles(self.pos)
            if end is not None:
                tp: list[T] = []
                while self.pos < end:
                    tp.append(self.take())
                kids.append(wrap("type_parameters", tp))
        if kind == "record_declaration" and self.at_op("("):
            kids.append(self._formal_parameters())
        while self.at_kw("extends", "implements", "permits"):
            kids.append(self.take())
            kids.append(self.parse_type_loose())
            while self.at_op(","):
                kids.append(self.take())
                kids.append(self.parse_type_loose())
        kids.append(self._class_body())
        return wrap(kind, kids)

    def _enum(self, lead: list[T]) -> T:
        kids = lead + [self.take(), self.expect_name()]
        while self.at_kw("implements"):
            kids.append(self.take())
            kids.append(self.parse_type_loose())
        body = [self.expect_op("{")]
        saw_semi = False
        while not self.at_op("}"):
            if self.peek().kind == tk.EOF:
                raise Mismatch("}")
            if self.at_op(";"):
                body.append(self.take())
                saw_semi = True
                continue
            if saw_semi:
                body.append(self._member())
            else:
                if self.at_name():
                    const = self.take()
                    if self.at_op("("):
                        const = wrap("method_invocation", [const, self.argument_list()])
                    body.append(const)
                elif self.at_op(","):
                    body.append(self.take())
                elif self.peek().kind == tk.COMMENT:
                    body.append(self.take())
                else:
                    body.append(self.recover())
        body.append(self.take())
        kids.append(wrap("enum_body", body))
        return wrap("enum_declaration", kids)

    def _class_body(self) -> T:
        kids = [self.expect_op("{")]
        while not self.at_op("}"):
            if self.peek().kind == tk.EOF:
                raise Mismatch("}")
            if self.peek().kind == tk.COMMENT:
                kids.append(self.take())
                continue
            try:
                kids.append(self._member())
            except Mismatch:
                kids.append(self.recover())
        kids.append(self.take())
        return wrap("class_body", kids)

    def _member(self) -> T:
        lead = self._annotations_and_modifiers()
        if self.at_kw("class", "interface", "enum", "record"):
            saved = lead
            if self.at_kw("class"):
                return self._class_like("class_declaration", saved)
            if self.at_kw("interface"):
                return self._class_like("interface_declaration", saved)
            if self.at_kw("record"):
                return self._class_like("record_declaration", saved)
            return self._enum(saved)
        if self.at_kw("static") and self.peek(1).kind == tk.OP and self.text(self.peek(1)) == "{":
            kw = self.take()
            return wrap("static_initializer", [kw, self._block()])
        if self.at_op("{"):
            return self._block()
        if self.at_op(";"):
            return self.take()
        # constructor: Name ( ... ) { ... }
        if self.at_name() and self.peek(1).kind == tk.OP and self.text(self.peek(1)) == "(":
            name = self.take()
            params = self._formal_parameters()
            kids = lead + [name, params]
            while self.at_kw("throws"):
                kids.append(self.take())
                kids.append(self.parse_type_loose())
                while self.at_op(","):
                    kids.append(self.take())
                    kids.append(self.parse_type_loose())
            kids.append(self._block())
            return wrap("constructor_declaration", kids)
        # type parameters on generic methods
        tp = None
        if self.at_op("<"):
            end = self.scan_index_past_angles(self.pos)
            if end is None:
                raise Mismatch("type parameters")
            tpk: list[T] = []
            while self.pos < end:
                tpk.append(self.take())
            tp = wrap("type_parameters", tpk)
        ty = self.parse_type_loose()
        name = self.expect_name()
        head = lead + ([tp] if tp else []) + [ty, name]
        if self.at_op("("):
            params = self._formal_parameters()
            kids = head + [params]
            while self.at_kw("throws"):
                kids.append(self.take())
                kids.append(self.parse_type_loose())
                while self.at_op(","):
                    kids.append(self.take())
                    kids.append(self.parse_type_loose())
            if self.at_op(";"):
                kids.append(self.take())
            else:
                kids.append(self._block())
            return wrap("method_declaration", kids)
        kids = head
        while True:
            if self.at_op("="):
                kids.append(self.take())
                kids.append(self.expression())
            if self.at_op(","):
                kids.append(self.take())
                kids.append(self.expect_name())
                continue
            break
        kids.append(self.expect_op(";"))
        return wrap("field_declaration", kids)

    def _formal_parameters(self) -> T:
        kids = [self.expect_op("(")]
        while not self.at_op(")"):
            if self.peek().kind == tk.EOF:
                raise Mismatch(")")
            pk: list[T] = []
            while self.at_op("@"):
                at = self.take()
                pk.append(wrap("marker_annotation", [at, self.expect_name()]))
            while self.at_kw("final"):
                pk.append(self.take())
            pk.append(self.parse_type_loose())
            if self.at_op("..."):
                pk.append(self.take())
            if self.at_name():
                pk.append(self.take())
            kids.append(wrap("formal_parameter", pk))
            if self.at_op(","):
                kids.append(self.take())
        kids.append(self.take())
        return wrap("formal_parameters", kids)

    # --- statements ---

    def _block(self) -> T:
        kids = [self.expect_op("{")]
        while not self.at_op("}"):
            if self.peek().kind == tk.EOF:
                raise Mismatch("}")
            kids.append(self.statement())
        kids.append(self.take())
        return wrap("block", kids)

    def statement(self) -> T:
        start = self.pos
        try:
            return self._statement_inner()
        except Mismatch:
            self.pos = start
            return self.recover()

    def _statement_inner(self) -> T:
        t = self.peek()
        if t.kind == tk.COMMENT:
            return self.take()
        if self.at_op("{"):
            return self._block()
        if self.at_op(";"):
            return self.take()
        if self.at_kw("if"):
            kw = self.take()
            kids = [kw, self.expect_op("("), self.expression(), self.expect_op(")"), self._statement_inner()]
            if self.at_kw("else"):
                kids.append(self.take())
                kids.append(self._statement_inner())
            return wrap("if_statement", kids)
        if self.at_kw("while"):
            kw = self.take()
            return wrap("while_statement", [kw, self.expect_op("("), self.expression(), self.expect_op(")"), self._statement_inner()])
        if self.at_kw("do"):
            kw = self.take()
            body = self._statement_inner()
            kids = [kw, body]
            if not self.at_kw("while"):
                raise Mismatch("while")
            kids += [self.take(), self.expect_op("("), self.expression(), self.expect_op(")"), self.expect_op(";")]
            return wrap("do_statement", kids)
        if self.at_kw("for"):
            return self._for()
        if self.at_kw("switch"):
            return self._switch()
        if self.at_kw("try"):
            return self._try()
        if self.at_kw("return"):
            kw = self.take()
            kids = [kw]
            if not self.at_op(";"):
                kids.append(self.expression())
            kids.append(self.expect_op(";"))
            return wrap("return_statement", kids)
        if self.at_kw("throw"):
            kw = self.take()
            kids = [kw, self.expression(), self.expect_op(";")]
            return wrap("throw_statement", kids)
        if self.at_kw("break", "continue"):
            word = self.text(self.peek())
            kw = self.take()
            kids = [kw]
            if self.at_name():
                kids.append(self.take())
            kids.append(self.expect_op(";"))
            return wrap(f"{word}_statement", kids)
        if self.at_kw("assert"):
            kw = self.take()
            kids = [kw, self.expression()]
            if self.at_op(":"):
                kids.append(self.take())
                kids.append(self.expression())
            kids.append(self.expect_op(";"))
            return wrap("assert_statement", kids)
        if self.at_kw("synchronized"):
            kw = self.take()
            return wrap("synchronized_statement", [kw, self.expect_op("("), self.expression(), self.expect_op(")"), self._block()])
        if self.at_kw("yield"):
            kw = self.take()
            return wrap("return_statement", [kw, self.expression(), self.expect_op(";")])
        if self._declaration_ahead():
            return self._local_declaration()
        expr = self.expression()
        semi = self.expect_op(";")
        return wrap("expression_statement", [expr, semi])

    def _declaration_ahead(self) -> bool:
        i = self.pos
        toks = self.toks
        if toks[i].kind == tk.NAME and self.text(toks[i]) in ("final", "var"):
            return True
        if toks[i].kind == tk.NAME and self.text(toks[i]) in _JAVA_PRIMITIVES:
            return True
        if toks[i].kind != tk.NAME or self.text(toks[i]) in self.keywords:
            return False
        names = 1
        i += 1
        while i < len(toks) - 1:
            t = toks[i]
            if t.kind == tk.OP:
                txt = self.text(t)
                if txt == ".":
                    if toks[i + 1].kind == tk.NAME:
                        i += 2
                        continue
                    return False
                if txt == "<":
                    end = self.scan_index_past_angles(i)
                    if end is None:
                        return False
                    i = end
                    continue
                if txt == "[":
                    if toks[i + 1].kind == tk.OP and self.text(toks[i + 1]) == "]":
                        i += 2
                        continue
                    return False
                return False
            if t.kind == tk.NAME and self.text(t) not in self.keywords:
                return names == 1  # second bare name => declaration
            return False
        return False

    def _local_declaration(self) -> T:
        kids: list[T] = []
        while self.at_kw("final"):
            kids.append(self.take())
        kids.append(self.parse_type_loose())
        kids.append(self.expect_name())
        while True:
            if self.at_op("["):
                kids.append(self.take())
                kids.append(self.expect_op("]"))
                continue
            break
        if self.at_op("="):
            kids.append(self.take())
            kids.append(self.expression())
        while self.at_op(","):
            kids.append(self.take())
            kids.append(self.expect_name())
            if self.at_op("="):
                kids.append(self.take())
                kids.append(self.expression())
        kids.append(self.expect_op(";"))
        return wrap("local_variable_declaration", kids)

    def _for(self) -> T:
        kw = self.take()
        open_p = self.expect_op("(")
        # look for top-level ':' => enhanced for
        i = self.pos
        depth = 0
        enhanced = False
        while i < len(self.toks) - 1:
            t = self.toks[i]
            if t.kind == tk.OP:
                txt = self.text(t)
                if txt in ("(", "["):
                    depth += 1
                elif txt in (")", "]"):
                    if depth == 0 and txt == ")":
                        break
                    depth -= 1
                elif txt == ";" and depth == 0:
                    break
                elif txt == ":" and depth == 0:
                    enhanced = True
                    break
            i += 1
        if enhanced:
            kids = [kw, open_p]
            while self.at_kw("final"):
                kids.append(self.take())
            kids.append(self.parse_type_loose())
            kids.append(self.expect_name())
            kids.append(self.expect_op(":"))
            kids.append(self.expression())
            kids.append(self.expect_op(")"))
            kids.append(self._statement_inner())
            return wrap("enhanced_for_statement", kids)
        kids = [kw, open_p]
        if self.at_op(";"):
            kids.append(self.take())
        elif self._declaration_ahead():
            kids.append(self._local_declaration())
        else:
            kids.append(self.expression())
            kids.append(self.expect_op(";"))
        if not self.at_op(";"):
            kids.append(self.expression())
        kids.append(self.expect_op(";"))
        if not self.at_op(")"):
            kids.append(self.expression())
            while self.at_op(","):
                kids.append(self.take())
                kids.append(self.expression())
        kids.append(self.expect_op(")"))
        kids.append(self._statement_inner())
        return wrap("for_statement", kids)

    def _switch(self) -> T:
        kw = self.take()
        kids = [kw, self.expect_op("("), self.expression(), self.expect_op(")"), self.expect_op("{")]
        while not self.at_op("}"):
            if self.peek().kind == tk.EOF:
                raise Mismatch("}")
            if self.at_kw("case"):
                lk = [self.take(), self.expression()]
                if self.at_op(":"):
                    lk.append(self.take())
                elif self.at_op("->"):
                    lk.append(self.take())
                kids.append(wrap("switch_label", lk))
                continue
            if self.at_kw("default"):
                lk = [self.take()]
                if self.at_op(":", "->"):
                    lk.append(self.take())
                kids.append(wrap("switch_label", lk))
                continue
            kids.append(self.statement())
        kids.append(self.take())
        return wrap("switch_expression", kids)

    def _try(self) -> T:
        kw = self.take()
        kids: list[T] = [kw]
        with_resources = False
        if self.at_op("("):
            with_resources = True
            rk = [self.take()]
            while not self.at_op(")"):
                if self.peek().kind == tk.EOF:
                    raise Mismatch(")")
                if self.at_op(";"):
                    rk.append(self.take())
                    continue
                if self._declaration_ahead():
                    dk: list[T] = []
                    while self.at_kw("final"):
                        dk.append(self.take())
                    dk.append(self.parse_type_loose())
                    dk.append(self.expect_name())
                    if self.at_op("="):
                        dk.append(self.take())
                        dk.append(self.expression())
                    rk.append(wrap("local_variable_declaration", dk))
                else:
                    rk.append(self.expression())
            rk.append(self.take())
            kids.append(wrap("resource_specification", rk))
        kids.append(self._block())
        while self.at_kw("catch"):
            ck = [self.take(), self.expect_op("(")]
            ck.append(self.parse_type_loose())
            while self.at_op("|"):
                ck.append(self.take())
                ck.append(self.parse_type_loose())
            if self.at_name():
                ck.append(self.take())
            ck.append(self.expect_op(")"))
            ck.append(self._block())
            kids.append(wrap("catch_clause", ck))
        if self.at_kw("finally"):
            kids.append(wrap("finally_clause", [self.take(), self._block()]))
        kind = "try_with_resources_statement" if with_resources else "try_statement"
        return wrap(kind, kids)

    # --- expressions ---

    def java_lambda(self) -> T:
        kids: list[T] = []
        if self.at_op("("):
            end = self.scan_index_past_balanced(self.pos)
            pk: list[T] = []
            while self.pos < end:
                pk.append(self.take())
            kids.append(wrap("formal_parameters", pk))
        else:
            kids.append(self.expect_name())
        kids.append(self.expect_op("->"))
        if self.at_op("{"):
            kids.append(self._block())
        else:
            kids.append(self.expression(2))
        return wrap("lambda_expression", kids)

    def nud(self) -> T:
        t = self.peek()
        if t.kind in (tk.NUMBER, tk.STRING, tk.CHAR):
            return self.postfix(self.take())
        if t.kind == tk.NAME:
            word = self.text(t)
            if word == "new":
                return self.postfix(self._new())
            if word in ("true", "false", "this", "super", "null"):
                return self.postfix(self.take())
            if word == "switch":
                return self._switch()
            if word in self.keywords and word not in ("var",):
                if word in _JAVA_PRIMITIVES:  # e.g. int.class, int[]::new
                    return self.postfix(self.take())
                raise Mismatch(f"unexpected keyword {word}")
            if self.peek(1).kind == tk.OP and self.text(self.peek(1)) == "->":
                return self.java_lambda()
            return self.postfix(self.take())
        if t.kind == tk.OP:
            txt = self.text(t)
            if txt == "(":
                return self.postfix(self.paren_or_cast())
            if txt in ("-", "+", "!", "~"):
                op = self.take()
                return wrap("unary_expression", [op, self.expression(40)])
            if txt in ("++", "--"):
                op = self.take()
                return wrap("update_expression", [op, self.expression(40)])
            if txt == "{":
                return self._array_initializer()
        raise Mismatch("expression")

    def _new(self) -> T:
        kw = self.take()
        ty = self.parse_type_loose()
        kids = [kw, ty]
        if self.at_op("("):
            kids.append(self.argument_list())
            if self.at_op("{"):  # anonymous class
                kids.append(self._class_body())
            return wrap("object_creation_expression", kids)
        if self.at_op("["):
            while self.at_op("["):
                kids.append(self.take())
                if not self.at_op("]"):
                    kids.append(self.expression())
                kids.append(self.expect_op("]"))
            if self.at_op("{"):
                kids.append(self._array_initializer())
            return wrap("array_creation_expression", kids)
        if self.at_op("{"):
            kids.append(self._array_initializer())
            return wrap("array_creation_expression", kids)
        return wrap("object_creation_expression", kids)

    def _array_initializer(self) -> T:
        kids = [self.expect_op("{")]
        while not self.at_op("}"):
            if self.peek().kind == tk.EOF:
                raise Mismatch("}")
            if self.at_op(","):
                kids.append(self.take())
                continue
            if self.at_op("{"):
                kids.append(self._array_initializer())
                continue
            kids.append(self.expression())
        kids.append(self.take())
        return wrap("array_initializer", kids)

    def ternary_kind(self) -> str:
        return "ternary_expression"


def parse_java(src: bytes) -> tuple[T, bool]:
    toks = tk.tokenize_cfamily(src, cpp=False)
    parser = JavaParser(src, toks)
    root = parser.parse_program()
    bad = any(t.kind == tk.BAD for t in toks)
    return root, parser.had_error or bad or _contains_error(root)


class CppParser(CFamilyParser):
    language = Language.CPP

    def number_kind(self, body: str) -> str:
        return "number_literal"

    def string_kind(self, body: str) -> str:
        return "raw_string_literal" if body.lstrip("LuU8")[:1] == "R" else "string_literal"

    def char_kind(self) -> str:
        return "char_literal"

    def comment_kind(self, body: str) -> str:
        return "comment"

    def is_type_word(self, word: str) -> bool:
        return word in _CPP_PRIMITIVES or word in _CPP_SPECIFIERS

    def primitive_kind(self, word: str) -> str | None:
        return "primitive_type" if word in _CPP_PRIMITIVES else None

    def type_node_kind(self, kids: list[T]) -> str:
        if len(kids) == 1 and kids[0].kind == "primitive_type":
            return "primitive_type"
        return "type_identifier"

    def type_specifier_words(self) -> tuple[str, ...]:
        return tuple(_CPP_SPECIFIERS)

    # --- translation unit ---

    def parse_unit(self) -> T:
        kids: list[T] = []
        while self.peek().kind != tk.EOF:
            t = self.peek()
            if t.kind in (tk.COMMENT, tk.PREPROC):
                kids.append(self.take())
                continue
            try:
                kids.append(self._top_item())
            except Mismatch:
                kids.append(self.recover())
                if self.at_op("}"):
                    kids.append(self.take())
        return T("translation_unit", 0, len(self.src), kids)

    def _top_item(self) -> T:
        if self.at_kw("namespace"):
            kw = self.take()
            kids = [kw]
            if self.at_name():
                kids.append(self.take())
                while self.at_op("::") and self.peek(1).kind == tk.NAME:
                    kids.append(self.take())
                    kids.append(self.take())
            kids.append(self.expect_op("{"))
            while not self.at_op("}"):
                if self.peek().kind == tk.EOF:
                    raise Mismatch("}")
                if self.peek().kind in (tk.COMMENT, tk.PREPROC):
                    kids.append(self.take())
                    continue
                try:
                    kids.append(self._top_item())
                except Mismatch:
                    kids.append(self.recover())
            kids.append(self.take())
            return wrap("namespace_definition", kids)
        if self.at_kw("using"):
            return self._consume_to_semi("using_declaration")
        if self.at_kw("typedef"):
            return self._consume_to_semi("typedef_declaration")
        if self.at_kw("template"):
            kw = self.take()
            tpl: list[T] = [kw]
            if self.at_op("<"):
                end = self.scan_index_past_angles(self.pos)
                if end is None:
                    raise Mismatch("template parameter list")
                while self.pos < end:
                    tpl.append(self.take())
            inner = self._top_item()
            inner.children.insert(0, wrap("template_parameter_list", tpl))
            inner.sb = tpl[0].sb
            return inner
        if self.at_kw("extern") and self.peek(1).kind == tk.STRING:
            kw, lang = self.take(), self.take()
            kids = [kw, lang]
            if self.at_op("{"):
                kids.append(self.take())
                while not self.at_op("}"):
                    if self.peek().kind == tk.EOF:
                        raise Mismatch("}")
                    if self.peek().kind in (tk.COMMENT, tk.PREPROC):
                        kids.append(self.take())
                        continue
                    kids.append(self._top_item())
                kids.append(self.take())
            else:
                kids.append(self._top_item())
            return wrap("linkage_specification", kids)
        if self.at_kw("class", "struct", "union") and not self._elaborated_decl_ahead():
            return self._class_specifier()
        if self.at_kw("enum"):
            return self._enum_specifier()
        return self._decl_or_func()

    def _elaborated_decl_ahead(self) -> bool:
        # `struct stat st;` style: keyword NAME NAME
        t1, t2 = self.peek(1), self.peek(2)
        return t1.kind == tk.NAME and t2.kind == tk.NAME

    def _consume_to_semi(self, kind: str) -> T:
        kids = [self.take()]
        while not self.at_op(";"):
            if self.peek().kind == tk.EOF:
                raise Mismatch(";")
            kids.append(self.take())
        kids.append(self.take())
        return wrap(kind, kids)

    def _class_specifier(self) -> T:
        word = self.text(self.peek())
        kind = {"class": "class_specifier", "struct": "struct_specifier", "union": "union_specifier"}[word]
        kids = [self.take()]
        if self.at_name():
            kids.append(self.take())
        if self.at_kw("final"):
            kids.append(self.take())
        if self.at_op(":"):
            kids.append(self.take())
            while not self.at_op("{"):
                if self.peek().kind == tk.EOF:
                    raise Mismatch("{")
                kids.append(self.take())
        if self.at_op(";"):  # forward declaration
            kids.append(self.take())
            return wrap(kind, kids)
        kids.append(self.expect_op("{"))
        while not self.at_op("}"):
            if self.peek().kind == tk.EOF:
                raise Mismatch("}")
            t = self.peek()
            if t.kind in (tk.COMMENT, tk.PREPROC):
                kids.append(self.take())
                continue
            if self.at_kw("public", "private", "protected") and self.peek(1).kind == tk.OP and self.text(self.peek(1)) == ":":
                a, c = self.take(), self.take()
                kids.append(wrap("access_specifier", [a, c]))
                continue
            try:
                kids.append(self._top_item())
            except Mismatch:
                kids.append(self.recover())
        kids.append(self.take())
        if self.at_op(";"):
            kids.append(self.take())
        return wrap(kind, kids)

    def _enum_specifier(self) -> T:
        kids = [self.take()]
        if self.at_kw("class", "struct"):
            kids.append(self.take())
        if self.at_name():
            kids.append(self.take())
        if self.at_op(":"):
            kids.append(self.take())
            kids.append(self.parse_type_loose())
        if self.at_op("{"):
            kids.append(self.take())
            while not self.at_op("}"):
                if self.peek().kind == tk.EOF:
                    raise Mismatch("}")
                kids.append(self.take())
            kids.append(self.take())
        if self.at_op(";"):
            kids.append(self.take())
        return wrap("enum_specifier", kids)

    # --- declaration vs function vs expression ---

    def _decl_or_func(self) -> T:
        shape = self._classify()
        if shape == "function":
            return self._function_definition()
        if shape == "declaration":
            return self._declaration()
        expr = self.expression()
        semi = self.expect_op(";")
        return wrap("expression_statement", [expr, semi])

    def _classify(self) -> str:
        i = self.pos
        toks = self.toks
        prefix_names = 0
        first = True
        while i < len(toks) - 1:
            t = toks[i]
            if t.kind == tk.COMMENT:
                i += 1
                continue
            if t.kind == tk.NAME:
                word = self.text(t)
                if word in _CPP_SPECIFIERS or word in _CPP_PRIMITIVES:
                    prefix_names += 1
                    i += 1
                    first = False
                    continue
                if word in self.keywords and word not in ("operator",):
                    return "expression"
                prefix_names += 1
                i += 1
                first = False
                # collapse qualified chain
                while i < len(toks) - 1 and toks[i].kind == tk.OP and self.text(toks[i]) == "::" and toks[i + 1].kind == tk.NAME:
                    i += 2
                continue
            if t.kind != tk.OP:
                return "expression"
            txt = self.text(t)
            if txt == "<" and prefix_names:
                end = self.scan_index_past_angles(i)
                if end is None:
                    return "expression"
                i = end
                continue
            if txt in ("*", "&", "&&") and prefix_names >= 1:
                i += 1
                continue
            if txt in (".", "->"):
                return "expression"
            if txt == "~" and first:
                i += 1
                first = False
                continue
            if txt == "(":
                end = self.scan_index_past_balanced(i)
                after = toks[end] if end < len(toks) else toks[-1]
                after_txt = self.text(after) if after.kind == tk.OP else (self.text(after) if after.kind == tk.NAME else "")
                j = end
                # skip trailing specifiers: const noexcept override final -> type
                while j < len(toks) - 1 and toks[j].kind == tk.NAME and self.text(toks[j]) in ("const", "noexcept", "override", "final"):
                    j += 1
                if j < len(toks) - 1 and toks[j].kind == tk.OP and self.text(toks[j]) == "->":
                    j += 1
                    while j < len(toks) - 1 and not (toks[j].kind == tk.OP and self.text(toks[j]) in ("{", ";")):
                        j += 1
                if j < len(toks) - 1 and toks[j].kind == tk.OP and self.text(toks[j]) == "{":
                    return "function" if prefix_names >= 1 else "expression"
                if prefix_names >= 2:
                    return "declaration"  # Foo f(args);
                return "expression"
            if txt == "=":
                return "declaration" if prefix_names >= 2 else "expression"
            if txt == ";":
                return "declaration" if prefix_names >= 2 else "expression"
            if txt == "{":
                return "declaration" if prefix_names >= 2 else "expression"
            if txt == "[":
                if prefix_names >= 2:
                    i = self.scan_index_past_balanced(i)
                    continue
                return "expression"
            return "expression"
        return "expression"

    def _function_definition(self) -> T:
        kids: list[T] = []
        while self.at_kw(*tuple(_CPP_SPECIFIERS)):
            kids.append(self.take())
        # return type (absent for ctors/dtors: name directly followed by '(')
        if self.at_op("~"):
            kids.append(self.take())
            kids.append(self.expect_name())
        else:
            first = self.parse_type_loose()
            if self.at_op("("):
                kids.append(first)  # constructor: type node is the name
            else:
                kids.append(first)
                if self.at_kw("operator"):
                    kids.append(self.take())
                    if self.peek().kind == tk.OP:
                        kids.append(self.take())
                else:
                    name = self.take()
                    while self.at_op("::") and self.peek(1).kind == tk.NAME:
                        nxt = self.take()
                        name = wrap("qualified_identifier", [name, nxt, self.take()])
                    kids.append(name)
        kids.append(self._parameter_list())
        while self.at_kw("const", "noexcept", "override", "final"):
            kids.append(self.take())
        if self.at_op("->"):
            kids.append(self.take())
            kids.append(self.parse_type_loose())
        if self.at_op(":"):  # ctor initializer list
            kids.append(self.take())
            while not self.at_op("{"):
                if self.peek().kind == tk.EOF:
                    raise Mismatch("{")
                kids.append(self.take())
        kids.append(self._compound())
        return wrap("function_definition", kids)

    def _parameter_list(self) -> T:
        kids = [self.expect_op("(")]
        while not self.at_op(")"):
            if self.peek().kind == tk.EOF:
                raise Mismatch(")")
            pk: list[T] = []
            depth = 0
            while not (depth == 0 and self.at_op(",", ")")):
                if self.peek().kind == tk.EOF:
                    raise Mismatch(")")
                if self.at_op("(", "[", "{"):
                    depth += 1
                elif self.at_op(")", "]", "}"):
                    depth -= 1
                if self.at_op("<"):
                    end = self.scan_index_past_angles(self.pos)
                    if end is not None:
                        while self.pos < end:
                            pk.append(self.take())
                        continue
                pk.append(self.take())
            if pk:
                kids.append(wrap("parameter_declaration", pk))
            if self.at_op(","):
                kids.append(self.take())
        kids.append(self.take())
        return wrap("parameter_list", kids)

    def _declaration(self) -> T:
        kids: list[T] = []
        while self.at_kw(*tuple(_CPP_SPECIFIERS)):
            kids.append(self.take())
        kids.append(self.parse_type_loose())
        while True:
            while self.at_op("*", "&", "&&"):
                kids.append(self.take())
            if self.at_name():
                kids.append(self.take())
            while self.at_op("["):
                kids.append(self.take())
                if not self.at_op("]"):
                    kids.append(self.expression())
                kids.append(self.expect_op("]"))
            if self.at_op("="):
                kids.append(self.take())
                if self.at_op("{"):
                    kids.append(self._initializer_list())
                else:
                    kids.append(self.expression(2))
            elif self.at_op("("):
                kids.append(self.argument_list())
            elif self.at_op("{"):
                kids.append(self._initializer_list())
            if self.at_op(","):
                kids.append(self.take())
                continue
            break
        kids.append(self.expect_op(";"))
        return wrap("declaration", kids)

    def _initializer_list(self) -> T:
        kids = [self.expect_op("{")]
        while not self.at_op("}"):
            if self.peek().kind == tk.EOF:
                raise Mismatch("}")
            if self.at_op(","):
                kids.append(self.take())
                continue
            if self.at_op("{"):
                kids.append(self._initializer_list())
                continue
            kids.append(self.expression())
        kids.append(self.take())
        return wrap("initializer_list", kids)

    # --- statements ---

    def _compound(self) -> T:
        kids = [self.expect_op("{")]
        while not self.at_op("}"):
            if self.peek().kind == tk.EOF:
                raise Mismatch("}")
            kids.append(self.statement())
        kids.append(self.take())
        return wrap("compound_statement", kids)

    def statement(self) -> T:
        start = self.pos
        try:
            return self._statement_inner()
        except Mismatch:
            self.pos = start
            return self.recover()

    def _statement_inner(self) -> T:
        t = self.peek()
        if t.kind in (tk.COMMENT, tk.PREPROC):
            return self.take()
        if self.at_op("{"):
            return self._compound()
        if self.at_op(";"):
            return self.take()
        if self.at_kw("if"):
            kw = self.take()
            kids = [kw]
            if self.at_kw("constexpr"):
                kids.append(self.take())
            kids += [self.expect_op("("), self.expression(), self.expect_op(")"), self._statement_inner()]
            if self.at_kw("else"):
                kids.append(self.take())
                kids.append(self._statement_inner())
            return wrap("if_statement", kids)
        if self.at_kw("while"):
            kw = self.take()
            return wrap("while_statement", [kw, self.expect_op("("), self.expression(), self.expect_op(")"), self._statement_inner()])
        if self.at_kw("do"):
            kw = self.take()
            body = self._statement_inner()
            kids = [kw, body]
            if not self.at_kw("while"):
                raise Mismatch("while")
            kids += [self.take(), self.expect_op("("), self.expression(), self.expect_op(")"), self.expect_op(";")]
            return wrap("do_statement", kids)
        if self.at_kw("for"):
            return self._for()
        if self.at_kw("switch"):
            kw = self.take()
            kids = [kw, self.expect_op("("), self.expression(), self.expect_op(")"), self._compound()]
            return wrap("switch_statement", kids)
        if self.at_kw("case"):
            kw = self.take()
            kids = [kw, self.expression(), self.expect_op(":")]
            return wrap("case_statement", kids)
        if self.at_kw("default") and self.peek(1).kind == tk.OP and self.text(self.peek(1)) == ":":
            return wrap("case_statement", [self.take(), self.take()])
        if self.at_kw("try"):
            kw = self.take()
            kids = [kw, self._compound()]
            while self.at_kw("catch"):
                ck = [self.take(), self.expect_op("(")]
                while not self.at_op(")"):
                    if self.peek().kind == tk.EOF:
                        raise Mismatch(")")
                    ck.append(self.take())
                ck.append(self.take())
                ck.append(self._compound())
                kids.append(wrap("catch_clause", ck))
            return wrap("try_statement", kids)
        if self.at_kw("return"):
            kw = self.take()
            kids = [kw]
            if not self.at_op(";"):
                if self.at_op("{"):
                    kids.append(self._initializer_list())
                else:
                    kids.append(self.expression())
            kids.append(self.expect_op(";"))
            return wrap("return_statement", kids)
        if self.at_kw("throw"):
            kw = self.take()
            kids = [kw]
            if not self.at_op(";"):
                kids.append(self.expression())
            kids.append(self.expect_op(";"))
            return wrap("throw_statement", kids)
        if self.at_kw("break", "continue"):
            word = self.text(self.peek())
            kw = self.take()
            return wrap(f"{word}_statement", [kw, self.expect_op(";")])
        if self.at_kw("goto"):
            kw = self.take()
            return wrap("goto_statement", [kw, self.expect_name(), self.expect_op(";")])
        if self.at_kw("using"):
            return self._consume_to_semi("using_declaration")
        if self.at_kw("typedef"):
            return self._consume_to_semi("typedef_declaration")
        if self.at_kw("class", "struct", "union") and not self._elaborated_decl_ahead():
            return self._class_specifier()
        if self.at_kw("enum"):
            return self._enum_specifier()
        return self._decl_or_func()

    def _for(self) -> T:
        kw = self.take()
        open_p = self.expect_op("(")
        i = self.pos
        depth = 0
        ranged = False
        while i < len(self.toks) - 1:
            t = self.toks[i]
            if t.kind == tk.OP:
                txt = self.text(t)
                if txt in ("(", "[", "{"):
                    depth += 1
                elif txt in (")", "]", "}"):
                    if depth == 0 and txt == ")":
                        break
                    depth -= 1
                elif txt == ";" and depth == 0:
                    break
                elif txt == ":" and depth == 0:
                    prev = self.toks[i - 1]
                    if not (prev.kind == tk.OP and self.text(prev) == ":"):
                        ranged = True
                    break
            i += 1
        kids = [kw, open_p]
        if ranged:
            while self.at_kw(*tuple(_CPP_SPECIFIERS)):
                kids.append(self.take())
            kids.append(self.parse_type_loose())
            if self.at_name():
                kids.append(self.take())
            kids.append(self.expect_op(":"))
            kids.append(self.expression())
            kids.append(self.expect_op(")"))
            kids.append(self._statement_inner())
            return wrap("for_range_loop", kids)
        if self.at_op(";"):
            kids.append(self.take())
        else:
            shape = self._classify()
            if shape == "declaration":
                kids.append(self._declaration())
            else:
                kids.append(self.expression())
                kids.append(self.expect_op(";"))
        if not self.at_op(";"):
            kids.append(self.expression())
        kids.append(self.expect_op(";"))
        if not self.at_op(")"):
            kids.append(self.expression())
            while self.at_op(","):
                kids.append(self.take())
                kids.append(self.expression())
        kids.append(self.expect_op(")"))
        kids.append(self._statement_inner())
        return wrap("for_statement", kids)

    # --- expressions ---

    def nud(self) -> T:
        t = self.peek()
        if t.kind in (tk.NUMBER, tk.CHAR):
            return self.postfix(self.take())
        if t.kind == tk.STRING:
            base = self.take()
            while self.peek().kind == tk.STRING:
                base = wrap("string_literal", [base, self.take()])
            return self.postfix(base)
        if t.kind == tk.NAME:
            word = self.text(t)
            if word == "new":
                kw = self.take()
                ty = self.parse_type_loose()
                kids = [kw, ty]
                if self.at_op("("):
                    kids.append(self.argument_list())
                elif self.at_op("["):
                    kids.append(self.take())
                    if not self.at_op("]"):
                        kids.append(self.expression())
                    kids.append(self.expect_op("]"))
                elif self.at_op("{"):
                    kids.append(self._initializer_list())
                return self.postfix(wrap("new_expression", kids))
            if word == "delete":
                kw = self.take()
                kids = [kw]
                if self.at_op("["):
                    kids.append(self.take())
                    kids.append(self.expect_op("]"))
                kids.append(self.expression(40))
                return wrap("delete_expression", kids)
            if word == "sizeof":
                kw = self.take()
                kids = [kw]
                if self.at_op("("):
                    kids.append(self.take())
                    if self._classify_sizeof_type():
                        kids.append(self.parse_type_loose())
                    else:
                        kids.append(self.expression())
                    kids.append(self.expect_op(")"))
                else:
                    kids.append(self.expression(40))
                return wrap("sizeof_expression", kids)
            if word == "nullptr":
                tok = self.toks[self.pos]
                self.pos += 1
                return self.postfix(leaf("nullptr", tok.sb, tok.eb))
            if word in ("true", "false", "this"):
                return self.postfix(self.take())
            if word in ("static_cast", "dynamic_cast", "reinterpret_cast", "const_cast"):
                kw = self.take()
                kids = [kw]
                if self.at_op("<"):
                    end = self.scan_index_past_angles(self.pos)
                    if end is not None:
                        while self.pos < end:
                            kids.append(self.take())
                kids.append(self.argument_list())
                return self.postfix(wrap("cast_expression", kids))
            if word == "throw":
                kw = self.take()
                return wrap("throw_statement", [kw, self.expression(2)])
            if word in self.keywords:
                if word in _CPP_PRIMITIVES:  # functional cast: int(x)
                    return self.postfix(self.take())
                raise Mismatch(f"unexpected keyword {word}")
            return self.postfix(self.take())
        if t.kind == tk.OP:
            txt = self.text(t)
            if txt == "(":
                return self.postfix(self.paren_or_cast())
            if txt == "[":
                return self._lambda()
            if txt == "::" and self.peek(1).kind == tk.NAME:
                sep = self.take()
                name = self.take()
                return self.postfix(wrap("qualified_identifier", [sep, name]))
            if txt in ("-", "+", "!", "~"):
                op = self.take()
                return wrap("unary_expression", [op, self.expression(40)])
            if txt in ("*", "&"):
                op = self.take()
                return wrap("pointer_expression", [op, self.expression(40)])
            if txt in ("++", "--"):
                op = self.take()
                return wrap("update_expression", [op, self.expression(40)])
            if txt == "{":
                return self._initializer_list()
        raise Mismatch("expression")

    def _classify_sizeof_type(self) -> bool:
        t = self.peek()
        return t.kind == tk.NAME and (self.text(t) in _CPP_PRIMITIVES or self.text(t) in _CPP_SPECIFIERS)

    def _lambda(self) -> T:
        kids = [self.expect_op("[")]
        while not self.at_op("]"):
            if self.peek().kind == tk.EOF:
                raise Mismatch("]")
            kids.append(self.take())
        kids.append(self.take())
        if self.at_op("("):
            kids.append(self._parameter_list())
        while self.at_kw("mutable", "noexcept", "constexpr"):
            kids.append(self.take())
        if self.at_op("->"):
            kids.append(self.take())
            kids.append(self.parse_type_loose())
        kids.append(self._compound())
        return wrap("lambda_expression", kids)


def parse_cpp(src: bytes) -> tuple[T, bool]:
    toks = tk.tokenize_cfamily(src, cpp=True)
    parser = CppParser(src, toks)
    root = parser.parse_unit()
    bad = any(t.kind == tk.BAD for t in toks)
    return root, parser.had_error or bad or _contains_error(root)


def _contains_error(node: T) -> bool:
    if node.kind in ("ERROR", "ERROR_TOKEN"):
        return True
    return any(_contains_error(c) for c in node.children)
