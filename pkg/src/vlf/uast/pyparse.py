"""Python grammar adapter: tokens -> concrete syntax tree.

Recursive-descent statement parser plus a precedence-climbing expression
parser. Unparseable regions are wrapped in ERROR nodes and parsing resumes at
the next statement boundary, so any input yields a schema-valid tree.
"""

from __future__ import annotations

from . import tokens as tk
from .tree import Mismatch, T, leaf, wrap

_KEYWORDS = {
    "def", "class", "if", "elif", "else", "while", "for", "in", "try",
    "except", "finally", "with", "as", "import", "from", "return", "raise",
    "assert", "pass", "break", "continue", "global", "nonlocal", "del",
    "lambda", "and", "or", "not", "is", "async", "await", "yield", "match",
    "case",
}

_AUG_OPS = {"+=", "-=", "*=", "/=", "//=", "%=", "**=", ">>=", "<<=", "&=", "|=", "^=", "@="}

_COMPARE_OPS = {"==", "!=", "<", ">", "<=", ">="}

# binding powers for infix operators
_BP = {
    "or": 10, "and": 12,
    "in": 20, "is": 20, "<": 20, ">": 20, "<=": 20, ">=": 20, "==": 20, "!=": 20,
    "|": 30, "^": 32, "&": 34, "<<": 36, ">>": 36,
    "+": 40, "-": 40,
    "*": 50, "/": 50, "//": 50, "%": 50, "@": 50,
    "**": 60,
}


class PyParser:
    def __init__(self, src: bytes, toks: list[tk.Token]):
        self.src = src
        self.toks = toks
        self.pos = 0
        self.had_error = False

    # --- token helpers ---

    def peek(self, off: int = 0) -> tk.Token:
        i = min(self.pos + off, len(self.toks) - 1)
        return self.toks[i]

    def text(self, tok: tk.Token) -> str:
        return self.src[tok.sb : tok.eb].decode("utf-8", "replace")

    def at_kw(self, *words: str) -> bool:
        t = self.peek()
        return t.kind == tk.NAME and self.text(t) in words

    def at_op(self, *ops: str) -> bool:
        t = self.peek()
        return t.kind == tk.OP and self.text(t) in ops

    def take(self) -> T:
        t = self.toks[self.pos]
        self.pos += 1
        return self._leaf_for(t)

    def _leaf_for(self, t: tk.Token) -> T:
        if t.kind == tk.NAME:
            word = self.text(t)
            if word in ("True", "False", "None"):
                return leaf(word.lower(), t.sb, t.eb)
            if word in _KEYWORDS:
                return leaf(word, t.sb, t.eb)
            return leaf("identifier", t.sb, t.eb)
        if t.kind == tk.NUMBER:
            body = self.text(t).lower()
            is_float = (not body.startswith("0x")) and any(c in body for c in ".e")
            return leaf("float" if is_float else "integer", t.sb, t.eb)
        if t.kind == tk.STRING:
            return leaf("string", t.sb, t.eb)
        if t.kind == tk.COMMENT:
            return leaf("comment", t.sb, t.eb)
        if t.kind == tk.OP:
            return leaf(self.text(t), t.sb, t.eb)
        return leaf("ERROR_TOKEN", t.sb, t.eb)

    def expect_op(self, op: str) -> T:
        if not self.at_op(op):
            raise Mismatch(op)
        return self.take()

    def expect_kw(self, word: str) -> T:
        if not self.at_kw(word):
            raise Mismatch(word)
        return self.take()

    def expect_name(self) -> T:
        t = self.peek()
        if t.kind != tk.NAME or self.text(t) in _KEYWORDS - {"match", "case"}:
            raise Mismatch("name")
        return self.take()

    # --- entry point ---

    def parse_module(self) -> T:
        kids: list[T] = []
        while self.peek().kind != tk.EOF:
            t = self.peek()
            if t.kind in (tk.NEWLINE, tk.DEDENT):
                self.pos += 1
                continue
            if t.kind == tk.COMMENT:
                kids.append(self.take())
                continue
            if t.kind == tk.INDENT:
                kids.append(self._recover("unexpected indent"))
                continue
            kids.append(self.statement())
        return T("module", 0, len(self.src), kids)

    # --- statements ---

    def statement(self) -> T:
        start = self.pos
        try:
            return self._statement_inner()
        except Mismatch:
            self.pos = start
            return self._recover("statement")

    def _recover(self, why: str) -> T:
        kids: list[T] = []
        depth = 0
        while True:
            t = self.peek()
            if t.kind == tk.EOF:
                break
            if t.kind == tk.NEWLINE and depth == 0:
                self.pos += 1
                break
            if t.kind == tk.DEDENT and depth == 0:
                break
            if t.kind == tk.OP:
                c = self.text(t)
                if c in "([{":
                    depth += 1
                elif c in ")]}":
                    depth = max(0, depth - 1)
            if t.kind in (tk.INDENT, tk.DEDENT):
                self.pos += 1
                continue
            kids.append(self.take())
        self.had_error = True
        if not kids:
            t = self.peek()
            return T("ERROR", t.sb, t.eb, [])
        return wrap("ERROR", kids)

    def _statement_inner(self) -> T:
        if self.at_op("@"):
            return self._decorated()
        if self.at_kw("async"):
            nxt = self.peek(1)
            if nxt.kind == tk.NAME and self.text(nxt) in ("def", "for", "with"):
                kw = self.take()
                inner = self._statement_inner()
                inner.children.insert(0, kw)
                inner.sb = kw.sb
                return inner
        if self.at_kw("def"):
            return self._function_def([])
        if self.at_kw("class"):
            return self._class_def([])
        if self.at_kw("if"):
            return self._if_stmt()
        if self.at_kw("while"):
            return self._while_stmt()
        if self.at_kw("for"):
            return self._for_stmt()
        if self.at_kw("try"):
            return self._try_stmt()
        if self.at_kw("with"):
            return self._with_stmt()
        if self.at_kw("import"):
            return self._import_stmt("import_statement")
        if self.at_kw("from"):
            return self._import_stmt("import_from_statement")
        if self.at_kw("return"):
            return self._kw_line_stmt("return_statement")
        if self.at_kw("raise"):
            return self._kw_line_stmt("raise_statement")
        if self.at_kw("assert"):
            return self._kw_line_stmt("assert_statement")
        if self.at_kw("del"):
            return self._kw_line_stmt("del_statement")
        if self.at_kw("global"):
            return self._kw_line_stmt("global_statement")
        if self.at_kw("nonlocal"):
            return self._kw_line_stmt("nonlocal_statement")
        if self.at_kw("pass"):
            return self._bare_kw_stmt("pass_statement")
        if self.at_kw("break"):
            return self._bare_kw_stmt("break_statement")
        if self.at_kw("continue"):
            return self._bare_kw_stmt("continue_statement")
        return self._expr_statement()

    def _end_simple(self) -> None:
        t = self.peek()
        if t.kind == tk.NEWLINE:
            self.pos += 1
        elif t.kind in (tk.DEDENT, tk.EOF, tk.COMMENT):
            pass  # boundary token stays for the enclosing suite
        elif t.kind == tk.OP and self.text(t) == ";":
            self.pos += 1
        else:
            raise Mismatch("end of statement")

    def _bare_kw_stmt(self, kind: str) -> T:
        kw = self.take()
        node = wrap(kind, [kw])
        self._end_simple()
        return node

    def _kw_line_stmt(self, kind: str) -> T:
        kids = [self.take()]
        while not self._at_simple_end():
            kids.append(self.expression())
            if self.at_op(","):
                kids.append(self.take())
            elif self.at_kw("from"):  # raise X from Y
                kids.append(self.take())
            else:
                break
        node = wrap(kind, kids)
        self._end_simple()
        return node

    def _at_simple_end(self) -> bool:
        t = self.peek()
        return t.kind in (tk.NEWLINE, tk.DEDENT, tk.EOF, tk.COMMENT) or (
            t.kind == tk.OP and self.text(t) == ";"
        )

    def _import_stmt(self, kind: str) -> T:
        kids = [self.take()]
        while not self._at_simple_end():
            t = self.peek()
            if t.kind == tk.NAME:
                word = self.text(t)
                if word in ("import", "as"):
                    kids.append(self.take())
                    continue
                kids.append(self._dotted_name())
                continue
            if t.kind == tk.OP and self.text(t) in (",", "(", ")", "*", "."):
                kids.append(self.take())
                continue
            raise Mismatch("import")
        node = wrap(kind, kids)
        self._end_simple()
        return node

    def _dotted_name(self) -> T:
        parts = [self.expect_name()]
        while self.at_op(".") and self.peek(1).kind == tk.NAME:
            parts.append(self.take())
            parts.append(self.expect_name())
        if len(parts) == 1:
            return parts[0]
        return wrap("dotted_name", parts)

    def _decorated(self) -> T:
        decorators: list[T] = []
        while self.at_op("@"):
            kids = [self.take(), self._dotted_name()]
            if self.at_op("("):
                kids.append(self._argument_list())
            decorators.append(wrap("decorator", kids))
            if self.peek().kind == tk.NEWLINE:
                self.pos += 1
            while self.peek().kind == tk.COMMENT:
                self.pos += 1
                if self.peek().kind == tk.NEWLINE:
                    self.pos += 1
        if self.at_kw("async"):
            decorators.append(self.take())
        if self.at_kw("def"):
            return self._function_def(decorators)
        if self.at_kw("class"):
            return self._class_def(decorators)
        raise Mismatch("def or class after decorator")

    def _function_def(self, lead: list[T]) -> T:
        kids = lead + [self.expect_kw("def"), self.expect_name(), self._parameters()]
        if self.at_op("->"):
            kids.append(self.take())
            kids.append(wrap("type", [self.expression()]))
        kids.append(self.expect_op(":"))
        kids.append(self._block())
        return wrap("function_definition", kids)

    def _class_def(self, lead: list[T]) -> T:
        kids = lead + [self.expect_kw("class"), self.expect_name()]
        if self.at_op("("):
            kids.append(self._argument_list())
        kids.append(self.expect_op(":"))
        kids.append(self._block())
        return wrap("class_definition", kids)

    def _parameters(self) -> T:
        kids = [self.expect_op("(")]
        while not self.at_op(")"):
            if self.peek().kind == tk.EOF:
                raise Mismatch(")")
            kids.append(self._parameter())
            if self.at_op(","):
                kids.append(self.take())
            elif not self.at_op(")"):
                raise Mismatch(", or )")
        kids.append(self.take())
        return wrap("parameters", kids)

    def _parameter(self) -> T:
        kids: list[T] = []
        while self.at_op("*", "**", "/"):
            kids.append(self.take())
        if self.peek().kind == tk.NAME and not self.at_op(")"):
            kids.append(self.expect_name())
        if self.at_op(":"):
            kids.append(self.take())
            kids.append(wrap("type", [self.expression()]))
        if self.at_op("="):
            kids.append(self.take())
            kids.append(self.expression())
        if not kids:
            raise Mismatch("parameter")
        return wrap("parameter", kids)

    # --- compound statements ---

    def _block(self) -> T:
        """Suite after ':': indented block or inline simple statements."""
        while self.peek().kind == tk.COMMENT:
            self.pos += 1
        if self.peek().kind == tk.NEWLINE:
            self.pos += 1
            while self.peek().kind in (tk.COMMENT, tk.NEWLINE):
                self.pos += 1
            if self.peek().kind != tk.INDENT:
                raise Mismatch("indented block")
            self.pos += 1
            stmts: list[T] = []
            while True:
                t = self.peek()
                if t.kind == tk.DEDENT:
                    self.pos += 1
                    break
                if t.kind == tk.EOF:
                    break
                if t.kind in (tk.NEWLINE,):
                    self.pos += 1
                    continue
                if t.kind == tk.COMMENT:
                    stmts.append(self.take())
                    continue
                if t.kind == tk.INDENT:
                    stmts.append(self._recover("unexpected indent"))
                    continue
                stmts.append(self.statement())
            if not stmts:
                raise Mismatch("non-empty block")
            return wrap("block", stmts)
        # inline suite: stmt (; stmt)* NEWLINE
        stmts = [self._statement_inner()]
        while self.toks[self.pos - 1].kind != tk.NEWLINE and not self._at_block_end():
            stmts.append(self._statement_inner())
        return wrap("block", stmts)

    def _at_block_end(self) -> bool:
        t = self.peek()
        return t.kind in (tk.NEWLINE, tk.DEDENT, tk.EOF, tk.COMMENT) or (
            t.kind == tk.NAME and self.text(t) in ("elif", "else", "except", "finally")
        )

    def _if_stmt(self) -> T:
        kids = [self.take(), self.expression(), self.expect_op(":"), self._block()]
        while self.at_kw("elif"):
            ek = [self.take(), self.expression(), self.expect_op(":"), self._block()]
            kids.append(wrap("elif_clause", ek))
        if self.at_kw("else"):
            kids.append(self._else_clause())
        return wrap("if_statement", kids)

    def _else_clause(self) -> T:
        return wrap("else_clause", [self.take(), self.expect_op(":"), self._block()])

    def _while_stmt(self) -> T:
        kids = [self.take(), self.expression(), self.expect_op(":"), self._block()]
        if self.at_kw("else"):
            kids.append(self._else_clause())
        return wrap("while_statement", kids)

    def _for_stmt(self) -> T:
        kids = [self.take(), self._target_list(), self.expect_kw("in"), self._testlist()]
        kids.append(self.expect_op(":"))
        kids.append(self._block())
        if self.at_kw("else"):
            kids.append(self._else_clause())
        return wrap("for_statement", kids)

    def _target_list(self) -> T:
        items = [self.expression(stop_in=True)]
        while self.at_op(","):
            items.append(self.take())
            if self.at_kw("in"):
                break
            items.append(self.expression(stop_in=True))
        if len(items) == 1:
            return items[0]
        return wrap("tuple", items)

    def _testlist(self) -> T:
        items = [self.expression()]
        while self.at_op(","):
            items.append(self.take())
            if self._at_simple_end() or self.at_op(":"):
                break
            items.append(self.expression())
        if len(items) == 1:
            return items[0]
        return wrap("tuple", items)

    def _try_stmt(self) -> T:
        kids = [self.take(), self.expect_op(":"), self._block()]
        saw_handler = False
        while self.at_kw("except"):
            saw_handler = True
            ek = [self.take()]
            if self.at_op("*"):
                ek.append(self.take())
            if not self.at_op(":"):
                ek.append(self.expression())
                if self.at_kw("as"):
                    ek.append(self.take())
                    ek.append(self.expect_name())
            ek.append(self.expect_op(":"))
            ek.append(self._block())
            kids.append(wrap("except_clause", ek))
        if self.at_kw("else"):
            kids.append(self._else_clause())
        if self.at_kw("finally"):
            saw_handler = True
            kids.append(wrap("finally_clause", [self.take(), self.expect_op(":"), self._block()]))
        if not saw_handler:
            raise Mismatch("except or finally")
        return wrap("try_statement", kids)

    def _with_stmt(self) -> T:
        kids = [self.take()]
        paren = self.at_op("(")
        if paren:
            kids.append(self.take())
        while True:
            kids.append(self.expression())
            if self.at_kw("as"):
                kids.append(self.take())
                kids.append(self.expression(stop_in=True))
            if self.at_op(","):
                kids.append(self.take())
                continue
            break
        if paren:
            kids.append(self.expect_op(")"))
        kids.append(self.expect_op(":"))
        kids.append(self._block())
        return wrap("with_statement", kids)

    # --- simple statements ---

    def _expr_statement(self) -> T:
        first = self._testlist()
        t = self.peek()
        if t.kind == tk.OP and self.text(t) in _AUG_OPS:
            op = self.take()
            value = self._testlist()
            node = wrap("augmented_assignment", [first, op, value])
            self._end_simple()
            return node
        if self.at_op("="):
            kids = [first]
            while self.at_op("="):
                kids.append(self.take())
                kids.append(self._testlist())
            node = wrap("assignment", kids)
            self._end_simple()
            return node
        if self.at_op(":"):  # annotated assignment: x: T = v
            kids = [first, self.take(), wrap("type", [self.expression()])]
            if self.at_op("="):
                kids.append(self.take())
                kids.append(self._testlist())
            node = wrap("assignment", kids)
            self._end_simple()
            return node
        node = wrap("expression_statement", [first])
        self._end_simple()
        return node

    # --- expressions ---

    def expression(self, rbp: int = 0, stop_in: bool = False) -> T:
        left = self._nud(stop_in=stop_in)
        while True:
            t = self.peek()
            if t.kind == tk.NAME:
                word = self.text(t)
                if word == "if" and rbp < 6:
                    cond_kw = self.take()
                    cond = self.expression(6)
                    els_kw = self.expect_kw("else")
                    other = self.expression(5)
                    left = wrap("conditional_expression", [left, cond_kw, cond, els_kw, other])
                    continue
                if word in ("or", "and") and _BP[word] > rbp:
                    op = self.take()
                    right = self.expression(_BP[word], stop_in=stop_in)
                    left = wrap("boolean_operator", [left, op, right])
                    continue
                if word == "in" and not stop_in and _BP["in"] > rbp:
                    op = self.take()
                    right = self.expression(_BP["in"], stop_in=stop_in)
                    left = wrap("comparison_operator", [left, op, right])
                    continue
                if word == "not" and self.peek(1).kind == tk.NAME and self.text(self.peek(1)) == "in" and not stop_in and _BP["in"] > rbp:
                    k1, k2 = self.take(), self.take()
                    right = self.expression(_BP["in"], stop_in=stop_in)
                    left = wrap("comparison_operator", [left, k1, k2, right])
                    continue
                if word == "is" and _BP["is"] > rbp:
                    k1 = self.take()
                    kid = [left, k1]
                    if self.at_kw("not"):
                        kid.append(self.take())
                    kid.append(self.expression(_BP["is"], stop_in=stop_in))
                    left = wrap("comparison_operator", kid)
                    continue
                break
            if t.kind != tk.OP:
                break
            op_text = self.text(t)
            if op_text == ":=" and rbp < 4:
                op = self.take()
                right = self.expression(4)
                left = wrap("named_expression", [left, op, right])
                continue
            bp = _BP.get(op_text)
            if bp is None or bp <= rbp:
                break
            op = self.take()
            right = self.expression(bp - 1 if op_text == "**" else bp, stop_in=stop_in)
            if op_text in _COMPARE_OPS:
                left = wrap("comparison_operator", [left, op, right])
            elif op_text in ("+", "-", "*", "/", "//", "%", "**", "@", "|", "^", "&", "<<", ">>"):
                left = wrap("binary_operator", [left, op, right])
            else:
                left = wrap("binary_operator", [left, op, right])
        return left

    def _nud(self, stop_in: bool = False) -> T:
        t = self.peek()
        if t.kind == tk.NAME:
            word = self.text(t)
            if word == "lambda":
                return self._lambda()
            if word == "not":
                kw = self.take()
                return wrap("not_operator", [kw, self.expression(25, stop_in=stop_in)])
            if word == "await":
                kw = self.take()
                return wrap("await_expression", [kw, self.expression(105)])
            if word == "yield":
                kw = self.take()
                kids = [kw]
                if self.at_kw("from"):
                    kids.append(self.take())
                if not self._at_simple_end() and not self.at_op(")", "]", "}", ","):
                    kids.append(self._testlist())
                return wrap("yield_expression", kids)
            if word in _KEYWORDS - {"match", "case", "True", "False", "None"} and word not in ("lambda", "not", "await", "yield"):
                raise Mismatch(f"unexpected keyword {word}")
            base = self.take()
            return self._postfix(base)
        if t.kind in (tk.NUMBER, tk.STRING):
            base = self.take()
            if base.kind == "string":
                while self.peek().kind == tk.STRING:
                    nxt = self.take()
                    base = wrap("concatenated_string", [base, nxt])
            return self._postfix(base)
        if t.kind == tk.OP:
            op_text = self.text(t)
            if op_text == "(":
                return self._postfix(self._paren_expr())
            if op_text == "[":
                return self._postfix(self._list_expr())
            if op_text == "{":
                return self._postfix(self._dict_or_set())
            if op_text in ("-", "+", "~"):
                op = self.take()
                return wrap("unary_operator", [op, self.expression(55, stop_in=stop_in)])
            if op_text in ("*", "**"):
                op = self.take()
                return wrap("splat_argument", [op, self.expression(55, stop_in=stop_in)])
            if op_text == "...":
                return self.take()
        raise Mismatch("expression")

    def _lambda(self) -> T:
        kids = [self.take()]
        params: list[T] = []
        while not self.at_op(":"):
            if self._at_simple_end():
                raise Mismatch(":")
            params.append(self.take())
        if params:
            kids.append(wrap("lambda_parameters", params))
        kids.append(self.expect_op(":"))
        kids.append(self.expression(3))
        return wrap("lambda", kids)

    def _paren_expr(self) -> T:
        open_p = self.take()
        if self.at_op(")"):
            return wrap("tuple", [open_p, self.take()])
        first = self.expression()
        if self.at_kw("for"):
            comp = self._comprehension_tail([open_p, first])
            comp.append(self.expect_op(")"))
            return wrap("generator_expression", comp)
        items = [open_p, first]
        is_tuple = False
        while self.at_op(","):
            is_tuple = True
            items.append(self.take())
            if self.at_op(")"):
                break
            items.append(self.expression())
        items.append(self.expect_op(")"))
        if is_tuple:
            return wrap("tuple", items)
        # parenthesized expression keeps the inner node's kind
        return wrap(first.kind, items)

    def _comprehension_tail(self, acc: list[T]) -> list[T]:
        while self.at_kw("for"):
            acc.append(self.take())
            acc.append(self._target_list())
            acc.append(self.expect_kw("in"))
            acc.append(self.expression(stop_in=False))
            while self.at_kw("if"):
                acc.append(self.take())
                acc.append(self.expression())
        return acc

    def _list_expr(self) -> T:
        kids = [self.take()]
        if self.at_op("]"):
            kids.append(self.take())
            return wrap("list", kids)
        first = self.expression()
        if self.at_kw("for"):
            kids = kids + self._comprehension_tail([first])
            kids.append(self.expect_op("]"))
            return wrap("list_comprehension", kids)
        kids.append(first)
        while self.at_op(","):
            kids.append(self.take())
            if self.at_op("]"):
                break
            kids.append(self.expression())
        kids.append(self.expect_op("]"))
        return wrap("list", kids)

    def _dict_or_set(self) -> T:
        kids = [self.take()]
        if self.at_op("}"):
            kids.append(self.take())
            return wrap("dictionary", kids)
        if self.at_op("**"):
            kids.append(self.take())
            kids.append(self.expression())
            kind = "dictionary"
        else:
            first = self.expression()
            if self.at_op(":"):
                colon = self.take()
                value = self.expression()
                pair = wrap("pair", [first, colon, value])
                if self.at_kw("for"):
                    kids = kids + self._comprehension_tail([pair])
                    kids.append(self.expect_op("}"))
                    return wrap("dictionary_comprehension", kids)
                kids.append(pair)
                kind = "dictionary"
            else:
                if self.at_kw("for"):
                    kids = kids + self._comprehension_tail([first])
                    kids.append(self.expect_op("}"))
                    return wrap("set_comprehension", kids)
                kids.append(first)
                kind = "set"
        while self.at_op(","):
            kids.append(self.take())
            if self.at_op("}"):
                break
            if kind == "dictionary" and not self.at_op("**"):
                k = self.expression()
                colon = self.expect_op(":")
                v = self.expression()
                kids.append(wrap("pair", [k, colon, v]))
            else:
                if self.at_op("**"):
                    kids.append(self.take())
                kids.append(self.expression())
        kids.append(self.expect_op("}"))
        return wrap(kind, kids)

    def _postfix(self, base: T) -> T:
        while True:
            if self.at_op("("):
                args = self._argument_list()
                base = wrap("call", [base, args])
                continue
            if self.at_op("."):
                dot = self.take()
                name = self.expect_name()
                base = wrap("attribute", [base, dot, name])
                continue
            if self.at_op("["):
                opened = self.take()
                inner: list[T] = [opened]
                while not self.at_op("]"):
                    if self.peek().kind == tk.EOF:
                        raise Mismatch("]")
                    if self.at_op(":"):
                        inner.append(self.take())
                        continue
                    if self.at_op(","):
                        inner.append(self.take())
                        continue
                    inner.append(self.expression())
                inner.append(self.take())
                has_colon = any(k.kind == ":" for k in inner)
                sub = wrap("slice", inner) if has_colon else None
                if sub is not None:
                    base = wrap("subscript", [base, sub])
                else:
                    base = wrap("subscript", [base] + inner)
                continue
            break
        return base

    def _argument_list(self) -> T:
        kids = [self.expect_op("(")]
        while not self.at_op(")"):
            if self.peek().kind == tk.EOF:
                raise Mismatch(")")
            t = self.peek()
            if (
                t.kind == tk.NAME
                and self.text(t) not in _KEYWORDS
                and self.peek(1).kind == tk.OP
                and self.text(self.peek(1)) == "="
            ):
                name = self.take()
                eq = self.take()
                val = self.expression()
                kids.append(wrap("keyword_argument", [name, eq, val]))
            else:
                arg = self.expression()
                if self.at_kw("for"):
                    comp = self._comprehension_tail([arg])
                    arg = wrap("generator_expression", comp)
                kids.append(arg)
            if self.at_op(","):
                kids.append(self.take())
        kids.append(self.take())
        return wrap("argument_list", kids)


def parse_python(src: bytes) -> tuple[T, bool]:
    toks = tk.tokenize_python(src)
    parser = PyParser(src, toks)
    root = parser.parse_module()
    had_bad_token = any(t.kind == tk.BAD for t in toks)
    return root, parser.had_error or had_bad_token or _contains_error(root)


def _contains_error(node: T) -> bool:
    if node.kind in ("ERROR", "ERROR_TOKEN"):
        return True
    return any(_contains_error(c) for c in node.children)
