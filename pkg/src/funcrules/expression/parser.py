"""Recursive-descent parser for the expression language.

Grammar, loosest binding first::

    expr   := term (("+" | "-" | "+-") term)*
    term   := factor (("*" | "/") factor)*
    factor := unary ("^" factor)?
    unary  := "-" unary | atom
    atom   := NUMBER | IDENT | IDENT "(" expr ("," expr)* ")"
            | "(" expr ")" | "@" IDENT

Unary minus binds tighter than ``^``, so ``-x^2`` is ``(-x)^2``.
Two lexical conventions let rendered rules parse back unchanged:
``p_<n>`` / ``rho_<n>`` are probability references and ``@NAME`` is an
opaque function symbol.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import ParseError
from .nodes import (
    FUNCTIONS,
    Add,
    Const,
    Div,
    Expr,
    FnSymbol,
    Mul,
    Neg,
    PlusMinus,
    Pow,
    ProbRef,
    Sub,
    Var,
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
  | (?P<op>\+-|[-+*/^(),@])
    """,
    re.VERBOSE,
)

PROB_RE = re.compile(r"(p|rho)_([1-9][0-9]*)")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "ws":
            for i, ch in enumerate(m.group(), start=pos):
                if ch == "\n":
                    line, line_start = line + 1, i + 1
        else:
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    tokens.append(Token("end", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def fail(self, message: str, tok: Token | None = None):
        tok = tok or self.tok
        raise ParseError(message, tok.line, tok.column)

    def accept(self, *ops: str) -> Token | None:
        tok = self.tok
        if tok.kind == "op" and tok.text in ops:
            self.i += 1
            return tok
        return None

    def expect(self, op: str) -> Token:
        tok = self.accept(op)
        if tok is None:
            found = self.tok.text or "end of input"
            self.fail(f"expected {op!r}, found {found!r}")
        return tok

    def parse(self) -> Expr:
        e = self.expr()
        if self.tok.kind != "end":
            self.fail(f"unexpected {self.tok.text!r}")
        return e

    def expr(self) -> Expr:
        e = self.term()
        while True:
            tok = self.accept("+", "-", "+-")
            if tok is None:
                return e
            rhs = self.term()
            e = {"+": Add, "-": Sub, "+-": PlusMinus}[tok.text](e, rhs)

    def term(self) -> Expr:
        e = self.factor()
        while True:
            tok = self.accept("*", "/")
            if tok is None:
                return e
            rhs = self.factor()
            e = Mul(e, rhs) if tok.text == "*" else Div(e, rhs)

    def factor(self) -> Expr:
        base = self.unary()
        if self.accept("^"):
            return Pow(base, self.factor())
        return base

    def unary(self) -> Expr:
        if self.accept("-"):
            return Neg(self.unary())
        return self.atom()

    def atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "number":
            self.i += 1
            return Const(float(tok.text))
        if tok.kind == "ident":
            self.i += 1
            if self.accept("("):
                args = [self.expr()]
                while self.accept(","):
                    args.append(self.expr())
                self.expect(")")
                fn = FUNCTIONS.get(tok.text)
                if fn is None:
                    self.fail(f"unknown operator {tok.text!r}", tok)
                if len(args) != 1:
                    self.fail(f"{tok.text} takes exactly one argument", tok)
                return fn(args[0])
            m = PROB_RE.fullmatch(tok.text)
            if m:
                return ProbRef(int(m.group(2)), normalized=m.group(1) == "rho")
            return Var(tok.text)
        if self.accept("@"):
            name = self.tok
            if name.kind != "ident":
                self.fail("expected function symbol name after '@'")
            self.i += 1
            return FnSymbol(name.text)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if tok.kind == "end":
            self.fail("unexpected end of input")
        self.fail(f"unexpected {tok.text!r}")


def parse(text: str) -> Expr:
    """Parse expression source text into an :class:`Expr`.

    >>> parse("s^3")
    Pow(left=Var(name='s'), right=Const(value=3.0))
    """
    return _Parser(text).parse()
