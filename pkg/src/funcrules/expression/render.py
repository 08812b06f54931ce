"""Canonical operand ordering and text rendering.

Three styles:

``plain``
    ASCII, ``+-`` for plus-minus, ``rho_n`` for normalized probabilities.
``unicode``
    ``·``, ``±``, ``√`` and ``ρ_n``.
``machine``
    Like plain but function symbols are written ``@NAME`` so the text parses
    back to an identical tree.
"""

from __future__ import annotations

import math

from .nodes import (
    ATOMS,
    Add,
    Const,
    Cos,
    Div,
    Exp,
    Expr,
    FnSymbol,
    Mul,
    Neg,
    PlusMinus,
    Pow,
    ProbRef,
    Sin,
    Sqrt,
    Sub,
    Var,
    transform,
)

STYLES = ("plain", "unicode", "machine")

# Compound kinds, in sort order.
_KINDS = (Add, Sub, PlusMinus, Mul, Div, Neg, Pow, Sqrt, Sin, Cos, Exp)


def sort_key(e: Expr) -> tuple:
    """Total order: constants, function symbols, variables, probabilities,
    then compound nodes by kind and recursively by children."""
    match e:
        case Const(value=v):
            return (0, v)
        case FnSymbol(name=name):
            return (1, name)
        case Var(name=name):
            return (2, name)
        case ProbRef(index=i, normalized=norm):
            return (3, i, norm)
    return (4, _KINDS.index(type(e)), tuple(sort_key(k) for k in e.children()))


def _chain(e: Expr, kind: type) -> list[Expr]:
    if isinstance(e, kind):
        return _chain(e.left, kind) + _chain(e.right, kind)
    return [e]


def _fold_left(kind: type, items: list[Expr]) -> Expr:
    out = items[0]
    for it in items[1:]:
        out = kind(out, it)
    return out


def _canon_node(e: Expr) -> Expr:
    if isinstance(e, Const) and math.copysign(1.0, e.value) < 0:
        return Neg(Const(-e.value))
    if isinstance(e, Add):
        terms = sorted(_chain(e, Add), key=sort_key)
        out = terms[0]
        for t in terms[1:]:
            out = Sub(out, t.arg) if isinstance(t, Neg) else Add(out, t)
        return out
    if isinstance(e, Mul):
        factors = _chain(e, Mul)
        negs = 0
        plain = []
        for f in factors:
            while isinstance(f, Neg):
                negs += 1
                f = f.arg
            plain.extend(_chain(f, Mul))
        out = _fold_left(Mul, sorted(plain, key=sort_key))
        return Neg(out) if negs % 2 else out
    if isinstance(e, Neg) and isinstance(e.arg, Neg):
        return e.arg.arg
    return e


def canonicalize(e: Expr) -> Expr:
    """Reorder commutative operands into the fixed total order.

    Associative chains of ``+`` and ``*`` are flattened, sorted and rebuilt
    left-associated, negated terms after the first becoming subtractions; sign factors are pulled out of products; negative
    literals become ``Neg`` of a positive literal.  Value-preserving up to
    floating-point reassociation.
    """
    prev = None
    while prev != e:
        prev, e = e, transform(e, _canon_node)
    return e


# Binding strength used for parenthesisation.
_ADD, _MUL, _NEG, _POW, _ATOM = 1, 2, 3, 4, 5


def _prec(e: Expr) -> int:
    if isinstance(e, (Add, Sub, PlusMinus)):
        return _ADD
    if isinstance(e, (Mul, Div)):
        return _MUL
    if isinstance(e, Neg):
        return _NEG
    if isinstance(e, Pow):
        return _POW
    if isinstance(e, Const) and math.copysign(1.0, e.value) < 0:
        return _NEG
    return _ATOM


def format_number(v: float) -> str:
    if v.is_integer() and abs(v) < 1e16:
        return str(int(v)) if v != 0 or math.copysign(1.0, v) > 0 else "-0"
    return repr(v)


class _Renderer:
    def __init__(self, style: str):
        if style not in STYLES:
            raise ValueError(f"unknown style {style!r}; expected one of {STYLES}")
        self.style = style
        uni = style == "unicode"
        self.mul = "·" if uni else "*"
        self.pm = " ± " if uni else " +- "

    def atom(self, e: Expr) -> str:
        match e:
            case Const(value=v):
                return format_number(v)
            case Var(name=name):
                return name
            case FnSymbol(name=name):
                return "@" + name if self.style == "machine" else name
            case ProbRef(index=i, normalized=norm):
                if not norm:
                    return f"p_{i}"
                return f"ρ_{i}" if self.style == "unicode" else f"rho_{i}"
        raise TypeError(e)

    def wrap(self, e: Expr, ok: bool) -> str:
        s = self.r(e)
        return s if ok else f"({s})"

    def r(self, e: Expr) -> str:
        if isinstance(e, ATOMS):
            return self.atom(e)
        match e:
            case Add(l, r) | Sub(l, r) | PlusMinus(l, r):
                op = {Add: " + ", Sub: " - ", PlusMinus: self.pm}[type(e)]
                return self.wrap(l, True) + op + self.wrap(r, _prec(r) > _ADD)
            case Mul(l, r) | Div(l, r):
                op = self.mul if isinstance(e, Mul) else "/"
                return self.wrap(l, _prec(l) >= _MUL) + op + self.wrap(r, _prec(r) > _MUL)
            case Neg(a):
                # "-x^2" would parse as (-x)^2, so powers need parentheses
                return "-" + self.wrap(a, _prec(a) >= _NEG and not isinstance(a, Pow))
            case Pow(b, x):
                return self.wrap(b, _prec(b) == _ATOM) + "^" + self.wrap(x, _prec(x) >= _NEG)
            case Sqrt(a):
                if self.style == "unicode":
                    return "√(" + self.r(a) + ")"
                return "sqrt(" + self.r(a) + ")"
            case Sin(a) | Cos(a) | Exp(a):
                name = type(e).__name__.lower()
                return f"{name}({self.r(a)})"
        raise TypeError(f"not an expression node: {e!r}")


def render(e: Expr, style: str = "plain", canonical: bool = True) -> str:
    """Render ``e`` as text, canonicalizing first unless told not to.

    >>> from .nodes import Mul, ProbRef, FnSymbol
    >>> render(Mul(ProbRef(8), FnSymbol("Q")))
    'Q*p_8'
    """
    if canonical:
        e = canonicalize(e)
    return _Renderer(style).r(e)


canonicalize_and_render = render
