"""Local algebraic simplification: constant folding and unit/zero identities.

Rewrites only where the result evaluates identically wherever the input is
defined.  Folds that would raise (0/0, sqrt(-1), overflow) are left alone.
"""

from __future__ import annotations

import math

from ..errors import EvaluationError
from .evaluate import evaluate
from .nodes import (
    Add,
    Const,
    Div,
    Expr,
    Mul,
    Neg,
    PlusMinus,
    Pow,
    Sub,
    transform,
)

_MAX_PASSES = 50


def _is(e: Expr, value: float) -> bool:
    return isinstance(e, Const) and e.value == value


def _minus(e: Expr) -> Expr | None:
    """Exact negation of ``e`` when it is visibly negative, else None."""
    if isinstance(e, Neg):
        return e.arg
    if isinstance(e, Const) and e.value < 0:
        return Const(-e.value)
    if isinstance(e, Mul) and (m := _minus(e.left)) is not None:
        return Mul(m, e.right)
    return None


def _fold(e: Expr) -> Expr:
    """Replace a node whose children are all constants by its value."""
    kids = e.children()
    if not kids or not all(isinstance(k, Const) for k in kids):
        return e
    if isinstance(e, PlusMinus):
        return e
    try:
        v = evaluate(e)
    except EvaluationError:
        return e
    if not math.isfinite(v):
        return e
    return Const(v)


def _mul_factors(e: Expr) -> list[Expr]:
    if isinstance(e, Mul):
        return _mul_factors(e.left) + _mul_factors(e.right)
    return [e]


def _rewrite(e: Expr) -> Expr:
    e = _fold(e)
    match e:
        case Add(l, r):
            if _is(l, 0):
                return r
            if _is(r, 0):
                return l
            if (m := _minus(r)) is not None:
                return Sub(l, m)
        case Sub(l, r):
            if _is(r, 0):
                return l
            if _is(l, 0):
                return _rewrite(Neg(r))
            if (m := _minus(r)) is not None:
                return Add(l, m)
        case PlusMinus(l, r):
            if _is(r, 0):
                return l
        case Mul():
            return _rewrite_product(e)
        case Div(l, r):
            if _is(r, 1):
                return l
            if _is(l, 0) and not isinstance(r, Const):
                return l
        case Neg(Neg(a)):
            return a
        case Pow(b, x):
            if _is(x, 1):
                return b
            if _is(x, 0) and not _is(b, 0):
                return Const(1.0)
            if isinstance(b, Neg) and isinstance(x, Const) and x.value.is_integer() and x.value % 2 == 0:
                return Pow(b.arg, x)
            if isinstance(x, Const) and isinstance(b, Mul) and isinstance(b.left, Const):
                # (c*u)^n -> c^n * u^n, kept to cases with the same real domain
                c, n = b.left.value, x.value
                if c > 0 or n.is_integer():
                    try:
                        cn = math.pow(c, n)
                    except (OverflowError, ValueError, ZeroDivisionError):
                        cn = math.nan
                    if math.isfinite(cn) and cn != 0:
                        return _rewrite(Mul(Const(cn), Pow(b.right, x)))
    return e


def _rewrite_product(e: Mul) -> Expr:
    factors = _mul_factors(e)
    consts = [f.value for f in factors if isinstance(f, Const)]
    rest = [f for f in factors if not isinstance(f, Const)]
    if any(c == 0 for c in consts):
        return Const(0.0)
    if not rest:
        return e
    c = math.prod(consts)
    if not math.isfinite(c) or (c == 0 and consts):
        return e
    if len(consts) <= 1 and not (consts and c == 1):
        # nothing to merge; keep the tree (and its association) as written
        return e
    out = rest[0]
    for f in rest[1:]:
        out = Mul(out, f)
    return out if c == 1 else Mul(Const(c), out)


def _pass(e: Expr) -> Expr:
    return transform(e, _rewrite)


def simplify(e: Expr) -> Expr:
    """Fold constants and apply zero/unit identities until nothing changes.

    >>> from .parser import parse
    >>> str(simplify(parse("0*x + Q*2")))
    'Q*2'
    """
    for _ in range(_MAX_PASSES):
        new = _pass(e)
        if new == e:
            return new
        e = new
    return e

