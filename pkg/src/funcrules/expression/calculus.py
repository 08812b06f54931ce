"""Symbolic differentiation."""

from __future__ import annotations

import math

from ..errors import UnsupportedError
from .nodes import (
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
    free_variables,
)
from .simplify import simplify

ZERO = Const(0.0)
ONE = Const(1.0)


def _d(e: Expr, x: str) -> Expr:
    match e:
        case Const() | ProbRef():
            return ZERO
        case Var(name=name):
            return ONE if name == x else ZERO
        case FnSymbol(name=name):
            raise UnsupportedError(
                f"cannot differentiate opaque function symbol {name!r}; substitute its body first"
            )
        case PlusMinus():
            raise UnsupportedError("cannot differentiate an unresolved plus-minus; resolve a branch first")
        case Add(l, r):
            return Add(_d(l, x), _d(r, x))
        case Sub(l, r):
            return Sub(_d(l, x), _d(r, x))
        case Mul(l, r):
            return Add(Mul(_d(l, x), r), Mul(l, _d(r, x)))
        case Div(l, r):
            return Div(Sub(Mul(_d(l, x), r), Mul(l, _d(r, x))), Pow(r, Const(2.0)))
        case Neg(a):
            return Neg(_d(a, x))
        case Pow(b, n):
            if x not in free_variables(n):
                # power rule; n may be any expression free of x
                return Mul(Mul(n, Pow(b, Sub(n, ONE))), _d(b, x))
            if isinstance(b, Const) and b.value > 0:
                return Mul(Mul(e, Const(math.log(b.value))), _d(n, x))
            raise UnsupportedError("cannot differentiate a variable base raised to a variable power")
        case Sqrt(a):
            return Div(_d(a, x), Mul(Const(2.0), e))
        case Sin(a):
            return Mul(Cos(a), _d(a, x))
        case Cos(a):
            return Neg(Mul(Sin(a), _d(a, x)))
        case Exp(a):
            return Mul(e, _d(a, x))
    raise TypeError(f"not an expression node: {e!r}")


def differentiate(e: Expr, var: str) -> Expr:
    """Derivative of ``e`` with respect to variable ``var``, simplified.

    >>> from .parser import parse
    >>> str(differentiate(parse("s^3"), "s"))
    '3*s^2'
    """
    return simplify(_d(e, var))
