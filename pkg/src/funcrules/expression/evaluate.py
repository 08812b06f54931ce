"""Numeric evaluation of expression trees.

:func:`evaluate` works on Python floats and raises on every domain problem.
:func:`evaluate_batch` evaluates over numpy arrays of samples and flags the
bad rows instead of raising, which is what training needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from ..errors import DomainError, SingularityError, UnboundSymbolError
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
)

TOL_DIV = 1e-12
BRANCHES = ("plus", "minus")


@dataclass(frozen=True)
class Binding:
    """Values for the free symbols of an expression.

    ``symbols`` binds :class:`FnSymbol` atoms to numbers (used when a rule is
    evaluated against a forward pass).
    """

    variables: Mapping[str, float] = field(default_factory=dict)
    probabilities: Mapping[int, float] = field(default_factory=dict)
    pm_branch: str = "plus"
    symbols: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.pm_branch not in BRANCHES:
            raise ValueError(f"pm_branch must be 'plus' or 'minus', got {self.pm_branch!r}")


def sigmoid(x: float) -> float:
    """Logistic function, written to avoid overflow for large ``|x|``."""
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    z = math.exp(x)
    return z / (1.0 + z)


def _pow(base: float, exponent: float) -> float:
    if base == 0.0 and exponent < 0:
        raise SingularityError("zero raised to a negative power")
    try:
        return math.pow(base, exponent)
    except ValueError:
        raise DomainError(f"{base!r} ^ {exponent!r} is not real") from None
    except OverflowError:
        raise DomainError(f"{base!r} ^ {exponent!r} overflows") from None


def _exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        raise DomainError(f"exp({x!r}) overflows") from None


def evaluate(e: Expr, b: Binding | None = None, tol_div: float = TOL_DIV) -> float:
    """Evaluate ``e`` to a float under binding ``b``.

    Raises :class:`UnboundSymbolError` for missing symbols,
    :class:`SingularityError` when a denominator is smaller than ``tol_div``
    in magnitude and :class:`DomainError` for square roots of negatives.
    """
    b = b or Binding()
    plus = b.pm_branch == "plus"

    def ev(n: Expr) -> float:
        match n:
            case Const(value=v):
                return v
            case Var(name=name):
                try:
                    return float(b.variables[name])
                except KeyError:
                    raise UnboundSymbolError(f"unbound variable {name!r}") from None
            case ProbRef(index=i, normalized=norm):
                try:
                    return float(b.probabilities[i])
                except KeyError:
                    sym = "rho" if norm else "p"
                    raise UnboundSymbolError(f"unbound probability {sym}_{i}") from None
            case FnSymbol(name=name):
                try:
                    return float(b.symbols[name])
                except KeyError:
                    raise UnboundSymbolError(f"function symbol {name!r} has no numeric value") from None
            case Add(l, r):
                return ev(l) + ev(r)
            case Sub(l, r):
                return ev(l) - ev(r)
            case PlusMinus(l, r):
                return ev(l) + ev(r) if plus else ev(l) - ev(r)
            case Mul(l, r):
                return ev(l) * ev(r)
            case Div(l, r):
                num, den = ev(l), ev(r)
                if abs(den) < tol_div:
                    raise SingularityError(f"division by {den!r}")
                return num / den
            case Pow(l, r):
                return _pow(ev(l), ev(r))
            case Neg(a):
                return -ev(a)
            case Sqrt(a):
                x = ev(a)
                if x < 0:
                    raise DomainError(f"sqrt of negative value {x!r}")
                return math.sqrt(x)
            case Sin(a):
                return math.sin(ev(a))
            case Cos(a):
                return math.cos(ev(a))
            case Exp(a):
                return _exp(ev(a))
        raise TypeError(f"not an expression node: {n!r}")

    return ev(e)


def evaluate_batch(
    e: Expr,
    variables: Mapping[str, np.ndarray],
    pm_branch: str = "plus",
    guard: float = TOL_DIV,
    n: int | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised evaluation over samples.

    Returns ``(values, bad)`` where ``bad`` marks rows that hit a denominator
    below ``guard``, a negative square root or a non-finite value.  Values in
    bad rows are unspecified.
    """
    if n is None:
        n = len(next(iter(variables.values()))) if variables else 1
    bad = np.zeros(n, dtype=bool)
    plus = pm_branch == "plus"

    def ev(node: Expr) -> np.ndarray:
        nonlocal bad
        match node:
            case Const(value=v):
                return np.full(n, v)
            case Var(name=name):
                try:
                    return np.asarray(variables[name], dtype=float)
                except KeyError:
                    raise UnboundSymbolError(f"unbound variable {name!r}") from None
            case Add(l, r):
                return ev(l) + ev(r)
            case Sub(l, r):
                return ev(l) - ev(r)
            case PlusMinus(l, r):
                return ev(l) + ev(r) if plus else ev(l) - ev(r)
            case Mul(l, r):
                return ev(l) * ev(r)
            case Div(l, r):
                num, den = ev(l), ev(r)
                small = np.abs(den) < guard
                bad |= small
                return num / np.where(small, 1.0, den)
            case Pow(l, r):
                base, ex = ev(l), ev(r)
                bad |= (base == 0.0) & (ex < 0)
                return np.power(base, ex)
            case Neg(a):
                return -ev(a)
            case Sqrt(a):
                x = ev(a)
                bad |= x < 0
                return np.sqrt(np.abs(x))
            case Sin(a):
                return np.sin(ev(a))
            case Cos(a):
                return np.cos(ev(a))
            case Exp(a):
                return np.exp(ev(a))
        raise UnboundSymbolError(f"cannot evaluate {type(node).__name__} over a batch")

    with np.errstate(all="ignore"):
        out = ev(e)
        bad |= ~np.isfinite(out)
    return out, bad


def sigmoid_batch(x: np.ndarray) -> np.ndarray:
    z = np.exp(-np.abs(x))
    return np.where(x >= 0, 1.0 / (1.0 + z), z / (1.0 + z))
