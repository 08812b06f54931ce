"""Immutable expression tree nodes.

Every node is a frozen dataclass, so trees hash and compare structurally.
Arithmetic operators are overloaded to make building trees by hand less
verbose; they build nodes and never simplify.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

Number = Union[int, float]


class Expr:
    """Base class of all expression nodes."""

    __slots__ = ()

    def children(self) -> tuple[Expr, ...]:
        return ()

    def rebuild(self, children: tuple[Expr, ...]) -> Expr:
        return self

    def walk(self) -> Iterator[Expr]:
        """Pre-order traversal, left to right."""
        stack: list[Expr] = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children()))

    def __add__(self, other):
        return Add(self, as_expr(other))

    def __radd__(self, other):
        return Add(as_expr(other), self)

    def __sub__(self, other):
        return Sub(self, as_expr(other))

    def __rsub__(self, other):
        return Sub(as_expr(other), self)

    def __mul__(self, other):
        return Mul(self, as_expr(other))

    def __rmul__(self, other):
        return Mul(as_expr(other), self)

    def __truediv__(self, other):
        return Div(self, as_expr(other))

    def __rtruediv__(self, other):
        return Div(as_expr(other), self)

    def __pow__(self, other):
        return Pow(self, as_expr(other))

    def __rpow__(self, other):
        return Pow(as_expr(other), self)

    def __neg__(self):
        return Neg(self)

    def __str__(self) -> str:
        from .render import render

        return render(self, "plain", canonical=False)


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return Const(value)
    raise TypeError(f"cannot convert {value!r} to an expression")


@dataclass(frozen=True, slots=True)
class Const(Expr):
    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))


@dataclass(frozen=True, slots=True)
class Var(Expr):
    name: str


@dataclass(frozen=True, slots=True)
class FnSymbol(Expr):
    """Opaque reference to a comprehensive function (by network node id)."""

    name: str


@dataclass(frozen=True, slots=True)
class ProbRef(Expr):
    """Edge probability ``p_index``, or ``rho_index`` when normalized."""

    index: int
    normalized: bool = False

    def __post_init__(self):
        if self.index < 1:
            raise ValueError("probability index must be positive")


@dataclass(frozen=True, slots=True)
class _Unary(Expr):
    arg: Expr

    def children(self):
        return (self.arg,)

    def rebuild(self, children):
        return type(self)(children[0])


@dataclass(frozen=True, slots=True)
class _Binary(Expr):
    left: Expr
    right: Expr

    def children(self):
        return (self.left, self.right)

    def rebuild(self, children):
        return type(self)(children[0], children[1])


class Neg(_Unary):
    __slots__ = ()


class Sqrt(_Unary):
    __slots__ = ()


class Sin(_Unary):
    __slots__ = ()


class Cos(_Unary):
    __slots__ = ()


class Exp(_Unary):
    __slots__ = ()


class Add(_Binary):
    __slots__ = ()


class Sub(_Binary):
    __slots__ = ()


class Mul(_Binary):
    __slots__ = ()


class Div(_Binary):
    __slots__ = ()


class Pow(_Binary):
    __slots__ = ()

    @property
    def base(self) -> Expr:
        return self.left

    @property
    def exponent(self) -> Expr:
        return self.right


class PlusMinus(_Binary):
    """``left ± right``; a branch is chosen only at numeric evaluation."""

    __slots__ = ()


FUNCTIONS: dict[str, type[_Unary]] = {
    "sin": Sin,
    "cos": Cos,
    "sqrt": Sqrt,
    "exp": Exp,
}

ATOMS = (Const, Var, FnSymbol, ProbRef)


def free_variables(e: Expr) -> set[str]:
    return {n.name for n in e.walk() if isinstance(n, Var)}


def fn_symbols(e: Expr) -> set[str]:
    return {n.name for n in e.walk() if isinstance(n, FnSymbol)}


def prob_refs(e: Expr) -> set[ProbRef]:
    return {n for n in e.walk() if isinstance(n, ProbRef)}


def has_plus_minus(e: Expr) -> bool:
    return any(isinstance(n, PlusMinus) for n in e.walk())


def transform(e: Expr, fn) -> Expr:
    """Rebuild ``e`` bottom-up, passing every rebuilt node through ``fn``."""
    kids = e.children()
    if kids:
        new = tuple(transform(k, fn) for k in kids)
        if any(a is not b for a, b in zip(new, kids)):
            e = e.rebuild(new)
    return fn(e)


def substitute(e: Expr, mapping: dict[Expr, Expr]) -> Expr:
    """Replace every atom found as a key of ``mapping`` (values may be numbers)."""
    mapping = {k: as_expr(v) for k, v in mapping.items()}
    return transform(e, lambda n: mapping.get(n, n) if isinstance(n, ATOMS) else n)


def resolve_branch(e: Expr, branch: str) -> Expr:
    """Replace every PlusMinus with Add (``plus``) or Sub (``minus``)."""
    if branch not in ("plus", "minus"):
        raise ValueError(f"unknown branch {branch!r}")
    op = Add if branch == "plus" else Sub

    def fix(n):
        return op(n.left, n.right) if isinstance(n, PlusMinus) else n

    return transform(e, fix)


def size(e: Expr) -> int:
    return sum(1 for _ in e.walk())
