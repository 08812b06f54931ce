"""Symbolic expression trees: parse, evaluate, differentiate, simplify, render."""

from .calculus import differentiate
from .evaluate import TOL_DIV, Binding, evaluate, evaluate_batch, sigmoid, sigmoid_batch
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
    as_expr,
    fn_symbols,
    free_variables,
    has_plus_minus,
    prob_refs,
    resolve_branch,
    substitute,
    transform,
)
from .parser import parse
from .render import canonicalize, canonicalize_and_render, render, sort_key
from .simplify import simplify


def sigmoid_expr(x: Expr) -> Expr:
    """``1 / (1 + exp(-x))`` as a tree."""
    return Div(Const(1.0), Add(Const(1.0), Exp(Neg(x))))


__all__ = [
    "Add", "Binding", "Const", "Cos", "Div", "Exp", "Expr", "FnSymbol", "Mul", "Neg",
    "PlusMinus", "Pow", "ProbRef", "Sin", "Sqrt", "Sub", "TOL_DIV", "Var", "as_expr",
    "canonicalize", "canonicalize_and_render", "differentiate", "evaluate",
    "evaluate_batch", "fn_symbols", "free_variables", "has_plus_minus", "parse",
    "prob_refs", "render", "resolve_branch", "sigmoid", "sigmoid_batch", "sigmoid_expr",
    "simplify", "sort_key", "substitute", "transform",
]
