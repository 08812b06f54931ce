"""Exception hierarchy shared by every funcrules module."""

from __future__ import annotations


class FuncRulesError(Exception):
    """Base class for all errors raised by funcrules."""


class ParseError(FuncRulesError, ValueError):
    """Malformed expression or file text.  Carries a 1-based position."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class ValidationError(FuncRulesError, ValueError):
    """A structurally invalid registry, network, dataset or model file."""


class UnsupportedError(FuncRulesError):
    """The operation has no defined semantics for its argument."""


class EvaluationError(FuncRulesError):
    """Numeric evaluation failed."""


class UnboundSymbolError(EvaluationError, KeyError):
    def __str__(self) -> str:  # KeyError would repr() the message
        return str(self.args[0]) if self.args else ""


class DomainError(EvaluationError, ArithmeticError):
    """Real-valued evaluation left its domain (sqrt of a negative, overflow)."""


class SingularityError(DomainError):
    """A denominator (or a probability source value) is numerically zero."""


class UndefinedProbabilityError(SingularityError):
    def __init__(self, edge_id: int, node: str, value: float):
        super().__init__(
            f"probability of edge {edge_id} is undefined: source node {node!r} "
            f"has value {value!r}"
        )
        self.edge_id = edge_id
        self.node = node
        self.value = value


class TrainingError(FuncRulesError):
    """Loss could not be computed or training diverged."""
