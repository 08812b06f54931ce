"""Put formal rules into words."""

from __future__ import annotations

from .errors import ValidationError
from .expression import (
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
    render,
)
from .expression.render import format_number
from .extraction import ProbabilityAssignment, Rule
from .registry import Registry

_WORDS = ("zero", "one", "two", "three", "four", "five", "six", "seven", "eight",
          "nine", "ten", "eleven", "twelve")
_FUNCTION_MODIFIERS = {Sqrt: "square root of", Sin: "sine of", Cos: "cosine of", Exp: "exponential of"}


def _number_word(v: float) -> str:
    if v.is_integer() and 0 <= v < len(_WORDS):
        return _WORDS[int(v)]
    return format_number(v)


def _power_modifier(exponent: Expr) -> str:
    if isinstance(exponent, Const):
        if exponent.value == 2:
            return "squared"
        if exponent.value == 3:
            return "cubed"
        return f"power {format_number(exponent.value)} of"
    return "power of"


def _factors(e: Expr) -> list[Expr]:
    if isinstance(e, Mul):
        return _factors(e.left) + _factors(e.right)
    return [e]


class _Verbalizer:
    def __init__(self, pa: ProbabilityAssignment, reg: Registry, style: str):
        self.net = pa.network
        self.reg = reg
        self.style = style
        self.clauses: list[str] = []

    def display(self, node_id: str) -> str:
        fc = self.reg[self.net.node(node_id).fc_name]
        if not fc.display_name.strip():
            raise ValidationError(f"function {fc.name!r} has no display name")
        return fc.display_name

    def subject(self, e: Expr) -> str | None:
        if isinstance(e, FnSymbol):
            return self.display(e.name)
        if isinstance(e, Var) and e.name in self.net.inputs:
            return f"input {e.name}"
        return None

    def probability(self, refs: list[ProbRef]) -> str:
        return "".join(render(r, self.style) for r in sorted(refs, key=lambda r: r.index))

    def emit(self, modifiers: list[str], subjects: list[str], refs: list[ProbRef]) -> None:
        text = " ".join(modifiers + [" and ".join(subjects)])
        if len(subjects) > 1:
            text += " products"
        if refs:
            text += " at probability " + self.probability(refs)
        self.clauses.append(text)

    def visit(self, e: Expr, mods: list[str], refs: list[ProbRef]) -> None:
        if isinstance(e, Mul):
            self.product(_factors(e), mods, refs)
            return
        name = self.subject(e)
        if name is not None:
            self.emit(mods, [name], refs)
            return
        match e:
            case Neg(a):
                self.visit(a, mods + ["negative"], refs)
            case Sub(l, r):
                self.visit(l, mods, refs)
                self.visit(r, mods + ["negative"], refs)
            case Add(l, r) | PlusMinus(l, r):
                self.visit(l, mods, refs)
                self.visit(r, mods, refs)
            case Div(l, r):
                self.visit(l, mods, refs)
                self.visit(r, mods + ["reciprocal of"], refs)
            case Pow(b, x):
                self.visit(b, mods + [_power_modifier(x)], refs)
            case Sqrt(a) | Sin(a) | Cos(a) | Exp(a):
                self.visit(a, mods + [_FUNCTION_MODIFIERS[type(e)]], refs)

    def product(self, factors: list[Expr], mods: list[str], refs: list[ProbRef]) -> None:
        numbers = [_number_word(f.value) for f in factors if isinstance(f, Const)]
        probs = [f for f in factors if isinstance(f, ProbRef)]
        subjects = [s for s in map(self.subject, factors) if s is not None]
        mods, refs = mods + numbers, refs + probs
        if subjects:
            self.emit(mods, subjects, refs)
        for f in factors:
            if not isinstance(f, (Const, ProbRef, FnSymbol, Var)):
                self.visit(f, mods, refs)


def _join(items: list[str]) -> str:
    if len(items) <= 2:
        return " and ".join(items)
    return ", ".join(items[:-1]) + ", and " + items[-1]


def render_informal(rule: Rule, reg: Registry, pa: ProbabilityAssignment) -> str:
    """Worded form of a formal rule.

    The output probability opens the sentence; every function-symbol (or
    input) occurrence in the output node's expanded body becomes one clause
    with its modifiers and the probabilities multiplying it.
    """
    net = pa.network
    style = "unicode" if rule.normalized else "plain"
    out_ref = ProbRef(net.output_edge.edge_id, rule.normalized)
    factors = _factors(rule.expr)
    if out_ref not in factors:
        raise ValidationError("rule does not carry the output probability as a top-level factor")
    rest = list(factors)
    rest.remove(out_ref)

    v = _Verbalizer(pa, reg, style)
    outer = v.display(net.output_node)
    if not outer.endswith("relationship"):
        outer += " relationship"
    if rest != [FnSymbol(net.output_node)]:
        v.product(rest, [], [])
    head = f"The output of the network is based on rule that the probability {render(out_ref, style)} of {outer}"
    if v.clauses:
        head += " between " + _join(v.clauses)
    return head + ", is true."
