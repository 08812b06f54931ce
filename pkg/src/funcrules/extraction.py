"""Functional rule extraction.

For an edge leaving node ``m`` with weight ``w`` the probability ``p`` is the
number satisfying ``f_m * p = sigmoid(f_m) * w``.  Replacing every weighted
sigmoid by ``f * p`` turns the network output into a symbolic rule over the
comprehensive functions.  The rule at collapse level ``k`` keeps nodes of
layer ``<= k - 1`` as atomic symbols and expands deeper nodes into their
bodies, so level ``depth + 1`` is ``OUT * p_out`` and level 1 is written in
inputs and weights alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

from .errors import UndefinedProbabilityError, UnsupportedError, ValidationError
from .expression import (
    Binding,
    Const,
    Expr,
    FnSymbol,
    Mul,
    ProbRef,
    Var,
    canonicalize,
    evaluate,
    has_plus_minus,
    render,
    simplify,
    substitute,
)
from .expression.evaluate import TOL_DIV, sigmoid
from .network import Network, _require_directed, forward, weight_name


@dataclass(frozen=True)
class ProbabilityAssignment:
    """Edge probabilities of ``network`` at ``reference_input``.

    ``p`` covers every edge whose source is a node, the output edge
    included.  ``rho`` is filled in by :func:`normalize`.
    """

    network: Network
    reference_input: dict[str, float]
    p: dict[int, float]
    rho: dict[int, float] | None = None
    source_values: dict[int, float] = field(default_factory=dict, compare=False)

    def values(self, normalized: bool = False) -> dict[int, float]:
        if not normalized:
            return self.p
        if self.rho is None:
            raise ValueError("assignment is not normalized; call normalize() first")
        return self.rho


def probabilities(net: Network, reference_input: Mapping[str, float], singular_guard: float = TOL_DIV) -> ProbabilityAssignment:
    """Compute ``p_e = sigmoid(f) * w_e / f`` for every node-sourced edge."""
    ev = forward(net, reference_input)
    p, src = {}, {}
    for e in net.edges:
        if not net.is_node(e.source):
            continue
        f = ev.preactivation[e.source]
        if abs(f) < singular_guard:
            raise UndefinedProbabilityError(e.edge_id, e.source, f)
        p[e.edge_id] = sigmoid(f) * e.weight / f
        src[e.edge_id] = f
    ref = {x: float(reference_input[x]) for x in net.inputs}
    return ProbabilityAssignment(net, ref, p, None, src)


def normalize(pa: ProbabilityAssignment) -> ProbabilityAssignment:
    """Softmax over all covered edges, in edge-id order."""
    if not pa.p:
        raise ValueError("no probabilities to normalize")
    ids = sorted(pa.p)
    top = max(pa.p.values())
    exps = [math.exp(pa.p[i] - top) for i in ids]
    total = math.fsum(exps)
    rho = {i: x / total for i, x in zip(ids, exps)}
    return ProbabilityAssignment(pa.network, pa.reference_input, pa.p, rho, pa.source_values)


@dataclass(frozen=True)
class Rule:
    level: int
    expr: Expr
    normalized: bool = False
    directed: bool = True

    def render(self, style: str = "plain") -> str:
        return render(self.expr, style)

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class RuleSet:
    rules: tuple[Rule, ...]
    assignment: ProbabilityAssignment

    def __getitem__(self, level: int) -> Rule:
        """Rule by level (1-based)."""
        return self.rules[level - 1]

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)


def extract(net: Network, level: int, pa: ProbabilityAssignment | None = None, *, normalized: bool = False) -> Rule:
    """Formal rule at collapse ``level`` (1 .. depth + 1).

    ``pa`` is not needed to build the symbolic form; it is accepted so call
    sites can pass the assignment the rule will be evaluated against.
    """
    _require_directed(net)
    if not 1 <= level <= net.depth + 1:
        raise ValidationError(f"level must be in 1..{net.depth + 1}, got {level}")
    if pa is not None and pa.network is not net and pa.network != net:
        raise ValueError("probability assignment belongs to a different network")
    memo: dict[str, Expr] = {}

    def node_expr(nid: str) -> Expr:
        if nid not in memo:
            node = net.node(nid)
            if node.layer <= level - 1:
                memo[nid] = FnSymbol(nid)
            else:
                args = [contribution(e) for e in node.incoming]
                memo[nid] = node.fc.instantiate(args)
        return memo[nid]

    def contribution(e) -> Expr:
        if net.is_node(e.source):
            return Mul(node_expr(e.source), ProbRef(e.edge_id, normalized))
        return Mul(Var(weight_name(e.edge_id)), Var(e.source))

    out = net.output_edge
    expr = Mul(node_expr(out.source), ProbRef(out.edge_id, normalized))
    return Rule(level, canonicalize(simplify(expr)), normalized, net.directed)


def extract_all(net: Network, reference_input: Mapping[str, float], *, normalized: bool = False) -> RuleSet:
    pa = probabilities(net, reference_input)
    if normalized:
        pa = normalize(pa)
    rules = tuple(extract(net, k, pa, normalized=normalized) for k in range(1, net.depth + 2))
    return RuleSet(rules, pa)


def rule_binding(rule: Rule, pa: ProbabilityAssignment, inputs: Mapping[str, float] | None = None) -> Binding:
    """Binding that evaluates ``rule`` against the network's forward pass."""
    net = pa.network
    inputs = pa.reference_input if inputs is None else inputs
    ev = forward(net, inputs)
    variables = {x: float(inputs[x]) for x in net.inputs}
    variables.update({weight_name(e.edge_id): e.weight for e in net.edges})
    return Binding(
        variables,
        pa.values(rule.normalized),
        _single_branch(net, rule.level),
        dict(ev.preactivation),
    )


def _single_branch(net: Network, level: int) -> str:
    """The plus-minus branch shared by every node expanded at ``level``."""
    branches = {n.pm_branch for n in net.nodes if n.layer >= level and has_plus_minus(n.fc.body)}
    if len(branches) > 1:
        raise UnsupportedError("expanded nodes disagree on the plus-minus branch; a rule holds a single branch")
    return branches.pop() if branches else "plus"


def evaluate_rule(rule: Rule, pa: ProbabilityAssignment, inputs: Mapping[str, float] | None = None) -> float:
    """Evaluate an unnormalized rule; it reproduces the network output.

    Function symbols take their node's preactivation at the input.
    """
    if rule.normalized:
        raise ValueError("normalized rules do not reconstruct the network output")
    if inputs is not None:
        ref = {x: float(inputs[x]) for x in pa.network.inputs}
        if ref != pa.reference_input:
            raise ValueError("probabilities were computed at a different input")
    return evaluate(rule.expr, rule_binding(rule, pa))


Locator = str | tuple[str, int]


def _locate(rule: Rule, locator: Locator) -> list[ProbRef]:
    name, nth = (locator, 0) if isinstance(locator, str) else locator
    found: list[list[ProbRef]] = []

    def visit(e: Expr, coeffs: list[ProbRef]):
        if isinstance(e, FnSymbol):
            if e.name == name:
                found.append(coeffs)
            return
        if isinstance(e, Mul):
            factors = _factors(e)
            for k, f in enumerate(factors):
                others = [g for j, g in enumerate(factors) if j != k and isinstance(g, ProbRef)]
                visit(f, coeffs + others)
            return
        for c in e.children():
            visit(c, coeffs)

    visit(rule.expr, [])
    if nth >= len(found):
        raise KeyError(f"no occurrence {nth} of {name!r} in rule (found {len(found)})")
    return found[nth]


def _factors(e: Expr) -> list[Expr]:
    if isinstance(e, Mul):
        return _factors(e.left) + _factors(e.right)
    return [e]


def coefficients(rule: Rule, locator: Locator) -> list[ProbRef]:
    """Probability references multiplying one function-symbol occurrence.

    ``locator`` is a symbol name (first occurrence) or ``(name, n)`` for the
    n-th occurrence in pre-order.  Only probabilities count as coefficients;
    numeric constants do not.
    """
    return sorted(_locate(rule, locator), key=lambda r: r.index)


def function_probability(rule: Rule, locator: Locator, pa: ProbabilityAssignment) -> float:
    """Product of the probability coefficients of one occurrence."""
    values = pa.values(rule.normalized)
    return math.prod(values[r.index] for r in coefficients(rule, locator))


@dataclass(frozen=True)
class Equation:
    expr: Expr
    unsimplified: Expr
    reference_input: dict[str, float]
    epsilon: float
    omitted: tuple[int, ...]
    pm_branch: str = "plus"

    def render(self) -> str:
        ref = ", ".join(f"{k}={v!r}" for k, v in self.reference_input.items())
        omitted = " ".join(map(str, self.omitted)) or "none"
        return (
            f"# reference input: {ref}\n"
            f"# epsilon: {self.epsilon!r}\n"
            f"# omitted edges: {omitted}\n"
            f"{render(self.expr, 'machine')}\n"
        )

    def __call__(self, **inputs: float) -> float:
        return evaluate(self.expr, Binding(inputs, pm_branch=self.pm_branch))


def generate_equation(net: Network, reference_input: Mapping[str, float], epsilon: float = 0.0) -> Equation:
    """Closed-form equation in the inputs with probabilities frozen at the
    reference input; probabilities with ``|p| <= epsilon`` become 0."""
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    pa = probabilities(net, reference_input)
    rule = extract(net, 1, pa)
    omitted = tuple(i for i in sorted(pa.p) if abs(pa.p[i]) <= epsilon)
    mapping: dict[Expr, Expr] = {
        ProbRef(i): Const(0.0 if i in omitted else v) for i, v in pa.p.items()
    }
    mapping.update({Var(weight_name(e.edge_id)): Const(e.weight) for e in net.edges})
    raw = substitute(rule.expr, mapping)
    return Equation(
        canonicalize(simplify(raw)), raw, pa.reference_input, float(epsilon), omitted,
        _single_branch(net, 1),
    )


__all__ = [
    "Equation", "ProbabilityAssignment", "Rule", "RuleSet", "coefficients", "evaluate_rule",
    "extract", "extract_all", "function_probability", "generate_equation", "normalize",
    "probabilities", "rule_binding",
]
