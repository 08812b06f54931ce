"""Comprehensive multilayer networks.

A node applies the sigmoid to a comprehensive function whose parameters are
each fed by exactly one weighted edge.  An edge from an input variable
carries ``w * x``; an edge from a node carries ``sigmoid(f) * w``.  The
network output is the weighted sigmoid of the output node.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np

from .errors import UnboundSymbolError, UnsupportedError, ValidationError
from .expression import Binding, evaluate, evaluate_batch, sigmoid, sigmoid_batch
from .expression.evaluate import TOL_DIV
from .registry import ComprehensiveFunction, Registry, builtin_registry

_IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*")
_RESERVED_RE = re.compile(r"(w|p|rho)_[0-9]+")


def weight_name(edge_id: int) -> str:
    """Variable name standing for an edge weight inside extracted rules."""
    return f"w_{edge_id}"


@dataclass(frozen=True)
class Edge:
    """A weighted connection.  ``target is None`` marks the output edge."""

    edge_id: int
    source: str
    target: str | None
    slot: int | None
    weight: float


@dataclass(frozen=True)
class Node:
    id: str
    fc: ComprehensiveFunction
    pm_branch: str
    layer: int
    incoming: tuple[Edge, ...]

    @property
    def fc_name(self) -> str:
        return self.fc.name


@dataclass(frozen=True)
class Network:
    inputs: tuple[str, ...]
    nodes: tuple[Node, ...]
    output_node: str
    output_edge: Edge
    directed: bool = True
    _by_id: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_by_id", {n.id: n for n in self.nodes})

    def node(self, node_id: str) -> Node:
        return self._by_id[node_id]

    def is_node(self, name: str) -> bool:
        return name in self._by_id

    @property
    def depth(self) -> int:
        return max(n.layer for n in self.nodes)

    @property
    def edges(self) -> list[Edge]:
        """All edges, output edge included, ordered by id."""
        out = [e for n in self.nodes for e in n.incoming]
        out.append(self.output_edge)
        return sorted(out, key=lambda e: e.edge_id)

    def edge(self, edge_id: int) -> Edge:
        for e in self.edges:
            if e.edge_id == edge_id:
                return e
        raise KeyError(edge_id)

    @property
    def output_weight(self) -> float:
        return self.output_edge.weight

    @property
    def weights(self) -> dict[int, float]:
        return {e.edge_id: e.weight for e in self.edges}

    def with_weights(self, weights: Mapping[int, float]) -> Network:
        """Copy with some or all edge weights replaced (keyed by edge id)."""

        def upd(e: Edge) -> Edge:
            if e.edge_id not in weights:
                return e
            return replace(e, weight=_check_weight(weights[e.edge_id], f"edge {e.edge_id}"))

        nodes = tuple(replace(n, incoming=tuple(upd(e) for e in n.incoming)) for n in self.nodes)
        return replace(self, nodes=nodes, output_edge=upd(self.output_edge))

    def outgoing(self, node_id: str) -> list[Edge]:
        return [e for e in self.edges if e.source == node_id]


@dataclass
class NodeSpec:
    id: str
    fc_name: str
    pm_branch: str = "plus"


@dataclass
class EdgeSpec:
    source: str
    target: str
    slot: int | str
    weight: float
    edge_id: int | None = None


@dataclass
class NetworkDescription:
    """Unvalidated wiring, as read from a description file or built in code."""

    inputs: list[str]
    nodes: list[NodeSpec]
    edges: list[EdgeSpec]
    output: tuple[str, float]
    directed: bool = True


def _check_ident(kind: str, name: str) -> None:
    if not _IDENT_RE.fullmatch(name):
        raise ValidationError(f"invalid {kind} name {name!r}")
    if _RESERVED_RE.fullmatch(name):
        raise ValidationError(f"{kind} name {name!r} is reserved for weights and probabilities")


def _check_weight(w: float, where: str) -> float:
    w = float(w)
    if not math.isfinite(w):
        raise ValidationError(f"weight of {where} is not finite")
    return w


def build(desc: NetworkDescription, reg: Registry) -> Network:
    """Validate a description and assemble a :class:`Network`.

    Edge ids must be given for all edges or for none; when absent they are
    assigned in declaration order.  The output edge always takes the next id.
    """
    if not desc.nodes:
        raise ValidationError("a network needs at least one node")
    names: set[str] = set()
    for x in desc.inputs:
        _check_ident("input", x)
        if x in names:
            raise ValidationError(f"duplicate input {x!r}")
        names.add(x)
    specs: dict[str, NodeSpec] = {}
    for ns in desc.nodes:
        _check_ident("node", ns.id)
        if ns.id in names:
            raise ValidationError(f"duplicate name {ns.id!r}")
        if ns.pm_branch not in ("plus", "minus"):
            raise ValidationError(f"node {ns.id!r}: branch must be plus or minus, got {ns.pm_branch!r}")
        reg[ns.fc_name]  # raises on unknown function
        names.add(ns.id)
        specs[ns.id] = ns

    given = [es.edge_id for es in desc.edges]
    if all(i is None for i in given):
        ids = list(range(1, len(desc.edges) + 1))
    elif any(i is None for i in given):
        raise ValidationError("edge ids must be given for every edge or for none")
    else:
        ids = [int(i) for i in given]
        if sorted(ids) != list(range(1, len(ids) + 1)):
            raise ValidationError(f"edge ids must be exactly 1..{len(ids)}, got {sorted(ids)}")

    slots: dict[str, dict[int, Edge]] = {nid: {} for nid in specs}
    for es, eid in zip(desc.edges, ids):
        if es.target not in specs:
            raise ValidationError(f"edge {eid}: unknown target node {es.target!r}")
        if es.source not in names:
            raise ValidationError(f"edge {eid}: dangling source {es.source!r}")
        fc = reg[specs[es.target].fc_name]
        slot = es.slot
        if isinstance(slot, str) and not slot.isdigit():
            if slot not in fc.params:
                raise ValidationError(f"edge {eid}: {fc.name} has no parameter {slot!r}")
            slot = fc.params.index(slot)
        slot = int(slot)
        if not 0 <= slot < fc.arity:
            raise ValidationError(f"edge {eid}: slot {slot} out of range for {fc.name} (arity {fc.arity})")
        if slot in slots[es.target]:
            raise ValidationError(f"edge {eid}: duplicate edge into {es.target}.{fc.params[slot]}")
        slots[es.target][slot] = Edge(eid, es.source, es.target, slot, _check_weight(es.weight, f"edge {eid}"))

    for nid, ns in specs.items():
        fc = reg[ns.fc_name]
        if len(slots[nid]) != fc.arity:
            raise ValidationError(
                f"arity mismatch: node {nid!r} ({fc.name}) takes {fc.arity} input(s), "
                f"wired with {len(slots[nid])}"
            )

    # Kahn-style layering; anything left unassigned sits on a cycle.
    layers: dict[str, int] = {}
    pending = dict(specs)
    while pending:
        progressed = False
        for nid in list(pending):
            srcs = [e.source for e in slots[nid].values()]
            if all(s in layers or s not in specs for s in srcs):
                layers[nid] = 1 + max((layers[s] for s in srcs if s in specs), default=0)
                del pending[nid]
                progressed = True
        if not progressed:
            raise ValidationError(f"cycle detected among nodes {', '.join(sorted(pending))}")

    out_id, out_w = desc.output
    if out_id not in specs:
        raise ValidationError(f"output node {out_id!r} is not a node")
    order = {nid: k for k, nid in enumerate(specs)}
    nodes = tuple(
        Node(nid, reg[specs[nid].fc_name], specs[nid].pm_branch, layers[nid],
             tuple(slots[nid][k] for k in range(len(slots[nid]))))
        for nid in sorted(specs, key=lambda n: (layers[n], order[n]))
    )
    out_edge = Edge(len(ids) + 1, out_id, None, None, _check_weight(out_w, "output"))
    return Network(tuple(desc.inputs), nodes, out_id, out_edge, bool(desc.directed))


def _require_directed(net: Network) -> None:
    if not net.directed:
        raise UnsupportedError("undirected networks have no defined forward or extraction semantics")


@dataclass(frozen=True)
class NetworkEval:
    preactivation: dict[str, float]
    activation: dict[str, float]
    edge_values: dict[int, float]
    output: float

    @property
    def y(self) -> float:
        return self.output


def _input_values(net: Network, inputs) -> Mapping[str, float]:
    values = inputs.variables if isinstance(inputs, Binding) else inputs
    missing = [x for x in net.inputs if x not in values]
    if missing:
        raise UnboundSymbolError(f"unbound input(s): {', '.join(missing)}")
    return values


def forward(net: Network, inputs: Mapping[str, float] | Binding) -> NetworkEval:
    """Evaluate the network at one input point."""
    _require_directed(net)
    values = _input_values(net, inputs)
    pre: dict[str, float] = {}
    act: dict[str, float] = {}
    carried: dict[int, float] = {}
    for node in net.nodes:
        args = {}
        for e in node.incoming:
            if net.is_node(e.source):
                v = act[e.source] * e.weight
            else:
                v = e.weight * float(values[e.source])
            carried[e.edge_id] = v
            args[node.fc.params[e.slot]] = v
        f = evaluate(node.fc.body, Binding(args, pm_branch=node.pm_branch))
        pre[node.id] = f
        act[node.id] = sigmoid(f)
    y = act[net.output_node] * net.output_weight
    carried[net.output_edge.edge_id] = y
    return NetworkEval(pre, act, carried, y)


@dataclass
class BatchEval:
    preactivation: dict[str, np.ndarray]
    activation: dict[str, np.ndarray]
    args: dict[str, list[np.ndarray]]
    output: np.ndarray
    bad: np.ndarray


def forward_batch(net: Network, columns: Mapping[str, np.ndarray], guard: float = TOL_DIV) -> BatchEval:
    """Vectorised forward pass over many samples.

    Rows that hit a singular denominator or a negative square root inside any
    body are flagged in ``bad`` rather than raising.
    """
    _require_directed(net)
    _input_values(net, columns)
    n = len(next(iter(columns.values()))) if columns else 1
    pre, act, args = {}, {}, {}
    bad = np.zeros(n, dtype=bool)
    for node in net.nodes:
        vals = []
        for e in node.incoming:
            if net.is_node(e.source):
                vals.append(act[e.source] * e.weight)
            else:
                vals.append(e.weight * np.asarray(columns[e.source], dtype=float))
        f, b = evaluate_batch(node.fc.body, dict(zip(node.fc.params, vals)), node.pm_branch, guard, n)
        bad |= b
        args[node.id] = vals
        pre[node.id] = f
        act[node.id] = sigmoid_batch(f)
    return BatchEval(pre, act, args, act[net.output_node] * net.output_weight, bad)


def reference_figure1(reg: Registry | None = None, weights: Mapping[int, float] | Sequence[float] | None = None) -> Network:
    """The example network whose rules are r_1..r_4.

    Input ``i`` feeds V (w_1) and T (w_2); F(m, a) takes V (w_3) and T (w_4);
    Q(a, b, c) takes V (w_5), T (w_6) and F (w_7); Q is the output, weight w_8.

    Weights default to 1 except ``w_6 = -1``: with every weight positive the
    discriminant inside Q is negative for all inputs.
    """
    reg = reg or builtin_registry()
    default = {k: 1.0 for k in range(1, 9)} | {6: -1.0}
    if weights is None:
        w = default
    elif isinstance(weights, Mapping):
        w = default | {int(k): float(v) for k, v in weights.items()}
    else:
        if len(weights) != 8:
            raise ValidationError("the reference network has 8 weights")
        w = {k + 1: float(v) for k, v in enumerate(weights)}
    desc = NetworkDescription(
        inputs=["i"],
        nodes=[NodeSpec("V", "V"), NodeSpec("T", "T"), NodeSpec("F", "F"), NodeSpec("Q", "Q")],
        edges=[
            EdgeSpec("i", "V", "s", w[1], 1),
            EdgeSpec("i", "T", "a", w[2], 2),
            EdgeSpec("V", "F", "m", w[3], 3),
            EdgeSpec("T", "F", "a", w[4], 4),
            EdgeSpec("V", "Q", "a", w[5], 5),
            EdgeSpec("T", "Q", "c", w[6], 6),
            EdgeSpec("F", "Q", "b", w[7], 7),
        ],
        output=("Q", w[8]),
    )
    return build(desc, reg)
