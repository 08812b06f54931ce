"""Full-batch gradient descent on edge weights, mean squared error loss.

Gradients use the chain rule node by node: the symbolic partial derivative of
each comprehensive-function body with respect to each parameter is taken
once, then evaluated over all samples at every step.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import TrainingError, ValidationError
from .expression import Expr, differentiate, evaluate_batch, resolve_branch
from .expression.evaluate import TOL_DIV
from .network import Network, forward_batch
from .registry import ComprehensiveFunction

log = logging.getLogger(__name__)


@dataclass
class Dataset:
    """Supervised samples: input bindings and scalar targets."""

    rows: list[tuple[dict[str, float], float]]
    _cols: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.rows:
            raise ValidationError("dataset is empty")
        self.rows = [({k: float(v) for k, v in b.items()}, float(t)) for b, t in self.rows]

    @classmethod
    def from_arrays(cls, targets: Sequence[float], **columns: Sequence[float]) -> Dataset:
        n = len(targets)
        for name, col in columns.items():
            if len(col) != n:
                raise ValidationError(f"column {name!r} has {len(col)} values, expected {n}")
        names = list(columns)
        return cls([({k: columns[k][i] for k in names}, targets[i]) for i in range(n)])

    def __len__(self) -> int:
        return len(self.rows)

    def columns(self, names: Iterable[str]) -> tuple[dict[str, np.ndarray], np.ndarray]:
        names = list(names)
        cols = {}
        for x in names:
            try:
                cols[x] = np.array([b[x] for b, _ in self.rows], dtype=float)
            except KeyError:
                raise ValidationError(f"dataset does not bind input {x!r} in every row") from None
        return cols, np.array([t for _, t in self.rows], dtype=float)


def load_dataset(path: str | Path) -> Dataset:
    """Read a delimited file whose header names the inputs plus ``target``."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        dialect = csv.Sniffer().sniff(text.splitlines()[0], delimiters=",;\t ")
    except (csv.Error, IndexError):
        dialect = csv.excel
    reader = csv.reader(text.splitlines(), dialect)
    header = [h.strip() for h in next(reader, [])]
    if "target" not in header:
        raise ValidationError(f"{path}: header must contain a 'target' column")
    rows = []
    for lineno, rec in enumerate(reader, start=2):
        if not rec or all(not f.strip() for f in rec):
            continue
        if len(rec) != len(header):
            raise ValidationError(f"{path}:{lineno}: expected {len(header)} fields, got {len(rec)}")
        try:
            vals = {h: float(f) for h, f in zip(header, rec)}
        except ValueError as err:
            raise ValidationError(f"{path}:{lineno}: {err}") from None
        t = vals.pop("target")
        rows.append((vals, t))
    return Dataset(rows)


def save_dataset(ds: Dataset, path: str | Path) -> None:
    names = list(ds.rows[0][0])
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(names + ["target"])
        for b, t in ds.rows:
            w.writerow([repr(b[x]) for x in names] + [repr(t)])


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.1
    epochs: int = 1000
    seed: int = 0
    init_range: tuple[float, float] = (-1.0, 1.0)
    singular_guard: float = TOL_DIV
    initialize: bool = False

    def __post_init__(self):
        if not self.learning_rate >= 0 or not math.isfinite(self.learning_rate):
            raise ValidationError("learning_rate must be a non-negative finite number")
        if self.epochs < 1:
            raise ValidationError("epochs must be positive")
        lo, hi = self.init_range
        if not lo < hi:
            raise ValidationError("init_range must satisfy lo < hi")
        if not self.singular_guard > 0:
            raise ValidationError("singular_guard must be positive")


@dataclass
class TrainReport:
    loss_per_epoch: list[float]
    skipped_samples: int
    final_loss: float


@lru_cache(maxsize=None)
def _partials(fc: ComprehensiveFunction, branch: str) -> tuple[Expr, ...]:
    body = resolve_branch(fc.body, branch)
    return tuple(differentiate(body, p) for p in fc.params)


@dataclass
class _Pass:
    loss: float
    grads: dict[int, float]
    bad: np.ndarray


def _loss_and_gradients(net: Network, cols, targets, guard: float, want_grads: bool = True) -> _Pass:
    with np.errstate(all="ignore"):
        return _backprop(net, cols, targets, guard, want_grads)


def _backprop(net: Network, cols, targets, guard: float, want_grads: bool) -> _Pass:
    ev = forward_batch(net, cols, guard)
    n = len(targets)
    bad = ev.bad.copy()

    partials = {}
    if want_grads:
        for node in net.nodes:
            env = dict(zip(node.fc.params, ev.args[node.id]))
            vals = []
            for d in _partials(node.fc, node.pm_branch):
                v, b = evaluate_batch(d, env, guard=guard, n=n)
                bad |= b
                vals.append(v)
            partials[node.id] = vals

    ok = ~bad
    count = int(ok.sum())
    if count == 0:
        raise TrainingError("every sample was skipped: the loss is undefined")
    resid = np.where(ok, ev.output - targets, 0.0)
    loss = float(np.sum(resid * resid)) / count
    if not want_grads:
        return _Pass(loss, {}, bad)

    dy = 2.0 * resid / count
    out = net.output_edge
    s_out = ev.activation[net.output_node]
    grads = {out.edge_id: float(np.sum(dy * s_out))}
    adj = {node.id: np.zeros(n) for node in net.nodes}
    adj[net.output_node] = dy * out.weight * s_out * (1.0 - s_out)
    for node in reversed(net.nodes):
        g = adj[node.id]
        for e, d in zip(node.incoming, partials[node.id]):
            term = np.where(ok, g * d, 0.0)
            if net.is_node(e.source):
                s = ev.activation[e.source]
                grads[e.edge_id] = float(np.sum(term * s))
                adj[e.source] = adj[e.source] + term * e.weight * s * (1.0 - s)
            else:
                grads[e.edge_id] = float(np.sum(term * cols[e.source]))
    return _Pass(loss, dict(sorted(grads.items())), bad)


def loss(net: Network, ds: Dataset, singular_guard: float = TOL_DIV) -> float:
    """Mean squared error over the rows the network can evaluate."""
    cols, t = ds.columns(net.inputs)
    return _loss_and_gradients(net, cols, t, singular_guard, want_grads=False).loss


def gradients(net: Network, ds: Dataset, singular_guard: float = TOL_DIV) -> dict[int, float]:
    """Exact gradient of :func:`loss` with respect to every edge weight,
    keyed by edge id (the output edge included)."""
    cols, t = ds.columns(net.inputs)
    return _loss_and_gradients(net, cols, t, singular_guard).grads


def initial_weights(net: Network, cfg: TrainConfig) -> dict[int, float]:
    rng = np.random.default_rng(cfg.seed)
    lo, hi = cfg.init_range
    ids = [e.edge_id for e in net.edges]
    return dict(zip(ids, (float(v) for v in rng.uniform(lo, hi, len(ids)))))


def train(net: Network, ds: Dataset, cfg: TrainConfig) -> tuple[Network, TrainReport]:
    """Run ``cfg.epochs`` full-batch steps ``w <- w - lr * dL/dw``.

    ``loss_per_epoch[k]`` is the loss before step ``k``; the report's
    ``final_loss`` is measured after the last step.
    """
    if cfg.initialize:
        net = net.with_weights(initial_weights(net, cfg))
    cols, t = ds.columns(net.inputs)
    ids = [e.edge_id for e in net.edges]
    w = np.array([net.weights[i] for i in ids])
    losses = []
    skipped = np.zeros(len(ds), dtype=bool)
    for epoch in range(cfg.epochs):
        res = _loss_and_gradients(net, cols, t, cfg.singular_guard)
        if not math.isfinite(res.loss):
            raise TrainingError(f"training diverged at epoch {epoch}: loss is {res.loss}")
        losses.append(res.loss)
        skipped |= res.bad
        w = w - cfg.learning_rate * np.array([res.grads[i] for i in ids])
        if not np.all(np.isfinite(w)):
            raise TrainingError(f"training diverged at epoch {epoch}: non-finite weights")
        net = net.with_weights(dict(zip(ids, w.tolist())))
        if epoch % 1000 == 0:
            log.debug("epoch %d loss %.6g", epoch, res.loss)
    final = _loss_and_gradients(net, cols, t, cfg.singular_guard)
    if not math.isfinite(final.loss):
        raise TrainingError(f"training diverged: final loss is {final.loss}")
    skipped |= final.bad
    return net, TrainReport(losses, int(skipped.sum()), final.loss)


def make_dataset(net: Network, points: Mapping[str, Sequence[float]]) -> Dataset:
    """Targets generated by ``net`` itself at the given input columns."""
    cols = {k: np.asarray(v, dtype=float) for k, v in points.items()}
    ev = forward_batch(net, cols)
    if ev.bad.any():
        raise ValidationError(f"{int(ev.bad.sum())} point(s) are singular for the generating network")
    n = len(ev.output)
    return Dataset([({k: float(cols[k][i]) for k in cols}, float(ev.output[i])) for i in range(n)])
