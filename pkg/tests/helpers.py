"""Shared generators for the test suite."""

from __future__ import annotations

import math
import random

from hypothesis import strategies as st

from funcrules.errors import EvaluationError
from funcrules.expression import (
    Binding, evaluate,
    Add, Const, Cos, Div, Exp, FnSymbol, Mul, Neg, PlusMinus, Pow, ProbRef, Sin, Sqrt, Sub, Var,
)
from funcrules.network import EdgeSpec, NetworkDescription, NodeSpec, build, forward, reference_figure1
from funcrules.extraction import probabilities
from funcrules.registry import Registry, builtin_registry

VARS = ("x", "y", "z")


def _atoms(with_symbols: bool):
    consts = st.sampled_from([0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, -1.0, -2.5]).map(Const)
    parts = [consts, st.sampled_from(VARS).map(Var)]
    if with_symbols:
        parts.append(st.integers(1, 9).flatmap(lambda i: st.booleans().map(lambda b: ProbRef(i, b))))
        parts.append(st.sampled_from(["V", "T", "Q"]).map(FnSymbol))
    return st.one_of(*parts)


def exprs(with_symbols: bool = True, plus_minus: bool = True, max_leaves: int = 12):
    binary = [Add, Sub, Mul, Div, Pow] + ([PlusMinus] if plus_minus else [])
    unary = [Neg, Sqrt, Sin, Cos, Exp]

    def extend(children):
        return st.one_of(
            st.tuples(st.sampled_from(binary), children, children).map(lambda t: t[0](t[1], t[2])),
            st.tuples(st.sampled_from(unary), children).map(lambda t: t[0](t[1])),
        )

    return st.recursive(_atoms(with_symbols), extend, max_leaves=max_leaves)


def random_expr(rng: random.Random, depth: int = 4):
    """Seeded generator used for fixed corpora (no hypothesis shrinking)."""
    if depth == 0 or rng.random() < 0.25:
        k = rng.randrange(4)
        if k == 0:
            return Const(rng.choice([0.0, 1.0, 2.0, 0.25, 3.5, 1e-3, 12345.0, -2.0]))
        if k == 1:
            return Var(rng.choice(VARS))
        if k == 2:
            return ProbRef(rng.randint(1, 12), rng.random() < 0.5)
        return FnSymbol(rng.choice(["V", "T", "F", "Q"]))
    ops = [Add, Sub, Mul, Div, Pow, PlusMinus, Neg, Sqrt, Sin, Cos, Exp]
    op = rng.choice(ops)
    if op in (Neg, Sqrt, Sin, Cos, Exp):
        return op(random_expr(rng, depth - 1))
    return op(random_expr(rng, depth - 1), random_expr(rng, depth - 1))


def signed_weight(rng: random.Random, lo: float = 0.5, hi: float = 2.0) -> float:
    return rng.choice((-1.0, 1.0)) * rng.uniform(lo, hi)


def single_v(w1: float = 1.0, wout: float = 2.0, reg=None):
    from funcrules.registry import builtin_registry

    desc = NetworkDescription(["x"], [NodeSpec("V", "V")], [EdgeSpec("x", "V", "s", w1)], ("V", wout))
    return build(desc, reg or builtin_registry())


def figure1_draws(n: int, seed: int, lo: float = 0.5, hi: float = 2.0, guard: float = 1e-6,
                  signed: bool = True, at: float | None = None):
    """Yield ``(net, i)`` pairs of reference networks with random weights and
    an input whose forward pass and probabilities are defined.

    ``at`` fixes the input instead of drawing it from [-1, 1].  Unsigned
    draws are mostly rejected: all-positive weights usually make Q's
    discriminant negative.
    """
    rng = random.Random(seed)
    got = 0
    while got < n:
        if signed:
            ws = [signed_weight(rng, lo, hi) for _ in range(8)]
        else:
            ws = [rng.uniform(lo, hi) for _ in range(8)]
        net = reference_figure1(weights=ws)
        i = rng.uniform(-1.0, 1.0) if at is None else at
        try:
            ev = forward(net, {"i": i})
        except EvaluationError:
            continue
        if any(abs(f) < guard for f in ev.preactivation.values()):
            continue
        probabilities(net, {"i": i})
        got += 1
        yield net, i


def rel_close(a: float, b: float, rel: float) -> bool:
    return abs(a - b) <= rel * max(abs(a), abs(b)) or a == b


def isclose(a, b, rel=1e-12, abs_=0.0):
    return math.isclose(a, b, rel_tol=rel, abs_tol=abs_)


def figure1_datasets(n: int, seed: int, rows: int = 8):
    """reference networks paired with small datasets every row of which the
    network evaluates; targets are arbitrary."""
    import numpy as np

    from funcrules.network import forward_batch
    from funcrules.trainer import Dataset

    rng = random.Random(seed)
    got = 0
    for net, _ in figure1_draws(10 * n, seed):
        xs = np.array([rng.uniform(-1.0, 1.0) for _ in range(rows)])
        ev = forward_batch(net, {"i": xs}, guard=1e-6)
        if ev.bad.any():
            continue
        targets = [rng.uniform(-2.0, 2.0) for _ in range(rows)]
        yield net, Dataset.from_arrays(targets, i=xs.tolist())
        got += 1
        if got == n:
            return


def finite_difference(net, ds, h: float = 1e-6) -> dict[int, float]:
    from funcrules.trainer import loss

    out = {}
    for e in net.edges:
        w = e.weight
        up = loss(net.with_weights({e.edge_id: w + h}), ds)
        down = loss(net.with_weights({e.edge_id: w - h}), ds)
        out[e.edge_id] = (up - down) / (2 * h)
    return out


GRAD_FLOOR = 1e-6


def gradient_rel_error(g: float, fd: float) -> float:
    """Relative error with a floor: a gradient that is identically zero
    (the input weight of T, whose body is constant) has no relative scale,
    and its central difference is pure rounding noise of order eps/h."""
    return abs(g - fd) / max(abs(g), abs(fd), GRAD_FLOOR)


def run_cli(argv, capsys):
    from funcrules.cli import main

    code = main([str(a) for a in argv])
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def cli_workspace(tmp):
    """Files used by the command-line tests: a reference-network model, the single-V
    teacher model and data, and a handful of broken inputs."""
    import numpy as np

    from funcrules.modelfile import serialize
    from funcrules.trainer import make_dataset, save_dataset

    paths = {
        "fig1": tmp / "fig1.net",
        "teacher": tmp / "teacher.net",
        "student": tmp / "student.net",
        "data": tmp / "teacher.csv",
        "cyclic": tmp / "cyclic.spec",
        "arity": tmp / "arity.spec",
        "garbage": tmp / "garbage.net",
        "singular": tmp / "singular.net",
        "fns_bad": tmp / "bad_functions.txt",
        "diverge": tmp / "diverge.csv",
    }
    paths["fig1"].write_text(serialize(reference_figure1()), encoding="utf-8")
    teacher = single_v(1.0, 2.0)
    paths["teacher"].write_text(serialize(teacher), encoding="utf-8")
    paths["student"].write_text(serialize(single_v(0.8, 1.5)), encoding="utf-8")
    save_dataset(make_dataset(teacher, {"x": np.linspace(-1, 1, 64)}), paths["data"])
    paths["cyclic"].write_text(
        "[inputs]\nx\n[nodes]\nA F\nB V\n[edges]\nx -> A.m 1\nB -> A.a 1\nA -> B.s 1\n[output]\nB 1\n",
        encoding="utf-8",
    )
    paths["arity"].write_text(
        "[inputs]\nx\n[nodes]\nA F\n[edges]\nx -> A.m 1\n[output]\nA 1\n", encoding="utf-8",
    )
    paths["garbage"].write_text("this is not a model\n", encoding="utf-8")
    paths["singular"].write_text(
        serialize(reference_figure1(weights=[1, 1, 1, 1, 0, -1, 1, 1])), encoding="utf-8",
    )
    paths["fns_bad"].write_text('K "kinetic" (m) = m +\n', encoding="utf-8")
    paths["diverge"].write_text("x,target\n1,1e6\n-1,-1e6\n", encoding="utf-8")
    return paths


def error_matrix(p):
    """(label, argv, expected exit code) for every documented failure class."""
    return [
        ("no subcommand", [], 1),
        ("unknown subcommand", ["frobnicate"], 1),
        ("missing required flag", ["extract", "--model", p["fig1"], "--input", "i=1"], 1),
        ("level too high", ["extract", "--model", p["fig1"], "--input", "i=1", "--level", "9"], 1),
        ("level zero", ["extract", "--model", p["fig1"], "--input", "i=1", "--level", "0"], 1),
        ("malformed binding", ["eval", "--model", p["fig1"], "--input", "i:1"], 1),
        ("missing input", ["eval", "--model", p["fig1"], "--input", "x=1"], 1),
        ("non-numeric flag", ["train", "--model", p["student"], "--data", p["data"], "--lr", "fast"], 1),
        ("negative epsilon", ["equation", "--model", p["fig1"], "--at", "i=1", "--epsilon", "-1"], 1),
        ("bad init range", ["train", "--model", p["student"], "--data", p["data"], "--init", "1"], 1),
        ("build without spec", ["build"], 1),
        ("missing model file", ["show", "--model", p["fig1"].with_name("absent.net")], 2),
        ("garbage model", ["show", "--model", p["garbage"]], 2),
        ("cycle", ["build", "--spec", p["cyclic"]], 2),
        ("arity mismatch", ["build", "--spec", p["arity"]], 2),
        ("bad function file", ["functions", "--file", p["fns_bad"]], 2),
        ("zero epochs", ["train", "--model", p["student"], "--data", p["data"], "--epochs", "0"], 2),
        ("zero source value", ["eval", "--model", p["fig1"], "--input", "i=0"], 3),
        ("singular denominator", ["eval", "--model", p["singular"], "--input", "i=0.5"], 3),
        ("divergence", ["train", "--model", p["student"], "--data", p["diverge"], "--lr", "1e6", "--epochs", "200"], 3),
    ]


def normal_form(text: str):
    from funcrules.expression import canonicalize, parse, simplify

    return canonicalize(simplify(parse(text)))


# Q's body with a = V*p_5, b = F*p_7, c = T*p_6 (level 3), and with F itself
# substituted as (V*p_3)*(T*p_4) (level 2)
LEVEL3_ORACLE = "p_8 * ((-(@F*p_7) +- sqrt((@F*p_7)^2 - 4*(@V*p_5)*(@T*p_6))) / (2*(@V*p_5)))"
_B2 = "((@V*p_3)*(@T*p_4))*p_7"
LEVEL2_ORACLE = f"p_8 * ((-({_B2}) +- sqrt(({_B2})^2 - 4*(@V*p_5)*(@T*p_6))) / (2*(@V*p_5)))"


PRINTED = {
    # the listing as originally typeset, transcribed symbol for symbol
    1: "p_8*(-(i^2*w_1*w_2*p_3*p_4*p_7) +- sqrt((i^2*w_1*w_2*p_3*p_4)^2*p_7 - 4*i^2*w_1*w_2*p_5*p_6))*(i*w_1*p_5)^(-1)",
    2: "p_8*(-(@V*@T*p_3*p_4*p_7) +- sqrt((@V*@T*p_3*p_4)^2*p_7 - 4*@V*@T*p_5*p_6))*(@V*p_5)^(-1)",
    3: "p_8*(-(@F*p_7) +- sqrt(@F^2*p_7 - 4*@V*@T*p_5*p_6))*(@V*p_5)^(-1)",
}
CORRECTED = {
    # (X)^2*p_7 -> (X*p_7)^2 and (D)^(-1) -> (2*D)^(-1); nothing else changes
    1: "p_8*(-(i^2*w_1*w_2*p_3*p_4*p_7) +- sqrt((i^2*w_1*w_2*p_3*p_4*p_7)^2 - 4*i^2*w_1*w_2*p_5*p_6))*(2*i*w_1*p_5)^(-1)",
    2: "p_8*(-(@V*@T*p_3*p_4*p_7) +- sqrt((@V*@T*p_3*p_4*p_7)^2 - 4*@V*@T*p_5*p_6))*(2*@V*p_5)^(-1)",
    3: "p_8*(-(@F*p_7) +- sqrt((@F*p_7)^2 - 4*@V*@T*p_5*p_6))*(2*@V*p_5)^(-1)",
}


def identity_registry():
    reg = Registry()
    reg.define("V", "cubic volume", ["s"], "s")
    reg.define("T", "trigonometry identity", ["a"], "a")
    for fc in list(builtin_registry())[2:]:
        reg.add(fc)
    return reg


def agree(a, b, rng, n=100):
    """Numeric comparison over random bindings of every free symbol."""
    for _ in range(n):
        bind = Binding(
            {k: rng.uniform(0.5, 1.5) for k in ("i", "w_1", "w_2")},
            {k: rng.uniform(0.1, 0.9) for k in range(3, 9)} | {6: rng.uniform(-0.9, -0.1)},
            "plus",
            {"V": rng.uniform(0.5, 1.5), "T": rng.uniform(0.5, 1.5), "F": rng.uniform(-2.0, -1.0)},
        )
        x, y = evaluate(a, bind), evaluate(b, bind)
        if not math.isclose(x, y, rel_tol=1e-12):
            return False
    return True


