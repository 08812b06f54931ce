"""Command-line front end.

Payload goes to stdout (or ``--out``), diagnostics to stderr.  Exit codes:
0 success, 1 usage error, 2 validation error, 3 numeric error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from . import modelfile
from .errors import EvaluationError, FuncRulesError, ParseError, TrainingError, UnsupportedError, ValidationError
from .expression import render
from .extraction import (
    ProbabilityAssignment,
    extract,
    generate_equation,
    normalize,
    probabilities,
)
from .informal import render_informal
from .network import Network, build, forward, reference_figure1
from .registry import Registry, builtin_registry, format_function, load_functions
from .trainer import TrainConfig, load_dataset, train

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _binding(pairs: Sequence[str] | None) -> dict[str, float]:
    out = {}
    for item in pairs or ():
        name, sep, value = item.partition("=")
        if not sep or not name:
            raise UsageError(f"expected name=value, got {item!r}")
        try:
            out[name.strip()] = float(value)
        except ValueError:
            raise UsageError(f"invalid number in {item!r}") from None
    return out


def _registry(args) -> Registry:
    if getattr(args, "functions", None):
        return load_functions(args.functions)
    return builtin_registry()


def _load_model(args) -> tuple[Network, Registry]:
    reg = _registry(args)
    return modelfile.deserialize(Path(args.model).read_text(encoding="utf-8"), reg), reg


def _inputs_for(net: Network, binding: dict[str, float]) -> dict[str, float]:
    missing = [x for x in net.inputs if x not in binding]
    if missing:
        raise UsageError(f"missing --input value for {', '.join(missing)}")
    extra = sorted(set(binding) - set(net.inputs))
    if extra:
        raise UsageError(f"unknown input(s) {', '.join(extra)}")
    return binding


def _level(net: Network, level: int) -> int:
    if not 1 <= level <= net.depth + 1:
        raise UsageError(f"--level must be between 1 and {net.depth + 1} for this model")
    return level


def _probability_table(net: Network, pa: ProbabilityAssignment) -> list[str]:
    lines = ["edge\tsource\ttarget\tp" + ("\trho" if pa.rho is not None else "")]
    for e in net.edges:
        if e.edge_id not in pa.p:
            continue
        target = "output" if e.target is None else f"{e.target}.{net.node(e.target).fc.params[e.slot]}"
        row = f"{e.edge_id}\t{e.source}\t{target}\t{pa.p[e.edge_id]!r}"
        if pa.rho is not None:
            row += f"\t{pa.rho[e.edge_id]!r}"
        lines.append(row)
    return lines


def cmd_functions(args) -> list[str]:
    return [format_function(fc) for fc in _registry(args)]


def cmd_build(args) -> list[str]:
    reg = _registry(args)
    if args.reference:
        net = reference_figure1(reg)
    else:
        if not args.spec:
            raise UsageError("build needs --spec or --reference")
        net = build(modelfile.parse_description(Path(args.spec).read_text(encoding="utf-8")), reg)
    return modelfile.serialize(net).splitlines()


def cmd_show(args) -> list[str]:
    net, _ = _load_model(args)
    lines = [
        f"directed: {'yes' if net.directed else 'no'}",
        f"inputs: {' '.join(net.inputs)}",
        f"nodes: {len(net.nodes)}",
        f"edges: {len(net.edges)}",
        f"depth: {net.depth}",
    ]
    for n in net.nodes:
        wiring = ", ".join(f"{n.fc.params[e.slot]}<-{e.source} (w_{e.edge_id}={e.weight!r})" for e in n.incoming)
        lines.append(f"node {n.id}: {n.fc_name} layer {n.layer} branch {n.pm_branch}: {wiring}")
    out = net.output_edge
    lines.append(f"output: {net.output_node} (w_{out.edge_id}={out.weight!r})")
    return lines


def cmd_eval(args) -> list[str]:
    net, _ = _load_model(args)
    x = _inputs_for(net, _binding(args.input))
    ev = forward(net, x)
    lines = [f"y\t{ev.output!r}", "node\tpreactivation\tactivation"]
    lines += [f"{n.id}\t{ev.preactivation[n.id]!r}\t{ev.activation[n.id]!r}" for n in net.nodes]
    pa = probabilities(net, x)
    return lines + _probability_table(net, pa)


def _assignment(args, net):
    pa = probabilities(net, _inputs_for(net, _binding(args.input)))
    return normalize(pa) if args.normalized else pa


def cmd_extract(args) -> list[str]:
    net, _ = _load_model(args)
    level = _level(net, args.level)
    pa = _assignment(args, net)
    rule = extract(net, level, pa, normalized=args.normalized)
    return [render(rule.expr, args.style)] + _probability_table(net, pa)


def cmd_informal(args) -> list[str]:
    net, reg = _load_model(args)
    level = _level(net, args.level)
    pa = _assignment(args, net)
    return [render_informal(extract(net, level, pa, normalized=args.normalized), reg, pa)]


def cmd_equation(args) -> list[str]:
    net, _ = _load_model(args)
    if args.epsilon < 0:
        raise UsageError("--epsilon must be non-negative")
    eq = generate_equation(net, _inputs_for(net, _binding(args.at)), args.epsilon)
    return eq.render().splitlines()


def _init_range(text: str | None):
    if text is None:
        return None
    try:
        lo, hi = (float(v) for v in text.split(","))
    except ValueError:
        raise UsageError("--init expects LO,HI") from None
    return lo, hi


def cmd_train(args) -> list[str]:
    net, _ = _load_model(args)
    ds = load_dataset(args.data)
    init = _init_range(args.init)
    cfg = TrainConfig(
        learning_rate=args.lr, epochs=args.epochs, seed=args.seed,
        init_range=init or (-1.0, 1.0), initialize=init is not None,
    )
    trained, report = train(net, ds, cfg)
    if args.log:
        rows = ["epoch,loss"] + [f"{k},{v!r}" for k, v in enumerate(report.loss_per_epoch)]
        rows.append(f"{cfg.epochs},{report.final_loss!r}")
        Path(args.log).write_text("\n".join(rows) + "\n", encoding="utf-8")
    text = modelfile.serialize(trained)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        return [
            f"initial_loss\t{report.loss_per_epoch[0]!r}",
            f"final_loss\t{report.final_loss!r}",
            f"skipped_samples\t{report.skipped_samples}",
        ]
    return text.splitlines()


def make_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="funcrules", description="Comprehensive multilayer networks and functional rule extraction.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help, model=True, out=True):
        sp = sub.add_parser(name, help=help)
        sp.set_defaults(handler=fn)
        sp.add_argument("--functions", metavar="FILE", help="extra function definitions")
        if model:
            sp.add_argument("--model", required=True, metavar="M")
        if out:
            sp.add_argument("--out", metavar="FILE", help="write payload here instead of stdout")
        return sp

    sp = add("functions", cmd_functions, "list comprehensive functions", model=False)
    sp.add_argument("--file", dest="functions", metavar="F", help="definition file to load")

    sp = add("build", cmd_build, "validate a network description and write a model file", model=False)
    sp.add_argument("--spec", metavar="S")
    sp.add_argument("--reference", choices=["figure1"], help="emit a built-in reference network")

    add("show", cmd_show, "describe a model's topology")

    sp = add("eval", cmd_eval, "forward pass and edge probabilities")
    sp.add_argument("--input", nargs="+", required=True, metavar="k=v")

    sp = add("train", cmd_train, "gradient descent on a dataset")
    sp.add_argument("--data", required=True, metavar="D")
    sp.add_argument("--lr", type=float, default=0.1)
    sp.add_argument("--epochs", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--init", metavar="LO,HI", help="re-initialise weights uniformly from the seed")
    sp.add_argument("--log", metavar="L", help="per-epoch loss CSV")

    for name, fn, help in (("extract", cmd_extract, "formal rule at a collapse level"),
                           ("informal", cmd_informal, "worded rule at a collapse level")):
        sp = add(name, fn, help)
        sp.add_argument("--input", nargs="+", required=True, metavar="k=v")
        sp.add_argument("--level", type=int, required=True, metavar="K")
        sp.add_argument("--normalized", action="store_true", help="use softmax-normalized probabilities")
        if name == "extract":
            sp.add_argument("--style", choices=["plain", "unicode", "machine"], default="plain")

    sp = add("equation", cmd_equation, "closed-form equation with frozen probabilities")
    sp.add_argument("--at", nargs="+", required=True, metavar="k=v")
    sp.add_argument("--epsilon", type=float, default=0.0)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = make_parser().parse_args(argv)
        lines = args.handler(args)
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    except UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, ValidationError, UnsupportedError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    except (EvaluationError, TrainingError) as err:
        print(f"numeric error: {err}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    except FuncRulesError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    text = "\n".join(lines) + "\n"
    out = getattr(args, "out", None)
    if out and args.command != "train":
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
