"""Line-oriented text format for networks.

Example::

    [model]
    version 1
    directed true

    [inputs]
    x

    [nodes]
    V V plus

    [edges]
    1 x -> V.s 1.0

    [output]
    V 2.0

Description files accepted by :func:`parse_description` use the same layout
but may omit the ``[model]`` section, edge ids and node branches.
"""

from __future__ import annotations

import re

from .errors import ParseError, ValidationError
from .network import EdgeSpec, Network, NetworkDescription, NodeSpec, build
from .registry import Registry

FORMAT_VERSION = 1
SECTIONS = ("model", "inputs", "nodes", "edges", "output")

_EDGE_RE = re.compile(
    r"(?:(?P<id>\d+)\s+)?(?P<src>\S+)\s*->\s*(?P<dst>[A-Za-z][A-Za-z0-9_]*)\.(?P<slot>[A-Za-z0-9_]+)\s+(?P<w>\S+)"
)


def _number(text: str, lineno: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"invalid number {text!r}", lineno, 1) from None


def _sections(text: str) -> dict[str, list[tuple[int, str]]]:
    out: dict[str, list[tuple[int, str]]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.fullmatch(r"\[(\w+)\]", line)
        if m:
            current = m.group(1)
            if current not in SECTIONS:
                raise ParseError(f"unknown section [{current}]", lineno, 1)
            if current in out:
                raise ParseError(f"repeated section [{current}]", lineno, 1)
            out[current] = []
            continue
        if current is None:
            raise ParseError("content before first section", lineno, 1)
        out[current].append((lineno, line))
    return out


def parse_description(text: str, strict: bool = False) -> NetworkDescription:
    secs = _sections(text)
    directed = True
    if "model" in secs:
        header = {}
        for lineno, line in secs["model"]:
            parts = line.split()
            if len(parts) != 2:
                raise ParseError("expected 'key value' in [model]", lineno, 1)
            header[parts[0]] = (lineno, parts[1])
        if "version" not in header:
            raise ValidationError("model file has no version")
        if header["version"][1] != str(FORMAT_VERSION):
            raise ValidationError(
                f"unsupported model file version {header['version'][1]} (expected {FORMAT_VERSION})"
            )
        if "directed" in header:
            lineno, value = header["directed"]
            if value not in ("true", "false"):
                raise ParseError("directed must be true or false", lineno, 1)
            directed = value == "true"
    elif strict:
        raise ValidationError("model file has no [model] section")

    for name in ("inputs", "nodes", "output"):
        if name not in secs:
            raise ValidationError(f"missing [{name}] section")

    inputs = []
    for lineno, line in secs["inputs"]:
        if len(line.split()) != 1:
            raise ParseError("expected one input name per line", lineno, 1)
        inputs.append(line)

    nodes = []
    for lineno, line in secs["nodes"]:
        parts = line.split()
        if len(parts) == 2 and not strict:
            parts.append("plus")
        if len(parts) != 3:
            raise ParseError("expected 'id function branch'", lineno, 1)
        nodes.append(NodeSpec(*parts))

    edges = []
    for lineno, line in secs.get("edges", []):
        m = _EDGE_RE.fullmatch(line)
        if m is None:
            raise ParseError("expected '[id] source -> node.slot weight'", lineno, 1)
        if strict and m.group("id") is None:
            raise ParseError("edge id required", lineno, 1)
        edges.append(EdgeSpec(
            m.group("src"), m.group("dst"), m.group("slot"),
            _number(m.group("w"), lineno),
            None if m.group("id") is None else int(m.group("id")),
        ))

    out_lines = secs["output"]
    if len(out_lines) != 1:
        raise ValidationError("[output] must hold exactly one 'node weight' line")
    lineno, line = out_lines[0]
    parts = line.split()
    if len(parts) != 2:
        raise ParseError("expected 'node weight' in [output] (missing output weight?)", lineno, 1)
    return NetworkDescription(inputs, nodes, edges, (parts[0], _number(parts[1], lineno)), directed)


def serialize(net: Network) -> str:
    """Canonical text form; weights use the shortest round-trip decimal."""
    lines = [
        "[model]",
        f"version {FORMAT_VERSION}",
        f"directed {'true' if net.directed else 'false'}",
        "",
        "[inputs]",
        *net.inputs,
        "",
        "[nodes]",
        *(f"{n.id} {n.fc_name} {n.pm_branch}" for n in net.nodes),
        "",
        "[edges]",
    ]
    for e in net.edges:
        if e.target is None:
            continue
        param = net.node(e.target).fc.params[e.slot]
        lines.append(f"{e.edge_id} {e.source} -> {e.target}.{param} {e.weight!r}")
    lines += ["", "[output]", f"{net.output_node} {net.output_weight!r}", ""]
    return "\n".join(lines)


def deserialize(text: str, reg: Registry) -> Network:
    return build(parse_description(text, strict=True), reg)
