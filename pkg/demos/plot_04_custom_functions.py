"""
Your own comprehensive functions
================================

Register a new function, wire it into a network file and extract its rule.
"""

from funcrules.extraction import extract_all
from funcrules.informal import render_informal
from funcrules.modelfile import parse_description, serialize
from funcrules.network import build
from funcrules.registry import builtin_registry, define

reg = define(builtin_registry(), "K", "kinetic energy", ["m", "v"], "0.5*m*v^2")

text = """
[inputs]
mass
speed
[nodes]
K K
[edges]
mass -> K.m 1.0
speed -> K.v 1.0
[output]
K 1.5
"""
net = build(parse_description(text), reg)
print(serialize(net))

rules = extract_all(net, {"mass": 2.0, "speed": 0.5})
for rule in rules:
    print(rule.render())
print(render_informal(rules[2], reg, rules.assignment))
