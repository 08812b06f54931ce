"""
Rules of the four-node reference network
========================================

Build the V, T, F, Q network, check that every collapse level reproduces
the output, and read the rules in words.
"""

from funcrules.extraction import evaluate_rule, extract_all, normalize
from funcrules.informal import render_informal
from funcrules.network import forward, reference_figure1
from funcrules.registry import builtin_registry

net = reference_figure1()
x = {"i": 0.7}
y = forward(net, x).output
print("y =", y)

rules = extract_all(net, x)
for rule in rules:
    print(f"r_{rule.level}: {rule.render()}")
    print("   value:", evaluate_rule(rule, rules.assignment))

###############################################################################
# Each edge leaving a node carries a probability.  Softmax over all of them
# gives the normalized form.

pa = normalize(rules.assignment)
for edge, p in pa.p.items():
    print(edge, round(p, 4), round(pa.rho[edge], 4))

normal = extract_all(net, x, normalized=True)
print(normal[3].render("unicode"))
print(render_informal(normal[3], builtin_registry(), pa))
