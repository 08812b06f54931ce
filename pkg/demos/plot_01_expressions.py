"""
Working with symbolic expressions
=================================

Parse, simplify, differentiate and render the small algebra the rest of the
package is built on.
"""

from funcrules.expression import differentiate, evaluate, Binding, parse, render, simplify

# The quadratic formula, with the two-branch operator written as +-
q = parse("(-b +- sqrt(b^2 - 4*a*c)) / (2*a)")
print(render(q))
print(render(q, "unicode"))

# evaluate both branches of x^2 - 3x + 2 = 0
for branch in ("plus", "minus"):
    print(branch, evaluate(q, Binding({"a": 1, "b": -3, "c": 2}, pm_branch=branch)))

###############################################################################
# Simplification folds constants and drops zero terms.

e = parse("0*y + (1+2)*x + x^1 - 0")
print(render(simplify(e)))

###############################################################################
# Derivatives are symbolic too.

print(render(differentiate(parse("s^3"), "s")))
print(render(differentiate(parse("sin(a)^2 + cos(a)^2"), "a")))
