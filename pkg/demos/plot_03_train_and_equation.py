"""
Train a network, then read off its equation
===========================================

A single cube node learns data generated by a teacher, and the trained
weights collapse into a closed-form equation.
"""

import numpy as np

from funcrules.extraction import generate_equation
from funcrules.network import EdgeSpec, NetworkDescription, NodeSpec, build
from funcrules.registry import builtin_registry
from funcrules.trainer import TrainConfig, make_dataset, train


def cube_net(w_in, w_out):
    desc = NetworkDescription(["x"], [NodeSpec("V", "V")], [EdgeSpec("x", "V", "s", w_in)], ("V", w_out))
    return build(desc, builtin_registry())


teacher = cube_net(1.0, 2.0)
data = make_dataset(teacher, {"x": np.linspace(-1, 1, 64)})

student, report = train(cube_net(0.8, 1.5), data, TrainConfig(learning_rate=0.1, epochs=5000))
print("loss:", report.loss_per_epoch[0], "->", report.final_loss)
print("weights:", student.weights)

###############################################################################
# The equation holds at the reference input; the constant is the output
# edge's probability there.

eq = generate_equation(student, {"x": 0.5})
print(eq.render())
print(eq(x=0.5), student.weights)
