import math
import random

import pytest

from funcrules.errors import UndefinedProbabilityError, UnsupportedError, ValidationError
from funcrules.expression import (
    Binding, FnSymbol, ProbRef, evaluate, parse, simplify, substitute,
)
from funcrules.extraction import (
    coefficients, evaluate_rule, extract, extract_all, function_probability, generate_equation,
    normalize, probabilities,
)
from funcrules.network import forward, reference_figure1

from helpers import CORRECTED, LEVEL2_ORACLE, LEVEL3_ORACLE, PRINTED, agree, figure1_draws, identity_registry, normal_form, single_v

W = [0.9, 1.2, 1.1, -0.8, 1.3, -1.4, 0.7, 1.6]


@pytest.fixture
def fig1():
    net = reference_figure1(weights=W)
    return net, probabilities(net, {"i": 0.7})


def test_probability_definition(fig1):
    net, pa = fig1
    ev = forward(net, {"i": 0.7})
    assert sorted(pa.p) == [3, 4, 5, 6, 7, 8]  # input edges are not covered
    for e in net.edges:
        if net.is_node(e.source):
            f = ev.preactivation[e.source]
            assert math.isclose(pa.p[e.edge_id] * f, ev.activation[e.source] * e.weight, rel_tol=1e-12)


def test_probability_single_v():
    net = single_v()
    pa = probabilities(net, {"x": 1.0})
    assert math.isclose(pa.p[2], 2.0 / (1.0 + math.exp(-1.0)), rel_tol=1e-15)


def test_zero_weight_gives_zero_probability():
    net = reference_figure1(weights=[1, 1, 1, 1, 1, 0, -1, 1])
    assert probabilities(net, {"i": 0.8}).p[6] == 0.0


def test_zero_preactivation_is_undefined():
    with pytest.raises(UndefinedProbabilityError, match="'V'") as info:
        probabilities(single_v(), {"x": 0.0})
    assert info.value.edge_id == 2


def test_level_4_is_the_output_symbol(fig1):
    net, pa = fig1
    assert extract(net, 4, pa).render() == "Q*p_8"


def test_level_3_oracle(fig1):
    net, pa = fig1
    want = normal_form(LEVEL3_ORACLE)
    assert extract(net, 3, pa).expr == want


def test_level_2_oracle(fig1):
    net, pa = fig1
    want = normal_form(LEVEL2_ORACLE)
    assert extract(net, 2, pa).expr == want


def test_level_1_expands_every_body(fig1):
    net, pa = fig1
    v = "(w_1*i)^3"
    t = "(sin(w_2*i)^2 + cos(w_2*i)^2)"
    b = f"(({v}*p_3)*({t}*p_4))*p_7"
    want = normal_form(f"p_8 * ((-({b}) +- sqrt(({b})^2 - 4*({v}*p_5)*({t}*p_6))) / (2*({v}*p_5)))")
    r1 = extract(net, 1, pa)
    assert r1.expr == want
    assert r1.expr.walk() and not any(isinstance(n, FnSymbol) for n in r1.expr.walk())


def test_divergences_from_reference_listing(fig1):
    """Exactly three differences separate the extracted rules from the
    printed listing: p_7 sits inside the square, the denominator keeps its
    factor 2, and level 1 substitutes the real bodies of V and T."""
    net, pa = fig1
    rng = random.Random(0)
    for k in (2, 3):
        got = extract(net, k, pa).expr
        assert not agree(got, parse(PRINTED[k]), rng, n=5)
        assert agree(got, parse(CORRECTED[k]), rng)

    # the variable-level listing matches only if V and T were identities
    ident = reference_figure1(reg=identity_registry(), weights=W)
    r1_ident = extract(ident, 1, probabilities(ident, {"i": 0.7})).expr
    assert agree(r1_ident, parse(CORRECTED[1]), rng)
    assert not agree(r1_ident, parse(PRINTED[1]), rng, n=5)
    r1 = extract(net, 1, pa).expr
    assert not agree(r1, parse(CORRECTED[1]), rng, n=5)
    assert any(n.__class__.__name__ == "Sin" for n in r1.walk())


def test_single_v_rules():
    net = single_v()
    rules = extract_all(net, {"x": 1.0})
    assert len(rules) == 2
    assert rules[1].expr == normal_form("((w_1*x)^3)*p_2")
    assert rules[2].render() == "V*p_2"
    assert math.isclose(evaluate_rule(rules[2], rules.assignment), 1.4621171572600098, rel_tol=1e-15)


def test_extract_all_levels(fig1):
    net, _ = fig1
    rules = extract_all(net, {"i": 0.7})
    assert [r.level for r in rules] == [1, 2, 3, 4]
    with pytest.raises(IndexError):
        rules[5]


def test_level_out_of_range(fig1):
    net, pa = fig1
    for k in (0, 5):
        with pytest.raises(ValidationError, match="level"):
            extract(net, k, pa)


def test_reconstruction(fig1):
    net, pa = fig1
    y = forward(net, {"i": 0.7}).output
    for k in range(1, 5):
        assert math.isclose(evaluate_rule(extract(net, k, pa), pa), y, rel_tol=1e-9)


def test_reconstruction_minus_branch():
    net = reference_figure1(weights=W)
    from funcrules.network import Network

    nodes = tuple(n if n.id != "Q" else type(n)(n.id, n.fc, "minus", n.layer, n.incoming) for n in net.nodes)
    net = Network(net.inputs, nodes, net.output_node, net.output_edge, net.directed)
    pa = probabilities(net, {"i": 0.4})
    y = forward(net, {"i": 0.4}).output
    for k in range(1, 5):
        assert math.isclose(evaluate_rule(extract(net, k, pa), pa), y, rel_tol=1e-9)


def test_reconstruction_random_small():
    for net, i in figure1_draws(50, seed=17):
        pa = probabilities(net, {"i": i})
        y = forward(net, {"i": i}).output
        for k in range(1, 5):
            assert math.isclose(evaluate_rule(extract(net, k, pa), pa), y, rel_tol=1e-9)


def test_reconstruction_positive_weights():
    for net, i in figure1_draws(20, seed=3, lo=0.5, hi=1.5, signed=False, at=0.7):
        pa = probabilities(net, {"i": i})
        y = forward(net, {"i": i}).output
        for k in range(1, 5):
            assert math.isclose(evaluate_rule(extract(net, k, pa), pa), y, rel_tol=1e-9)


def test_normalized_rules_refuse_reconstruction(fig1):
    net, pa = fig1
    rule = extract(net, 3, normalize(pa), normalized=True)
    assert "ρ_7" in rule.render("unicode") and "rho_7" in rule.render()
    with pytest.raises(ValueError, match="normalized"):
        evaluate_rule(rule, normalize(pa))


def test_evaluate_rule_checks_input(fig1):
    net, pa = fig1
    with pytest.raises(ValueError, match="different input"):
        evaluate_rule(extract(net, 4, pa), pa, {"i": 0.3})


def test_undirected_rejected(fig1):
    net, pa = fig1
    from funcrules.network import Network

    und = Network(net.inputs, net.nodes, net.output_node, net.output_edge, False)
    with pytest.raises(UnsupportedError):
        extract(und, 2, pa)


def test_function_probability(fig1):
    net, pa = fig1
    r2 = extract(net, 2, pa)
    assert [r.index for r in coefficients(r2, "V")] == [3, 4, 7, 8]
    assert math.isclose(function_probability(r2, "V", pa), pa.p[3] * pa.p[4] * pa.p[7] * pa.p[8], rel_tol=1e-15)
    r4 = extract(net, 4, pa)
    assert function_probability(r4, "Q", pa) == pa.p[8]
    with pytest.raises(KeyError):
        function_probability(r4, "V", pa)


def test_function_probability_zero_upstream():
    net = reference_figure1(weights=[1, 1, 1, 1, 1, 0, -1, 1])
    pa = probabilities(net, {"i": 0.8})
    r3 = extract(net, 3, pa)
    occ = [r.index for r in coefficients(r3, "T")]
    assert 6 in occ
    assert function_probability(r3, "T", pa) == 0.0


def test_softmax_examples(fig1):
    net, pa = fig1
    from dataclasses import replace

    sym = normalize(replace(pa, p={3: 0.2, 4: 0.2, 5: 0.2}))
    assert all(math.isclose(v, 1 / 3, rel_tol=1e-15) for v in sym.rho.values())
    two = normalize(replace(pa, p={3: 1.0, 4: 0.0}))
    assert math.isclose(two.rho[3], math.e / (1 + math.e), rel_tol=1e-15)
    assert math.isclose(two.rho[4], 1 / (1 + math.e), rel_tol=1e-15)
    big = normalize(replace(pa, p={3: 1000.0, 4: 999.0}))
    assert math.isclose(big.rho[3], math.e / (1 + math.e), rel_tol=1e-14)


def test_equation_single_v():
    eq = generate_equation(single_v(), {"x": 1.0})
    assert math.isclose(eq(x=1.0), 1.4621171572600098, rel_tol=1e-15)
    assert eq.expr == normal_form("1.4621171572600098 * x^3")
    assert "# omitted edges: none" in eq.render()


def test_equation_omits_zero_branch():
    net = reference_figure1(weights=[1, 1, 1, 1, 1, 0, -1, 1])
    eq = generate_equation(net, {"i": 0.8})
    assert eq.omitted == (6,)
    text = eq.render()
    assert "# omitted edges: 6" in text
    rng = random.Random(1)
    for _ in range(100):
        x = rng.uniform(0.1, 1.5)
        b = Binding({"i": x}, pm_branch=eq.pm_branch)
        assert math.isclose(evaluate(eq.expr, b), evaluate(eq.unsimplified, b), rel_tol=1e-12)


def test_equation_epsilon_above_everything():
    net = reference_figure1(weights=W)
    eq = generate_equation(net, {"i": 0.7}, epsilon=1e9)
    assert eq.expr == parse("0")
    assert eq(i=0.3) == 0.0


def test_equation_rejects_negative_epsilon():
    with pytest.raises(ValueError):
        generate_equation(single_v(), {"x": 1.0}, epsilon=-1.0)


def test_simplify_zeroes_a_leading_term(fig1):
    net, pa = fig1
    r2 = extract(net, 2, pa).expr
    zeroed = simplify(substitute(r2, {ProbRef(3): 0}))
    assert "p_3" not in str(zeroed)
    rng = random.Random(5)
    for _ in range(100):
        bind = Binding(
            {}, {k: rng.uniform(0.1, 0.9) for k in range(3, 9)} | {3: 0.0}, "plus",
            {"V": rng.uniform(0.5, 1.5), "T": rng.uniform(-1.5, -0.5)},
        )
        assert math.isclose(evaluate(zeroed, bind), evaluate(r2, bind), rel_tol=1e-12)
