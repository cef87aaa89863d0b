import math
from fractions import Fraction

import numpy as np
import pytest

from indseq import constants as C
from indseq.estimators import exact_expected_count_by_enumeration, exact_planted_mean_by_enumeration
from indseq.generators import ModelSpec


def test_rho_and_corrections():
    c = C.solve_rho()
    assert abs(c.rho * math.exp(c.rho) - 1) < 1e-9
    assert abs(c.rho - 0.567143) < 1e-6
    assert abs(c.mean_correction - 0.10726) < 1e-4
    assert abs(c.variance_rate - 0.04024) < 1e-4
    assert c.variance_rate_squared == pytest.approx(c.variance_rate**2)


@pytest.mark.parametrize("d", [0.3, 1.0, 2.0, 2.5, math.e])
def test_karp_root_properties(d):
    k = C.karp_constants(d)
    assert abs(k.a - d * math.exp(-d * math.exp(-k.a))) < 1e-12
    assert k.b == pytest.approx(d * math.exp(-k.a))
    assert k.independent_fraction + k.matching_fraction == 1
    # no smaller root on a fine grid
    xs = np.linspace(0, k.a * (1 - 1e-3), 20_000)  # f ~ (x-a)^3 at d=e
    f = xs - d * np.exp(-d * np.exp(-xs))
    assert np.all(f < 0)


def test_karp_values():
    assert abs(C.karp_constants(1).independent_fraction - 0.728) < 1e-3
    assert abs(C.karp_constants(math.e).independent_fraction - 0.552) < 1e-3
    e = C.karp_constants(math.e)
    assert e.a == pytest.approx(1.0, abs=1e-12) and e.b == pytest.approx(1.0, abs=1e-12)
    # the closed form at d=2; the two-digit figure 0.607 is checked in the acceptance suite
    assert C.karp_constants(2).independent_fraction == pytest.approx(0.6080368, abs=1e-6)
    with pytest.raises(ValueError):
        C.karp_constants(3.0)


def test_frieze():
    assert abs(C.frieze_beta(100) - 0.067697) < 1e-5
    # ln ln d = 1 at d = e^e
    d = math.e ** math.e
    assert C.frieze_beta(d) == pytest.approx((2 / d) * (math.e - 1 - math.log(2) + 1), rel=1e-12)
    assert abs(C.frieze_beta(d) - 0.26727) < 1e-4
    grid = np.geomspace(20, 1e6, 400)
    vals = [C.frieze_beta(x) for x in grid]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_expected_count_examples():
    assert C.expected_count(ModelSpec("gnp", 4, p=0.5), 2).exact == 3
    assert C.expected_count(ModelSpec("tree", 4), 2).exact == 3
    r = C.expected_count(ModelSpec("regular", 100, d=3), 30)
    assert abs(r.rate - 0.41162) < 1e-4


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_tree_expectations_match_enumeration(n):
    m = ModelSpec("tree", n)
    for k in range(1, n):
        assert C.expected_count(m, k).exact == exact_expected_count_by_enumeration(m, k)
        assert C.planted_expected_unconnected(m, k).exact == exact_planted_mean_by_enumeration(m, k)


def test_planted_mean_examples():
    assert C.planted_expected_unconnected(ModelSpec("tree", 4), 1).exact == Fraction(3, 2)
    assert C.planted_expected_unconnected(ModelSpec("tree", 5), 2).exact == Fraction(4, 5)
    assert C.planted_expected_unconnected(ModelSpec("gnp", 4, p=0.5), 2).exact == Fraction(1, 2)


def test_tree_planted_mean_converges():
    pm = C.planted_expected_unconnected(ModelSpec("tree", 10_000), 2500)
    assert abs(pm.value / pm.asymptotic - 1) < 0.02


def test_regular_planted_mean_limit():
    pm = C.planted_expected_unconnected(ModelSpec("regular", 100_000, d=3), 20_000)
    assert abs(pm.value / pm.asymptotic - 1) < 1e-3


def test_rates():
    tree = ModelSpec("tree", 100)
    assert C.lower_bound_exponent(tree, 0.0).value == 0
    assert abs(C.lower_bound_exponent(tree, 0.25).value + 0.01303) < 1e-4
    r = C.lower_bound_exponent(ModelSpec("gnp", 10_000, d=100), 0.01, variant="high-degree")
    assert abs(r.inputs["total"] + 20.24) < 0.01
    assert C.lower_bound_exponent(ModelSpec("gnp", 100, d=1), 0.2, 0.7).value < 0


def test_dani():
    assert abs(C.dani_degree_bound(0.01) - 1101.03) < 0.01
    assert abs(C.dani_degree_bound(0.1) - 59.72) < 0.01
    grid = np.geomspace(1e-6, 1e-2, 200)
    vals = [C.dani_degree_bound(a) for a in grid]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_tree_threshold_increasing():
    inc, dec = C.tree_unimodality_thresholds()
    assert abs(inc - 0.26543) < 5e-5
    assert inc < dec
    assert all(C.tree_s(a) < 1 for a in np.linspace(0.01, 0.399, 100))


def test_er_left_thresholds():
    for d, want in ((1, 0.25), (2, 0.194), (math.e, 0.172)):
        left, _ = C.er_low_degree_thresholds(d)
        assert abs(left - want) < 0.01


def test_tail_bounds_are_probabilities():
    for t in (0.01, 0.5, 2.0):
        assert 0 < C.gnp_chernoff_bound(500, 50, 2, t) <= 1
        b = C.tree_tail_bounds(500, 100, t)
        assert all(0 < v <= 1 for v in b.values())
    assert C.tree_tail_bounds(500, 100, 1.5)["lower"] == 1.0
