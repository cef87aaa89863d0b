"""Acceptance criteria 1-15, each at its stated size and tolerance.

Every test records its sub-checks and prints one PASS/FAIL line; the
terminal summary repeats them. Sub-checks are never relaxed to force a pass.
"""
import math
import time
from collections import Counter
from itertools import combinations, permutations

import numpy as np
import pytest
from scipy import stats

from indseq import constants as C
from indseq.estimators import (
    change_of_measure_check, counting_lemma_check, exact_planted_mean_by_enumeration,
    planted_concentration_experiment, planted_trial, ratio_estimate,
)
from indseq.exact_count import (
    IndependentSetCounter, branching_independence_sequence, count_trees_with_independent_prefix,
    enumerate_graphs, enumerate_labelled_trees, forest_independence_sequence, independence_sequence,
    matching_polynomial, sample_uniform_independent_set,
)
from indseq.experiments import ExperimentConfig, run_experiment
from indseq.generators import ModelSpec, sample_gnp, sample_planted, sample_regular, sample_uniform_tree
from indseq.graph_core import (
    alavi_example, cycle_graph, graph_from_edge_list, is_claw_free, path_graph, star_graph,
)
from indseq.rng import Seed
from indseq.shape import (
    analyze_shape, certify_real_rooted, is_log_concave, last_third_ok, root_bound_ok, wingard_ok,
)

SIGNIFICANCE = 1e-3


# ---------------------------------------------------------------- shared tree samples

@pytest.fixture(scope="module")
def small_trees():
    """500 random trees with 2 <= n <= 20 (criteria 4, 7, 8)."""
    rng = np.random.default_rng(404)
    out = []
    for i in range(500):
        n = int(rng.integers(2, 21))
        out.append(sample_uniform_tree(n, Seed(4, i)))
    return out


@pytest.fixture(scope="module")
def big_tree_sequences():
    """Exact sequences of 200 random trees on 1000 vertices (criteria 6, 7, 8)."""
    return [forest_independence_sequence(sample_uniform_tree(1000, Seed(6, i))) for i in range(200)]


# ---------------------------------------------------------------- 1

@pytest.mark.criterion(1)
def test_c01_exact_examples(criterion):
    t0 = time.perf_counter()
    claw = star_graph(3)
    criterion.check("claw sequence [1,4,3,1]", independence_sequence(claw).coeffs == (1, 4, 3, 1))
    criterion.check("claw is not claw-free", not is_claw_free(claw))
    x = independence_sequence(alavi_example())
    criterion.check("K37+3K4 gives (49,48,64)", (x[1], x[2], x[3]) == (49, 48, 64), str(x.coeffs))
    criterion.check("K37+3K4 not unimodal", not analyze_shape(x).unimodal)
    dt = time.perf_counter() - t0
    criterion.check("under 1 s", dt < 1, f"{dt:.3f}s")
    criterion.finish()


# ---------------------------------------------------------------- 2

@pytest.mark.criterion(2)
def test_c02_counting_identity(criterion):
    t0 = time.perf_counter()
    bad = sum(not counting_lemma_check(g) for n in range(1, 6) for g in enumerate_graphs(n))
    criterion.check("all graphs on <= 5 vertices", bad == 0, f"{bad} failures")
    ps = [i / 10 for i in range(1, 10)]
    bad = sum(not counting_lemma_check(sample_gnp(12, ps[i % 9], Seed(21, i))) for i in range(500))
    criterion.check("500 random G(12, p)", bad == 0, f"{bad} failures")
    rng = np.random.default_rng(22)
    bad = sum(not counting_lemma_check(sample_uniform_tree(int(rng.integers(2, 13)), Seed(22, i)))
              for i in range(500))
    criterion.check("500 random trees n <= 12", bad == 0, f"{bad} failures")
    dt = time.perf_counter() - t0
    criterion.check("under 1 min", dt < 60, f"{dt:.1f}s")
    criterion.finish()


# ---------------------------------------------------------------- 3

@pytest.mark.criterion(3)
def test_c03_tree_prefix_closed_form(criterion):
    t0 = time.perf_counter()
    mismatches = []
    for n in range(2, 8):
        counts = Counter()
        for t in enumerate_labelled_trees(n):
            # smallest label adjacent to a smaller one: {0..k-1} independent iff k <= that label
            first = min((max(u, v) for u, v in t.edges), default=n)
            for k in range(1, first + 1):
                counts[k] += 1
        for k in range(1, n):
            if counts[k] != count_trees_with_independent_prefix(n, k):
                mismatches.append((n, k, counts[k]))
    criterion.check("closed form equals enumeration, n <= 7", not mismatches, str(mismatches))
    dt = time.perf_counter() - t0
    criterion.check("under 1 min", dt < 60, f"{dt:.1f}s")
    criterion.finish()


# ---------------------------------------------------------------- 4

@pytest.mark.criterion(4)
def test_c04_tree_dp_equals_branching(criterion, small_trees):
    t0 = time.perf_counter()
    bad = sum(forest_independence_sequence(t) != branching_independence_sequence(t) for t in small_trees)
    criterion.check("500 random trees n <= 20", bad == 0, f"{bad} mismatches")
    dt = time.perf_counter() - t0
    criterion.check("under 1 min", dt < 60, f"{dt:.1f}s")
    criterion.finish()


# ---------------------------------------------------------------- 5

@pytest.mark.criterion(5)
def test_c05_constants(criterion):
    t0 = time.perf_counter()
    rho = C.solve_rho().rho
    criterion.check("rho 0.567143 +- 1e-6", abs(rho - 0.567143) <= 1e-6, f"{rho:.8f}")
    for d, want in ((1.0, 0.728), (2.0, 0.607), (math.e, 0.552)):
        got = C.karp_constants(d).independent_fraction
        criterion.check(f"max independent fraction d={d:.3g} is {want} +- 0.001",
                        abs(got - want) <= 1e-3, f"{got:.6f}")
    inc, dec = C.tree_unimodality_thresholds()
    criterion.check("tree increasing threshold 0.26543 +- 5e-5", abs(inc - 0.26543) <= 5e-5, f"{inc:.6f}")
    criterion.check("tree decreasing threshold 0.37824 +- 5e-5", abs(dec - 0.37824) <= 5e-5, f"{dec:.6f}")
    for d, (wl, wr) in ((1.0, (0.25, 0.46)), (2.0, (0.194, 0.39)), (math.e, (0.172, 0.35))):
        left, right = C.er_low_degree_thresholds(d)
        criterion.check(f"G(n,d/n) left threshold d={d:.3g} is {wl} +- 0.01",
                        left is not None and abs(left - wl) <= 0.01, f"{left}")
        criterion.check(f"G(n,d/n) right threshold d={d:.3g} is {wr} +- 0.01",
                        right is not None and abs(right - wr) <= 0.01, f"{right}")
    dt = time.perf_counter() - t0
    criterion.check("under 10 s", dt < 10, f"{dt:.2f}s")
    criterion.finish()


# ---------------------------------------------------------------- 6

@pytest.mark.criterion(6)
def test_c06_strict_increase_random_trees(criterion, big_tree_sequences):
    target = math.floor(0.26543 * 1000)
    good = sum(analyze_shape(x).increasing_prefix >= target for x in big_tree_sequences)
    shortest = min(analyze_shape(x).increasing_prefix for x in big_tree_sequences)
    criterion.check(f"strictly increasing through index {target} in 200/200",
                    good == 200, f"{good}/200, shortest prefix {shortest}")
    criterion.finish()


# ---------------------------------------------------------------- 7

@pytest.mark.criterion(7)
def test_c07_last_third(criterion, small_trees, big_tree_sequences):
    bad_small = sum(not last_third_ok(forest_independence_sequence(t)) for t in small_trees)
    bad_big = sum(not last_third_ok(x) for x in big_tree_sequences)
    criterion.check("trees of criterion 4", bad_small == 0, f"{bad_small} failures")
    criterion.check("trees of criterion 6", bad_big == 0, f"{bad_big} failures")
    criterion.finish()


# ---------------------------------------------------------------- 8

@pytest.mark.criterion(8)
def test_c08_wingard_bound(criterion, small_trees, big_tree_sequences):
    bad = sum(not wingard_ok(forest_independence_sequence(t), t.n) for t in small_trees)
    bad += sum(not wingard_ok(x, 1000) for x in big_tree_sequences)
    exhaustive = sum(not wingard_ok(forest_independence_sequence(t), n)
                     for n in range(2, 8) for t in enumerate_labelled_trees(n))
    criterion.check("every tree tested, all k", bad == 0, f"{bad} failures")
    criterion.check("all trees n <= 7", exhaustive == 0, f"{exhaustive} failures")
    criterion.finish()


# ---------------------------------------------------------------- 9

@pytest.mark.criterion(9)
def test_c09_independence_number_of_random_trees(criterion):
    cfg = ExperimentConfig.from_dict({
        "experiment": "pittel", "model": {"family": "tree", "n": 1000}, "trials": 500, "seed": 9,
        "tolerances": {"mean_abs": 0.01, "var_low": 0.03, "var_high": 0.05},
    })
    rep = run_experiment(cfg)
    agg = rep.aggregates
    criterion.check("mean/n in 0.5671 +- 0.01", abs(agg["mean_over_n"] - 0.5671) <= 0.01,
                    f"{agg['mean_over_n']:.5f}")
    criterion.check("Var/n in [0.03, 0.05]", 0.03 <= agg["var_over_n"] <= 0.05,
                    f"{agg['var_over_n']:.5f}; reading matched: {agg['variance_reading_matched']}; "
                    f"unsquared {agg['variance_readings']['sigma']:.5f}, "
                    f"squared {agg['variance_readings']['sigma_squared']:.5f}")
    criterion.finish()


# ---------------------------------------------------------------- 10

@pytest.mark.criterion(10)
def test_c10_ratio_estimator(criterion):
    cells = hits = 0
    for i in range(20):
        g = sample_gnp(20, 0.2, Seed(10, i))
        counter = IndependentSetCounter(g)
        x = counter.sequence()
        for k in range(x.alpha + 1):
            exact = x[k + 1] / x[k]
            e = ratio_estimate(g, k, 10_000, Seed(1010, 100 * i + k), counter)
            cells += 1
            hits += abs(e.estimate - exact) <= 3 * e.stderr
    criterion.check("within 3 SE in >= 95% of cells", hits >= 0.95 * cells, f"{hits}/{cells}")
    criterion.finish()


# ---------------------------------------------------------------- 11

@pytest.mark.criterion(11)
def test_c11_planted_means(criterion):
    t0 = time.perf_counter()
    bad = []
    for n in range(2, 7):
        for k in range(1, n + 1):
            m = ModelSpec("gnp", n, p=0.5)
            if C.planted_expected_unconnected(m, k).exact != exact_planted_mean_by_enumeration(m, k):
                bad.append(("gnp", n, k))
        for k in range(1, n):
            m = ModelSpec("tree", n)
            if C.planted_expected_unconnected(m, k).exact != exact_planted_mean_by_enumeration(m, k):
                bad.append(("tree", n, k))
    m = ModelSpec("gnp", 5, p=0.3)
    for k in range(1, 6):
        if C.planted_expected_unconnected(m, k).exact != exact_planted_mean_by_enumeration(m, k):
            bad.append(("gnp p=0.3", 5, k))
    criterion.check("exact rationals agree with enumeration, n <= 6", not bad, str(bad))
    for model, k in ((ModelSpec("gnp", 500, d=2), 50), (ModelSpec("tree", 500), 100)):
        xs = np.array([planted_trial(model, k, 111, i)[0] for i in range(1000)], dtype=float)
        mu = C.planted_expected_unconnected(model, k).value
        se = xs.std(ddof=1) / math.sqrt(len(xs))
        criterion.check(f"Monte Carlo {model.family} n=500 within 3 sigma",
                        abs(xs.mean() - mu) <= 3 * se, f"mean {xs.mean():.3f} vs {mu:.3f}, se {se:.3f}")
    dt = time.perf_counter() - t0
    criterion.check("under 1 min", dt < 60, f"{dt:.1f}s")
    criterion.finish()


# ---------------------------------------------------------------- 12

@pytest.mark.criterion(12)
def test_c12_change_of_measure(criterion):
    t0 = time.perf_counter()
    runs = [(ModelSpec("gnp", 3, p=0.5), k) for k in (1, 2, 3)]
    runs += [(ModelSpec("tree", n), k) for n in (4, 5) for k in range(1, n)]
    for model, k in runs:
        r = change_of_measure_check(model, k, probes=100, seed=Seed(12, k))
        tag = f"{model.family} n={model.n} k={k}"
        criterion.check(f"{tag} planted identity", r.planted_identity and r.planted_total == 1)
        criterion.check(f"{tag} uniform identity", r.uniform_identity)
        criterion.check(f"{tag} 100 probes", r.probes == 100 and r.probe_failures == 0,
                        f"{r.probe_failures} failures")
    dt = time.perf_counter() - t0
    criterion.check("under 1 min", dt < 60, f"{dt:.1f}s")
    criterion.finish()


# ---------------------------------------------------------------- 13

@pytest.mark.criterion(13)
def test_c13_tail_bounds(criterion):
    runs = [(ModelSpec("gnp", 500, d=d), 50) for d in (1.0, 2.0, math.e)]
    runs.append((ModelSpec("tree", 500), 100))
    for model, k in runs:
        rep = planted_concentration_experiment(model, k, 1000, 13)
        criterion.check(f"{model.family} d={model.degree:.3g} zero violations", rep.violations == 0,
                        f"{rep.violations} of {len(rep.bound_rows)} cells")
    criterion.finish()


# ---------------------------------------------------------------- 14

def _line_graph(n, edges):
    es = list(edges)
    pairs = [(i, j) for i, j in combinations(range(len(es)), 2) if set(es[i]) & set(es[j])]
    return graph_from_edge_list(len(es), pairs)


@pytest.mark.criterion(14)
def test_c14_real_roots(criterion):
    t0 = time.perf_counter()
    criterion.check("claw polynomial not real-rooted", not certify_real_rooted([1, 4, 3, 1]).all_real)
    rng = np.random.default_rng(14)
    done = bad_claw = bad_real = bad_lc = 0
    attempt = 0
    while done < 100:
        # line graphs are claw-free; draw a host with at most 12 edges
        host = sample_gnp(int(rng.integers(3, 9)), float(rng.uniform(0.2, 0.7)), Seed(141, attempt))
        attempt += 1
        if not 1 <= host.m <= 12:
            continue
        g = _line_graph(host.n, host.edges)
        x = independence_sequence(g)
        bad_claw += not is_claw_free(g)
        bad_real += not certify_real_rooted(x.coeffs).all_real if len(x.coeffs) > 1 else 0
        bad_lc += not is_log_concave(x)
        done += 1
    criterion.check("100 claw-free graphs are claw-free", bad_claw == 0, f"{bad_claw}")
    criterion.check("100 claw-free graphs real-rooted", bad_real == 0, f"{bad_real}")
    criterion.check("100 claw-free graphs log-concave", bad_lc == 0, f"{bad_lc}")
    bad_mu = bad_bound = 0
    for i in range(100):
        n = int(rng.integers(4, 17))
        g = sample_gnp(n, float(rng.uniform(0.1, 0.4)), Seed(142, i))
        mu = matching_polynomial(g).signed_coefficients()
        bad_mu += not certify_real_rooted(mu).all_real
        d = g.max_degree
        if d >= 2:
            bad_bound += not root_bound_ok(mu, 4 * (d - 1))
    criterion.check("100 matching polynomials real-rooted", bad_mu == 0, f"{bad_mu}")
    criterion.check("roots bounded by 2 sqrt(d-1)", bad_bound == 0, f"{bad_bound}")
    dt = time.perf_counter() - t0
    criterion.check("under 2 min", dt < 120, f"{dt:.1f}s")
    criterion.finish()


# ---------------------------------------------------------------- 15

def _chi2(counts, support):
    obs = [counts.get(s, 0) for s in support]
    if sum(obs) != sum(counts.values()):
        return 0.0
    return float(stats.chisquare(obs).pvalue)


@pytest.mark.criterion(15)
def test_c15_sampler_uniformity(criterion):
    t0 = time.perf_counter()
    support = [t.edges for t in enumerate_labelled_trees(4)]
    c = Counter(sample_uniform_tree(4, Seed(151, i)).edges for i in range(16_000))
    p = _chi2(c, support)
    criterion.check("uniform trees n=4 (16-way)", p > SIGNIFICANCE, f"p={p:.4f}")

    valid = [e for e in support if not any(u < 2 and v < 2 for u, v in e)]
    c = Counter(sample_planted(ModelSpec("tree", 4), 2, Seed(152, i), sigma=(0, 1)).graph.edges
                for i in range(8000))
    p = _chi2(c, valid)
    criterion.check(f"planted trees n=4 ({len(valid)}-way)", len(valid) == 8 and p > SIGNIFICANCE, f"p={p:.4f}")

    cycles = sorted({tuple(sorted(tuple(sorted((perm[i], perm[(i + 1) % 5]))) for i in range(5)))
                     for perm in ((0,) + q for q in permutations(range(1, 5)))})
    c = Counter(sample_regular(5, 2, Seed(153, i)).edges for i in range(12_000))
    p = _chi2(c, cycles)
    criterion.check(f"2-regular n=5 ({len(cycles)}-way)", len(cycles) == 12 and p > SIGNIFICANCE, f"p={p:.4f}")

    for name, g, k in (("P3", path_graph(3), 1), ("C5", cycle_graph(5), 1), ("C5", cycle_graph(5), 2)):
        sets = [s for s in combinations(range(g.n), k) if not any(g.has_edge(u, v) for u, v in combinations(s, 2))]
        c = Counter(sample_uniform_independent_set(g, k, Seed(154, 1000 * k + i)) for i in range(1000 * len(sets)))
        p = _chi2(c, sets)
        criterion.check(f"independent {k}-sets of {name} ({len(sets)}-way)", p > SIGNIFICANCE, f"p={p:.4f}")
    dt = time.perf_counter() - t0
    criterion.check("under 1 min", dt < 60, f"{dt:.1f}s")
    criterion.finish()
