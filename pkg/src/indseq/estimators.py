"""Monte Carlo ratio estimation through the counting identity
sum_{|S|=k independent} N_S = (k+1) x_{k+1}, planted concentration
experiments, and exact enumeration checks of the change-of-measure lemmas."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb

import numpy as np

from . import constants
from .exact_count import (
    IndependentSetCounter,
    SizeGuardError,
    enumerate_graphs,
    enumerate_labelled_trees,
    independence_sequence,
)
from .generators import ModelSpec, sample_planted
from .graph_core import Graph, unconnected_count
from .rng import Seed, as_generator

COUNTING_CAP = 20


@dataclass(frozen=True)
class EstimateWithError:
    estimate: float
    stderr: float
    trials: int
    seed: int | None = None


def _unconnected_from_mask(g: Graph, s: int) -> int:
    closed = s
    masks = g.masks
    t = s
    while t:
        low = t & -t
        closed |= masks[low.bit_length() - 1]
        t ^= low
    return g.n - bin(closed).count("1")


def _seed_echo(seed):
    return seed.master if isinstance(seed, Seed) else (seed if isinstance(seed, int) else None)


def ratio_estimate(g: Graph, k: int, trials: int, seed, counter: IndependentSetCounter | None = None
                   ) -> EstimateWithError:
    """Unbiased estimate of x_{k+1}/x_k: mean of N_sigma over uniform size-k
    independent sets sigma, divided by k+1."""
    counter = counter or IndependentSetCounter(g)
    if counter.coefficient(counter.full, k) == 0:
        raise ValueError(f"x_{k} = 0")
    draws = counter.sample_many(k, trials, as_generator(seed))
    vals = np.array([_unconnected_from_mask(g, s) for s in draws], dtype=float)
    w = np.array(list(draws.values()), dtype=float)
    mean = float(np.dot(vals, w) / trials)
    if trials > 1:
        var = float(np.dot(w, (vals - mean) ** 2) / (trials - 1))
    else:
        var = 0.0
    return EstimateWithError(mean / (k + 1), math.sqrt(var / trials) / (k + 1), trials, _seed_echo(seed))


@dataclass(frozen=True)
class SequenceEstimate:
    values: tuple[float, ...]
    stderr: tuple[float, ...]
    ratios: tuple[EstimateWithError, ...]


def sequence_estimate(g: Graph, k_max: int, trials: int, seed) -> SequenceEstimate:
    """x_hat_k = prod_{j<k} ratio_hat_j from x_0 = 1, with first-order
    propagation of the per-ratio relative errors."""
    counter = IndependentSetCounter(g)
    rng = as_generator(seed)
    values, errs, ratios = [1.0], [0.0], []
    rel2 = 0.0
    for j in range(k_max):
        if counter.coefficient(counter.full, j + 1) == 0:
            raise ValueError(f"x_{j + 1} = 0, cannot telescope to k_max={k_max}")
        r = ratio_estimate(g, j, trials, rng, counter)
        ratios.append(r)
        values.append(values[-1] * r.estimate)
        rel2 += (r.stderr / r.estimate) ** 2 if r.estimate else math.inf
        errs.append(values[-1] * math.sqrt(rel2))
    return SequenceEstimate(tuple(values), tuple(errs), tuple(ratios))


# ---------------------------------------------------------------- enumeration checks

def _independent_sets_with_n(g: Graph):
    """(bitmask, N_S) for every independent set S."""
    masks, n = g.masks, g.n

    def rec(start, cur, closed):
        yield cur, n - bin(closed).count("1")
        for v in range(start, n):
            if not (closed >> v) & 1:
                yield from rec(v + 1, cur | (1 << v), closed | (1 << v) | masks[v])

    yield from rec(0, 0, 0)


def counting_lemma_table(g: Graph, cap: int = COUNTING_CAP) -> list[tuple[int, int, int]]:
    """Per k: (k, sum of N_S over independent S of size k, (k+1) x_{k+1})."""
    if g.n > cap:
        raise SizeGuardError(f"enumeration capped at n={cap}")
    lhs = [0] * (g.n + 2)
    for s, nval in _independent_sets_with_n(g):
        lhs[bin(s).count("1")] += nval
    x = independence_sequence(g)
    return [(k, lhs[k], (k + 1) * x[k + 1]) for k in range(g.n + 1)]


def counting_lemma_check(g: Graph, cap: int = COUNTING_CAP) -> bool:
    return all(a == b for _, a, b in counting_lemma_table(g, cap))


def exact_ratio_average(g: Graph, k: int) -> Fraction:
    """E[N_sigma]/(k+1) over all size-k independent sets, by enumeration."""
    tot, cnt = 0, 0
    for s, nval in _independent_sets_with_n(g):
        if bin(s).count("1") == k:
            tot += nval
            cnt += 1
    return Fraction(tot, cnt * (k + 1))


@dataclass
class ChangeOfMeasureReport:
    family: str
    n: int
    k: int
    expected_count: Fraction
    pairs: int
    planted_total: Fraction
    uniform_total: Fraction
    planted_identity: bool
    uniform_identity: bool
    probes: int
    probe_failures: int

    @property
    def ok(self) -> bool:
        return (self.planted_identity and self.uniform_identity and self.probe_failures == 0
                and self.planted_total == 1)

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("expected_count", "planted_total", "uniform_total"):
            d[key] = str(d[key])
        d["ok"] = self.ok
        return d


def _enumerate_family(model: ModelSpec, gnp_cap: int = 5):
    n = model.n
    if model.family == "gnp":
        if n > gnp_cap:
            raise SizeGuardError(f"gnp enumeration capped at n={gnp_cap}")
        p = constants._exact_p(model)
        total_pairs = comb(n, 2)
        for g in enumerate_graphs(n):
            yield g, p ** g.m * (1 - p) ** (total_pairs - g.m)
    elif model.family == "tree":
        if n > 7:
            raise SizeGuardError("tree enumeration for this check supports n <= 7")
        w = Fraction(1, n ** (n - 2))
        for t in enumerate_labelled_trees(n):
            yield t, w
    else:
        raise SizeGuardError("regular family is not enumerated")


def change_of_measure_check(model: ModelSpec, k: int, probes: int = 100, seed=0) -> ChangeOfMeasureReport:
    family = list(_enumerate_family(model))
    n = model.n
    # independent sets by listing, counts by the exact engine
    listed = []
    for g, pg in family:
        sets = [s for s in combinations(range(n), k)
                if not any(g.has_edge(u, v) for u, v in combinations(s, 2))]
        listed.append((g, pg, sets, independence_sequence(g)[k]))
    ex = sum(pg * xk for _, pg, _, xk in listed)

    # planted law straight from its two-step definition
    planted: dict = {}
    n_sigma = comb(n, k)
    for sigma in combinations(range(n), k):
        hits = [(i, pg) for i, (g, pg, sets, _) in enumerate(listed) if sigma in sets]
        z = sum(pg for _, pg in hits)
        for i, pg in hits:
            planted[(i, sigma)] = Fraction(1, n_sigma) * pg / z
    # uniform law from its definition: pick one of the listed sets
    uniform: dict = {}
    for i, (g, pg, sets, _) in enumerate(listed):
        for sigma in sets:
            uniform[(i, sigma)] = pg / len(sets)

    pairs = list(uniform)
    planted_identity = set(planted) == set(uniform) and all(
        planted[key] == listed[key[0]][1] / ex for key in pairs)
    uniform_identity = all(
        uniform[key] == listed[key[0]][1] / listed[key[0]][3] for key in pairs)

    rng = as_generator(seed)
    cs = [Fraction(1, 10), Fraction(1, 2), Fraction(1), Fraction(2)]
    failures = 0
    for probe in range(probes):
        c = cs[int(rng.integers(len(cs)))]
        if probe == 0:
            a_set = set()
        elif probe == 1:
            a_set = set(pairs)
        else:
            keep = rng.random(len(pairs)) < 0.5
            a_set = {key for key, kp in zip(pairs, keep) if kp}
        in_c = {key for key in pairs if listed[key[0]][3] >= c * ex}
        lhs = sum((uniform[key] for key in a_set), Fraction(0))
        rhs = (sum((planted[key] for key in a_set & in_c), Fraction(0)) / c
               + sum((uniform[key] for key in pairs if key not in in_c), Fraction(0)))
        if lhs > rhs:
            failures += 1
    return ChangeOfMeasureReport(
        model.family, n, k, ex, len(pairs),
        sum(planted.values(), Fraction(0)), sum(uniform.values(), Fraction(0)),
        planted_identity, uniform_identity, probes, failures)


def exact_planted_mean_by_enumeration(model: ModelSpec, k: int, gnp_cap: int = 6) -> Fraction:
    """E N_sigma under the planted law with sigma = {0..k-1} (the law is
    exchangeable, so any fixed sigma gives the same conditional mean)."""
    sigma = tuple(range(k))
    num, den = Fraction(0), Fraction(0)
    for g, pg in _enumerate_family(model, gnp_cap):
        if not any(g.has_edge(u, v) for u, v in combinations(sigma, 2)):
            num += pg * unconnected_count(g, sigma)
            den += pg
    return num / den


def exact_expected_count_by_enumeration(model: ModelSpec, k: int) -> Fraction:
    return sum((pg * independence_sequence(g)[k] for g, pg in _enumerate_family(model)), Fraction(0))


# ---------------------------------------------------------------- planted concentration

DEFAULT_T_GRID = (0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5, 0.75, 1.0, 1.5)


@dataclass
class ConcentrationReport:
    model: dict
    k: int
    trials: int
    seed: int | None
    empirical_mean: float
    empirical_sd: float
    theoretical_mean: float
    mean_z: float
    deviation_quantiles: dict
    bound_rows: list = field(default_factory=list)
    violations: int = 0
    max_attempts: int = 1

    def to_dict(self) -> dict:
        return asdict(self)


def planted_trial(model: ModelSpec, k: int, seed: int, trial: int) -> tuple[int, int]:
    """N_sigma and rejection attempts for one planted draw on stream (seed, trial)."""
    ps = sample_planted(model, k, Seed(seed, trial))
    return unconnected_count(ps.graph, ps.sigma), ps.attempts


def planted_concentration_experiment(model: ModelSpec, k: int, trials: int, seed: int,
                                     t_grid=DEFAULT_T_GRID, samples=None) -> ConcentrationReport:
    """``samples`` may carry precomputed planted_trial results (trial order),
    e.g. from a worker pool; otherwise they are drawn here."""
    if samples is None:
        samples = [planted_trial(model, k, seed, i) for i in range(trials)]
    if len(samples) != trials:
        raise ValueError("sample count does not match trials")
    vals = np.array([s[0] for s in samples], dtype=float)
    worst = max((s[1] for s in samples), default=1)
    mu = constants.planted_expected_unconnected(model, k).value
    mean = float(vals.mean())
    sd = float(vals.std(ddof=1)) if trials > 1 else 0.0
    se = sd / math.sqrt(trials) if trials > 1 else 0.0
    rel = np.abs(vals - mu) / mu
    rows, viol = [], 0
    n = model.n
    for t in t_grid:
        if model.family in ("gnp", "regular"):
            freq = float(np.mean(rel >= t))
            bound = constants.gnp_chernoff_bound(n, k, model.degree, t)
            rows.append({"t": t, "event": "two_sided", "empirical": freq, "bound": bound})
        else:
            b = constants.tree_tail_bounds(n, k, t)
            events = {
                "two_sided": np.abs(vals - mu) > t * mu + 1,
                "upper": vals > (1 + t) * mu + 1,
                "lower": vals < (1 - t) * mu - 1,
            }
            for name, hit in events.items():
                rows.append({"t": t, "event": name, "empirical": float(np.mean(hit)), "bound": b[name]})
    for r in rows:
        r["violated"] = r["empirical"] > r["bound"]
        viol += r["violated"]
    q = {str(p): float(np.quantile(rel, p)) for p in (0.5, 0.9, 0.99, 1.0)}
    return ConcentrationReport(model.to_dict(), k, trials, seed, mean, sd, mu,
                               (mean - mu) / se if se else 0.0, q, rows, viol, worst)
