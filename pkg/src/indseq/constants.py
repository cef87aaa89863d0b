"""Closed-form expectations, rate functions, tail bounds and threshold constants.

Sign convention for lower-bound rates: X_k >= exp(n * rate) * E X_k, so rates
are <= 0 where the bound is informative.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, exp, log, sqrt
from typing import NamedTuple

from scipy.optimize import brentq

from .generators import ModelSpec

XTOL = 1e-15
RTOL = 1e-15
DANI_VALID_BELOW = 1e-9
ER_PROOF_CONSTANT = 3.03
TREE_PROOF_CONSTANT = 2.0


@dataclass(frozen=True)
class RateReport:
    value: float
    tag: str
    inputs: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"value": self.value, "tag": self.tag, "inputs": dict(self.inputs)}


def _xlogx(x: float) -> float:
    return 0.0 if x == 0 else x * log(x)


def _first_root(f, lo: float, hi: float, steps: int = 4000) -> float | None:
    """Smallest sign change of f on a uniform grid over (lo, hi), polished."""
    prev_x, prev = lo, f(lo)
    for i in range(1, steps + 1):
        x = lo + (hi - lo) * i / steps
        y = f(x)
        if prev == 0:
            return prev_x
        if (prev < 0) != (y < 0):
            return brentq(f, prev_x, x, xtol=XTOL, rtol=RTOL)
        prev_x, prev = x, y
    return None


# ---------------------------------------------------------------- Pittel / Karp / Frieze

class RhoConstants(NamedTuple):
    rho: float
    mean_correction: float
    variance_rate: float
    variance_rate_squared: float


def solve_rho() -> RhoConstants:
    """rho with rho * e**rho = 1, plus the random-tree mean correction and
    variance coefficient (both the unsquared and squared readings)."""
    rho = brentq(lambda x: x * exp(x) - 1.0, 0.0, 1.0, xtol=XTOL, rtol=RTOL)
    corr = rho**2 * (rho + 2) / (2 * (rho + 1) ** 3)
    sigma = rho * (1 - rho - rho**2) / (1 + rho)
    return RhoConstants(rho, corr, sigma, sigma**2)


def pittel_mean(n: int) -> float:
    c = solve_rho()
    return c.rho * n + c.mean_correction


@dataclass(frozen=True)
class KarpConstants:
    d: float
    a: float
    b: float

    @property
    def independent_fraction(self) -> float:
        return (self.a + self.b + self.a * self.b) / (2 * self.d)

    @property
    def matching_fraction(self) -> float:
        return 1 - self.independent_fraction

    def to_dict(self) -> dict:
        return {"d": self.d, "a": self.a, "b": self.b,
                "independent_fraction": self.independent_fraction,
                "matching_fraction": self.matching_fraction}


def karp_constants(d: float) -> KarpConstants:
    """Smallest root a of x = d exp(-d exp(-x)), b = d exp(-a), for 0 < d <= e.

    In this range the root is the symmetric one, x = d exp(-x); solving that
    form keeps full precision at d = e, where the original equation has a
    triple root.
    """
    if not 0 < d <= math.e:
        raise ValueError(f"d={d} outside (0, e]")
    a = brentq(lambda x: x * exp(x) - d, 0.0, 2.0, xtol=XTOL, rtol=RTOL)
    karp = lambda x: x - d * exp(-d * exp(-x))
    assert abs(karp(a)) < 1e-12
    # no smaller root: sign is constant on (0, a)
    assert _first_root(karp, 0.0, a * (1 - 1e-9), steps=2000) is None
    return KarpConstants(d, a, d * exp(-a))


def frieze_beta(d: float) -> float:
    if d <= math.e:
        raise ValueError(f"d={d} must exceed e")
    return (2 / d) * (log(d) - log(log(d)) - log(2) + 1)


# ---------------------------------------------------------------- expectations

def _exact_p(model: ModelSpec) -> Fraction:
    if model.p is not None:
        return Fraction(str(model.p))
    return Fraction(str(model.d)) / model.n


def _log_comb(n: int, k: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


@dataclass(frozen=True)
class ExpectedCount:
    log_value: float
    exact: Fraction | None
    tag: str
    rate: float | None = None


def regular_count_rate(d: int, alpha: float) -> float:
    """Per-vertex exponential rate of E X_k for random d-regular graphs."""
    if not 0 <= alpha < 0.5:
        raise ValueError("regular rate needs 0 <= alpha < 1/2")
    return (d - 1) * _xlogx(1 - alpha) - _xlogx(alpha) - (d / 2) * _xlogx(1 - 2 * alpha)


def expected_count(model: ModelSpec, k: int) -> ExpectedCount:
    n = model.n
    if not 0 <= k <= n:
        raise ValueError(f"k={k} outside [0, {n}]")
    if model.family == "gnp":
        p = _exact_p(model)
        exact = comb(n, k) * (1 - p) ** comb(k, 2)
        pf = model.edge_probability
        lv = _log_comb(n, k) + comb(k, 2) * math.log1p(-pf)
        return ExpectedCount(lv, exact, "gnp-exact")
    if model.family == "tree":
        if k == n:
            return ExpectedCount(-math.inf, Fraction(0), "tree-exact")
        exact = comb(n, k) * Fraction(n - k, n) ** (k - 1)
        lv = _log_comb(n, k) + (k - 1) * (log(n - k) - log(n))
        return ExpectedCount(lv, exact, "tree-exact")
    alpha = k / n
    rate = regular_count_rate(int(model.d), alpha)
    return ExpectedCount(n * rate, None, "regular-rate", rate)


def tree_expected_count_asymptotic(n: int, k: int) -> float:
    """The C(n, k) (1 - k/n)**k form, which drops one (1 - alpha) factor."""
    return comb(n, k) * (1 - k / n) ** k


@dataclass(frozen=True)
class PlantedMean:
    exact: Fraction | None
    value: float
    asymptotic: float
    tag: str


def planted_expected_unconnected(model: ModelSpec, k: int) -> PlantedMean:
    """E N_sigma under the planted law, exact at finite n."""
    n = model.n
    if not 0 <= k <= n:
        raise ValueError(f"k={k} outside [0, {n}]")
    alpha = k / n
    if model.family == "gnp":
        p = _exact_p(model)
        exact = (n - k) * (1 - p) ** k
        asym = n * (1 - alpha) * exp(-model.degree * alpha)
        return PlantedMean(exact, float(exact), asym, "gnp-binomial")
    if model.family == "tree":
        if k > n - 1 or k < 1:
            raise ValueError("tree planted mean needs 1 <= k <= n-1")
        num = (n - k) * (n - k - 1) ** k * Fraction(n) ** (n - k - 2)
        den = (n - k) ** (k - 1) * Fraction(n) ** (n - k - 1)
        exact = num / den
        asym = n * (1 - alpha) ** 2 * exp(-alpha / (1 - alpha))
        return PlantedMean(exact, float(exact), asym, "tree-matrix-tree")
    d = int(model.d)
    if 2 * k >= n:
        raise ValueError("regular planted mean needs 2k < n")
    exact = Fraction(n - k)
    for i in range(d):
        exact *= Fraction(d * (n - 2 * k) - i, d * (n - k) - i)
    asym = n * (1 - alpha) * ((1 - 2 * alpha) / (1 - alpha)) ** d
    return PlantedMean(exact, float(exact), asym, "regular-pairing")


# ---------------------------------------------------------------- lower-bound rates

def gnp_lower_rate(alpha: float, beta: float, d: float) -> float:
    return -(_xlogx(beta - alpha) - _xlogx(beta) - _xlogx(1 - alpha) - d * alpha**2 / 2)


def tree_lower_rate(alpha: float) -> float:
    if not 0 <= alpha < 0.5:
        raise ValueError("tree rate needs 0 <= alpha < 1/2")
    return (2 - 3 * alpha) * log(1 - alpha) - _xlogx(1 - 2 * alpha)


def regular_lower_rate(alpha: float, beta: float, d: int) -> float:
    return -(_xlogx(beta - alpha) - _xlogx(beta) + (d - 1) * _xlogx(1 - alpha)
             - (d / 2) * _xlogx(1 - 2 * alpha))


def high_degree_lower_exponent(d: float, n: int) -> float:
    """Total exponent -20 n d^(-3/2) (log d)^(-3/2)."""
    return -20 * n * d**-1.5 * log(d) ** -1.5


def lower_bound_exponent(model: ModelSpec, alpha: float, beta: float | None = None,
                         variant: str = "default") -> RateReport:
    fam = model.family
    if variant == "high-degree":
        if fam != "gnp":
            raise ValueError("high-degree variant is for gnp")
        d = model.degree
        return RateReport(high_degree_lower_exponent(d, 1), "gnp-high-degree",
                          {"d": d, "n": model.n, "total": high_degree_lower_exponent(d, model.n)})
    if fam == "tree":
        return RateReport(tree_lower_rate(alpha), "tree-wingard", {"alpha": alpha})
    if beta is None or not 0 <= alpha < beta < 1:
        raise ValueError("need 0 <= alpha < beta < 1")
    if fam == "gnp":
        d = model.degree
        return RateReport(gnp_lower_rate(alpha, beta, d), "gnp-azuma",
                          {"alpha": alpha, "beta": beta, "d": d})
    if not alpha < 0.5:
        raise ValueError("regular rate needs alpha < 1/2")
    d = int(model.d)
    return RateReport(regular_lower_rate(alpha, beta, d), "regular-azuma",
                      {"alpha": alpha, "beta": beta, "d": d})


def dani_degree_bound(alpha: float) -> float:
    """2 (log(1/alpha) + 1) / alpha - 2 / sqrt(alpha); stated for alpha < 1e-9."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    return 2 * (log(1 / alpha) + 1) / alpha - 2 / sqrt(alpha)


# ---------------------------------------------------------------- thresholds

def tree_planted_density(alpha: float) -> float:
    return (1 - alpha) ** 2 * exp(-alpha / (1 - alpha))


def tree_s(alpha: float) -> float:
    return sqrt(TREE_PROOF_CONSTANT * max(-tree_lower_rate(alpha), 0.0) / tree_planted_density(alpha))


def tree_ratio_sides(alpha: float) -> tuple[float, float]:
    """Lower and upper asymptotic ratio bounds (1 -/+ s) density / alpha."""
    m = tree_planted_density(alpha) / alpha
    s = tree_s(alpha)
    return m * (1 - s), m * (1 + s)


def tree_unimodality_thresholds() -> tuple[float, float]:
    inc = _first_root(lambda a: tree_ratio_sides(a)[0] - 1, 0.01, 0.45)
    dec = _first_root(lambda a: tree_ratio_sides(a)[1] - 1, 0.01, 0.45)
    return inc, dec


def er_s(alpha: float, d: float, beta: float) -> float:
    r = -gnp_lower_rate(alpha, beta, d)
    q = ER_PROOF_CONSTANT * max(r, 0.0) / ((1 - alpha) * exp(-d * alpha))
    return sqrt(q) if q < 1 else q


def er_ratio_sides(alpha: float, d: float, beta: float) -> tuple[float, float]:
    m = (1 - alpha) * exp(-d * alpha) / alpha
    s = er_s(alpha, d, beta)
    return m * (1 - s), m * (1 + s)


def er_low_degree_thresholds(d: float) -> tuple[float | None, float | None]:
    """(alpha_left, alpha_right): below alpha_left the lower ratio bound exceeds
    1, above alpha_right the upper bound is below 1. None if no crossing in
    (0, beta)."""
    beta = karp_constants(d).independent_fraction
    hi = beta * (1 - 1e-9)
    left = _first_root(lambda a: er_ratio_sides(a, d, beta)[0] - 1, 1e-4, hi)
    right = _first_root(lambda a: er_ratio_sides(a, d, beta)[1] - 1, 1e-4, hi)
    return left, right


# ---------------------------------------------------------------- planted tail bounds

def gnp_chernoff_bound(n: int, k: int, d: float, t: float) -> float:
    """Two-sided bound on P(|N - EN| >= t EN) for planted G(n, d/n)."""
    alpha = k / n
    return min(1.0, 2 * exp(-n * min(t, t * t) * (1 - alpha) * exp(-d * alpha) / 3))


def tree_tail_bounds(n: int, k: int, s: float) -> dict[str, float]:
    """Planted-tree bounds on the events |N-EN| > s EN + 1 (two_sided),
    N < (1-s) EN - 1 (lower, 0 < s < 1) and N > (1+s) EN + 1 (upper)."""
    mu = n * tree_planted_density(k / n)
    out = {"two_sided": min(1.0, exp(-min(s, s * s) * mu / 3)),
           "upper": min(1.0, exp(-s * s * mu / (2 + s)))}
    out["lower"] = min(1.0, exp(-s * s * mu / 2)) if 0 < s < 1 else 1.0
    return out
