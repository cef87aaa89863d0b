"""Shape of integer sequences (unimodality, log-concavity, modes) and exact
real-rootedness certificates for integer polynomials via Sturm chains."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Sequence


@dataclass(frozen=True)
class ShapeVerdict:
    unimodal: bool
    mode_interval: tuple[int, int]
    increasing_prefix: int
    decreasing_suffix_start: int

    def to_dict(self) -> dict:
        return {
            "unimodal": self.unimodal,
            "mode_interval": list(self.mode_interval),
            "increasing_prefix": self.increasing_prefix,
            "decreasing_suffix_start": self.decreasing_suffix_start,
        }


def _as_list(seq) -> list:
    return list(getattr(seq, "coeffs", seq))


def analyze_shape(seq) -> ShapeVerdict:
    a = _as_list(seq)
    if not a:
        raise ValueError("empty sequence")
    top = max(a)
    lo = a.index(top)
    hi = len(a) - 1 - a[::-1].index(top)

    inc = 0
    while inc + 1 < len(a) and a[inc + 1] > a[inc]:
        inc += 1
    dec = len(a) - 1
    while dec > 0 and a[dec - 1] >= a[dec]:
        dec -= 1
    # weakly up to some j, weakly down after it
    up = 0
    while up + 1 < len(a) and a[up + 1] >= a[up]:
        up += 1
    unimodal = dec <= up
    return ShapeVerdict(unimodal, (lo, hi), inc, dec)


def is_unimodal(seq) -> bool:
    return analyze_shape(seq).unimodal


def is_log_concave(seq) -> bool:
    a = _as_list(seq)
    return all(a[k] * a[k] >= a[k - 1] * a[k + 1] for k in range(1, len(a) - 1))


def newton_normalize(seq, n: int | None = None) -> list[Fraction]:
    """a_k / C(n, k) as exact rationals; n defaults to the sequence's ambient size."""
    a = _as_list(seq)
    if n is None:
        n = getattr(seq, "n", len(a) - 1)
    if len(a) > n + 1:
        raise ValueError("sequence longer than n + 1")
    return [Fraction(x, comb(n, k)) for k, x in enumerate(a)]


# ---------------------------------------------------------------- exact polynomial arithmetic
# Polynomials are lists of Fractions, lowest degree first, no trailing zeros
# (the zero polynomial is []).

def _norm(p):
    p = [Fraction(c) for c in p]
    while p and p[-1] == 0:
        p.pop()
    return p


def _deriv(p):
    return _norm([i * c for i, c in enumerate(p)][1:])


def _divmod(a, b):
    a = list(a)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    lead = b[-1]
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        f = a[-1] / lead
        q[shift] = f
        for i, c in enumerate(b):
            a[i + shift] -= f * c
        a = _norm(a)
    return _norm(q), a


def _monic(p):
    return [c / p[-1] for c in p] if p else p


def _gcd(a, b):
    a, b = _norm(a), _norm(b)
    while b:
        a, b = b, _divmod(a, b)[1]
    return _monic(a)


def _exact_div(a, b):
    q, r = _divmod(a, b)
    assert not r
    return q


def sturm_chain(p) -> list[list[Fraction]]:
    p = _norm(p)
    chain = [p, _deriv(p)]
    while chain[-1]:
        r = _divmod(chain[-2], chain[-1])[1]
        chain.append([-c for c in r])
    return [c for c in chain if c]


def _sign_changes(signs):
    signs = [s for s in signs if s != 0]
    return sum(1 for x, y in zip(signs, signs[1:]) if x != y)


def distinct_real_roots(p) -> int:
    """Number of distinct real roots, by Sturm's theorem on (-inf, inf)."""
    p = _norm(p)
    if len(p) <= 1:
        return 0
    chain = sturm_chain(p)
    at_pos = [1 if c[-1] > 0 else -1 for c in chain]
    at_neg = [s * (-1) ** (len(c) - 1) for s, c in zip(at_pos, chain)]
    return _sign_changes(at_neg) - _sign_changes(at_pos)


def squarefree_decomposition(p) -> list[list[Fraction]]:
    """Yun's algorithm: p = c * prod_i a_i**i; returns [a_1, a_2, ...]."""
    p = _norm(p)
    dp = _deriv(p)
    a0 = _gcd(p, dp)
    b = _exact_div(p, a0)
    c = _exact_div(dp, a0)
    d = _norm([x - y for x, y in _zip_pad(c, _deriv(b))])
    out = []
    while len(b) > 1:
        a = _gcd(b, d)
        out.append(a)
        b = _exact_div(b, a)
        c = _exact_div(d, a)
        d = _norm([x - y for x, y in _zip_pad(c, _deriv(b))])
    return out


def _zip_pad(a, b):
    m = max(len(a), len(b))
    return zip(list(a) + [0] * (m - len(a)), list(b) + [0] * (m - len(b)))


@dataclass(frozen=True)
class RootCertificate:
    all_real: bool
    real_root_count: int
    degree: int
    method: str
    factors: tuple[tuple[int, int, int], ...]  # (multiplicity, factor degree, real roots)

    def to_dict(self) -> dict:
        return {
            "all_real": self.all_real,
            "real_root_count": self.real_root_count,
            "degree": self.degree,
            "method": self.method,
            "factors": [list(f) for f in self.factors],
        }


def certify_real_rooted(coeffs: Sequence[int]) -> RootCertificate:
    """Exact real-rootedness test; coefficients lowest degree first."""
    p = _norm(coeffs)
    if not p:
        raise ValueError("zero polynomial")
    deg = len(p) - 1
    factors = []
    count = 0
    for mult, a in enumerate(squarefree_decomposition(p), start=1):
        if len(a) <= 1:
            continue
        r = distinct_real_roots(a)
        factors.append((mult, len(a) - 1, r))
        count += mult * r
    return RootCertificate(count == deg, count, deg, "sturm/yun over Q", tuple(factors))


def root_bound_ok(coeffs: Sequence[int], bound_sq: Fraction | int) -> bool:
    """True iff every real root r of the polynomial satisfies r**2 <= bound_sq.

    sqrt(bound_sq) need not be rational, so roots are counted in s = t**2:
    p(t)p(-t) = q(t**2), and real roots t with t**2 > b are exactly the real
    roots of q above b."""
    p = _norm(coeffs)
    even = _norm(_poly_mul(p, [c * (-1) ** i for i, c in enumerate(p)]))
    # even polynomial in t -> polynomial in s = t^2
    s_poly = even[::2]
    total = 0
    for mult, a in enumerate(squarefree_decomposition(s_poly), start=1):
        if len(a) > 1:
            total += _roots_above(a, Fraction(bound_sq))
    return total == 0


def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _eval(p, x):
    r = Fraction(0)
    for c in reversed(p):
        r = r * x + c
    return r


def _roots_above(p, x) -> int:
    """Distinct real roots of a square-free p strictly greater than x."""
    chain = sturm_chain(p)
    at_x = [_eval(c, x) for c in chain]
    at_pos = [1 if c[-1] > 0 else -1 for c in chain]
    return _sign_changes([(v > 0) - (v < 0) for v in at_x]) - _sign_changes(at_pos)


# ---------------------------------------------------------------- tree-specific laws

def last_third_start(alpha: int) -> int:
    """ceil((2*alpha - 1)/3): from here on a tree's sequence never increases."""
    return max(0, -((1 - 2 * alpha) // 3))


def nonincreasing_from(seq, j: int) -> bool:
    a = _as_list(seq)
    return all(a[i] >= a[i + 1] for i in range(max(j, 0), len(a) - 1))


def last_third_ok(seq) -> bool:
    a = _as_list(seq)
    return nonincreasing_from(a, last_third_start(len(a) - 1))


def wingard_ok(seq, n: int) -> bool:
    """x_k >= C(n-k+1, k) at every k up to alpha (a lower bound valid for all trees)."""
    return all(x >= comb(n - k + 1, k) for k, x in enumerate(_as_list(seq)))
