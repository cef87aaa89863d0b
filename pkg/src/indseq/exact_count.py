"""Exact independence sequences, matching polynomials, uniform samplers of
independent sets, and enumeration oracles.

Trees and forests go through a two-state dynamic program evaluated at
``t = 2**W`` (Kronecker substitution), so every polynomial product is a single
big-integer multiplication. General graphs use the branching recurrence
``I(G) = I(G - v) + t * I(G - N[v])`` on a maximum-degree vertex, with
connected-component factorisation and memoisation on vertex bitmasks.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Iterator

import gmpy2
import numpy as np

from .graph_core import Graph, GraphError, Tree, prufer_decode
from .rng import as_generator, randbelow

DEFAULT_GENERAL_CAP = 64
ENUMERATION_CAP = 9


class SizeGuardError(ValueError):
    pass


@dataclass(frozen=True)
class IndepSequence:
    coeffs: tuple[int, ...]
    n: int

    def __post_init__(self):
        c = list(self.coeffs)
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(int(x) for x in c))

    def __getitem__(self, k: int) -> int:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    @property
    def alpha(self) -> int:
        return len(self.coeffs) - 1

    @property
    def total(self) -> int:
        return sum(self.coeffs)

    def ratio(self, k: int) -> Fraction:
        return Fraction(self[k + 1], self[k])


@dataclass(frozen=True)
class MatchingPolynomial:
    counts: tuple[int, ...]
    n: int

    def signed_coefficients(self) -> list[int]:
        """Coefficients of t^n - m1 t^(n-2) + ..., lowest degree first."""
        c = [0] * (self.n + 1)
        for k, m in enumerate(self.counts):
            c[self.n - 2 * k] = (-1) ** k * m
        return c


# ---------------------------------------------------------------- polynomial helpers

def poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def poly_add(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, y in enumerate(b):
        out[i] += y
    return out


def _trim(c):
    c = list(c)
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return c


# ---------------------------------------------------------------- forests

def _forest_order(g: Graph):
    """Parent array and a root-first visiting order covering every component."""
    parent = [-1] * g.n
    order = []
    seen = [False] * g.n
    for r in range(g.n):
        if seen[r]:
            continue
        seen[r] = True
        order.append(r)
        i = len(order) - 1
        while i < len(order):
            u = order[i]
            i += 1
            for w in g.adjacency[u]:
                if not seen[w]:
                    seen[w] = True
                    parent[w] = u
                    order.append(w)
    return parent, order


def forest_independence_sequence(g: Graph) -> IndepSequence:
    if not g.is_forest():
        raise GraphError("graph has a cycle")
    n = g.n
    if n == 0:
        return IndepSequence((1,), 0)
    width = n + 2  # every coefficient is < 2**(n+1)
    x = gmpy2.mpz(1) << width
    one = gmpy2.mpz(1)
    parent, order = _forest_order(g)
    incl = [x] * n  # polynomials with v in the set, evaluated at t = 2**width
    excl = [one] * n
    total = one
    for v in reversed(order):
        p = parent[v]
        if p >= 0:
            excl[p] *= incl[v] + excl[v]
            incl[p] *= excl[v]
        else:
            total *= incl[v] + excl[v]
        incl[v] = excl[v] = None
    mask = (one << width) - 1
    coeffs = []
    while total:
        coeffs.append(int(total & mask))
        total >>= width
    return IndepSequence(tuple(coeffs), n)


def forest_max_independent_set_size(g: Graph) -> int:
    if not g.is_forest():
        raise GraphError("graph has a cycle")
    parent, order = _forest_order(g)
    take = [1] * g.n
    skip = [0] * g.n
    best = 0
    for v in reversed(order):
        p = parent[v]
        if p >= 0:
            skip[p] += max(take[v], skip[v])
            take[p] += skip[v]
        else:
            best += max(take[v], skip[v])
    return best


def forest_maximum_matching_size(g: Graph) -> int:
    # greedy leaf matching is optimal on forests
    parent, order = _forest_order(g)
    matched = [False] * g.n
    size = 0
    for v in reversed(order):
        p = parent[v]
        if p >= 0 and not matched[v] and not matched[p]:
            matched[v] = matched[p] = True
            size += 1
    return size


# ---------------------------------------------------------------- general graphs

def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _components(masks, mask: int) -> list[int]:
    comps = []
    while mask:
        seed = mask & -mask
        comp = seed
        frontier = seed
        while frontier:
            nb = 0
            for v in _bits(frontier):
                nb |= masks[v]
            frontier = nb & mask & ~comp
            comp |= frontier
        comps.append(comp)
        mask &= ~comp
    return comps


class IndependentSetCounter:
    """Branching-tree counting table for one graph, reused across queries.

    ``poly(mask)`` gives the independence polynomial of the induced subgraph
    on ``mask``; the memo doubles as the table the samplers trace back through.
    """

    def __init__(self, g: Graph, cap: int = DEFAULT_GENERAL_CAP):
        if g.n > cap:
            raise SizeGuardError(f"general-graph path capped at n={cap}, got n={g.n}")
        self.g = g
        self.masks = g.masks
        self.full = (1 << g.n) - 1
        self._poly: dict[int, list[int]] = {}
        self._comps: dict[int, list[int]] = {}
        self._pivot: dict[int, int] = {}

    def components(self, mask: int) -> list[int]:
        c = self._comps.get(mask)
        if c is None:
            c = self._comps[mask] = _components(self.masks, mask)
        return c

    def pivot(self, mask: int) -> int:
        v = self._pivot.get(mask)
        if v is None:
            best, v = -1, -1
            for u in _bits(mask):
                deg = bin(self.masks[u] & mask).count("1")
                if deg > best:
                    best, v = deg, u
            self._pivot[mask] = v
        return v

    def poly(self, mask: int) -> list[int]:
        got = self._poly.get(mask)
        if got is not None:
            return got
        if mask == 0:
            res = [1]
        else:
            comps = self.components(mask)
            if len(comps) > 1:
                res = [1]
                for c in comps:
                    res = poly_mul(res, self.poly(c))
            else:
                v = self.pivot(mask)
                if self.masks[v] & mask == 0:
                    res = [1, 1]
                else:
                    without = self.poly(mask & ~(1 << v))
                    within = self.poly(mask & ~(1 << v) & ~self.masks[v])
                    res = poly_add(without, [0] + within)
        self._poly[mask] = res
        return res

    def coefficient(self, mask: int, k: int) -> int:
        p = self.poly(mask)
        return p[k] if 0 <= k < len(p) else 0

    def sequence(self) -> IndepSequence:
        return IndepSequence(tuple(self.poly(self.full)), self.g.n)

    # ------------------------------------------------------------ sampling

    def sample(self, k: int, rng) -> int:
        """One exactly uniform size-k independent set, as a bitmask."""
        rng = as_generator(rng)
        if self.coefficient(self.full, k) == 0:
            raise ValueError(f"no independent set of size {k}")
        out = 0
        stack = [(self.full, k)]
        while stack:
            mask, j = stack.pop()
            if j == 0:
                continue
            comps = self.components(mask)
            if len(comps) > 1:
                # split j between the first component and the rest
                first, rest = comps[0], mask & ~comps[0]
                pf, pr = self.poly(first), self.poly(rest)
                r = randbelow(rng, self.coefficient(mask, j))
                for j1 in range(min(j, len(pf) - 1) + 1):
                    w = pf[j1] * (pr[j - j1] if j - j1 < len(pr) else 0)
                    if r < w:
                        break
                    r -= w
                stack.append((first, j1))
                stack.append((rest, j - j1))
                continue
            v = self.pivot(mask)
            nb = self.masks[v] & mask
            if nb == 0:  # isolated single vertex, so j == 1
                out |= 1 << v
                continue
            inc_mask = mask & ~(1 << v) & ~nb
            w_in = self.coefficient(inc_mask, j - 1)
            if randbelow(rng, self.coefficient(mask, j)) < w_in:
                out |= 1 << v
                stack.append((inc_mask, j - 1))
            else:
                stack.append((mask & ~(1 << v), j))
        return out

    def sample_many(self, k: int, count: int, rng) -> dict[int, int]:
        """``count`` independent uniform draws, returned as {bitmask: multiplicity}.

        Draws are routed down the branching tree in bulk with binomial and
        multinomial splits, so the cost grows with the number of distinct sets
        hit rather than with ``count``. Split probabilities are doubles.
        """
        rng = as_generator(rng)
        if self.coefficient(self.full, k) == 0:
            raise ValueError(f"no independent set of size {k}")
        return self._sample_many(self.full, k, count, rng)

    def _sample_many(self, mask: int, k: int, count: int, rng) -> dict[int, int]:
        result: dict[int, int] = {}
        stack = [(mask, k, 0, count)]
        while stack:
            mask, j, acc, m = stack.pop()
            if m == 0:
                continue
            if j == 0:
                result[acc] = result.get(acc, 0) + m
                continue
            comps = self.components(mask)
            if len(comps) > 1:
                first, rest = comps[0], mask & ~comps[0]
                pf, pr = self.poly(first), self.poly(rest)
                js = list(range(min(j, len(pf) - 1) + 1))
                w = [pf[a] * (pr[j - a] if j - a < len(pr) else 0) for a in js]
                tot = sum(w)
                probs = np.array([float(Fraction(x, tot)) for x in w])
                split = rng.multinomial(m, probs / probs.sum())
                # draws on the rest are independent of the first component's draw
                for a, c in zip(js, split.tolist()):
                    if c:
                        for s1, c1 in self._sample_many(first, a, c, rng).items():
                            stack.append((rest, j - a, acc | s1, c1))
                continue
            v = self.pivot(mask)
            nb = self.masks[v] & mask
            if nb == 0:
                result[acc | (1 << v)] = result.get(acc | (1 << v), 0) + m
                continue
            inc_mask = mask & ~(1 << v) & ~nb
            p_in = float(Fraction(self.coefficient(inc_mask, j - 1), self.coefficient(mask, j)))
            m_in = int(rng.binomial(m, p_in))
            stack.append((inc_mask, j - 1, acc | (1 << v), m_in))
            stack.append((mask & ~(1 << v), j, acc, m - m_in))
        return result


def branching_independence_sequence(g: Graph, cap: int = DEFAULT_GENERAL_CAP) -> IndepSequence:
    return IndependentSetCounter(g, cap).sequence()


def independence_sequence(g: Graph, cap: int = DEFAULT_GENERAL_CAP) -> IndepSequence:
    """Exact x_0..x_alpha. Forests use the linear-time DP, other graphs branch."""
    if g.is_forest():
        return forest_independence_sequence(g)
    return branching_independence_sequence(g, cap)


def _reduce_low_degree(g: Graph) -> tuple[int, list[int]]:
    """Greedy degree-0/1 reduction (always optimal for maximum independent set).

    Returns the number of vertices taken and the surviving core."""
    alive = [True] * g.n
    deg = [len(a) for a in g.adjacency]
    queue = [v for v in range(g.n) if deg[v] <= 1]
    taken = 0

    def kill(u):
        alive[u] = False
        for w in g.adjacency[u]:
            if alive[w]:
                deg[w] -= 1
                if deg[w] <= 1:
                    queue.append(w)

    while queue:
        v = queue.pop()
        if not alive[v] or deg[v] > 1:
            continue
        taken += 1
        nbrs = [w for w in g.adjacency[v] if alive[w]]
        alive[v] = False
        for w in nbrs:
            kill(w)
    return taken, [v for v in range(g.n) if alive[v]]


def _mis_branch(masks, mask: int, memo: dict) -> int:
    got = memo.get(mask)
    if got is not None:
        return got
    if mask == 0:
        return 0
    comps = _components(masks, mask)
    if len(comps) > 1:
        res = sum(_mis_branch(masks, c, memo) for c in comps)
    else:
        best, v = -1, -1
        for u in _bits(mask):
            deg = bin(masks[u] & mask).count("1")
            if deg <= 1:
                best, v = deg, u
                break
            if deg > best:
                best, v = deg, u
        if best <= 1:
            # a vertex of degree <= 1 is always in some maximum set
            res = 1 + _mis_branch(masks, mask & ~(1 << v) & ~masks[v], memo)
        else:
            res = max(_mis_branch(masks, mask & ~(1 << v), memo),
                      1 + _mis_branch(masks, mask & ~(1 << v) & ~masks[v], memo))
    memo[mask] = res
    return res


def max_independent_set_size(g: Graph, cap: int = DEFAULT_GENERAL_CAP) -> int:
    """alpha(G). Forests: linear DP. Otherwise degree<=1 reduction, then
    branching on the remaining core, whose size is what ``cap`` guards."""
    if g.is_forest():
        return forest_max_independent_set_size(g)
    taken, core = _reduce_low_degree(g)
    if not core:
        return taken
    idx = {v: i for i, v in enumerate(core)}
    masks = []
    for v in core:
        b = 0
        for w in g.adjacency[v]:
            if w in idx:
                b |= 1 << idx[w]
        masks.append(b)
    total = taken
    memo: dict = {}
    for comp in _components(masks, (1 << len(core)) - 1):
        size = bin(comp).count("1")
        if size > cap:
            raise SizeGuardError(f"core component of size {size} exceeds cap {cap}")
        total += _mis_branch(masks, comp, memo)
    return total


def sample_uniform_independent_set(g: Graph, k: int, seed, cap: int = DEFAULT_GENERAL_CAP) -> tuple[int, ...]:
    mask = IndependentSetCounter(g, cap).sample(k, as_generator(seed))
    return tuple(_bits(mask))


def mask_to_set(mask: int) -> tuple[int, ...]:
    return tuple(_bits(mask))


# ---------------------------------------------------------------- matchings

def matching_polynomial(g: Graph, cap: int = DEFAULT_GENERAL_CAP) -> MatchingPolynomial:
    """Matching counts m_0, m_1, ... via m(G) = m(G-v) + t * sum_u m(G-v-u)."""
    if g.n > cap:
        raise SizeGuardError(f"matching polynomial capped at n={cap}, got n={g.n}")
    masks = g.masks
    memo: dict[int, list[int]] = {}

    def rec(mask):
        got = memo.get(mask)
        if got is not None:
            return got
        comps = _components(masks, mask) if mask else []
        if len(comps) > 1:
            res = [1]
            for c in comps:
                res = poly_mul(res, rec(c))
        else:
            v = -1
            for u in _bits(mask):
                if masks[u] & mask:
                    v = u
                    break
            if v < 0:
                res = [1]
            else:
                rest = mask & ~(1 << v)
                res = rec(rest)
                for u in _bits(masks[v] & mask):
                    res = poly_add(res, [0] + rec(rest & ~(1 << u)))
        memo[mask] = res
        return res

    return MatchingPolynomial(tuple(_trim(rec((1 << g.n) - 1))), g.n)


# ---------------------------------------------------------------- enumeration oracles

def enumerate_independent_sets(g: Graph, k: int | None = None) -> Iterator[int]:
    """Every independent set (optionally only those of size k) as a bitmask."""
    masks = g.masks

    def rec(start, cur, forbidden, size):
        if k is None or size == k:
            yield cur
            if k is not None:
                return
        for v in range(start, g.n):
            if not (forbidden >> v) & 1:
                yield from rec(v + 1, cur | (1 << v), forbidden | masks[v], size + 1)

    yield from rec(0, 0, 0, 0)


def brute_force_sequence(g: Graph) -> list[int]:
    counts = [0] * (g.n + 1)
    for s in enumerate_independent_sets(g):
        counts[bin(s).count("1")] += 1
    return _trim(counts)


def enumerate_labelled_trees(n: int) -> Iterator[Tree]:
    if not 2 <= n <= ENUMERATION_CAP:
        raise SizeGuardError(f"tree enumeration supports 2 <= n <= {ENUMERATION_CAP}")
    for code in product(range(n), repeat=n - 2):
        yield prufer_decode(code, n)


def enumerate_graphs(n: int) -> Iterator[Graph]:
    """All 2**C(n,2) labelled graphs on n vertices."""
    from .graph_core import graph_from_edge_list
    pairs = list(combinations(range(n), 2))
    for bits in range(1 << len(pairs)):
        yield graph_from_edge_list(n, [p for i, p in enumerate(pairs) if bits >> i & 1])


def count_trees_with_independent_prefix(n: int, k: int) -> int:
    """Labelled trees on n vertices in which {0..k-1} is independent."""
    if k < 1 or k >= n:
        raise ValueError(f"need 1 <= k < n, got n={n}, k={k}")
    return (n - k) ** (k - 1) * n ** (n - k - 1)


def count_trees_with_independent_prefix_enum(n: int, k: int) -> int:
    prefix = set(range(k))
    return sum(
        1 for t in enumerate_labelled_trees(n)
        if not any(u in prefix and v in prefix for u, v in t.edges)
    )
