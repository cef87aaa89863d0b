"""Seeded samplers for random trees, G(n, p), random regular graphs and their
planted (size-biased) versions."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph_core import Graph, Tree, graph_from_edge_list, tree_from_edge_list, vertex_set
from .rng import as_generator

TREE_SAMPLER = "aldous-broder"
FAMILIES = ("tree", "gnp", "regular")


class SamplingError(RuntimeError):
    pass


@dataclass(frozen=True)
class ModelSpec:
    family: str
    n: int
    p: float | None = None
    d: float | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.family == "gnp":
            if (self.p is None) == (self.d is None):
                raise ValueError("gnp needs exactly one of p or d")
            if not 0 < self.edge_probability < 1:
                raise ValueError(f"edge probability {self.edge_probability} not in (0, 1)")
        elif self.family == "regular":
            if self.d is None or int(self.d) != self.d or self.d < 1:
                raise ValueError("regular needs an integer degree d >= 1")
            if self.d >= self.n or (self.n * int(self.d)) % 2:
                raise ValueError("regular needs d < n and n*d even")
        elif self.n < 2:
            raise ValueError("tree needs n >= 2")

    @property
    def edge_probability(self) -> float:
        return self.p if self.p is not None else self.d / self.n

    @property
    def degree(self) -> float:
        """Mean vertex degree of the family."""
        if self.family == "gnp":
            return self.d if self.d is not None else self.p * self.n
        if self.family == "regular":
            return int(self.d)
        return 2 * (self.n - 1) / self.n

    def to_dict(self) -> dict:
        return {"family": self.family, "n": self.n, "p": self.p, "d": self.d}

    @classmethod
    def from_dict(cls, d: dict) -> "ModelSpec":
        return cls(d["family"], int(d["n"]), d.get("p"), d.get("d"))


@dataclass(frozen=True)
class PlantedSample:
    graph: Graph
    sigma: tuple[int, ...]
    attempts: int = 1


def sample_gnp(n: int, p: float, seed, forbidden: tuple[int, ...] = ()) -> Graph:
    """G(n, p); pairs inside ``forbidden`` are never edges."""
    if not 0 < p < 1:
        raise ValueError(f"p={p} not in (0, 1)")
    rng = as_generator(seed)
    blocked = np.zeros(n, dtype=bool)
    blocked[list(forbidden)] = True
    us, vs = [], []
    for i in range(n - 1):
        hit = np.flatnonzero(rng.random(n - i - 1) < p) + i + 1
        if blocked[i]:
            hit = hit[~blocked[hit]]
        us.append(np.full(hit.size, i))
        vs.append(hit)
    if n < 2:
        return graph_from_edge_list(n, [])
    return graph_from_edge_list(n, zip(np.concatenate(us).tolist(), np.concatenate(vs).tolist()))


def _aldous_broder(n: int, sigma: tuple[int, ...], rng: np.random.Generator) -> Tree:
    # Random walk on K_n minus the clique on sigma; first-entrance edges
    # form a uniform spanning tree of that host graph.
    in_sigma = np.zeros(n, dtype=bool)
    in_sigma[list(sigma)] = True
    others = np.flatnonzero(~in_sigma)
    n_out = others.size
    visited = bytearray(n)
    cur = int(rng.integers(n))
    visited[cur] = 1
    left = n - 1
    edges = []
    while left:
        for u in rng.random(4 * n).tolist():
            if in_sigma[cur]:
                nxt = int(others[int(u * n_out)])
            else:
                nxt = int(u * (n - 1))
                if nxt >= cur:
                    nxt += 1
            if not visited[nxt]:
                visited[nxt] = 1
                edges.append((cur, nxt))
                left -= 1
                if not left:
                    break
            cur = nxt
    return tree_from_edge_list(n, edges)


def sample_uniform_tree(n: int, seed) -> Tree:
    if n < 2:
        raise ValueError("a random tree needs n >= 2")
    return _aldous_broder(n, (), as_generator(seed))


def _configuration_pairing(n: int, d: int, rng: np.random.Generator):
    stubs = rng.permutation(np.repeat(np.arange(n), d)).reshape(-1, 2)
    a, b = stubs.min(axis=1), stubs.max(axis=1)
    if np.any(a == b):
        return None
    keys = a.astype(np.int64) * n + b
    if np.unique(keys).size != keys.size:
        return None
    return list(zip(a.tolist(), b.tolist()))


def sample_regular(n: int, d: int, seed, max_attempts: int = 10**6) -> Graph:
    """Uniform simple d-regular graph: configuration model with rejection."""
    g, _ = _sample_regular(n, d, as_generator(seed), (), max_attempts)
    return g


def _sample_regular(n, d, rng, sigma, max_attempts):
    if (n * d) % 2:
        raise ValueError(f"n*d = {n * d} is odd")
    if not 0 <= d < n:
        raise ValueError(f"need 0 <= d < n, got d={d}, n={n}")
    in_sigma = np.zeros(n, dtype=bool)
    in_sigma[list(sigma)] = True
    for attempt in range(1, max_attempts + 1):
        pairs = _configuration_pairing(n, d, rng)
        if pairs is None:
            continue
        if sigma and any(in_sigma[u] and in_sigma[v] for u, v in pairs):
            continue
        return graph_from_edge_list(n, pairs), attempt
    raise SamplingError(f"rejection cap of {max_attempts} attempts exceeded")


def sample_model(model: ModelSpec, seed) -> Graph:
    rng = as_generator(seed)
    if model.family == "gnp":
        return sample_gnp(model.n, model.edge_probability, rng)
    if model.family == "tree":
        return sample_uniform_tree(model.n, rng)
    return sample_regular(model.n, int(model.d), rng)


def sample_planted(model: ModelSpec, k: int, seed, sigma=None, max_attempts: int = 10**6) -> PlantedSample:
    """Draw from the planted law: sigma uniform of size k, graph conditioned on
    sigma being independent. ``sigma`` may be fixed by the caller."""
    n = model.n
    if not 0 <= k <= n:
        raise ValueError(f"k={k} outside [0, {n}]")
    rng = as_generator(seed)
    if sigma is None:
        sigma = tuple(sorted(rng.choice(n, size=k, replace=False).tolist()))
    else:
        sigma = vertex_set(sigma, n)
        if len(sigma) != k:
            raise ValueError("fixed sigma has the wrong size")
    if model.family == "gnp":
        return PlantedSample(sample_gnp(n, model.edge_probability, rng, forbidden=sigma), sigma)
    if model.family == "tree":
        if k > n - 1:
            raise SamplingError(f"no tree on {n} vertices has an independent set of size {k}")
        return PlantedSample(_aldous_broder(n, sigma, rng), sigma)
    g, attempts = _sample_regular(n, int(model.d), rng, sigma, max_attempts)
    return PlantedSample(g, sigma, attempts)
