"""Labelled simple graphs, trees, Prüfer codes and small predicates.

Vertices are ``0..n-1``. A vertex set is a sorted tuple of distinct ids.
"""
from __future__ import annotations

import heapq
import io
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    n: int
    edges: tuple[tuple[int, int], ...]
    adjacency: tuple[tuple[int, ...], ...] = field(repr=False, compare=False)

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    @property
    def max_degree(self) -> int:
        return max((len(a) for a in self.adjacency), default=0)

    @cached_property
    def masks(self) -> tuple[int, ...]:
        """Neighbourhood of each vertex as a bitmask."""
        out = []
        for nbrs in self.adjacency:
            b = 0
            for u in nbrs:
                b |= 1 << u
            out.append(b)
        return tuple(out)

    @cached_property
    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        if u > v:
            u, v = v, u
        return (u, v) in self.edge_set

    def is_forest(self) -> bool:
        return self.m == self.n - count_components(self)

    def is_tree(self) -> bool:
        return self.n >= 1 and self.m == self.n - 1 and count_components(self) == 1


@dataclass(frozen=True)
class Tree(Graph):
    def __post_init__(self):
        if not Graph.is_tree(self):
            raise GraphError("edge set is not a spanning tree")

    @classmethod
    def from_graph(cls, g: Graph) -> "Tree":
        return cls(g.n, g.edges, g.adjacency)


def graph_from_edge_list(n: int, pairs: Iterable[Sequence[int]]) -> Graph:
    """Build a canonical graph; reversed and repeated pairs collapse."""
    if n < 0:
        raise GraphError(f"negative vertex count {n}")
    es = set()
    for u, v in pairs:
        u, v = int(u), int(v)
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"endpoint out of range in ({u}, {v}) for n={n}")
        if u == v:
            raise GraphError(f"self-loop at {u}")
        es.add((u, v) if u < v else (v, u))
    edges = tuple(sorted(es))
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    return Graph(n, edges, tuple(tuple(sorted(a)) for a in adj))


def tree_from_edge_list(n: int, pairs: Iterable[Sequence[int]]) -> Tree:
    return Tree.from_graph(graph_from_edge_list(n, pairs))


def vertex_set(vs: Iterable[int], n: int) -> tuple[int, ...]:
    out = tuple(sorted(set(int(v) for v in vs)))
    if out and (out[0] < 0 or out[-1] >= n):
        raise GraphError(f"vertex id out of range for n={n}: {out}")
    return out


def count_components(g: Graph) -> int:
    seen = [False] * g.n
    comps = 0
    for s in range(g.n):
        if seen[s]:
            continue
        comps += 1
        seen[s] = True
        stack = [s]
        while stack:
            u = stack.pop()
            for w in g.adjacency[u]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
    return comps


def is_independent(g: Graph, s: Iterable[int]) -> bool:
    s = set(s)
    return not any(w in s for v in s for w in g.adjacency[v])


def unconnected_count(g: Graph, s: Iterable[int]) -> int:
    """Number of vertices outside ``s`` with no neighbour in ``s``."""
    s = set(s)
    if not is_independent(g, s):
        raise GraphError("vertex set is not independent")
    covered = set(s)
    for v in s:
        covered.update(g.adjacency[v])
    return g.n - len(covered)


def is_claw_free(g: Graph) -> bool:
    # direct O(n * deg^3) neighbourhood scan
    for v in range(g.n):
        for a, b, c in combinations(g.adjacency[v], 3):
            if not (g.has_edge(a, b) or g.has_edge(a, c) or g.has_edge(b, c)):
                return False
    return True


# ---------------------------------------------------------------- Prüfer codes

def prufer_encode(t: Graph) -> list[int]:
    if not t.is_tree():
        raise GraphError("Prüfer encoding needs a tree")
    n = t.n
    if n <= 2:
        return []
    deg = [len(a) for a in t.adjacency]
    removed = [False] * n
    leaves = [v for v in range(n) if deg[v] == 1]
    heapq.heapify(leaves)
    code = []
    for _ in range(n - 2):
        leaf = heapq.heappop(leaves)
        removed[leaf] = True
        parent = next(u for u in t.adjacency[leaf] if not removed[u])
        code.append(parent)
        deg[parent] -= 1
        if deg[parent] == 1:
            heapq.heappush(leaves, parent)
    return code


def prufer_decode(code: Sequence[int], n: int | None = None) -> Tree:
    if n is None:
        n = len(code) + 2
    if n < 2 or len(code) != n - 2:
        raise GraphError(f"code of length {len(code)} does not describe a tree on {n} vertices")
    for c in code:
        if not 0 <= c < n:
            raise GraphError(f"code entry {c} out of range for n={n}")
    deg = [1] * n
    for c in code:
        deg[c] += 1
    leaves = [v for v in range(n) if deg[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for c in code:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, c))
        deg[c] -= 1
        if deg[c] == 1:
            heapq.heappush(leaves, c)
    u, v = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append((u, v))
    return tree_from_edge_list(n, edges)


def prufer_codec(direction: str, value, n: int | None = None):
    if direction == "encode":
        return prufer_encode(value)
    if direction == "decode":
        return prufer_decode(value, n)
    raise ValueError(f"unknown direction {direction!r}")


# ---------------------------------------------------------------- small families

def empty_graph(n: int) -> Graph:
    return graph_from_edge_list(n, [])


def complete_graph(n: int) -> Graph:
    return graph_from_edge_list(n, combinations(range(n), 2))


def path_graph(n: int) -> Graph:
    return graph_from_edge_list(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return graph_from_edge_list(n, [(i, (i + 1) % n) for i in range(n)])


def star_graph(leaves: int) -> Graph:
    return graph_from_edge_list(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def disjoint_union(*gs: Graph) -> Graph:
    off, pairs = 0, []
    for g in gs:
        pairs += [(u + off, v + off) for u, v in g.edges]
        off += g.n
    return graph_from_edge_list(off, pairs)


def join(a: Graph, b: Graph) -> Graph:
    """Disjoint union plus every edge between the two parts."""
    u = disjoint_union(a, b)
    cross = [(i, a.n + j) for i in range(a.n) for j in range(b.n)]
    return graph_from_edge_list(u.n, list(u.edges) + cross)


def alavi_example() -> Graph:
    """K_37 joined to three disjoint K_4's: x_1=49, x_2=48, x_3=64."""
    return join(complete_graph(37), disjoint_union(*(complete_graph(4) for _ in range(3))))


def induced_subgraph(g: Graph, vs: Iterable[int]) -> tuple[Graph, list[int]]:
    vs = sorted(set(vs))
    idx = {v: i for i, v in enumerate(vs)}
    pairs = [(idx[u], idx[v]) for u, v in g.edges if u in idx and v in idx]
    return graph_from_edge_list(len(vs), pairs), vs


# ---------------------------------------------------------------- edge-list text format

def write_edge_list(g: Graph, sigma: Sequence[int] | None = None, comments: Sequence[str] = ()) -> str:
    buf = io.StringIO()
    buf.write(f"{g.n} {g.m}\n")
    for u, v in g.edges:
        buf.write(f"{u} {v}\n")
    for c in comments:
        buf.write(f"# {c}\n")
    if sigma is not None:
        buf.write("# sigma: " + " ".join(map(str, sigma)) + "\n")
    return buf.getvalue()


def read_edge_list(text: str) -> tuple[Graph, tuple[int, ...] | None]:
    """Parse the edge-list format; returns the graph and a planted sigma if present."""
    sigma = None
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("sigma:"):
                sigma = tuple(int(x) for x in body[len("sigma:"):].split())
            continue
        rows.append(line.split())
    if not rows:
        raise GraphError("empty edge-list input")
    header = rows[0]
    if len(header) != 2:
        raise GraphError(f"bad header line {' '.join(header)!r}; expected 'n m'")
    n, m = int(header[0]), int(header[1])
    if len(rows) - 1 != m:
        raise GraphError(f"header announces {m} edges, found {len(rows) - 1}")
    g = graph_from_edge_list(n, [(int(a), int(b)) for a, b in rows[1:]])
    if sigma is not None:
        sigma = vertex_set(sigma, n)
    return g, sigma
