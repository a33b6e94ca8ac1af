"""Shared graph builders and independent brute-force oracles.

The oracles here (union-find component counting, itertools subset
enumeration) deliberately avoid the library's own graph traversal so
tests check against an independent computation.
"""

from itertools import combinations

import numpy as np
import pytest

from gsco import Graph


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def star_graph(spokes: int) -> Graph:
    return Graph.from_edges(spokes + 1, [(0, i) for i in range(1, spokes + 1)])


def triangle_graph() -> Graph:
    return Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])


def random_connected_graph(rng: np.random.Generator, d: int, extra: int | None = None) -> Graph:
    """Random tree (uniform parent attachment) plus extra random edges."""
    edges = [(int(rng.integers(0, i)), i) for i in range(1, d)]
    if extra is None:
        extra = int(rng.integers(0, d))
    seen = {(min(u, v), max(u, v)) for u, v in edges}
    attempts = 0
    while extra > 0 and attempts < 50 * d:
        attempts += 1
        u = int(rng.integers(0, d))
        v = int(rng.integers(0, d))
        if u == v:
            continue
        key = (min(u, v), max(u, v))
        if key in seen:
            continue
        seen.add(key)
        edges.append(key)
        extra -= 1
    return Graph.from_edges(d, edges)


def dsu_component_count(edge_set: set[tuple[int, int]], nodes) -> int:
    """Union-find count of components among ``nodes``."""
    nodes = sorted(set(nodes))
    parent = {u: u for u in nodes}

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    members = set(nodes)
    for u, v in edge_set:
        if u in members and v in members:
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
    return len({find(u) for u in nodes})


def brute_force_feasible_supports(d: int, s: int, g: int | None, edge_set: set) -> list[tuple[int, ...]]:
    """All nonempty feasible supports by direct subset filtering."""
    out = []
    for k in range(1, s + 1):
        for sup in combinations(range(d), k):
            if g is None or dsu_component_count(edge_set, sup) <= g:
                out.append(sup)
    return out


def brute_force_max_captured(z: np.ndarray, supports) -> float:
    """Exact max of ||z_S||_2 over the given supports."""
    best = 0.0
    for sup in supports:
        sq = float(sum(z[i] * z[i] for i in sup))
        if sq > best:
            best = sq
    return best ** 0.5


@pytest.fixture
def rng():
    return np.random.default_rng(2024)
