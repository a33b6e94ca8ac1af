"""Feasible-region model: sparsity budget, component budget, ball radius.

A support is represented as a sorted, duplicate-free tuple of node ids.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .errors import ConfigError, EnumerationCapError, RangeError
from .graph import Graph

__all__ = [
    "SupportSet",
    "ConstraintModel",
    "DEFAULT_ENUMERATION_CAP",
    "normalize_support",
    "project_to_support_ball",
    "random_feasible_support",
]

SupportSet = tuple[int, ...]

# Guards enumerate_supports against accidental exponential blowups; callers
# that really want a bigger dimension pass their own cap.
DEFAULT_ENUMERATION_CAP = 20


def normalize_support(indices: Iterable[int], dim: int) -> SupportSet:
    """Sort, deduplicate, and range-check a support."""
    idx = sorted({int(i) for i in indices})
    if idx and (idx[0] < 0 or idx[-1] >= dim):
        raise RangeError(f"support index out of range for d={dim}")
    return tuple(idx)


@dataclass(frozen=True)
class ConstraintModel:
    """Structured support family plus the Euclidean ball radius.

    Two variants:

    * ``gsubgraph``: supports of at most ``s`` nodes forming at most ``g``
      connected components of ``graph`` (``g`` is a budget, so supersets of
      structures stay feasible as long as both budgets hold);
    * ``cardinality``: supports of at most ``s`` indices, graph-free.
    """

    dim: int
    s: int
    radius: float
    graph: Graph | None = None
    g: int | None = None

    def __post_init__(self):
        if self.radius <= 0:
            raise ConfigError(f"radius must be positive, got {self.radius}")
        if not (1 <= self.s <= self.dim):
            raise ConfigError(f"need 1 <= s <= d, got s={self.s}, d={self.dim}")
        if self.graph is not None:
            if self.graph.node_count != self.dim:
                raise ConfigError(
                    f"graph has {self.graph.node_count} nodes, model dim is {self.dim}"
                )
            if self.g is None or not (1 <= self.g <= self.s):
                raise ConfigError(f"need 1 <= g <= s, got g={self.g}, s={self.s}")
        elif self.g is not None:
            raise ConfigError("component budget g requires a graph")

    @classmethod
    def g_subgraph(cls, graph: Graph, s: int, g: int, radius: float) -> "ConstraintModel":
        return cls(dim=graph.node_count, s=s, radius=radius, graph=graph, g=g)

    @classmethod
    def cardinality(cls, dim: int, s: int, radius: float) -> "ConstraintModel":
        return cls(dim=dim, s=s, radius=radius)

    @property
    def variant(self) -> str:
        return "gsubgraph" if self.graph is not None else "cardinality"

    def is_member(self, support: Iterable[int]) -> bool:
        """True iff the support respects the sparsity and component budgets."""
        sup = normalize_support(support, self.dim)
        if len(sup) > self.s:
            return False
        if self.graph is None or not sup:
            return True
        return self.graph.connected_component_count(sup) <= self.g

    def enumerate_supports(self, cap: int = DEFAULT_ENUMERATION_CAP) -> Iterator[SupportSet]:
        """Yield every nonempty feasible support in lexicographic order.

        Desk-scale verification only: refuses when ``dim`` exceeds ``cap``.
        """
        if self.dim > cap:
            raise EnumerationCapError(
                f"enumeration refused: d={self.dim} exceeds cap {cap}"
            )
        yield from self._extend((), 0)

    def _extend(self, prefix: SupportSet, start: int) -> Iterator[SupportSet]:
        for i in range(start, self.dim):
            cand = prefix + (i,)
            if self.graph is None or self.graph.connected_component_count(cand) <= self.g:
                yield cand
            if len(cand) < self.s:
                yield from self._extend(cand, i + 1)


def project_to_support_ball(x: np.ndarray, support: Iterable[int], radius: float) -> np.ndarray:
    """Euclidean projection of x onto {z : supp(z) in support, ||z||_2 <= radius}.

    Keeps the coordinates on the support and rescales radially when the
    restricted norm exceeds the radius. An empty support gives the zero
    vector.
    """
    if radius <= 0:
        raise ConfigError(f"radius must be positive, got {radius}")
    out = np.zeros_like(np.asarray(x, dtype=float))
    idx = list(support)
    if not idx:
        return out
    out[idx] = x[idx]
    nrm = float(np.linalg.norm(out[idx]))
    if nrm > radius:
        out *= radius / nrm
    return out


def random_feasible_support(model: ConstraintModel, rng: np.random.Generator) -> SupportSet:
    """Draw a feasible support from the model's family.

    Cardinality variant: s indices chosen uniformly without replacement.
    Graph variant: g uniformly chosen distinct seed nodes grown breadth-first
    in round-robin turns (one node per region per turn, neighbors in
    adjacency order) until s nodes total or every frontier is exhausted.

    The induced distribution over supports is construction-defined, not
    uniform over the family.
    """
    if model.graph is None:
        picked = rng.choice(model.dim, size=model.s, replace=False)
        return tuple(sorted(int(i) for i in picked))
    graph = model.graph
    seeds = [int(u) for u in rng.choice(model.dim, size=model.g, replace=False)]
    visited = set(seeds)
    queues = [deque([u]) for u in seeds]
    next_nbr = {u: 0 for u in seeds}
    total = len(visited)
    while total < model.s and any(queues):
        grew = False
        for q in queues:
            if total >= model.s:
                break
            while q:
                u = q[0]
                nbrs = graph.adjacency[u]
                i = next_nbr[u]
                while i < len(nbrs) and nbrs[i] in visited:
                    i += 1
                next_nbr[u] = i
                if i == len(nbrs):
                    q.popleft()
                    continue
                w = nbrs[i]
                visited.add(w)
                next_nbr[w] = 0
                q.append(w)
                total += 1
                grew = True
                break
        if not grew:
            break
    return tuple(sorted(visited))
