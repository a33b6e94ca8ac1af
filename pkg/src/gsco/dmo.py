"""Support-selection oracles and the feasible directions they induce.

Three oracles are provided:

* :func:`exact_lmo_support` maximizes the captured norm exactly, by
  enumeration for graph models (desk scale only) or by a top-s scan for
  cardinality models;
* :func:`top_g_plus_visit`, a deterministic greedy oracle that seeds the g
  largest magnitudes and grows them along the stored edge order;
* :func:`top_g_plus_optimal_visit`, a randomized variant that grows many
  candidate supports from the same seeds and keeps the best one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .constraints import (
    DEFAULT_ENUMERATION_CAP,
    ConstraintModel,
    SupportSet,
)
from .errors import ConfigError, DegenerateDirectionError
from .graph import Graph

__all__ = [
    "DmoParams",
    "DmoResult",
    "exact_lmo_support",
    "top_g_plus_visit",
    "top_g_plus_optimal_visit",
    "support_to_direction",
    "dmo_ratio",
    "guarantee_floor",
]


@dataclass(frozen=True)
class DmoParams:
    """Budgets for the growing oracles.

    ``theta`` is the expected number of candidate supports the randomized
    oracle compares; ``seed`` feeds its edge draws (ignored by the
    deterministic oracle).
    """

    g: int
    s: int
    theta: int = 5
    seed: int | None = None

    def __post_init__(self):
        if not (1 <= self.g <= self.s):
            raise ConfigError(f"need 1 <= g <= s, got g={self.g}, s={self.s}")
        if self.theta < 1:
            raise ConfigError(f"need theta >= 1, got {self.theta}")


@dataclass(frozen=True)
class DmoResult:
    support: SupportSet
    captured_norm: float
    candidates_examined: int


def _captured_norm(z: np.ndarray, support: Sequence[int]) -> float:
    if not support:
        return 0.0
    return float(np.linalg.norm(z[list(support)]))


def _magnitude_order(z: np.ndarray) -> np.ndarray:
    """Indices by descending |z|, ties broken toward the lower index."""
    z = np.asarray(z, dtype=float)
    return np.lexsort((np.arange(z.shape[0]), -np.abs(z)))


def _seed_top_g(graph: Graph, params: DmoParams, z: np.ndarray) -> tuple[list[int], list[int]]:
    """Top-g seeds and per-node component labels (1..g on seeds, else 0).

    Adjacent seeds still receive distinct labels; the oracles never merge
    components, they only let labeled nodes absorb unlabeled neighbors.
    """
    d = graph.node_count
    if params.g > d:
        raise ConfigError(f"component budget g={params.g} exceeds d={d}")
    if len(z) != d:
        raise ConfigError(f"vector length {len(z)} does not match d={d}")
    order = _magnitude_order(z)
    seeds = [int(i) for i in order[: params.g]]
    labels = [0] * d
    for comp_id, v in enumerate(seeds, start=1):
        labels[v] = comp_id
    return seeds, labels


def top_g_plus_visit(graph: Graph, params: DmoParams, z: np.ndarray) -> DmoResult:
    """Deterministic greedy support growth.

    Seeds the g largest-magnitude indices of z, then scans the edge list
    once in stored order; any edge joining a labeled node to an unlabeled
    one absorbs the unlabeled endpoint, stopping as soon as the support
    holds s nodes. If the scan ends earlier the partial support is
    returned as is (it still contains every seed).
    """
    seeds, labels = _seed_top_g(graph, params, z)
    support = set(seeds)
    kept_edges: list[tuple[int, int]] = []  # grown-forest edges, debug only
    if len(support) < params.s:
        for u, v in graph.edges:
            if labels[u] == 0 and labels[v] != 0:
                support.add(u)
                kept_edges.append((u, v))
                labels[u] = labels[v]
            if len(support) == params.s:
                break
            if labels[u] != 0 and labels[v] == 0:
                support.add(v)
                kept_edges.append((u, v))
                labels[v] = labels[u]
            if len(support) == params.s:
                break
    sup = tuple(sorted(support))
    return DmoResult(sup, _captured_norm(z, sup), 1)


def top_g_plus_optimal_visit(
    graph: Graph,
    params: DmoParams,
    z: np.ndarray,
    rng: np.random.Generator | None = None,
    collect: list | None = None,
) -> DmoResult:
    """Randomized multi-candidate support growth.

    Same seeding as :func:`top_g_plus_visit`, but growth edges are drawn
    uniformly at random (with replacement) from the edge list for
    ``(s - g) * theta`` draws. Every time the support reaches s nodes the
    candidate ``(captured norm, support)`` is recorded and the support and
    component labels reset to their post-seeding state, so candidates come
    from independent experiments. The recorded candidate with the largest
    captured norm wins; ties keep the first one recorded. If no candidate
    completes, the deterministic oracle's result is returned instead.

    ``rng`` lets a caller own the random stream across repeated calls;
    when omitted a fresh generator is seeded from ``params.seed``.
    ``collect``, when given, receives every recorded candidate (an audit
    hook; it does not affect the result).
    """
    seeds, base_labels = _seed_top_g(graph, params, z)
    if len(seeds) == params.s:
        sup = tuple(sorted(seeds))
        return DmoResult(sup, _captured_norm(z, sup), 1)
    if rng is None:
        rng = np.random.default_rng(params.seed)

    m = len(graph.edges)
    best_norm = -1.0
    best_sup: SupportSet | None = None
    completed = 0
    if m > 0:
        edges = graph.edges
        base_support = frozenset(seeds)
        support = set(base_support)
        labels = base_labels.copy()
        kept_edges: list[tuple[int, int]] = []
        n_draws = (params.s - params.g) * params.theta

        def record_and_reset():
            nonlocal support, labels, kept_edges, best_norm, best_sup, completed
            sup = tuple(sorted(support))
            nrm = _captured_norm(z, sup)
            if collect is not None:
                collect.append((nrm, sup))
            completed += 1
            if nrm > best_norm:
                best_norm, best_sup = nrm, sup
            support = set(base_support)
            labels = base_labels.copy()
            kept_edges = []

        for _ in range(n_draws):
            u, v = edges[int(rng.integers(0, m))]
            if labels[u] == 0 and labels[v] != 0:
                support.add(u)
                kept_edges.append((u, v))
                labels[u] = labels[v]
            if len(support) == params.s:
                record_and_reset()
            if labels[u] != 0 and labels[v] == 0:
                support.add(v)
                kept_edges.append((u, v))
                labels[v] = labels[u]
            if len(support) == params.s:
                record_and_reset()

    if completed == 0:
        fallback = top_g_plus_visit(graph, params, z)
        return DmoResult(fallback.support, fallback.captured_norm, 1)
    return DmoResult(best_sup, best_norm, completed)


def exact_lmo_support(
    model: ConstraintModel,
    z: np.ndarray,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> SupportSet:
    """A support maximizing the captured norm over the model's family.

    Cardinality models take the s largest magnitudes directly (works at any
    scale; zero entries are dropped, and an all-zero z falls back to {0}).
    Graph models enumerate every feasible support, which is refused above
    the cap; the first maximizer in lexicographic order wins.
    """
    z = np.asarray(z, dtype=float)
    if len(z) != model.dim:
        raise ConfigError(f"vector length {len(z)} does not match d={model.dim}")
    if model.graph is None:
        order = _magnitude_order(z)
        top = [int(i) for i in order[: model.s] if z[i] != 0.0]
        return tuple(sorted(top)) if top else (0,)
    best_sq = -1.0
    best_sup: SupportSet | None = None
    for sup in model.enumerate_supports(cap=cap):
        sq = 0.0
        for i in sup:
            sq += z[i] * z[i]
        if sq > best_sq:
            best_sq, best_sup = sq, sup
    return best_sup


def support_to_direction(z: np.ndarray, support: Iterable[int], radius: float) -> np.ndarray:
    """Scale z restricted to the support onto the radius sphere.

    Raises DegenerateDirectionError when the restricted norm vanishes
    (solvers treat that as stationarity).
    """
    z = np.asarray(z, dtype=float)
    idx = list(support)
    nrm = _captured_norm(z, idx)
    if nrm == 0.0:
        raise DegenerateDirectionError("support captures no mass of z")
    out = np.zeros_like(z)
    out[idx] = radius * z[idx] / nrm
    return out


def dmo_ratio(
    graph: Graph,
    params: DmoParams,
    z: np.ndarray,
    model: ConstraintModel,
    oracle: str = "topg",
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> float:
    """Captured norm of the chosen oracle relative to the exact maximizer.

    Test-harness helper; requires the model to be enumerable at desk scale.
    Defined as 1 when the exact maximizer captures nothing. The caption
    guarantee for the greedy oracle is ratio >= sqrt(1 / ceil(s / g)).
    """
    if oracle == "topg":
        res = top_g_plus_visit(graph, params, z)
    elif oracle == "topg_optimal":
        res = top_g_plus_optimal_visit(graph, params, z)
    else:
        raise ConfigError(f"unknown oracle {oracle!r}")
    exact = exact_lmo_support(model, z, cap=cap)
    exact_norm = _captured_norm(z, exact)
    if exact_norm == 0.0:
        return 1.0
    return res.captured_norm / exact_norm


def guarantee_floor(s: int, g: int) -> float:
    """The approximation factor the greedy oracle is tested against."""
    return math.sqrt(1.0 / math.ceil(s / g))
