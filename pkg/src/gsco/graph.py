"""Undirected graph with a stable edge order, plus edge-list text I/O.

The text format is newline-delimited UTF-8: a header line ``nodes N``
followed by one ``u v`` pair per line (0-based ids). Lines starting with
``#`` and blank lines are ignored.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable

import numpy as np

from .errors import ConfigError, EdgeListParseError, RangeError

__all__ = ["Graph", "load_edge_list", "save_edge_list", "small_world_graph"]


@dataclass(frozen=True)
class Graph:
    """Immutable undirected graph over dense 0-based node ids.

    ``edges`` must already be canonical: u < v, no duplicates, order is
    whatever the producer chose (kept stable; oracles scan it as stored).
    Use :meth:`from_edges` to canonicalize arbitrary pairs.
    """

    node_count: int
    edges: tuple[tuple[int, int], ...]
    adjacency: tuple[tuple[int, ...], ...] = field(
        init=False, repr=False, compare=False
    )

    def __post_init__(self):
        if self.node_count <= 0:
            raise ConfigError(f"node count must be positive, got {self.node_count}")
        seen: set[tuple[int, int]] = set()
        adj: list[list[int]] = [[] for _ in range(self.node_count)]
        for u, v in self.edges:
            if not (0 <= u < v < self.node_count):
                raise RangeError(f"edge ({u}, {v}) not canonical for d={self.node_count}")
            if (u, v) in seen:
                raise ConfigError(f"duplicate edge ({u}, {v})")
            seen.add((u, v))
            adj[u].append(v)
            adj[v].append(u)
        object.__setattr__(self, "adjacency", tuple(tuple(a) for a in adj))

    @classmethod
    def from_edges(cls, node_count: int, pairs: Iterable[tuple[int, int]]) -> "Graph":
        """Build a graph from arbitrary (u, v) pairs.

        Pairs are oriented to u < v and deduplicated keeping the first
        occurrence, so the stored edge order is the first-occurrence order.
        """
        seen: set[tuple[int, int]] = set()
        edges: list[tuple[int, int]] = []
        for u, v in pairs:
            u, v = int(u), int(v)
            if u == v:
                raise ConfigError(f"self-loop at node {u}")
            if u > v:
                u, v = v, u
            if not (0 <= u and v < node_count):
                raise RangeError(f"edge ({u}, {v}) out of range for d={node_count}")
            if (u, v) not in seen:
                seen.add((u, v))
                edges.append((u, v))
        return cls(node_count, tuple(edges))

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def neighbors(self, u: int) -> tuple[int, ...]:
        return self.adjacency[u]

    def connected_component_count(self, nodes: Iterable[int]) -> int:
        """Number of connected components of the subgraph induced by ``nodes``.

        Returns 0 for the empty set. Raises RangeError on out-of-range ids.
        """
        members = {int(u) for u in nodes}
        for u in members:
            if not (0 <= u < self.node_count):
                raise RangeError(f"node {u} out of range for d={self.node_count}")
        count = 0
        seen: set[int] = set()
        for start in members:
            if start in seen:
                continue
            count += 1
            seen.add(start)
            stack = [start]
            while stack:
                u = stack.pop()
                for w in self.adjacency[u]:
                    if w in members and w not in seen:
                        seen.add(w)
                        stack.append(w)
        return count


def _parse_edge_list(lines: Iterable[str]) -> Graph:
    node_count = None
    pairs: list[tuple[int, int]] = []
    line_no = 0
    for line_no, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        parts = text.split()
        if node_count is None:
            if len(parts) != 2 or parts[0] != "nodes":
                raise EdgeListParseError(line_no, f"expected header 'nodes N', got {text!r}")
            try:
                node_count = int(parts[1])
            except ValueError:
                raise EdgeListParseError(line_no, f"bad node count {parts[1]!r}") from None
            if node_count <= 0:
                raise ConfigError(f"node count must be positive, got {node_count}")
            continue
        if len(parts) != 2:
            raise EdgeListParseError(line_no, f"expected 'u v', got {text!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListParseError(line_no, f"non-integer node id in {text!r}") from None
        if u == v:
            raise EdgeListParseError(line_no, f"self-loop at node {u}")
        if not (0 <= u < node_count and 0 <= v < node_count):
            raise RangeError(f"line {line_no}: node id out of range for d={node_count}")
        pairs.append((u, v))
    if node_count is None:
        raise EdgeListParseError(line_no, "missing 'nodes N' header")
    return Graph.from_edges(node_count, pairs)


def load_edge_list(source: str | Path | IO[str] | Iterable[str]) -> Graph:
    """Load a graph from a path or an open text stream."""
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            return _parse_edge_list(fh)
    return _parse_edge_list(source)


def save_edge_list(graph: Graph, target: str | Path | IO[str]) -> None:
    """Write the edge-list text form; reloading it reproduces ``graph`` exactly."""
    lines = [f"nodes {graph.node_count}\n"]
    lines.extend(f"{u} {v}\n" for u, v in graph.edges)
    if isinstance(target, (str, Path)):
        with open(target, "w", encoding="utf-8") as fh:
            fh.writelines(lines)
    else:
        target.writelines(lines)


def small_world_graph(node_count: int, edge_count: int, seed: int) -> Graph:
    """Connected random graph with an exact edge count.

    A ring lattice (each node linked to its ``edge_count // node_count``
    nearest successors) provides connectivity; the remaining budget is
    spent on uniformly random shortcut edges. Deterministic per seed.
    """
    d = node_count
    if d < 2:
        raise ConfigError("need at least 2 nodes")
    max_edges = d * (d - 1) // 2
    if not (d <= edge_count <= max_edges):
        raise ConfigError(
            f"edge count {edge_count} outside [{d}, {max_edges}] for d={d}"
        )
    k_half = min(edge_count // d, (d - 1) // 2)
    seen: set[tuple[int, int]] = set()
    edges: list[tuple[int, int]] = []
    for offset in range(1, k_half + 1):
        for i in range(d):
            u, v = i, (i + offset) % d
            if u > v:
                u, v = v, u
            if (u, v) not in seen:
                seen.add((u, v))
                edges.append((u, v))
    rng = np.random.default_rng(seed)
    while len(edges) < edge_count:
        u = int(rng.integers(0, d))
        v = int(rng.integers(0, d))
        if u == v:
            continue
        if u > v:
            u, v = v, u
        if (u, v) in seen:
            continue
        seen.add((u, v))
        edges.append((u, v))
    return Graph(d, tuple(edges))
