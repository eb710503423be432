"""Weighted undirected interaction networks.

A :class:`Network` is immutable once built. Agent ids are ``0..n-1``; edges
are stored once per unordered pair with ``i < j`` and a strictly positive
weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import networkx as nx

from daosim.errors import ValidationError

TOPOLOGIES = ("complete", "ring_lattice", "erdos_renyi", "barabasi_albert", "watts_strogatz")


@dataclass(frozen=True)
class Network:
    n: int
    edges: tuple[tuple[int, int, float], ...]
    _adj: tuple[tuple[tuple[int, float], ...], ...] = field(init=False, repr=False, compare=False)
    _degree: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 1:
            raise ValidationError(f"n must be a positive integer, got {self.n!r}")
        normalized: dict[tuple[int, int], float] = {}
        for i, j, w in self.edges:
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValidationError(f"edge ({i}, {j}) references an agent outside 0..{self.n - 1}")
            if i == j:
                raise ValidationError(f"self-loop on agent {i}")
            w = float(w)
            if not (w > 0 and math.isfinite(w)):
                raise ValidationError(f"edge ({i}, {j}) has non-positive weight {w}")
            key = (i, j) if i < j else (j, i)
            if key in normalized:
                raise ValidationError(f"duplicate edge {key}")
            normalized[key] = w
        edges = tuple((i, j, w) for (i, j), w in sorted(normalized.items()))
        adj: list[list[tuple[int, float]]] = [[] for _ in range(self.n)]
        for i, j, w in edges:
            adj[i].append((j, w))
            adj[j].append((i, w))
        for row in adj:
            row.sort()
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "_adj", tuple(tuple(row) for row in adj))
        object.__setattr__(self, "_degree", tuple(math.fsum(w for _, w in row) for row in adj))

    def neighbors(self, i: int) -> tuple[tuple[int, float], ...]:
        """(neighbor, weight) pairs of agent ``i``, sorted by neighbor id."""
        self._check_agent(i)
        return self._adj[i]

    def weight(self, i: int, j: int) -> float:
        self._check_agent(i)
        self._check_agent(j)
        for k, w in self._adj[i]:
            if k == j:
                return w
        return 0.0

    def degree(self, i: int) -> int:
        self._check_agent(i)
        return len(self._adj[i])

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def _check_agent(self, i: int) -> None:
        if not (0 <= i < self.n):
            raise ValidationError(f"agent id {i} out of range 0..{self.n - 1}")

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_weighted_edges_from(self.edges)
        return g


def weighted_degree(network: Network, i: int) -> float:
    """Total interaction weight of agent ``i``; 0.0 exactly when ``i`` is isolated."""
    network._check_agent(i)
    return network._degree[i]


@dataclass(frozen=True)
class NetworkSpec:
    """Recipe for a generated network.

    ``k`` is used by ring_lattice and watts_strogatz, ``p`` by erdos_renyi,
    ``m`` by barabasi_albert and ``beta`` by watts_strogatz.
    """

    topology: str
    n: int
    k: int | None = None
    p: float | None = None
    m: int | None = None
    beta: float | None = None
    weight: float = 1.0

    def validate(self) -> None:
        if self.topology not in TOPOLOGIES:
            raise ValidationError(f"topology: unknown topology {self.topology!r}; expected one of {TOPOLOGIES}")
        if not isinstance(self.n, int) or self.n < 1:
            raise ValidationError(f"n: must be a positive integer, got {self.n!r}")
        if not (self.weight > 0 and math.isfinite(self.weight)):
            raise ValidationError(f"weight: must be positive, got {self.weight!r}")
        if self.topology in ("ring_lattice", "watts_strogatz"):
            if self.k is None or not isinstance(self.k, int):
                raise ValidationError(f"k: required integer for {self.topology}")
            if self.k < 0 or self.k % 2 or self.k >= self.n:
                raise ValidationError(f"k: must be even with 0 <= k < n, got k={self.k}, n={self.n}")
        if self.topology == "erdos_renyi":
            if self.p is None or not (0.0 <= self.p <= 1.0):
                raise ValidationError(f"p: must lie in [0, 1], got {self.p!r}")
        if self.topology == "watts_strogatz":
            if self.beta is None or not (0.0 <= self.beta <= 1.0):
                raise ValidationError(f"beta: must lie in [0, 1], got {self.beta!r}")
        if self.topology == "barabasi_albert":
            if self.m is None or not isinstance(self.m, int) or not (1 <= self.m < self.n):
                raise ValidationError(f"m: must satisfy 1 <= m < n, got m={self.m!r}, n={self.n}")


def generate_network(spec: NetworkSpec, seed: int) -> Network:
    """Build a network from ``spec``; the edge set is a pure function of ``(spec, seed)``."""
    spec.validate()
    n = spec.n
    if spec.topology == "complete":
        g = nx.complete_graph(n)
    elif spec.topology == "ring_lattice":
        g = nx.circulant_graph(n, range(1, spec.k // 2 + 1))
    elif spec.topology == "erdos_renyi":
        g = nx.gnp_random_graph(n, spec.p, seed=seed)
    elif spec.topology == "watts_strogatz":
        g = nx.watts_strogatz_graph(n, spec.k, spec.beta, seed=seed)
    else:
        # seed graph is the complete graph on m+1 nodes
        g = nx.barabasi_albert_graph(n, spec.m, seed=seed, initial_graph=nx.complete_graph(spec.m + 1))
    return Network(n, tuple((int(i), int(j), spec.weight) for i, j in g.edges()))


def load_edge_list(text: str, n: int | None = None) -> Network:
    """Parse whitespace-separated ``i j [w]`` lines.

    Blank lines and lines starting with ``#`` are skipped. ``n`` defaults to
    one more than the largest id seen; pass it explicitly to keep trailing
    isolated agents.
    """
    seen: dict[tuple[int, int], float] = {}
    max_id = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) not in (2, 3):
            raise ValidationError(f"malformed line {lineno}: expected 'i j' or 'i j w', got {raw!r}")
        try:
            i, j = int(tokens[0]), int(tokens[1])
            w = float(tokens[2]) if len(tokens) == 3 else 1.0
        except ValueError:
            raise ValidationError(f"malformed token at line {lineno}: {raw!r}") from None
        if i < 0 or j < 0:
            raise ValidationError(f"negative agent id at line {lineno}")
        if i == j:
            raise ValidationError(f"self-loop at line {lineno}")
        if not (w > 0 and math.isfinite(w)):
            raise ValidationError(f"non-positive weight {w} at line {lineno}")
        key = (min(i, j), max(i, j))
        if key in seen:
            if seen[key] != w:
                raise ValidationError(f"conflicting weights for pair {key} at line {lineno}")
            continue
        seen[key] = w
        max_id = max(max_id, i, j)
    size = max_id + 1
    if n is not None:
        if n < size:
            raise ValidationError(f"n={n} is smaller than 1 + max agent id ({size})")
        size = n
    if size < 1:
        raise ValidationError("edge list is empty and no agent count was given")
    return Network(size, tuple((i, j, w) for (i, j), w in seen.items()))


def format_edge_list(network: Network) -> str:
    lines = [f"# n={network.n} edges={network.num_edges}"]
    lines.extend(f"{i} {j} {w!r}" for i, j, w in network.edges)
    return "\n".join(lines) + "\n"


def from_edges(n: int, edges: Iterable[tuple[int, int] | tuple[int, int, float]]) -> Network:
    """Convenience constructor; unweighted pairs get weight 1.0."""
    return Network(n, tuple((e[0], e[1], e[2] if len(e) > 2 else 1.0) for e in edges))
