"""Graph representation, benchmark generators and ideal (shortest-path) distances."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Tuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from .errors import DisconnectedGraph, DuplicateEdge, InvalidSize, SelfLoop

Edge = Tuple[int, int, Optional[float]]


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on vertices ``0 .. n-1``.

    Each edge is ``(u, v, length)``; a length of ``None`` means unit length.
    """

    n: int
    edges: Tuple[Edge, ...] = ()

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise InvalidSize(f"vertex count must be a positive integer, got {self.n!r}")
        edges = []
        seen = set()
        for e in self.edges:
            u, v = int(e[0]), int(e[1])
            length = e[2] if len(e) > 2 and e[2] is not None else None
            if length is not None:
                length = float(length)
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge {u}-{v} out of range for n={self.n}")
            if u == v:
                raise SelfLoop(u)
            key = (min(u, v), max(u, v))
            if key in seen:
                raise DuplicateEdge(u, v)
            seen.add(key)
            if length is not None and not (math.isfinite(length) and length > 0):
                raise ValueError(f"edge {u}-{v} has invalid length {length!r}")
            edges.append((u, v, length))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "edges", tuple(edges))

    @property
    def weighted(self) -> bool:
        return any(length is not None for _, _, length in self.edges)

    def lengths(self) -> np.ndarray:
        return np.array([1.0 if l is None else l for _, _, l in self.edges], dtype=float)

    def adjacency(self):
        """Symmetric sparse adjacency matrix holding edge lengths."""
        if not self.edges:
            return coo_matrix((self.n, self.n)).tocsr()
        u = np.array([e[0] for e in self.edges])
        v = np.array([e[1] for e in self.edges])
        w = self.lengths()
        rows = np.concatenate([u, v])
        cols = np.concatenate([v, u])
        return coo_matrix((np.concatenate([w, w]), (rows, cols)), shape=(self.n, self.n)).tocsr()


def validate_connected(g: Graph) -> None:
    """Raise :class:`DisconnectedGraph` unless ``g`` is connected."""
    count, _ = connected_components(g.adjacency(), directed=False)
    if count != 1:
        raise DisconnectedGraph(int(count))


def shortest_path_distances(g: Graph) -> np.ndarray:
    """All-pairs graph-theoretic distances as a dense symmetric ``n x n`` array.

    BFS is used for unit-length graphs and Dijkstra otherwise.
    """
    validate_connected(g)
    if g.weighted:
        dist = shortest_path(g.adjacency(), method="D", directed=False)
    else:
        dist = shortest_path(g.adjacency(), method="D", directed=False, unweighted=True)
    if not np.all(np.isfinite(dist)):
        count, _ = connected_components(g.adjacency(), directed=False)
        raise DisconnectedGraph(int(count))
    dist = 0.5 * (dist + dist.T)
    np.fill_diagonal(dist, 0.0)
    return dist


def generate_band(n: int) -> Graph:
    """Width-2 ladder (2 x ceil(n/2) strip) truncated to ``n`` vertices.

    Vertex ``2*c + r`` sits in column ``c``, rail ``r``.
    """
    if n < 2:
        raise InvalidSize(f"band graph needs n >= 2, got {n}")
    edges = []
    for i in range(n):
        if i % 2 == 0 and i + 1 < n:
            edges.append((i, i + 1, None))
        if i + 2 < n:
            edges.append((i, i + 2, None))
    return Graph(n, tuple(edges))


def generate_grid(n: int) -> Graph:
    """Near-square ``r x c`` mesh, ``r = floor(sqrt(n))``, filled row-major to ``n`` vertices."""
    if n < 1:
        raise InvalidSize(f"grid graph needs n >= 1, got {n}")
    rows = math.isqrt(n)
    cols = -(-n // rows)
    edges = []
    for i in range(n):
        c = i % cols
        if c + 1 < cols and i + 1 < n:
            edges.append((i, i + 1, None))
        if i + cols < n:
            edges.append((i, i + cols, None))
    return Graph(n, tuple(edges))


GENERATORS = {"band": generate_band, "grid": generate_grid}


def generate(family: str, n: int) -> Graph:
    try:
        gen = GENERATORS[family]
    except KeyError:
        raise ValueError(f"unknown graph family {family!r}; expected one of {sorted(GENERATORS)}")
    return gen(n)


def from_edges(n: int, edges: Iterable) -> Graph:
    return Graph(n, tuple(edges))
