"""Graphs, vertex weights, districts and the distance machinery shared by
every solver in the package.

Vertex ids are dense integers ``0..n-1`` and every vertex subset handed
around is a sorted tuple, so results are reproducible and hashable.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

UNREACHABLE = -1

ROLES = ("objective", "feature1", "feature2", "dual")


class InvalidDistrict(ValueError):
    """Raised when a vertex set cannot be a district (e.g. disconnected)."""


class DisconnectedInput(ValueError):
    """Raised when an operation needs a connected graph and got another."""


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph stored as sorted adjacency tuples."""

    n: int
    adj: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.adj) != self.n:
            raise ValueError("adjacency length does not match n")
        for v, nbrs in enumerate(self.adj):
            if list(nbrs) != sorted(set(nbrs)):
                raise ValueError(f"adjacency of {v} is not sorted/unique")
            for u in nbrs:
                if u == v:
                    raise ValueError(f"self-loop at {v}")
                if not 0 <= u < self.n or v not in self.adj[u]:
                    raise ValueError(f"edge {v}-{u} is not symmetric")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "Graph":
        """Build a graph, silently dropping duplicate edges."""
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at {u}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(n, tuple(tuple(sorted(s)) for s in nbrs))

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.adj[u] if u < v]

    @property
    def m(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def induced(self, vertices: Iterable[int]) -> tuple["Graph", tuple[int, ...]]:
        """Induced subgraph on ``vertices``.

        Returns the subgraph (ids ``0..len-1``) and the tuple mapping new id
        to old id; the new ids follow the sorted order of the old ones.
        """
        old = tuple(sorted(set(vertices)))
        new_of = {v: i for i, v in enumerate(old)}
        adj = tuple(
            tuple(new_of[u] for u in self.adj[v] if u in new_of) for v in old
        )
        return Graph(len(old), adj), old


@dataclass(frozen=True)
class WeightAssignment:
    """Per-vertex integer weight vectors with a named role per coordinate."""

    vectors: tuple[tuple[int, ...], ...]
    roles: tuple[str, ...]

    def __post_init__(self):
        if self.roles.count("objective") != 1:
            raise ValueError("exactly one coordinate must have role 'objective'")
        for r in self.roles:
            if r not in ROLES:
                raise ValueError(f"unknown weight role {r!r}")
        d = len(self.roles)
        for vec in self.vectors:
            if len(vec) != d:
                raise ValueError("weight vector length does not match roles")
            if any((not isinstance(x, (int, np.integer))) or x < 0 for x in vec):
                raise ValueError("weights must be nonnegative integers")

    @classmethod
    def from_columns(cls, w: Sequence[int], w1: Sequence[int] | None = None,
                     w2: Sequence[int] | None = None,
                     dual: Sequence[int] | None = None) -> "WeightAssignment":
        cols = [list(w)]
        roles = ["objective"]
        for name, col in (("feature1", w1), ("feature2", w2), ("dual", dual)):
            if col is not None:
                if len(col) != len(w):
                    raise ValueError(f"{name} column has wrong length")
                cols.append(list(col))
                roles.append(name)
        vectors = tuple(tuple(int(c[v]) for c in cols) for v in range(len(w)))
        return cls(vectors, tuple(roles))

    @property
    def n(self) -> int:
        return len(self.vectors)

    @property
    def dim(self) -> int:
        return len(self.roles)

    def index(self, role: str) -> int:
        try:
            return self.roles.index(role)
        except ValueError:
            raise KeyError(f"weights have no {role!r} coordinate") from None

    def has(self, role: str) -> bool:
        return role in self.roles

    def column(self, role: str) -> tuple[int, ...]:
        i = self.index(role)
        return tuple(vec[i] for vec in self.vectors)

    def total(self, vertices: Iterable[int]) -> tuple[int, ...]:
        acc = [0] * self.dim
        for v in vertices:
            for i, x in enumerate(self.vectors[v]):
                acc[i] += x
        return tuple(acc)

    def select(self, roles: Sequence[str]) -> "WeightAssignment":
        """Re-project onto the given roles (order preserved)."""
        idx = [self.index(r) for r in roles]
        return WeightAssignment(
            tuple(tuple(vec[i] for i in idx) for vec in self.vectors), tuple(roles)
        )

    def restrict(self, old_ids: Sequence[int]) -> "WeightAssignment":
        return WeightAssignment(tuple(self.vectors[v] for v in old_ids), self.roles)

    def with_column(self, role: str, values: Sequence[int]) -> "WeightAssignment":
        if len(values) != self.n:
            raise ValueError("column has wrong length")
        vectors = tuple(vec + (int(x),) for vec, x in zip(self.vectors, values))
        return WeightAssignment(vectors, self.roles + (role,))


@dataclass(frozen=True)
class District:
    """A vertex set with its designated center and cached weight totals."""

    vertices: tuple[int, ...]
    center: int
    weights: tuple[int, ...] = field(default=(), compare=False)

    @classmethod
    def make(cls, vertices: Iterable[int], center: int,
             wa: WeightAssignment | None = None) -> "District":
        vs = tuple(sorted(set(vertices)))
        if not vs:
            raise InvalidDistrict("district must be nonempty")
        return cls(vs, int(center), wa.total(vs) if wa is not None else ())

    def __len__(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True)
class Districting:
    """A family of districts together with its total objective weight."""

    districts: tuple[District, ...] = ()
    objective: int = 0

    @classmethod
    def of(cls, districts: Iterable[District], wa: WeightAssignment) -> "Districting":
        ds = tuple(sorted(districts, key=lambda d: d.vertices))
        obj = wa.index("objective")
        return cls(ds, sum(wa.total(d.vertices)[obj] for d in ds))

    def __len__(self) -> int:
        return len(self.districts)

    def covered(self) -> set[int]:
        return {v for d in self.districts for v in d.vertices}

    def to_json(self) -> dict:
        return {"objective": self.objective,
                "districts": [{"vertices": list(d.vertices), "center": d.center}
                              for d in self.districts]}


@dataclass(frozen=True)
class BfsLayering:
    root: int
    layer_of: tuple[int, ...]

    @property
    def depth(self) -> int:
        return max(self.layer_of) + 1 if self.layer_of else 0

    def layer_sizes(self) -> list[int]:
        sizes = [0] * self.depth
        for d in self.layer_of:
            sizes[d] += 1
        return sizes


def bfs_distances(g: Graph, src: int) -> list[int]:
    """Hop distances from ``src``; unreachable vertices get ``UNREACHABLE``."""
    if not 0 <= src < g.n:
        raise IndexError(f"source {src} out of range")
    dist = [UNREACHABLE] * g.n
    dist[src] = 0
    queue = deque([src])
    while queue:
        v = queue.popleft()
        for u in g.adj[v]:
            if dist[u] == UNREACHABLE:
                dist[u] = dist[v] + 1
                queue.append(u)
    return dist


def all_pairs_distances(g: Graph) -> np.ndarray:
    """``n x n`` int array of hop distances (``UNREACHABLE`` across components)."""
    table = np.full((g.n, g.n), UNREACHABLE, dtype=np.int64)
    for v in range(g.n):
        table[v] = bfs_distances(g, v)
    return table


def connected_components(g: Graph, vertices: Iterable[int] | None = None) -> list[list[int]]:
    """Components of ``g`` (or of ``g[vertices]``), each sorted, ordered by min id."""
    allowed = set(range(g.n)) if vertices is None else set(vertices)
    seen: set[int] = set()
    comps = []
    for s in sorted(allowed):
        if s in seen:
            continue
        comp = [s]
        seen.add(s)
        stack = [s]
        while stack:
            v = stack.pop()
            for u in g.adj[v]:
                if u in allowed and u not in seen:
                    seen.add(u)
                    comp.append(u)
                    stack.append(u)
        comps.append(sorted(comp))
    return comps


def is_connected_subset(g: Graph, s: Iterable[int]) -> bool:
    s = set(s)
    if not s:
        return False
    return len(connected_components(g, s)) == 1


def _eccentricity_within(g: Graph, s: set[int], src: int) -> int:
    dist = {src: 0}
    queue = deque([src])
    while queue:
        v = queue.popleft()
        for u in g.adj[v]:
            if u in s and u not in dist:
                dist[u] = dist[v] + 1
                queue.append(u)
    if len(dist) < len(s):
        return UNREACHABLE
    return max(dist.values())


def check_radius(g: Graph, s: Iterable[int], k: int, mode: str = "strong",
                 apsp: np.ndarray | None = None) -> int | None:
    """Smallest-id center witnessing radius at most ``k``, or ``None``.

    Strong mode searches centers inside ``s`` using distances in ``g[s]``;
    weak mode searches all of ``V`` using distances in ``g``.
    Raises ``InvalidDistrict`` if ``g[s]`` is empty or disconnected.
    """
    members = set(s)
    if not members:
        raise InvalidDistrict("empty vertex set")
    if any(not 0 <= v < g.n for v in members):
        raise IndexError("vertex id out of range")
    if not is_connected_subset(g, members):
        raise InvalidDistrict("induced subgraph is disconnected")
    if mode == "strong":
        for c in sorted(members):
            if _eccentricity_within(g, members, c) <= k:
                return c
        return None
    if mode == "weak":
        if apsp is None:
            apsp = all_pairs_distances(g)
        cols = sorted(members)
        for c in range(g.n):
            row = apsp[c, cols]
            if (row != UNREACHABLE).all() and row.max() <= k:
                return c
        return None
    raise ValueError(f"unknown radius mode {mode!r}")


def ball(g: Graph, v: int, k: int) -> list[int]:
    dist = bfs_distances(g, v)
    return [u for u in range(g.n) if dist[u] != UNREACHABLE and dist[u] <= k]


def khop_neighborhood(g: Graph, v: int, k: int) -> tuple[list[int], Graph, tuple[int, ...]]:
    """Vertices within ``k`` hops of ``v``, their induced graph and the id map.

    The id map ``old_ids`` sends new id ``i`` to ``old_ids[i]``.
    """
    members = ball(g, v, k)
    sub, old_ids = g.induced(members)
    return members, sub, old_ids


def degeneracy_orientation(g: Graph) -> tuple[list[int], list[tuple[int, int]], int]:
    """Greedy min-degree elimination.

    Returns ``(order, arcs, d)`` where every arc ``(u, v)`` points from the
    earlier-removed endpoint to the later one and ``d`` is the maximum degree
    seen at removal time (the degeneracy).
    """
    deg = [g.degree(v) for v in range(g.n)]
    removed = [False] * g.n
    order = []
    d = 0
    for _ in range(g.n):
        v = min((u for u in range(g.n) if not removed[u]), key=lambda u: (deg[u], u))
        d = max(d, deg[v])
        removed[v] = True
        order.append(v)
        for u in g.adj[v]:
            if not removed[u]:
                deg[u] -= 1
    position = {v: i for i, v in enumerate(order)}
    arcs = [(u, v) if position[u] < position[v] else (v, u) for u, v in g.edges]
    return order, arcs, d


def bfs_layering(g: Graph, root: int) -> BfsLayering:
    dist = bfs_distances(g, root)
    if UNREACHABLE in dist:
        raise DisconnectedInput(f"vertex {dist.index(UNREACHABLE)} unreachable from {root}")
    return BfsLayering(root, tuple(dist))
