"""Instance generators: grids, random trees and planar grid subgraphs, and
the reductions used to show hardness (knapsack tree, independent set,
clique under a diameter bound)."""

from __future__ import annotations

import itertools
import math
import random
import warnings
from dataclasses import dataclass, field
from typing import Sequence

from .constraints import ProblemSpec
from .graph import (Graph, UNREACHABLE, WeightAssignment, all_pairs_distances,
                    is_connected_subset)


@dataclass(frozen=True)
class Instance:
    graph: Graph
    weights: WeightAssignment
    spec: ProblemSpec
    meta: dict = field(default_factory=dict, compare=False)


def _default_spec() -> ProblemSpec:
    return ProblemSpec("balanced", 1, c=2)


def gen_grid(rows: int, cols: int, pattern: str = "unit", seed: int = 0, max_weight: int = 5,
             spec: ProblemSpec | None = None) -> Instance:
    """``rows x cols`` grid; ``unit`` gives every vertex ``w1 = w2 = 1, w = 2``."""
    if rows < 1 or cols < 1:
        raise ValueError("grid needs rows, cols >= 1")
    n = rows * cols
    edges = [(r * cols + c, r * cols + c + 1) for r in range(rows) for c in range(cols - 1)]
    edges += [(r * cols + c, (r + 1) * cols + c) for r in range(rows - 1) for c in range(cols)]
    g = Graph.from_edges(n, edges)
    if pattern == "unit":
        w1 = w2 = [1] * n
    elif pattern == "random":
        rng = random.Random(seed)
        w1 = [rng.randint(0, max_weight) for _ in range(n)]
        w2 = [rng.randint(0, max_weight) for _ in range(n)]
    else:
        raise ValueError(f"unknown weight pattern {pattern!r}")
    wa = WeightAssignment.from_columns([a + b for a, b in zip(w1, w2)], w1, w2)
    meta = {"generator": "grid", "rows": rows, "cols": cols, "pattern": pattern, "seed": seed}
    return Instance(g, wa, spec or _default_spec(), meta)


def _random_weights(rng: random.Random, n: int, max_weight: int) -> WeightAssignment:
    w1 = [rng.randint(0, max_weight) for _ in range(n)]
    w2 = [rng.randint(0, max_weight) for _ in range(n)]
    return WeightAssignment.from_columns([a + b for a, b in zip(w1, w2)], w1, w2)


def gen_random_tree(n: int, seed: int = 0, max_weight: int = 5,
                    spec: ProblemSpec | None = None) -> Instance:
    """Random recursive tree: vertex ``v`` attaches to a uniform earlier vertex."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = random.Random(seed)
    edges = [(rng.randrange(v), v) for v in range(1, n)]
    meta = {"generator": "random_tree", "n": n, "seed": seed, "max_weight": max_weight}
    return Instance(Graph.from_edges(n, edges), _random_weights(rng, n, max_weight),
                    spec or _default_spec(), meta)


def gen_random_planar(n: int, seed: int = 0, max_weight: int = 5,
                      spec: ProblemSpec | None = None) -> Instance:
    """Connected induced subgraph of the ``s x s`` grid, ``s = ceil(sqrt(n))``.

    Grown from a random cell by repeatedly adding a random grid neighbour of
    the current set, so the result is connected and planar.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = random.Random(seed)
    s = math.isqrt(n - 1) + 1
    start = (rng.randrange(s), rng.randrange(s))
    cells = [start]
    chosen = {start}
    while len(cells) < n:
        frontier = sorted({(r + dr, c + dc) for r, c in cells
                           for dr, dc in ((1, 0), (-1, 0), (0, 1), (0, -1))
                           if 0 <= r + dr < s and 0 <= c + dc < s} - chosen)
        cell = rng.choice(frontier)
        chosen.add(cell)
        cells.append(cell)
    cells.sort()
    idx = {cell: i for i, cell in enumerate(cells)}
    edges = [(idx[(r, c)], idx[(r + dr, c + dc)]) for r, c in cells
             for dr, dc in ((1, 0), (0, 1)) if (r + dr, c + dc) in idx]
    meta = {"generator": "random_planar", "n": n, "seed": seed, "max_weight": max_weight,
            "cells": [list(c) for c in cells]}
    return Instance(Graph.from_edges(n, edges), _random_weights(rng, n, max_weight),
                    spec or _default_spec(), meta)


def gen_knapsack_tree(items: Sequence[tuple[int, int]], U: int) -> Instance:
    """Tree from a min-weight knapsack instance ``(utility, weight)`` with goal ``U``.

    Vertex 0 is the root ``v``, vertex 1 is ``v0``, and item ``i`` owns
    ``v_i, x_i, y_i = 2+3i, 3+3i, 4+3i``. Weights are scaled by
    ``D = sum(w_i) + 1`` so item weights stay below one scaled unit.
    """
    if not items:
        raise ValueError("knapsack tree needs at least one item")
    D = sum(w for _, w in items) + 1
    B = 2 * U
    weights = [D, (U - 1) * D]
    edges = [(0, 1)]
    for i, (u, w) in enumerate(items):
        vi = 2 + 3 * i
        weights += [u * D, B * D, w]
        edges += [(0, vi), (vi, vi + 1), (vi, vi + 2)]
    g = Graph.from_edges(len(weights), edges)
    wa = WeightAssignment.from_columns(weights, weights)
    spec = ProblemSpec("threshold", 1, B=B * D)
    meta = {"generator": "knapsack_tree", "items": [list(it) for it in items], "U": U, "D": D}
    return Instance(g, wa, spec, meta)


def knapsack_min_weight(items: Sequence[tuple[int, int]], U: int) -> float:
    """Smallest total weight of an item set with utility at least ``U`` (``inf`` if none)."""
    best = math.inf
    for r in range(len(items) + 1):
        for combo in itertools.combinations(items, r):
            if sum(u for u, _ in combo) >= U:
                best = min(best, sum(w for _, w in combo))
    return best


def knapsack_tree_optimum(items: Sequence[tuple[int, int]], U: int) -> int:
    """Closed-form optimum of :func:`gen_knapsack_tree`.

    Either no district is centered at the root (one item district absorbs
    the root) or the root district takes ``v0`` plus a cheapest item set
    reaching utility ``U``, losing the ``y_i`` of those items.
    """
    D = sum(w for _, w in items) + 1
    B = 2 * U
    n = len(items)
    base = n * B * D + sum(u for u, _ in items) * D + sum(w for _, w in items)
    best = D + base
    mw = knapsack_min_weight(items, U)
    if mw != math.inf:
        best = max(best, (B // 2) * D + base - int(mw))
    return best


def gen_is_reduction(g0: Graph, k: int = 1) -> Instance:
    """Packing instance whose optimum is ``(1 + k*Delta) * alpha(g0)`` when ``Delta >= 3``.

    Every edge ``uv`` of ``g0`` becomes a vertex ``p_uv`` joined to ``u`` and
    ``v`` by paths of length ``k``; every vertex of degree ``d < Delta``
    gets ``Delta - d`` filler paths of length ``k``. All weights are 1 and
    the threshold is ``1 + k*Delta``. Original vertices keep ids
    ``0..n0-1``.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    delta = max((g0.degree(v) for v in range(g0.n)), default=0)
    if delta < 3:
        warnings.warn(f"max degree {delta} < 3: the optimum formula is not guaranteed",
                      stacklevel=2)
    edges: list[tuple[int, int]] = []
    n = g0.n

    def path(a: int, b: int) -> None:
        # path of length k from a to b through k-1 fresh vertices
        nonlocal n
        prev = a
        for _ in range(k - 1):
            edges.append((prev, n))
            prev = n
            n += 1
        edges.append((prev, b))

    for u, v in g0.edges:
        p = n
        n += 1
        path(u, p)
        path(v, p)
    for v in range(g0.n):
        for _ in range(delta - g0.degree(v)):
            f = n
            n += 1
            path(v, f)
    g = Graph.from_edges(n, edges)
    wa = WeightAssignment.from_columns([1] * n, [1] * n)
    spec = ProblemSpec("threshold", k, B=1 + k * delta)
    meta = {"generator": "is_reduction", "k": k, "max_degree": delta, "n0": g0.n,
            "edges0": [list(e) for e in g0.edges]}
    return Instance(g, wa, spec, meta)


def independence_number(g: Graph) -> int:
    best = 0
    adj = [sum(1 << u for u in g.adj[v]) for v in range(g.n)]

    def grow(cand: int, size: int) -> None:
        nonlocal best
        if size + bin(cand).count("1") <= best:
            return
        if cand == 0:
            best = max(best, size)
            return
        v = (cand & -cand).bit_length() - 1
        grow(cand & ~(1 << v) & ~adj[v], size + 1)
        grow(cand & ~(1 << v), size)

    grow((1 << g.n) - 1, 0)
    return best


def gen_clique_reduction(g0: Graph, T: int, k: int = 2) -> Instance:
    """Graph with a weight-``T`` district of diameter ``<= k`` iff ``g0`` has a ``T``-clique.

    Original vertices keep ids ``0..n0-1`` with weight 1; each edge gets a
    weight-0 vertex attached to its endpoints by paths of length
    ``floor(k/2)``, and the edge vertices are pairwise joined by paths of
    length ``k + 1 - 2*floor(k/2)``. The returned ``ProblemSpec.k`` holds the diameter
    bound.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    l1 = k // 2
    l2 = k + 1 - 2 * l1
    edges: list[tuple[int, int]] = []
    n = g0.n

    def path(a: int, b: int, length: int) -> None:
        nonlocal n
        prev = a
        for _ in range(length - 1):
            edges.append((prev, n))
            prev = n
            n += 1
        edges.append((prev, b))

    xs = []
    for u, v in g0.edges:
        x = n
        n += 1
        xs.append(x)
        path(u, x, l1)
        path(v, x, l1)
    for a, b in itertools.combinations(xs, 2):
        path(a, b, l2)
    g = Graph.from_edges(n, edges)
    w = [1] * g0.n + [0] * (n - g0.n)
    wa = WeightAssignment.from_columns(w, w)
    spec = ProblemSpec("threshold", k, B=T)
    meta = {"generator": "clique_reduction", "T": T, "diameter": k, "l1": l1, "l2": l2,
            "n0": g0.n, "edges0": [list(e) for e in g0.edges]}
    return Instance(g, wa, spec, meta)


def find_diameter_district(g: Graph, wa: WeightAssignment, B: int, k: int,
                           mode: str = "strong", max_n: int = 20) -> tuple[int, ...] | None:
    """Scan by increasing size for a connected set with objective ``>= B`` and diameter ``<= k``.

    Strong mode measures distances inside the set, weak mode in ``g``.
    Returns the lexicographically first qualifying set of minimum size.
    """
    if g.n > max_n:
        raise ValueError(f"find_diameter_district is limited to {max_n} vertices")
    obj = wa.column("objective")
    apsp = all_pairs_distances(g)
    for size in range(1, g.n + 1):
        for s in itertools.combinations(range(g.n), size):
            if sum(obj[v] for v in s) < B or not is_connected_subset(g, s):
                continue
            if mode == "strong":
                sub, _ = g.induced(s)
                d = all_pairs_distances(sub)
            else:
                d = apsp[list(s)][:, list(s)]
            if (d != UNREACHABLE).all() and d.max() <= k:
                return s
    return None
