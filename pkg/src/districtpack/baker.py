"""Baker-style shifting: delete every ``t``-th BFS layer, solve the remaining
components with the tree-decomposition packer and keep the best shift."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .constraints import ConfigError, ProblemSpec, as_fraction
from .graph import (District, Districting, Graph, WeightAssignment, bfs_layering,
                    connected_components)
from .packing_dp import pack_districts_bounded_tw


def compute_period(k: int, eps) -> int:
    """Shift period ``ceil(2 (2k + 1) / eps)``, at least 2."""
    eps = as_fraction(eps)
    if not 0 < eps <= 1:
        raise ConfigError("eps must lie in (0, 1]")
    return max(2, math.ceil(Fraction(2 * (2 * k + 1)) / eps))


@dataclass(frozen=True)
class ShiftPlan:
    period: int
    shift: int
    deleted: frozenset[int]
    components: tuple[tuple[int, ...], ...]

    def pieces(self, g: Graph) -> list[tuple[Graph, tuple[int, ...]]]:
        return [g.induced(c) for c in self.components]


def shift_plan(g: Graph, layer_of, period: int, shift: int) -> ShiftPlan:
    deleted = frozenset(v for v in range(g.n) if layer_of[v] % period == shift)
    survivors = [v for v in range(g.n) if v not in deleted]
    comps = tuple(tuple(c) for c in connected_components(g, survivors))
    return ShiftPlan(period, shift, deleted, comps)


def _solve_piece(g: Graph, wa: WeightAssignment, spec: ProblemSpec, eps, comp) -> list[District]:
    sub, old = g.induced(comp)
    res = pack_districts_bounded_tw(sub, wa.restrict(old), spec, eps)
    return [District.make([old[v] for v in d.vertices], old[d.center], wa) for d in res.districts]


def baker_shifts(g: Graph, wa: WeightAssignment, spec: ProblemSpec, eps, root: int = 0,
                 threads: int = 1) -> list[tuple[ShiftPlan, Districting]]:
    """Per-shift plans and their packings for a connected graph."""
    t = compute_period(spec.k, eps)
    layering = bfs_layering(g, root)
    half = as_fraction(eps) / 2
    plans = [shift_plan(g, layering.layer_of, t, i) for i in range(t)]
    # shifts that delete the same vertices (e.g. beyond the last layer) share one solve
    jobs = sorted({c for p in plans for c in p.components})

    def run(comp):
        return _solve_piece(g, wa, spec, half, comp)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            solved = dict(zip(jobs, pool.map(run, jobs)))
    else:
        solved = {c: run(c) for c in jobs}
    return [(p, Districting.of([d for c in p.components for d in solved[c]], wa)) for p in plans]


def baker_solve(g: Graph, wa: WeightAssignment, spec: ProblemSpec, eps, root: int | None = None,
                threads: int = 1) -> Districting:
    """Relaxed packing on graphs whose BFS slabs have small treewidth.

    Each connected component is handled separately. The component holding
    ``root`` is layered from it; the others from their smallest vertex.
    Ties between shifts go to the smallest shift index.
    """
    if spec.delta <= 0:
        raise ConfigError("shifting needs delta > 0")
    if g.n == 0:
        return Districting()
    root = 0 if root is None else root
    if not 0 <= root < g.n:
        raise IndexError(f"root {root} out of range")
    districts: list[District] = []
    for comp in connected_components(g):
        sub, old = g.induced(comp)
        r = old.index(root) if root in comp else 0
        shifts = baker_shifts(sub, wa.restrict(old), spec, eps, r, threads)
        _, best = max(shifts, key=lambda s: (s[1].objective, -s[0].shift))
        districts.extend(District.make([old[v] for v in d.vertices], old[d.center], wa)
                         for d in best.districts)
    return Districting.of(districts, wa)
