"""Composition predicates (c-balanced / B-threshold, exact and relaxed) and
validation of whole districtings.

All comparisons are done on integers after cross-multiplying the rational
parameters, so boundary cases are decided exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from .graph import (District, Graph, InvalidDistrict, WeightAssignment,
                    all_pairs_distances, ball, check_radius, is_connected_subset)


class ConfigError(ValueError):
    """Invalid or conflicting solver parameters."""


def as_fraction(x) -> Fraction:
    """Accept ints, floats, strings, Fractions or ``[num, den]`` pairs."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (list, tuple)):
        num, den = x
        return Fraction(int(num), int(den))
    if isinstance(x, float):
        # decimal literal semantics: 0.1 means 1/10, not the binary double
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class ProblemSpec:
    """Constraint set of one districting problem.

    ``mode`` is ``"balanced"`` (uses ``c``) or ``"threshold"`` (uses ``B``);
    ``delta`` is the relaxation used by the bicriteria solvers.
    """

    mode: str
    k: int
    radius: str = "strong"
    c: Fraction | None = None
    B: int | None = None
    delta: Fraction = field(default=Fraction(0))

    def __post_init__(self):
        object.__setattr__(self, "delta", as_fraction(self.delta))
        if self.mode == "balanced":
            if self.c is None:
                raise ConfigError("balanced mode needs c")
            object.__setattr__(self, "c", as_fraction(self.c))
            if self.c < 2:
                raise ConfigError("c must be at least 2")
        elif self.mode == "threshold":
            if self.B is None or int(self.B) < 0:
                raise ConfigError("threshold mode needs B >= 0")
            object.__setattr__(self, "B", int(self.B))
        else:
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.delta < 0:
            raise ConfigError("delta must be nonnegative")
        if self.mode == "threshold" and self.delta >= 1:
            raise ConfigError("threshold relaxation needs delta < 1")
        if self.k < 0:
            raise ConfigError("k must be nonnegative")
        if self.radius not in ("strong", "weak"):
            raise ConfigError(f"unknown radius mode {self.radius!r}")

    def replace(self, **changes) -> "ProblemSpec":
        data = dict(mode=self.mode, k=self.k, radius=self.radius, c=self.c,
                    B=self.B, delta=self.delta)
        data.update(changes)
        return ProblemSpec(**data)

    @property
    def feature_roles(self) -> tuple[str, ...]:
        return ("feature1", "feature2") if self.mode == "balanced" else ("feature1",)

    def composition_ok(self, features: Sequence[int], relaxed: bool = False) -> bool:
        """Check composition given the feature totals in ``feature_roles`` order."""
        delta = self.delta if relaxed else Fraction(0)
        if self.mode == "balanced":
            return is_balanced(features[0], features[1], self.c, delta)
        return meets_threshold(features[0], self.B, delta)


def is_balanced(w1: int, w2: int, c, delta=0) -> bool:
    """``min(w1, w2) * c * (1 + delta) >= w1 + w2`` decided exactly.

    A district with zero total feature weight is never balanced.
    """
    c = as_fraction(c)
    delta = as_fraction(delta)
    total = w1 + w2
    if total == 0:
        return False
    eff = c * (1 + delta)
    return min(w1, w2) * eff.numerator >= total * eff.denominator


def meets_threshold(w1: int, B: int, delta=0) -> bool:
    """``w1 >= B * (1 - delta)`` decided exactly."""
    delta = as_fraction(delta)
    bound = B * (1 - delta)
    return w1 * bound.denominator >= bound.numerator


def composition_ok(spec: ProblemSpec, wa: WeightAssignment, vertices: Iterable[int],
                   relaxed: bool = False) -> bool:
    tot = wa.total(vertices)
    return spec.composition_ok([tot[wa.index(r)] for r in spec.feature_roles], relaxed)


@dataclass
class DistrictReport:
    vertices: tuple[int, ...]
    connected: bool
    radius_ok: bool
    composition_ok: bool
    composition_relaxed_ok: bool
    objective: int

    def passes(self, relaxed: bool) -> bool:
        comp = self.composition_relaxed_ok if relaxed else self.composition_ok
        return self.connected and self.radius_ok and comp


@dataclass
class ValidationReport:
    districts: list[DistrictReport]
    disjoint: bool
    relaxed: bool
    total_objective: int

    @property
    def ok(self) -> bool:
        return self.disjoint and all(d.passes(self.relaxed) for d in self.districts)

    def to_json(self) -> dict:
        return {
            "v": 1,
            "ok": self.ok,
            "disjoint": self.disjoint,
            "relaxed": self.relaxed,
            "total_objective": self.total_objective,
            "districts": [
                {
                    "vertices": list(d.vertices),
                    "connected": d.connected,
                    "radius_ok": d.radius_ok,
                    "composition_ok": d.composition_ok,
                    "composition_relaxed_ok": d.composition_relaxed_ok,
                    "objective": d.objective,
                }
                for d in self.districts
            ],
        }


def validate_districting(g: Graph, wa: WeightAssignment, spec: ProblemSpec,
                         districts: Sequence[District], relaxed: bool = False,
                         apsp: np.ndarray | None = None) -> ValidationReport:
    """Describe every way a plan can fail; never raises on invalid plans.

    Vertex ids outside the graph do raise ``IndexError``.
    """
    seen: set[int] = set()
    disjoint = True
    reports = []
    obj = wa.index("objective")
    if spec.radius == "weak" and apsp is None and districts:
        apsp = all_pairs_distances(g)
    for d in districts:
        vs = tuple(d.vertices)
        if any(not 0 <= v < g.n for v in vs):
            raise IndexError(f"district {vs} has a vertex out of range")
        if seen.intersection(vs) or len(set(vs)) != len(vs):
            disjoint = False
        seen.update(vs)
        connected = is_connected_subset(g, vs)
        radius_ok = False
        if connected:
            try:
                radius_ok = check_radius(g, vs, spec.k, spec.radius, apsp) is not None
            except InvalidDistrict:
                radius_ok = False
        reports.append(DistrictReport(
            vertices=vs,
            connected=connected,
            radius_ok=radius_ok,
            composition_ok=bool(vs) and composition_ok(spec, wa, vs, False),
            composition_relaxed_ok=bool(vs) and composition_ok(spec, wa, vs, True),
            objective=wa.total(vs)[obj],
        ))
    return ValidationReport(reports, disjoint, relaxed,
                            sum(r.objective for r in reports))


def iter_compact_sets(g: Graph, k: int, radius: str = "strong",
                      max_ball: int = 20) -> Iterator[tuple[tuple[int, ...], int]]:
    """Every connected vertex set of radius at most ``k``, with a center.

    Exhaustive over the subsets of each ``k``-ball (any district lies inside
    the ball around its center). Each set is yielded once, with the smallest
    valid center.
    """
    apsp = all_pairs_distances(g) if radius == "weak" else None
    seen: set[tuple[int, ...]] = set()
    for center in range(g.n):
        members = ball(g, center, k)
        if len(members) > max_ball:
            raise ValueError(f"ball of size {len(members)} exceeds max_ball={max_ball}")
        others = [u for u in members if u != center]
        # strong mode: the center belongs to the set; weak mode: any subset
        for mask in range(1 << len(others)):
            subset = [others[i] for i in range(len(others)) if mask >> i & 1]
            for with_center in ((True,) if radius == "strong" else (True, False)):
                s = tuple(sorted(subset + [center])) if with_center else tuple(subset)
                if not s or s in seen:
                    continue
                if not is_connected_subset(g, s):
                    continue
                c = check_radius(g, s, k, radius, apsp)
                if c is None:
                    continue
                seen.add(s)
                yield s, c


def enumerate_valid_districts(g: Graph, wa: WeightAssignment, spec: ProblemSpec,
                              relaxed: bool = False, max_ball: int = 20) -> list[District]:
    """All valid districts, sorted by vertex tuple."""
    out = [District.make(s, c, wa) for s, c in iter_compact_sets(g, spec.k, spec.radius, max_ball)
           if composition_ok(spec, wa, s, relaxed)]
    out.sort(key=lambda d: d.vertices)
    return out
