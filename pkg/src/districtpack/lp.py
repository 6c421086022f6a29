"""Packing LP: a small dense simplex, column generation against the
separation oracle, randomized rounding and the correlation ratio.

The LP is ``max sum_S w(S) x_S`` subject to ``sum_{S contains v} x_S <= 1``
for every vertex and ``x >= 0``. Columns are districts; only the columns
the oracle has produced are ever materialised.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .constraints import ConfigError, ProblemSpec, as_fraction, enumerate_valid_districts
from .graph import District, Districting, Graph, WeightAssignment
from .subgraph_sum import separation_oracle

PIVOT_TOL = 1e-9
LOAD_TOL = 1e-9


class SimplexError(RuntimeError):
    """The simplex did not terminate within its pivot budget."""


@dataclass(frozen=True)
class SimplexResult:
    x: np.ndarray
    duals: np.ndarray
    objective: float
    pivots: int


def simplex_packing(costs: Sequence[float], a: np.ndarray, max_pivots: int | None = None) -> SimplexResult:
    """Solve ``max c.x  s.t.  A x <= 1, x >= 0`` for nonnegative ``A``.

    Dense tableau starting from the slack basis. Dantzig pricing is used
    until ``3 * m`` consecutive degenerate pivots have been seen, after
    which Bland's rule takes over. Duals are read off the slack columns of
    the objective row.
    """
    a = np.asarray(a, dtype=float)
    m, p = a.shape
    c = np.asarray(costs, dtype=float)
    if p == 0:
        return SimplexResult(np.zeros(0), np.zeros(m), 0.0, 0)
    tab = np.zeros((m + 1, p + m + 1))
    tab[:m, :p] = a
    tab[:m, p:p + m] = np.eye(m)
    tab[:m, -1] = 1.0
    tab[m, :p] = -c
    basis = list(range(p, p + m))
    limit = max_pivots if max_pivots is not None else 50 * (m + p) + 100
    degenerate = 0
    bland = False
    pivots = 0
    while True:
        row = tab[m, :-1]
        if bland:
            cand = np.flatnonzero(row < -PIVOT_TOL)
            if cand.size == 0:
                break
            j = int(cand[0])
        else:
            j = int(np.argmin(row))
            if row[j] >= -PIVOT_TOL:
                break
        col = tab[:m, j]
        ok = col > PIVOT_TOL
        if not ok.any():
            raise SimplexError("unbounded packing LP")  # impossible with A >= 0 and no zero columns
        ratios = np.full(m, np.inf)
        ratios[ok] = tab[:m, -1][ok] / col[ok]
        best = ratios.min()
        ties = np.flatnonzero(ratios <= best + PIVOT_TOL)
        i = int(min(ties, key=lambda r: basis[r]))
        if best <= PIVOT_TOL:
            degenerate += 1
            if degenerate >= 3 * m:
                bland = True
        else:
            degenerate = 0
        tab[i] /= tab[i, j]
        for r in range(m + 1):
            if r != i and tab[r, j] != 0.0:
                tab[r] -= tab[r, j] * tab[i]
        basis[i] = j
        pivots += 1
        if pivots > limit:
            raise SimplexError(f"simplex exceeded {limit} pivots")
    x = np.zeros(p)
    for r, b in enumerate(basis):
        if b < p:
            x[b] = max(tab[r, -1], 0.0)
    duals = np.clip(tab[m, p:p + m], 0.0, None)
    return SimplexResult(x, duals, float(c @ x), pivots)


@dataclass(frozen=True)
class FractionalSolution:
    columns: tuple[District, ...]
    x: tuple[float, ...]
    n: int
    certified: bool = True
    iterations: int = 0

    @property
    def objective(self) -> float:
        return float(sum(xs * _weight(d) for d, xs in zip(self.columns, self.x)))

    def loads(self) -> np.ndarray:
        load = np.zeros(self.n)
        for d, xs in zip(self.columns, self.x):
            load[list(d.vertices)] += xs
        return load

    def is_feasible(self, tol: float = LOAD_TOL) -> bool:
        return bool((self.loads() <= 1 + tol).all() and all(xs >= -tol for xs in self.x))

    def support(self, tol: float = 1e-12) -> "FractionalSolution":
        keep = [i for i, xs in enumerate(self.x) if xs > tol]
        return FractionalSolution(tuple(self.columns[i] for i in keep),
                                  tuple(self.x[i] for i in keep), self.n,
                                  self.certified, self.iterations)

    def to_json(self) -> dict:
        return {"objective": self.objective, "certified": self.certified,
                "iterations": self.iterations,
                "columns": [{"vertices": list(d.vertices), "center": d.center, "x": xs}
                            for d, xs in zip(self.columns, self.x)]}


@dataclass(frozen=True)
class DualCertificate:
    """Master-LP duals together with their rounded-up integer image.

    ``quantized[v] * step >= y[v]`` for every vertex, with an error below
    ``step``.
    """

    y: tuple[float, ...]
    step: Fraction
    quantized: tuple[int, ...]

    @property
    def objective(self) -> float:
        return float(sum(self.y))


def _weight(d: District) -> int:
    # district weights are cached with the objective first (see _column)
    return d.weights[0]


def _column(d: District, wa: WeightAssignment) -> District:
    obj = wa.index("objective")
    return District(d.vertices, d.center, (wa.total(d.vertices)[obj],))


def quantization_step(wa: WeightAssignment, eps) -> Fraction | None:
    """``eps * w_min / (4 n)``; ``None`` when no vertex has positive objective."""
    w = [x for x in wa.column("objective") if x > 0]
    if not w:
        return None
    return as_fraction(eps) * min(w) / (4 * wa.n)


def quantize_duals(y: Sequence[float], step: Fraction) -> tuple[int, ...]:
    """Round every dual up to a multiple of ``step``."""
    out = []
    for v in y:
        f = Fraction(float(v))
        out.append(max(0, math.ceil(f / step)))
    return tuple(out)


def _master(columns: list[District], n: int) -> SimplexResult:
    a = np.zeros((n, len(columns)))
    for j, d in enumerate(columns):
        a[list(d.vertices), j] = 1.0
    return simplex_packing([_weight(d) for d in columns], a)


def solve_lp(g: Graph, wa: WeightAssignment, spec: ProblemSpec, eps, max_iters: int = 200,
             threads: int = 1) -> tuple[FractionalSolution, DualCertificate]:
    """Column generation for the packing LP.

    Each round solves the restricted master exactly, rounds its duals up to
    multiples of ``quantization_step`` and asks the separation oracle for a
    violated district. The solution is ``certified`` when the oracle finds
    none; otherwise the best restricted solution is returned after
    ``max_iters`` rounds.
    """
    eps = as_fraction(eps)
    if not 0 < eps < 1:
        raise ConfigError("eps must lie in (0, 1)")
    step = quantization_step(wa, eps)
    if step is None:
        empty = DualCertificate(tuple(0.0 for _ in range(g.n)), Fraction(1), (0,) * g.n)
        return FractionalSolution((), (), g.n, True, 0), empty
    columns: list[District] = []
    seen: set[tuple[int, ...]] = set()
    result = _master(columns, g.n)
    certified = False
    it = 0
    while it < max_iters:
        it += 1
        q = quantize_duals(result.duals, step)
        res = separation_oracle(g, wa.with_column("dual", q), spec, eps, dual_scale=step,
                                threads=threads)
        if not res.found:
            certified = True
            break
        if res.district.vertices in seen:
            break  # numerical stall: the master already prices this column
        seen.add(res.district.vertices)
        columns.append(_column(res.district, wa))
        result = _master(columns, g.n)
    q = quantize_duals(result.duals, step)
    fs = FractionalSolution(tuple(columns), tuple(float(v) for v in result.x), g.n, certified, it)
    return fs, DualCertificate(tuple(float(v) for v in result.duals), step, q)


def enumerate_lp(g: Graph, wa: WeightAssignment, spec: ProblemSpec, max_n: int = 12) -> FractionalSolution:
    """Exact packing LP over every valid district (reference, small graphs)."""
    from scipy.optimize import linprog

    if g.n > max_n:
        raise ValueError(f"enumerate_lp is limited to {max_n} vertices")
    cols = [_column(d, wa) for d in enumerate_valid_districts(g, wa, spec)]
    if not cols:
        return FractionalSolution((), (), g.n)
    a = np.zeros((g.n, len(cols)))
    for j, d in enumerate(cols):
        a[list(d.vertices), j] = 1.0
    w = np.array([_weight(d) for d in cols], dtype=float)
    res = linprog(-w, A_ub=a, b_ub=np.ones(g.n), bounds=(0, None), method="highs")
    if res.status != 0:
        raise RuntimeError(f"reference LP failed: {res.message}")
    return FractionalSolution(tuple(cols), tuple(float(v) for v in res.x), g.n)


def rounding_order(fs: FractionalSolution) -> list[int]:
    """Columns by decreasing weight, ties by column index."""
    return sorted(range(len(fs.columns)), key=lambda j: (-_weight(fs.columns[j]), j))


def round_trials(fs: FractionalSolution, seed: int, repeats: int,
                 threads: int = 1) -> list[tuple[int, tuple[int, ...]]]:
    """Run ``repeats`` independent rounding passes.

    Pass ``r`` uses row ``r`` of one uniform matrix drawn from
    ``numpy.random.default_rng(seed)``, so the outcome does not depend on
    ``threads``. Returns ``(objective, selected column ids)`` per pass.
    """
    order = rounding_order(fs)
    masks = [sum(1 << v for v in fs.columns[j].vertices) for j in order]
    probs = [fs.x[j] for j in order]
    weights = [_weight(fs.columns[j]) for j in order]
    u = np.random.default_rng(seed).random((repeats, len(order)))

    def run(rows: range):
        out = []
        for r in rows:
            used = 0
            total = 0
            chosen = []
            ur = u[r]
            for pos, j in enumerate(order):
                if ur[pos] < probs[pos] and not used & masks[pos]:
                    used |= masks[pos]
                    total += weights[pos]
                    chosen.append(j)
            out.append((total, tuple(sorted(chosen))))
        return out

    if threads > 1 and repeats > 1:
        chunk = -(-repeats // threads)
        parts = [range(s, min(s + chunk, repeats)) for s in range(0, repeats, chunk)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return [t for part in pool.map(run, parts) for t in part]
    return run(range(repeats))


def randomized_round(fs: FractionalSolution, seed: int, repeats: int = 1,
                     wa: WeightAssignment | None = None, threads: int = 1) -> Districting:
    """Best plan over ``repeats`` rounding passes (first best on ties)."""
    if not fs.columns or repeats <= 0:
        return Districting()
    trials = round_trials(fs, seed, repeats, threads)
    best = max(range(len(trials)), key=lambda r: (trials[r][0], -r))
    chosen = [fs.columns[j] for j in trials[best][1]]
    if wa is not None:
        chosen = [District.make(d.vertices, d.center, wa) for d in chosen]
    return Districting(tuple(sorted(chosen, key=lambda d: d.vertices)), trials[best][0])


def correlation_ratio(fs: FractionalSolution) -> float:
    """Sum of ``x_A x_B`` over ordered pairs of distinct intersecting columns, over ``sum x``."""
    total = sum(fs.x)
    if total <= 0:
        return 0.0
    sets = [set(d.vertices) for d in fs.columns]
    acc = 0.0
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            if sets[i] & sets[j]:
                acc += 2 * fs.x[i] * fs.x[j]
    return acc / total


@dataclass
class RoundingReport:
    lp_value: float
    integer_value: int
    mean_integer: float
    correlation: float
    certified: bool
    iterations: int
    districting: Districting = field(default_factory=Districting)

    def to_json(self) -> dict:
        return {"lp_value": self.lp_value, "integer_value": self.integer_value,
                "mean_integer": self.mean_integer, "correlation": self.correlation,
                "certified": self.certified, "iterations": self.iterations,
                **self.districting.to_json()}


def solve_and_round(g: Graph, wa: WeightAssignment, spec: ProblemSpec, eps, seed: int = 0,
                    repeats: int = 50, max_iters: int = 200, threads: int = 1) -> RoundingReport:
    fs, _ = solve_lp(g, wa, spec, eps, max_iters, threads)
    fs = fs.support()
    if not fs.columns:
        return RoundingReport(fs.objective, 0, 0.0, 0.0, fs.certified, fs.iterations)
    trials = round_trials(fs, seed, repeats, threads)
    plan = randomized_round(fs, seed, repeats, wa, threads)
    mean = float(np.mean([t[0] for t in trials]))
    return RoundingReport(fs.objective, plan.objective, mean, correlation_ratio(fs),
                          fs.certified, fs.iterations, plan)
