"""Trimmed connected-subgraph-sum dynamic program and the separation oracles
built on top of it.

The DP runs over a nice tree decomposition. In strong-radius mode the
center is pinned into every bag and each selected bag vertex carries a
component id, a guessed distance to the center and a parent flag. In
weak-radius mode the graph is first cut down to the ``k``-ball around the
center, after which any nonempty connected subset qualifies; the state
then only tracks components plus a "closed" flag that marks a finished
component.

Every stored weight vector carries the bitmask of a vertex set realising
it, so results come with witnesses.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .constraints import ConfigError, ProblemSpec, as_fraction
from .graph import (District, Graph, WeightAssignment, bfs_distances,
                    is_connected_subset, khop_neighborhood, UNREACHABLE,
                    check_radius, all_pairs_distances, ball)
from .treedecomp import (FORGET, INTRODUCE, INTRODUCE_EDGE, JOIN, LEAF,
                         build_decomposition, make_nice)

Vector = tuple[int, ...]

# floor(log(z) / delta) is nudged by this much so values sitting on a bucket
# boundary up to rounding noise land in the same bucket
_BUCKET_GUARD = 1e-9


def score(coeffs: Sequence[int], z: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(coeffs, z))


def bucket_key(z: Sequence[int], delta: float) -> tuple[int, ...]:
    return tuple(-1 if x == 0 else math.floor(math.log(x) / delta + _BUCKET_GUARD) for x in z)


def trim(vectors: Iterable[Vector], coeffs: Sequence[int], delta: float) -> list[Vector]:
    """Keep one ``coeffs``-maximising vector per geometric bucket.

    Ties go to the lexicographically smallest vector; ``delta == 0`` only
    removes duplicates. The output is sorted.
    """
    return sorted(_trim_map({tuple(z): 0 for z in vectors}, coeffs, float(delta)))


def _trim_map(entry: dict, coeffs: Sequence[int], delta: float) -> dict:
    if delta <= 0 or len(entry) <= 1:
        return entry
    best: dict = {}
    for z, mask in entry.items():
        key = bucket_key(z, delta)
        cur = best.get(key)
        if cur is None:
            best[key] = (z, mask)
            continue
        s, sc = score(coeffs, z), score(coeffs, cur[0])
        if s > sc or (s == sc and z < cur[0]):
            best[key] = (z, mask)
    return {z: mask for z, mask in best.values()}


def _add(a: Vector, b: Vector) -> Vector:
    return tuple(x + y for x, y in zip(a, b))


def _put(entry: dict, z: Vector, mask: int) -> None:
    cur = entry.get(z)
    if cur is None or mask < cur:
        entry[z] = mask


def _canon(labels: tuple) -> tuple:
    """Renumber component ids by first appearance."""
    ren: dict[int, int] = {}
    out = []
    for e in labels:
        if e is None:
            out.append(None)
        else:
            c = ren.setdefault(e[0], len(ren))
            out.append((c,) + e[1:])
    return tuple(out)


def _merge_components(labels: tuple, a: int, b: int) -> tuple:
    ca, cb = labels[a][0], labels[b][0]
    if ca == cb:
        return labels
    return _canon(tuple(e if e is None or e[0] != cb else (ca,) + e[1:] for e in labels))


def _join_components(l1: tuple, l2: tuple) -> list[int]:
    """Root position per selected bag slot after merging both partitions."""
    parent = list(range(len(l1)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for labels in (l1, l2):
        first: dict[int, int] = {}
        for i, e in enumerate(labels):
            if e is None:
                continue
            j = first.setdefault(e[0], i)
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    return [find(i) for i in range(len(l1))]


def _run_dp(h: Graph, wa: WeightAssignment, k: int, strong: bool, coeffs: Sequence[int],
            eps: float, pinned: int | None) -> dict[Vector, int]:
    """Core DP on ``h``; returns ``{vector: witness bitmask}`` at the root."""
    nice = make_nice(build_decomposition(h), h, pinned)
    delta = eps / len(nice) if eps > 0 else 0.0
    vecs = wa.vectors
    dim = wa.dim
    zero = (0,) * dim
    dist = bfs_distances(h, pinned) if strong else None
    tables: list[dict | None] = [None] * len(nice.nodes)

    for t, nd in enumerate(nice.nodes):
        out: dict = {}
        if nd.kind == LEAF:
            out[((), False)] = {zero: 0}
        elif nd.kind == INTRODUCE:
            v = nd.vertex
            pos = nd.bag.index(v)
            child = tables[nd.children[0]]
            for (labels, closed), entry in child.items():
                options = []
                if strong:
                    if v == pinned:
                        options.append((len(labels) + 1, 0, 1))
                    else:
                        options.append(None)
                        for r in range(max(1, dist[v]), k + 1):
                            options.append((len(labels) + 1, r, 0))
                else:
                    options.append(None)
                    if not closed:
                        options.append((len(labels) + 1,))
                for opt in options:
                    new = _canon(labels[:pos] + (opt,) + labels[pos:])
                    _merge_into(out, (new, closed), entry)
        elif nd.kind == FORGET:
            v = nd.vertex
            child_nd = nice.nodes[nd.children[0]]
            pos = child_nd.bag.index(v)
            child = tables[nd.children[0]]
            bit = 1 << v
            wv = vecs[v]
            for (labels, closed), entry in child.items():
                e = labels[pos]
                rest = labels[:pos] + labels[pos + 1:]
                if e is None:
                    _merge_into(out, (_canon(rest), closed), entry)
                    continue
                if strong and e[2] != 1:
                    continue
                shares = any(x is not None and x[0] == e[0] for x in rest)
                new_closed = closed
                if not shares:
                    if any(x is not None for x in rest) or closed:
                        continue
                    if strong and v != pinned:
                        continue
                    new_closed = True
                key = (_canon(rest), new_closed)
                tgt = out.setdefault(key, {})
                for z, mask in entry.items():
                    _put(tgt, _add(z, wv), mask | bit)
        elif nd.kind == INTRODUCE_EDGE:
            a, b = (nd.bag.index(x) for x in nd.edge)
            child = tables[nd.children[0]]
            for (labels, closed), entry in child.items():
                ea, eb = labels[a], labels[b]
                if ea is None or eb is None:
                    _merge_into(out, (labels, closed), entry)
                    continue
                if not strong:
                    _merge_into(out, (_merge_components(labels, a, b), closed), entry)
                    continue
                ra, rb = ea[1], eb[1]
                if abs(ra - rb) > 1:
                    continue
                merged = _merge_components(labels, a, b)
                variants = {merged}
                if ra == rb + 1:
                    variants.add(merged[:a] + ((merged[a][0], ra, 1),) + merged[a + 1:])
                if rb == ra + 1:
                    variants.add(merged[:b] + ((merged[b][0], rb, 1),) + merged[b + 1:])
                for lab in variants:
                    _merge_into(out, (lab, closed), entry)
        elif nd.kind == JOIN:
            left = tables[nd.children[0]]
            right = tables[nd.children[1]]
            index: dict = {}
            for state, entry in right.items():
                index.setdefault(_join_key(state[0]), []).append((state, entry))
            for (l1, c1), e1 in left.items():
                for (l2, c2), e2 in index.get(_join_key(l1), ()):
                    if c1 and c2:
                        continue
                    roots = _join_components(l1, l2)
                    labels = tuple(
                        None if x is None else
                        ((roots[i],) + ((x[1], max(x[2], l2[i][2])) if strong else ()))
                        for i, x in enumerate(l1))
                    tgt = out.setdefault((_canon(labels), c1 or c2), {})
                    for z1, m1 in e1.items():
                        for z2, m2 in e2.items():
                            _put(tgt, _add(z1, z2), m1 | m2)
        if delta > 0:
            out = {s: _trim_map(entry, coeffs, delta) for s, entry in out.items()}
        tables[t] = out
        for c in nd.children:
            tables[c] = None

    root = tables[nice.root]
    return dict(root.get(((), True), {}))


def _merge_into(out: dict, state, entry: dict) -> None:
    tgt = out.get(state)
    if tgt is None:
        out[state] = dict(entry)
        return
    for z, mask in entry.items():
        _put(tgt, z, mask)


def _join_key(labels: tuple) -> tuple:
    return tuple(None if e is None else e[1:2] for e in labels)


def trimmed_connected_subgraph_sum(g: Graph, wa: WeightAssignment, k: int, mode: str,
                                   coeffs: Sequence[int], eps, center: int
                                   ) -> list[tuple[Vector, District]]:
    """Trimmed set of weight vectors of compact connected subgraphs around ``center``.

    Strong mode covers connected sets containing ``center`` whose induced
    eccentricity from ``center`` is at most ``k``; weak mode covers all
    nonempty connected sets inside the ``k``-ball of ``center``. The result
    is an ``(coeffs, eps)``-trimming of that family's weight vectors: every
    feasible vector ``z`` has a returned ``z'`` within a factor ``e**eps``
    in each coordinate (zeros matched exactly) with
    ``score(coeffs, z') >= score(coeffs, z)``.

    Returns ``(vector, witness district)`` pairs sorted by vector.
    """
    if mode not in ("strong", "weak"):
        raise ValueError(f"unknown radius mode {mode!r}")
    if not 0 <= center < g.n:
        raise IndexError(f"center {center} out of range")
    eps = float(as_fraction(eps))
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    _, h, old_ids = khop_neighborhood(g, center, k)
    sub_wa = wa.restrict(old_ids)
    local_center = old_ids.index(center)
    strong = mode == "strong"
    raw = _run_dp(h, sub_wa, k, strong, coeffs, eps, local_center if strong else None)
    out = []
    for z, mask in sorted(raw.items()):
        members = [old_ids[i] for i in range(h.n) if mask >> i & 1]
        out.append((z, District(tuple(members), center, z)))
    return out


def brute_subgraph_weights(g: Graph, wa: WeightAssignment, k: int, mode: str = "strong",
                           center: int | None = None) -> set[Vector]:
    """Exact weight-vector set by enumerating every vertex subset (n <= 14).

    With ``center`` given, strong mode keeps connected sets containing it
    with induced eccentricity at most ``k`` from it; weak mode keeps
    connected sets inside its ``k``-ball.
    """
    if g.n > 14:
        raise ValueError("brute_subgraph_weights is limited to 14 vertices")
    apsp = all_pairs_distances(g) if mode == "weak" else None
    near = set(ball(g, center, k)) if center is not None else None
    out: set[Vector] = set()
    for mask in range(1, 1 << g.n):
        s = [v for v in range(g.n) if mask >> v & 1]
        if not is_connected_subset(g, s):
            continue
        if center is None:
            ok = check_radius(g, s, k, mode, apsp) is not None
        elif mode == "strong":
            ok = center in s and _ecc_ok(g, s, center, k)
        else:
            ok = set(s) <= near
        if ok:
            out.add(wa.total(s))
    return out


def _ecc_ok(g: Graph, s: list[int], c: int, k: int) -> bool:
    sub, old = g.induced(s)
    d = bfs_distances(sub, old.index(c))
    return UNREACHABLE not in d and max(d) <= k


@dataclass(frozen=True)
class OracleResult:
    """Outcome of one oracle call.

    ``margin`` is ``(1 - eps/2) w(S) - y(S)`` (positive for a violating
    district) and ``score`` the linear score whose trimmed list produced it.
    """

    district: District | None
    objective: int = 0
    dual_sum: Fraction = Fraction(0)
    margin: Fraction = Fraction(0)
    score: tuple[int, ...] = ()

    @property
    def found(self) -> bool:
        return self.district is not None

    def to_json(self) -> dict:
        if self.district is None:
            return {"v": 1, "found": False}
        return {"v": 1, "found": True, "vertices": list(self.district.vertices),
                "center": self.district.center, "objective": self.objective,
                "dual_sum": [self.dual_sum.numerator, self.dual_sum.denominator],
                "margin": [self.margin.numerator, self.margin.denominator],
                "score": list(self.score)}


def oracle_trim_eps(spec: ProblemSpec, eps) -> float:
    """Internal trim parameter: ``min(eps/8, ln(c-1)/4)`` (``eps/8`` for threshold)."""
    eps = float(as_fraction(eps))
    if spec.mode == "balanced":
        return min(eps / 8, math.log(float(spec.c - 1)) / 4)
    return eps / 8


def oracle_roles(spec: ProblemSpec) -> tuple[str, ...]:
    return spec.feature_roles + ("objective", "dual")


def oracle_scores(spec: ProblemSpec) -> list[tuple[int, ...]]:
    if spec.mode == "balanced":
        p, q = spec.c.numerator, spec.c.denominator
        return [(p - q, -q, 0, 0), (-q, p - q, 0, 0)]
    return [(1, 0, 0)]


def separation_oracle(g: Graph, wa: WeightAssignment, spec: ProblemSpec, eps,
                      dual_scale=1, trim_eps: float | None = None,
                      threads: int = 1) -> OracleResult:
    """Find a valid district whose scaled dual sum is below ``(1 - eps/2) w(S)``.

    ``wa`` must carry an integer ``dual`` coordinate; the true dual value of
    a vertex is ``dual_scale * dual``. Every vertex is tried as a center, the
    DP runs once per linear score, and the heaviest candidate that meets the
    exact composition constraint and the violation test is returned
    (ties: smallest vertex tuple). ``found`` is false when none exists.
    """
    eps_f = as_fraction(eps)
    if not 0 < eps_f < 1:
        raise ConfigError("oracle eps must lie in (0, 1)")
    scale = as_fraction(dual_scale)
    hat = oracle_trim_eps(spec, eps_f) if trim_eps is None else float(trim_eps)
    if spec.mode == "balanced" and hat > 0 and math.exp(2 * hat) >= float(spec.c - 1):
        raise ConfigError(f"trim parameter {hat} too large for c={spec.c}: need e^(2*eps) < c-1")
    vec_wa = wa.select(oracle_roles(spec))
    nf = len(spec.feature_roles)
    slack = 1 - eps_f / 2
    scores = oracle_scores(spec)

    def per_center(center: int):
        best = None
        for coeffs in scores:
            for z, district in trimmed_connected_subgraph_sum(g, vec_wa, spec.k, spec.radius,
                                                              coeffs, hat, center):
                obj, y = z[nf], z[nf + 1]
                if not spec.composition_ok(z[:nf]):
                    continue
                if not scale * y < slack * obj:
                    continue
                cand = (-obj, district.vertices, district, y, coeffs)
                if best is None or cand[:2] < best[:2]:
                    best = cand
        return best

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(per_center, range(g.n)))
    else:
        results = [per_center(c) for c in range(g.n)]
    found = [r for r in results if r is not None]
    if not found:
        return OracleResult(None)
    negobj, vertices, district, y, coeffs = min(found, key=lambda r: r[:2])
    center = check_radius(g, vertices, spec.k, spec.radius)
    full = District.make(vertices, center, wa)
    return OracleResult(full, -negobj, scale * y, slack * -negobj - scale * y, coeffs)
