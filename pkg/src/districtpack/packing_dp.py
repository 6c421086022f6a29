"""Multi-district packing over a nice tree decomposition, plus an exhaustive
reference packer for small graphs.

A DP state is a combined trace: every bag vertex is either unselected or
labelled with (district, component, distance guess, parent flag), and every
open district carries its center information. In strong-radius mode that is
a single flag saying whether the district's center (the one vertex with
distance guess 0) has already been forgotten; parent flags then chain every
member back to that center inside the district. In weak-radius mode it is
the bitmask of vertices that can still serve as center. For each state we keep a
set of weight profiles: the weight vectors of the open districts (vertices
already forgotten) together with the objective collected from closed
districts. A district closes when its last bag vertex is forgotten; at that
moment its complete vector is checked against the relaxed composition
predicate.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .constraints import ConfigError, ProblemSpec, as_fraction, enumerate_valid_districts
from .graph import (District, Districting, Graph, UNREACHABLE, WeightAssignment,
                    all_pairs_distances, check_radius)
from .subgraph_sum import bucket_key
from .treedecomp import (FORGET, INTRODUCE, INTRODUCE_EDGE, JOIN, LEAF,
                         build_decomposition, make_nice)


def _canon(labels: tuple, info: tuple) -> tuple[tuple, tuple, tuple[int, ...]]:
    """Renumber districts and components by first appearance in the bag.

    Districts with no bag vertex are dropped. Returns the new labels, the
    new info and ``perm`` with ``perm[new] = old`` district index.
    """
    dmap: dict[int, int] = {}
    cmap: dict[tuple[int, int], int] = {}
    out = []
    for e in labels:
        if e is None:
            out.append(None)
            continue
        d = dmap.setdefault(e[0], len(dmap))
        c = cmap.setdefault((e[0], e[1]), len(cmap))
        out.append((d, c) + e[2:])
    perm = tuple(sorted(dmap, key=dmap.__getitem__))
    return tuple(out), tuple(info[o] for o in perm), perm


def _permute(profiles: dict, perm: tuple[int, ...], width: int) -> dict:
    if perm == tuple(range(width)):
        return profiles
    out = {}
    for key, (z0, closed, masks) in profiles.items():
        out[tuple(key[o] for o in perm)] = (z0, closed, tuple(masks[o] for o in perm))
    return out


def _better(a: tuple, b: tuple | None) -> bool:
    """Profile value ``a`` beats ``b``: more closed objective, then smaller witness."""
    return b is None or a[0] > b[0] or (a[0] == b[0] and a[1:] < b[1:])


def _absorb(out: dict, state, profiles: dict) -> None:
    tgt = out.get(state)
    if tgt is None:
        out[state] = dict(profiles)
        return
    for key, val in profiles.items():
        if _better(val, tgt.get(key)):
            tgt[key] = val


def _trim_profiles(profiles: dict, delta: float) -> dict:
    if delta <= 0 or len(profiles) <= 1:
        return profiles
    best: dict = {}
    for key, val in profiles.items():
        bkey = tuple(bucket_key(vec, delta) for vec in key)
        cur = best.get(bkey)
        if cur is None or val[0] > cur[1][0] or (val[0] == cur[1][0] and key < cur[0]):
            best[bkey] = (key, val)
    return dict(best.values())


def _add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def pack_districts_bounded_tw(g: Graph, wa: WeightAssignment, spec: ProblemSpec,
                              eps) -> Districting:
    """Pack disjoint districts that meet the ``spec.delta``-relaxed constraints.

    The objective is at least ``(1 - eps)`` times the best packing under
    the exact constraints. Cost grows exponentially with the width of the
    decomposition found for ``g``.
    """
    if spec.delta <= 0:
        raise ConfigError("the packing DP needs delta > 0; use the LP pipeline for exact constraints")
    eps = as_fraction(eps)
    if eps <= 0:
        raise ConfigError("eps must be positive")
    if g.n == 0:
        return Districting()
    roles = spec.feature_roles + ("objective",)
    vecs = wa.select(roles).vectors
    nf = len(spec.feature_roles)
    dim = nf + 1
    zero = (0,) * dim
    k = spec.k
    strong = spec.radius == "strong"
    apsp = all_pairs_distances(g)
    reach = (apsp != UNREACHABLE) & (apsp <= k)
    near = [[int(u) for u in np.flatnonzero(reach[v])] for v in range(g.n)]
    near_mask = [sum(1 << u for u in near[v]) for v in range(g.n)]

    nice = make_nice(build_decomposition(g), g)
    delta_alg = float(min(eps, spec.delta / 3)) / len(nice)
    tables: list[dict | None] = [None] * len(nice.nodes)

    for t, nd in enumerate(nice.nodes):
        out: dict = {}
        if nd.kind == LEAF:
            out[((), ())] = {(): (0, (), ())}

        elif nd.kind == INTRODUCE:
            v = nd.vertex
            pos = nd.bag.index(v)
            for (labels, info), prof in tables[nd.children[0]].items():
                nd_ = len(info)
                fresh = len(labels) + 1
                opts = []  # (label, info, opens_new)
                if strong:
                    opts.append((None, info, False))
                    centered = {e[0] for e in labels if e is not None and e[2] == 0}
                    members: list[list[tuple[int, int]]] = [[] for _ in info]
                    for u, e in zip(nd.bag[:pos] + nd.bag[pos + 1:], labels):
                        if e is not None:
                            members[e[0]].append((int(apsp[u, v]), e[2]))
                    for d, gone in enumerate(info):
                        # G-distances lower-bound distances inside the district
                        for r in range(0 if not gone and d not in centered else 1, k + 1):
                            if any(duv > r + ru for duv, ru in members[d]):
                                continue
                            if gone and not any(ru + duv <= r for duv, ru in members[d]):
                                continue  # the path back to a forgotten center crosses the bag
                            opts.append(((d, fresh, r, int(r == 0)), info, False))
                    opts.append(((nd_, fresh, 0, 1), info + (False,), True))
                    for r in range(1, k + 1):
                        opts.append(((nd_, fresh, r, 0), info + (False,), True))
                else:
                    opts.append((None, info, False))
                    for d, m in enumerate(info):
                        m2 = m & near_mask[v]
                        if m2:
                            opts.append(((d, fresh), info[:d] + (m2,) + info[d + 1:], False))
                    opts.append(((nd_, fresh), info + (near_mask[v],), True))
                for lab, inf, opens in opts:
                    new_labels, new_info, perm = _canon(labels[:pos] + (lab,) + labels[pos:], inf)
                    if opens:
                        base = {key + (zero,): (z0, cl, masks + (0,))
                                for key, (z0, cl, masks) in prof.items()}
                        width = nd_ + 1
                    else:
                        base, width = prof, nd_
                    _absorb(out, (new_labels, new_info), _permute(base, perm, width))

        elif nd.kind == FORGET:
            v = nd.vertex
            bit = 1 << v
            wv = vecs[v]
            pos = nice.nodes[nd.children[0]].bag.index(v)
            for (labels, info), prof in tables[nd.children[0]].items():
                e = labels[pos]
                rest = labels[:pos] + labels[pos + 1:]
                if e is None:
                    new_labels, new_info, perm = _canon(rest, info)
                    _absorb(out, (new_labels, new_info), _permute(prof, perm, len(info)))
                    continue
                d, c = e[0], e[1]
                if strong:
                    if e[3] != 1:
                        continue
                    if e[2] == 0:
                        info = info[:d] + (True,) + info[d + 1:]
                if any(x is not None and x[0] == d and x[1] == c for x in rest):
                    grown = {}
                    for key, (z0, cl, masks) in prof.items():
                        key2 = key[:d] + (_add(key[d], wv),) + key[d + 1:]
                        val = (z0, cl, masks[:d] + (masks[d] | bit,) + masks[d + 1:])
                        if _better(val, grown.get(key2)):
                            grown[key2] = val
                    new_labels, new_info, perm = _canon(rest, info)
                    _absorb(out, (new_labels, new_info), _permute(grown, perm, len(info)))
                    continue
                if any(x is not None and x[0] == d for x in rest):
                    continue  # a component of this district would be stranded
                if strong and not info[d]:
                    continue  # closing without a center
                closed = {}
                for key, (z0, cl, masks) in prof.items():
                    full = _add(key[d], wv)
                    if not spec.composition_ok(full[:nf], relaxed=True):
                        continue
                    key2 = key[:d] + key[d + 1:]
                    val = (z0 + full[nf], tuple(sorted(cl + (masks[d] | bit,))),
                           masks[:d] + masks[d + 1:])
                    if _better(val, closed.get(key2)):
                        closed[key2] = val
                if not closed:
                    continue
                info_wo = info[:d] + info[d + 1:]
                rest_relabel = tuple(None if x is None else (x[0] - (x[0] > d),) + x[1:]
                                     for x in rest)
                new_labels, new_info, perm = _canon(rest_relabel, info_wo)
                _absorb(out, (new_labels, new_info), _permute(closed, perm, len(info_wo)))

        elif nd.kind == INTRODUCE_EDGE:
            a, b = (nd.bag.index(x) for x in nd.edge)
            for (labels, info), prof in tables[nd.children[0]].items():
                ea, eb = labels[a], labels[b]
                if ea is None or eb is None or ea[0] != eb[0]:
                    _absorb(out, (labels, info), prof)
                    continue
                merged = labels
                if ea[1] != eb[1]:
                    merged = tuple(x if x is None or x[1] != eb[1] else (x[0], ea[1]) + x[2:]
                                   for x in labels)
                if not strong:
                    new_labels, new_info, _ = _canon(merged, info)
                    _absorb(out, (new_labels, new_info), prof)
                    continue
                ra, rb = ea[2], eb[2]
                if abs(ra - rb) > 1:
                    continue
                variants = {merged}
                if ra == rb + 1:
                    variants.add(merged[:a] + (merged[a][:3] + (1,),) + merged[a + 1:])
                if rb == ra + 1:
                    variants.add(merged[:b] + (merged[b][:3] + (1,),) + merged[b + 1:])
                for lab in variants:
                    new_labels, new_info, _ = _canon(lab, info)
                    _absorb(out, (new_labels, new_info), prof)

        elif nd.kind == JOIN:
            index: dict = {}
            for (labels, info), prof in tables[nd.children[1]].items():
                jkey = tuple(None if x is None else (x[0],) + x[2:3] for x in labels)
                index.setdefault((jkey, len(info)), []).append((labels, info, prof))
            for (l1, i1), p1 in tables[nd.children[0]].items():
                jkey = tuple(None if x is None else (x[0],) + x[2:3] for x in l1)
                for l2, i2, p2 in index.get((jkey, len(i1)), ()):
                    if strong:
                        # a center forgotten on both sides would mean two centers
                        if any(x and y for x, y in zip(i1, i2)):
                            continue
                        info = tuple(x or y for x, y in zip(i1, i2))
                    else:
                        info = tuple(x & y for x, y in zip(i1, i2))
                        if not all(info):
                            continue
                    labels = _join_labels(l1, l2, strong)
                    new_labels, new_info, perm = _canon(labels, info)
                    combined: dict = {}
                    for k1, (z1, c1, m1) in p1.items():
                        for k2, (z2, c2, m2) in p2.items():
                            key = tuple(_add(x, y) for x, y in zip(k1, k2))
                            val = (z1 + z2, tuple(sorted(c1 + c2)),
                                   tuple(x | y for x, y in zip(m1, m2)))
                            if _better(val, combined.get(key)):
                                combined[key] = val
                    _absorb(out, (new_labels, new_info), _permute(combined, perm, len(info)))

        if delta_alg > 0:
            out = {s: _trim_profiles(p, delta_alg) for s, p in out.items()}
        tables[t] = out
        for ch in nd.children:
            tables[ch] = None

    root = tables[nice.root].get(((), ()), {})
    if () not in root:
        return Districting()
    _, closed, _ = root[()]
    districts = []
    for mask in closed:
        vs = [v for v in range(g.n) if mask >> v & 1]
        districts.append(District.make(vs, check_radius(g, vs, k, spec.radius, apsp), wa))
    return Districting.of(districts, wa)


def _join_labels(l1: tuple, l2: tuple, strong: bool) -> tuple:
    """Merge component partitions of two compatible labellings."""
    parent = list(range(len(l1)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for labels in (l1, l2):
        first: dict = {}
        for i, e in enumerate(labels):
            if e is None:
                continue
            j = first.setdefault(e[:2], i)
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    out = []
    for i, e in enumerate(l1):
        if e is None:
            out.append(None)
        elif strong:
            out.append((e[0], find(i), e[2], max(e[3], l2[i][3])))
        else:
            out.append((e[0], find(i)))
    return tuple(out)


def brute_pack(g: Graph, wa: WeightAssignment, spec: ProblemSpec, relaxed: bool = False,
               max_n: int = 12, max_ball: int = 20) -> Districting:
    """Optimal packing by exhaustive search (reference oracle).

    Candidate districts are enumerated exhaustively; the search branches on
    the lowest remaining vertex (leave it uncovered, or cover it with a
    district whose smallest vertex it is) and memoises on the remaining set.
    """
    if g.n > max_n:
        raise ValueError(f"brute_pack is limited to {max_n} vertices")
    cands = enumerate_valid_districts(g, wa, spec, relaxed, max_ball)
    obj = wa.index("objective")
    by_min: list[list[tuple[int, int, District]]] = [[] for _ in range(g.n)]
    for d in cands:
        mask = sum(1 << v for v in d.vertices)
        by_min[d.vertices[0]].append((mask, d.weights[obj], d))

    @lru_cache(maxsize=None)
    def best(mask: int) -> tuple[int, tuple[int, ...]]:
        if mask == 0:
            return 0, ()
        v = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << v)
        top = best(rest)
        for i, (dm, w, _) in enumerate(by_min[v]):
            if dm & ~mask:
                continue
            sub = best(mask & ~dm)
            cand = (sub[0] + w, ((v, i),) + sub[1])
            if cand[0] > top[0]:
                top = cand
        return top

    value, picks = best((1 << g.n) - 1)
    best.cache_clear()
    return Districting(tuple(sorted((by_min[v][i][2] for v, i in picks),
                                    key=lambda d: d.vertices)), value)
