"""Tree decompositions: greedy min-fill construction, verification, and the
nice form (leaf / introduce vertex / forget vertex / introduce edge / join)
consumed by the dynamic programs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

from .graph import Graph

LEAF = "leaf"
INTRODUCE = "introduce"
FORGET = "forget"
INTRODUCE_EDGE = "introduce_edge"
JOIN = "join"


@dataclass(frozen=True)
class TreeDecomposition:
    bags: tuple[frozenset, ...]
    tree_edges: tuple[tuple[int, int], ...]

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def neighbors(self) -> list[list[int]]:
        nbrs: list[list[int]] = [[] for _ in self.bags]
        for a, b in self.tree_edges:
            nbrs[a].append(b)
            nbrs[b].append(a)
        return nbrs


@dataclass(frozen=True)
class NiceNode:
    kind: str
    bag: tuple[int, ...]
    children: tuple[int, ...]
    vertex: int | None = None
    edge: tuple[int, int] | None = None


@dataclass(frozen=True)
class NiceTreeDecomposition:
    nodes: tuple[NiceNode, ...]
    root: int
    pinned: int | None = None

    @property
    def width(self) -> int:
        return max(len(nd.bag) for nd in self.nodes) - 1

    def __len__(self) -> int:
        return len(self.nodes)

    def postorder(self) -> list[int]:
        """Node ids with children before parents (ids are built that way)."""
        return list(range(len(self.nodes)))

    def forgotten_below(self) -> list[int]:
        """Bitmask per node of vertices forgotten somewhere in its subtree."""
        out = [0] * len(self.nodes)
        for t, nd in enumerate(self.nodes):
            acc = 0
            for c in nd.children:
                acc |= out[c]
            if nd.kind == FORGET:
                acc |= 1 << nd.vertex
            out[t] = acc
        return out

    def to_json(self) -> str:
        return json.dumps({"nodes": [
            {"id": i, "kind": nd.kind, "bag": list(nd.bag), "children": list(nd.children),
             **({"vertex": nd.vertex} if nd.vertex is not None else {}),
             **({"edge": list(nd.edge)} if nd.edge is not None else {})}
            for i, nd in enumerate(self.nodes)], "root": self.root})


def min_fill_order(g: Graph) -> list[int]:
    """Greedy min-fill elimination order (ties: min degree, then min id)."""
    nbrs = [set(a) for a in g.adj]
    alive = set(range(g.n))
    order = []
    while alive:
        best = None
        for v in sorted(alive):
            ns = sorted(nbrs[v])
            fill = sum(1 for i, a in enumerate(ns) for b in ns[i + 1:] if b not in nbrs[a])
            key = (fill, len(ns), v)
            if best is None or key < best:
                best = key
        v = best[2]
        ns = list(nbrs[v])
        for a in ns:
            nbrs[a].update(u for u in ns if u != a)
            nbrs[a].discard(v)
        alive.discard(v)
        order.append(v)
    return order


def decomposition_from_order(g: Graph, order: list[int]) -> TreeDecomposition:
    if g.n == 0:
        return TreeDecomposition((frozenset(),), ())
    pos = {v: i for i, v in enumerate(order)}
    nbrs = [set(a) for a in g.adj]
    bag_of = {}
    parent_vertex = {}
    for v in order:
        later = {u for u in nbrs[v] if pos[u] > pos[v]}
        bag_of[v] = frozenset(later | {v})
        for a in later:
            nbrs[a].update(u for u in later if u != a)
        parent_vertex[v] = min(later, key=pos.__getitem__) if later else None
    # one node per eliminated vertex; roots of separate components get chained
    idx = {v: i for i, v in enumerate(order)}
    bags = [bag_of[v] for v in order]
    edges = []
    roots = []
    for v in order:
        p = parent_vertex[v]
        if p is None:
            roots.append(idx[v])
        else:
            edges.append((idx[v], idx[p]))
    for a, b in zip(roots, roots[1:]):
        edges.append((a, b))
    return _contract_subset_bags(TreeDecomposition(tuple(bags), tuple(edges)))


def _contract_subset_bags(td: TreeDecomposition) -> TreeDecomposition:
    """Merge every bag that is a subset of an adjacent bag into it."""
    bags = list(td.bags)
    nbrs = [set(x) for x in td.neighbors()]
    alive = [True] * len(bags)
    changed = True
    while changed:
        changed = False
        for a in range(len(bags)):
            if not alive[a]:
                continue
            for b in sorted(nbrs[a]):
                if bags[a] <= bags[b]:
                    for c in nbrs[a]:
                        if c != b:
                            nbrs[c].discard(a)
                            nbrs[c].add(b)
                            nbrs[b].add(c)
                    nbrs[b].discard(a)
                    nbrs[a] = set()
                    alive[a] = False
                    changed = True
                    break
    keep = [i for i in range(len(bags)) if alive[i]]
    new_id = {old: i for i, old in enumerate(keep)}
    edges = sorted({(min(new_id[a], new_id[b]), max(new_id[a], new_id[b]))
                    for a in keep for b in nbrs[a]})
    return TreeDecomposition(tuple(bags[i] for i in keep), tuple(edges))


def build_decomposition(g: Graph) -> TreeDecomposition:
    return decomposition_from_order(g, min_fill_order(g))


def verify_decomposition(g: Graph, td: TreeDecomposition) -> bool:
    nb = len(td.bags)
    if nb == 0:
        return g.n == 0
    # tree: connected with nb-1 edges
    if len(td.tree_edges) != nb - 1:
        return False
    nbrs = td.neighbors()
    seen = {0}
    stack = [0]
    while stack:
        a = stack.pop()
        for b in nbrs[a]:
            if b not in seen:
                seen.add(b)
                stack.append(b)
    if len(seen) != nb:
        return False
    covered = set().union(*td.bags)
    if covered != set(range(g.n)):
        return False
    for u, v in g.edges:
        if not any(u in b and v in b for b in td.bags):
            return False
    for v in range(g.n):
        holders = {i for i, b in enumerate(td.bags) if v in b}
        start = next(iter(holders))
        reach = {start}
        stack = [start]
        while stack:
            a = stack.pop()
            for b in nbrs[a]:
                if b in holders and b not in reach:
                    reach.add(b)
                    stack.append(b)
        if reach != holders:
            return False
    return True


def make_nice(td: TreeDecomposition, g: Graph, pinned: int | None = None) -> NiceTreeDecomposition:
    """Binary nice decomposition with an empty root bag.

    Every edge of ``g`` gets one introduce-edge node, placed just below the
    forget node of whichever endpoint is forgotten first. With ``pinned``
    set, that vertex is introduced right above every leaf and forgotten
    right below the root, so it sits in every other bag.
    """
    if pinned is not None and not 0 <= pinned < g.n:
        raise ValueError(f"pinned vertex {pinned} not in graph")
    nodes: list[NiceNode] = []
    introduced_edges: set[tuple[int, int]] = set()

    def add(kind, bag, children=(), vertex=None, edge=None) -> int:
        nodes.append(NiceNode(kind, tuple(sorted(bag)), tuple(children), vertex, edge))
        return len(nodes) - 1

    def forget(t: int, bag: set, v: int) -> tuple[int, set]:
        for u in sorted(bag):
            if u != v and g.has_edge(u, v):
                e = (min(u, v), max(u, v))
                if e not in introduced_edges:
                    introduced_edges.add(e)
                    t = add(INTRODUCE_EDGE, bag, (t,), edge=e)
        bag = bag - {v}
        return add(FORGET, bag, (t,), vertex=v), bag

    def introduce(t: int, bag: set, v: int) -> tuple[int, set]:
        bag = bag | {v}
        return add(INTRODUCE, bag, (t,), vertex=v), bag

    def leaf_chain(target: set) -> int:
        t = add(LEAF, ())
        bag: set = set()
        if pinned is not None:
            t, bag = introduce(t, bag, pinned)
        for v in sorted(target - bag):
            t, bag = introduce(t, bag, v)
        return t

    def transition(t: int, bag: set, target: set) -> int:
        for v in sorted(bag - target):
            t, bag = forget(t, bag, v)
        for v in sorted(target - bag):
            t, bag = introduce(t, bag, v)
        return t

    extra = {pinned} if pinned is not None else set()
    bags = [set(b) | extra for b in td.bags]
    tree_nbrs = td.neighbors()

    # iterative post-order over the (unrooted) tree, rooted at node 0
    parent = {0: None}
    order = [0]
    for a in order:
        for b in tree_nbrs[a]:
            if b not in parent:
                parent[b] = a
                order.append(b)
    children = {a: [b for b in tree_nbrs[a] if parent.get(b) == a] for a in parent}
    top: dict[int, int] = {}
    for a in reversed(order):
        target = bags[a]
        subtrees = [transition(top[c], bags[c], target) for c in sorted(children[a])]
        if not subtrees:
            top[a] = leaf_chain(target)
            continue
        t = subtrees[0]
        for s in subtrees[1:]:
            t = add(JOIN, target, (t, s))
        top[a] = t
    t = top[0]
    bag = bags[0]
    for v in sorted(bag - extra):
        t, bag = forget(t, bag, v)
    if pinned is not None:
        t, bag = forget(t, bag, pinned)
    return NiceTreeDecomposition(tuple(nodes), t, pinned)


def verify_nice(nice: NiceTreeDecomposition, g: Graph) -> bool:
    """Structural check of the nice-form invariants."""
    edges_seen = []
    for nd in nice.nodes:
        kids = [nice.nodes[c] for c in nd.children]
        if nd.kind == LEAF:
            ok = not nd.children and nd.bag == ()
        elif nd.kind == INTRODUCE:
            ok = len(kids) == 1 and nd.vertex not in kids[0].bag and \
                set(nd.bag) == set(kids[0].bag) | {nd.vertex}
        elif nd.kind == FORGET:
            ok = len(kids) == 1 and nd.vertex in kids[0].bag and \
                set(nd.bag) == set(kids[0].bag) - {nd.vertex}
        elif nd.kind == INTRODUCE_EDGE:
            u, v = nd.edge
            ok = len(kids) == 1 and u in nd.bag and v in nd.bag and nd.bag == kids[0].bag
            edges_seen.append(nd.edge)
        elif nd.kind == JOIN:
            ok = len(kids) == 2 and kids[0].bag == kids[1].bag == nd.bag
        else:
            ok = False
        if not ok:
            return False
    if nice.nodes[nice.root].bag != ():
        return False
    return sorted(edges_seen) == sorted(g.edges)


def nice_as_decomposition(nice: NiceTreeDecomposition) -> TreeDecomposition:
    edges = tuple((c, t) for t, nd in enumerate(nice.nodes) for c in nd.children)
    return TreeDecomposition(tuple(frozenset(nd.bag) for nd in nice.nodes), edges)


def exact_treewidth(g: Graph) -> int:
    """Treewidth by dynamic programming over vertex subsets (n <= 10)."""
    if g.n > 10:
        raise ValueError("exact_treewidth is limited to 10 vertices")
    if g.n == 0:
        return -1
    full = (1 << g.n) - 1
    nbr_mask = [sum(1 << u for u in g.adj[v]) for v in range(g.n)]

    def q_size(s: int, v: int) -> int:
        # vertices outside s | {v} reachable from v through s
        seen = 1 << v
        frontier = [v]
        out = 0
        while frontier:
            x = frontier.pop()
            nb = nbr_mask[x] & ~seen
            seen |= nb
            inside = nb & s
            out |= nb & ~s
            while inside:
                low = inside & -inside
                frontier.append(low.bit_length() - 1)
                inside ^= low
        return bin(out).count("1")

    @lru_cache(maxsize=None)
    def tw(s: int) -> int:
        if s == 0:
            return -1
        best = g.n
        rest = s
        while rest:
            low = rest & -rest
            v = low.bit_length() - 1
            rest ^= low
            prev = s ^ low
            best = min(best, max(tw(prev), q_size(prev, v)))
        return best

    return tw(full)
