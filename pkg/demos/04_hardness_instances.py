"""
Instances from the hardness reductions
======================================

Each generator comes with a closed-form optimum; compare it with
exhaustive search.
"""

import itertools

from districtpack import Graph
from districtpack.instances import (find_diameter_district, gen_clique_reduction,
                                    gen_is_reduction, gen_knapsack_tree, independence_number,
                                    knapsack_tree_optimum)
from districtpack.packing_dp import brute_pack

items = [(2, 1), (3, 2), (1, 1)]
for U in (1, 3, 5, 7):
    inst = gen_knapsack_tree(items, U)
    found = brute_pack(inst.graph, inst.weights, inst.spec).objective
    print(f"knapsack U={U}: closed form {knapsack_tree_optimum(items, U)}, search {found}")

# %%
k4 = Graph.from_edges(4, list(itertools.combinations(range(4), 2)))
star = Graph.from_edges(5, [(0, 1), (0, 2), (0, 3), (3, 4)])
for name, g0 in (("K4", k4), ("star+tail", star)):
    for k in (1, 2):
        inst = gen_is_reduction(g0, k)
        top = max(g0.degree(v) for v in range(g0.n))
        got = brute_pack(inst.graph, inst.weights, inst.spec, max_n=inst.graph.n).objective
        print(f"{name} k={k}: {inst.graph.n} vertices, optimum {got},"
              f" (1 + k*Delta) * alpha = {(1 + k * top) * independence_number(g0)}")

# %%
triangle = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
path = Graph.from_edges(3, [(0, 1), (1, 2)])
for name, g0 in (("triangle", triangle), ("path", path)):
    inst = gen_clique_reduction(g0, 3, 2)
    print(name, "->", find_diameter_district(inst.graph, inst.weights, 3, 2))
