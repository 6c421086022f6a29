"""
Relaxed packing on bounded treewidth graphs and by layer shifting
=================================================================
"""

import time
from fractions import Fraction

from districtpack.instances import gen_grid, gen_random_planar
from districtpack.baker import baker_shifts, compute_period
from districtpack.packing_dp import brute_pack, pack_districts_bounded_tw
from districtpack.treedecomp import build_decomposition, make_nice

grid = gen_grid(3, 4, "random", seed=2)
spec = grid.spec.replace(delta=Fraction(1, 10))
td = build_decomposition(grid.graph)
print("min-fill width:", td.width, "nice nodes:", len(make_nice(td, grid.graph)))

for eps in (Fraction(1, 2), Fraction(1, 10)):
    start = time.perf_counter()
    plan = pack_districts_bounded_tw(grid.graph, grid.weights, spec, eps)
    print(f"eps={eps}: objective {plan.objective} in {time.perf_counter() - start:.2f}s")
print("exact optimum (no slack):", brute_pack(grid.graph, grid.weights, spec.replace(delta=0)).objective)
print("relaxed optimum:", brute_pack(grid.graph, grid.weights, spec, relaxed=True).objective)

# %%
# Shifting: delete every t-th BFS layer, solve the pieces, keep the best shift
print("period for k=1, eps=1/2:", compute_period(1, Fraction(1, 2)))
inst = gen_random_planar(12, seed=9)
spec = inst.spec.replace(delta=Fraction(1, 10))
for shift, plan in baker_shifts(inst.graph, inst.weights, spec, Fraction(1, 2)):
    print(f"  shift {shift.shift}: deletes {len(shift.deleted)} vertices, objective {plan.objective}")
print("exact optimum:", brute_pack(inst.graph, inst.weights, spec.replace(delta=0)).objective)
