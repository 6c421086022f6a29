"""
Packing LP by column generation, then randomized rounding
=========================================================
"""

from fractions import Fraction

import numpy as np

from districtpack.instances import gen_random_planar
from districtpack.lp import correlation_ratio, enumerate_lp, round_trials, solve_lp

inst = gen_random_planar(10, seed=5)
g, wa, spec = inst.graph, inst.weights, inst.spec
print(g.n, "vertices,", g.m, "edges,", spec)

fs, cert = solve_lp(g, wa, spec, Fraction(1, 10))
ref = enumerate_lp(g, wa, spec)
print("column generation:", round(fs.objective, 4), "certified" if fs.certified else "not certified",
      "after", fs.iterations, "oracle calls")
print("every district enumerated:", round(ref.objective, 4))
print("dual bound:", round(cert.objective, 4))

fs = fs.support()
for d, x in zip(fs.columns, fs.x):
    print(f"  x={x:.3f}  w={d.weights[0]}  {d.vertices}")

# %%
# Rounding: keep each column with probability x if it is still disjoint
tau = correlation_ratio(fs)
values = np.array([t[0] for t in round_trials(fs, seed=0, repeats=5000)])
print("correlation ratio:", round(tau, 3))
print("mean rounded objective:", values.mean().round(3),
      "vs LP / (2 max(tau, 1)) =", round(fs.objective / (2 * max(tau, 1.0)), 3))
print("best of 5000:", values.max())
