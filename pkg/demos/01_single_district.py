"""
Weight vectors of connected districts around one center
=======================================================

Enumerate what a single compact district can weigh, exactly and after
trimming, then ask the separation oracle for a violating district.
"""

from fractions import Fraction

from districtpack import Graph, ProblemSpec, WeightAssignment
from districtpack.subgraph_sum import (brute_subgraph_weights, separation_oracle,
                                       trimmed_connected_subgraph_sum)

# a path 0-1-2 with scalar weights 1, 2, 4
path = Graph.from_edges(3, [(0, 1), (1, 2)])
wa = WeightAssignment.from_columns([1, 2, 4])

# every connected set containing vertex 1 with radius 1 around it
exact = trimmed_connected_subgraph_sum(path, wa, 1, "strong", (1,), 0, center=1)
for z, district in exact:
    print(z, district.vertices)
print("brute force:", sorted(brute_subgraph_weights(path, wa, 1, center=1)))

# with eps = 0.3 nearby sums collapse, the maximum always survives
print("trimmed:", [z for z, _ in trimmed_connected_subgraph_sum(path, wa, 1, "strong", (1,), 0.3, 1)])

# %%
# Oracle on a two-feature instance: w1 = (1,1,0), w2 = (0,1,1)
balanced = WeightAssignment.from_columns([1, 2, 1], [1, 1, 0], [0, 1, 1])
spec = ProblemSpec("balanced", 1, c=2)

res = separation_oracle(path, balanced.with_column("dual", [0, 0, 0]), spec, Fraction(1, 10))
print(res.district.vertices, res.objective, res.margin)

# once the duals pay for every vertex nothing violates any more
res = separation_oracle(path, balanced.with_column("dual", [1, 2, 1]), spec, Fraction(1, 10))
print("found:", res.found)
