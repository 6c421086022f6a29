"""Packing connected, radius-bounded districts under composition constraints."""

from .baker import baker_solve, compute_period
from .constraints import (ConfigError, ProblemSpec, enumerate_valid_districts, is_balanced,
                          meets_threshold, validate_districting)
from .graph import District, Districting, Graph, WeightAssignment
from .lp import (FractionalSolution, correlation_ratio, enumerate_lp, randomized_round,
                 solve_and_round, solve_lp)
from .packing_dp import brute_pack, pack_districts_bounded_tw
from .subgraph_sum import separation_oracle, trim, trimmed_connected_subgraph_sum
from .treedecomp import build_decomposition, make_nice

__all__ = [
    "ConfigError", "District", "Districting", "FractionalSolution", "Graph", "ProblemSpec",
    "WeightAssignment", "baker_solve", "brute_pack", "build_decomposition", "compute_period",
    "correlation_ratio", "enumerate_lp", "enumerate_valid_districts", "is_balanced",
    "make_nice", "meets_threshold", "pack_districts_bounded_tw", "randomized_round",
    "separation_oracle", "solve_and_round", "solve_lp", "trim",
    "trimmed_connected_subgraph_sum", "validate_districting",
]
