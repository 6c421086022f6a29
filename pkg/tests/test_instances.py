import itertools
import warnings

import pytest

from districtpack.graph import Graph, is_connected_subset
from districtpack.instances import (find_diameter_district, gen_clique_reduction, gen_grid,
                                    gen_is_reduction, gen_knapsack_tree, gen_random_planar,
                                    gen_random_tree, independence_number, knapsack_min_weight,
                                    knapsack_tree_optimum)
from districtpack.io import (SchemaError, instance_from_json, instance_to_json, spec_from_json,
                             spec_to_json)
from districtpack.packing_dp import brute_pack

K4 = Graph.from_edges(4, list(itertools.combinations(range(4), 2)))


def test_grid_shapes():
    g = gen_grid(2, 3).graph
    assert (g.n, g.m) == (6, 7)
    assert gen_grid(1, 1).graph.n == 1
    inst = gen_grid(2, 2)
    assert brute_pack(inst.graph, inst.weights, inst.spec).objective == 8
    with pytest.raises(ValueError):
        gen_grid(0, 2)


def test_random_generators_deterministic():
    t = gen_random_tree(5, 3)
    assert t.graph.m == 4 and is_connected_subset(t.graph, range(5))
    assert gen_random_tree(5, 3) == t
    p = gen_random_planar(12, 7)
    assert p == gen_random_planar(12, 7)
    assert is_connected_subset(p.graph, range(12))
    assert p.graph.m <= 3 * 12 - 6


def test_knapsack_structure():
    inst = gen_knapsack_tree([(2, 1), (3, 2)], 4)
    assert inst.graph.n == 8 and inst.graph.m == 7
    assert brute_pack(inst.graph, inst.weights, inst.spec).objective == \
        knapsack_tree_optimum([(2, 1), (3, 2)], 4)
    assert knapsack_min_weight([(2, 1), (3, 2)], 4) == 3
    assert knapsack_min_weight([(1, 1)], 5) == float("inf")


def test_is_reduction_k4():
    inst = gen_is_reduction(K4, 1)
    assert independence_number(K4) == 1
    assert brute_pack(inst.graph, inst.weights, inst.spec).objective == 4
    assert list(range(4)) == [v for v in range(4) if inst.graph.degree(v) == 3]


def test_is_reduction_warns_on_low_degree():
    with pytest.warns(UserWarning):
        gen_is_reduction(Graph.from_edges(2, []), 1)
    c5 = Graph.from_edges(5, [(i, (i + 1) % 5) for i in range(5)])
    with pytest.warns(UserWarning):
        inst = gen_is_reduction(c5, 1)
    assert inst.graph.n > 5
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        gen_is_reduction(K4, 2)


def test_independence_number_examples():
    c5 = Graph.from_edges(5, [(i, (i + 1) % 5) for i in range(5)])
    assert independence_number(c5) == 2
    assert independence_number(Graph.from_edges(3, [])) == 3


def test_clique_reduction_fixtures():
    tri = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
    inst = gen_clique_reduction(tri, 3, 2)
    found = find_diameter_district(inst.graph, inst.weights, 3, 2)
    assert found is not None and set(range(3)) <= set(found)
    path = Graph.from_edges(3, [(0, 1), (1, 2)])
    inst = gen_clique_reduction(path, 3, 2)
    assert find_diameter_district(inst.graph, inst.weights, 3, 2) is None
    with pytest.raises(ValueError):
        gen_clique_reduction(tri, 3, 1)


def test_instance_json_round_trip():
    for inst in (gen_grid(2, 3, "random", seed=4), gen_knapsack_tree([(1, 2)], 2),
                 gen_random_planar(9, 2)):
        back = instance_from_json(instance_to_json(inst))
        assert back == inst
        assert spec_from_json(spec_to_json(inst.spec)) == inst.spec


def test_instance_json_defaults_and_errors():
    data = {"v": 1, "n": 2, "edges": [[0, 1]], "weights": {"w1": [1, 2], "w2": [3, 0]},
            "spec": {"mode": "balanced", "k": 1, "radius": "strong", "c": [2, 1]}}
    inst = instance_from_json(data)
    assert inst.weights.column("objective") == (4, 2)
    with pytest.raises(SchemaError):
        instance_from_json({**data, "v": 2})
    with pytest.raises(SchemaError):
        instance_from_json({**data, "weights": {"w1": [1]}})
    with pytest.raises(SchemaError):
        instance_from_json({k: v for k, v in data.items() if k != "spec"})
