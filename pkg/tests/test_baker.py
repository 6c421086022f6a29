import random
from fractions import Fraction

import pytest

from districtpack.baker import baker_shifts, baker_solve, compute_period, shift_plan
from districtpack.constraints import ConfigError, ProblemSpec, validate_districting
from districtpack.graph import Graph, WeightAssignment, bfs_layering
from districtpack.instances import gen_grid, gen_random_planar
from districtpack.packing_dp import brute_pack, pack_districts_bounded_tw

HALF, TENTH = Fraction(1, 2), Fraction(1, 10)
SPEC = ProblemSpec("balanced", 1, c=2, delta=TENTH)


def test_period_examples():
    assert compute_period(1, HALF) == 12
    assert compute_period(2, 1) == 10
    assert compute_period(0, 1) == 2
    for bad in (0, -1, 2):
        with pytest.raises(ConfigError):
            compute_period(1, bad)


def test_shift_plan_deletes_one_residue_class():
    path = gen_grid(1, 7).graph
    layers = bfs_layering(path, 0).layer_of
    plan = shift_plan(path, layers, 3, 1)
    assert set(plan.deleted) == {1, 4}
    assert sorted(v for c in plan.components for v in c) == [0, 2, 3, 5, 6]


def test_path5_fixture():
    inst = gen_grid(1, 5)
    assert brute_pack(inst.graph, inst.weights, SPEC.replace(delta=0)).objective == 10
    plan = baker_solve(inst.graph, inst.weights, SPEC, HALF)
    assert plan.objective >= 5
    assert validate_districting(inst.graph, inst.weights, SPEC, plan.districts, relaxed=True).ok


def test_few_layers_matches_whole_graph_dp():
    inst = gen_grid(2, 3)
    whole = pack_districts_bounded_tw(inst.graph, inst.weights, SPEC, HALF / 2)
    assert baker_solve(inst.graph, inst.weights, SPEC, HALF).objective >= whole.objective


def test_single_vertex():
    g = Graph.from_edges(1, [])
    plan = baker_solve(g, WeightAssignment.from_columns([2], [1], [1]), SPEC, HALF)
    assert plan.objective == 2


def test_disconnected_input_handled_per_component():
    g = Graph.from_edges(4, [(0, 1), (2, 3)])
    wa = WeightAssignment.from_columns([2] * 4, [1, 1, 1, 1], [1, 1, 1, 1])
    assert baker_solve(g, wa, SPEC, HALF).objective == 8


def test_shifts_and_threads():
    inst = gen_random_planar(12, 3)
    spec = inst.spec.replace(k=1, delta=TENTH)
    a = baker_shifts(inst.graph, inst.weights, spec, HALF, threads=1)
    b = baker_shifts(inst.graph, inst.weights, spec, HALF, threads=3)
    assert a == b
    assert baker_solve(inst.graph, inst.weights, spec, HALF, threads=1) == \
        baker_solve(inst.graph, inst.weights, spec, HALF, threads=2)


def test_baker_half_ratio_small():
    rng = random.Random(41)
    for _ in range(8):
        inst = gen_random_planar(rng.randint(2, 10), rng.randrange(1000))
        spec = inst.spec.replace(k=1, delta=TENTH)
        plan = baker_solve(inst.graph, inst.weights, spec, HALF)
        exact = brute_pack(inst.graph, inst.weights, spec.replace(delta=0))
        assert plan.objective >= exact.objective / 2
        assert validate_districting(inst.graph, inst.weights, spec, plan.districts, relaxed=True).ok
