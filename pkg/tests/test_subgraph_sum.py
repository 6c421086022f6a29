import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from districtpack.constraints import ConfigError, ProblemSpec, enumerate_valid_districts
from districtpack.graph import Graph, WeightAssignment, is_connected_subset
from districtpack.subgraph_sum import (brute_subgraph_weights, oracle_trim_eps, score,
                                       separation_oracle, trim, trimmed_connected_subgraph_sum)

from corpus import random_connected, random_weights

P3 = Graph.from_edges(3, [(0, 1), (1, 2)])
P3_SCALAR = WeightAssignment.from_columns([1, 2, 4])
P3_BAL = WeightAssignment.from_columns([1, 2, 1], [1, 1, 0], [0, 1, 1])


def test_trim_examples():
    assert trim([(10,), (11,)], (1,), 0.1) == [(11,)]
    assert trim([(3, 1), (3, 1), (1, 3)], (1, 1), 0) == [(1, 3), (3, 1)]
    # zero coordinates never share a bucket with positive ones
    assert trim([(0, 5), (1, 5)], (1, 1), 0.5) == [(0, 5), (1, 5)]
    assert trim([(0, 5), (0, 6)], (0, 1), 0.5) == [(0, 6)]


def test_trim_tie_goes_to_smallest_vector():
    assert trim([(11, 10), (10, 11)], (1, 1), 0.2) == [(10, 11)]


@settings(max_examples=80, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 200), st.integers(0, 200)), min_size=1, max_size=25),
       st.tuples(st.integers(-3, 3), st.integers(-3, 3)), st.sampled_from([0.05, 0.1, 0.3, 1.0]))
def test_trim_cover_property(vectors, coeffs, delta):
    kept = trim(vectors, coeffs, delta)
    assert set(kept) <= set(vectors)
    for z in vectors:
        assert any(_approx(z, y, delta) and score(coeffs, y) >= score(coeffs, z) for y in kept)


def _approx(z, y, eps):
    for a, b in zip(z, y):
        if (a == 0) != (b == 0):
            return False
        if a and not (a * math.exp(-eps) - 1e-9 <= b <= a * math.exp(eps) + 1e-9):
            return False
    return True


def test_brute_examples():
    assert brute_subgraph_weights(P3, P3_SCALAR, 1) == {(1,), (2,), (3,), (4,), (6,), (7,)}
    assert brute_subgraph_weights(P3, P3_SCALAR, 1, center=1) == {(2,), (3,), (6,), (7,)}
    assert brute_subgraph_weights(P3, P3_SCALAR, 0) == {(1,), (2,), (4,)}
    one = Graph.from_edges(1, [])
    assert brute_subgraph_weights(one, WeightAssignment.from_columns([5]), 3) == {(5,)}


def test_dp_examples():
    got = trimmed_connected_subgraph_sum(P3, P3_SCALAR, 1, "strong", (1,), 0, 1)
    assert [z for z, _ in got] == [(2,), (3,), (6,), (7,)]
    for z, d in got:
        assert P3_SCALAR.total(d.vertices) == z and 1 in d.vertices
    trimmed = [z for z, _ in trimmed_connected_subgraph_sum(P3, P3_SCALAR, 1, "strong", (1,), 0.3, 1)]
    assert set(trimmed) <= {(2,), (3,), (6,), (7,)} and (7,) in trimmed
    g = Graph.from_edges(3, [(1, 2)])
    assert [z for z, _ in trimmed_connected_subgraph_sum(g, P3_SCALAR, 4, "weak", (1,), 0, 0)] == [(1,)]


def test_dp_witnesses_resum_and_are_compact():
    rng = random.Random(5)
    for _ in range(60):
        n = rng.randint(1, 9)
        g = random_connected(rng, n)
        wa = random_weights(rng, n, 4)
        k = rng.choice([1, 2])
        mode = rng.choice(["strong", "weak"])
        center = rng.randrange(n)
        eps = rng.choice([0, 0.1, 0.3])
        coeffs = tuple(rng.randint(-2, 2) for _ in range(3))
        brute = brute_subgraph_weights(g, wa, k, mode, center)
        out = trimmed_connected_subgraph_sum(g, wa, k, mode, coeffs, eps, center)
        for z, d in out:
            assert wa.total(d.vertices) == z
            assert is_connected_subset(g, d.vertices)
            assert z in brute
        if eps == 0:
            assert {z for z, _ in out} == brute


def test_dp_rejects_bad_arguments():
    with pytest.raises(ValueError):
        trimmed_connected_subgraph_sum(P3, P3_SCALAR, 1, "loose", (1,), 0, 0)
    with pytest.raises(IndexError):
        trimmed_connected_subgraph_sum(P3, P3_SCALAR, 1, "strong", (1,), 0, 5)
    with pytest.raises(ValueError):
        brute_subgraph_weights(Graph.from_edges(15, []), WeightAssignment.from_columns([1] * 15), 1)


def test_oracle_zero_duals_p3():
    spec = ProblemSpec("balanced", 1, c=2)
    res = separation_oracle(P3, P3_BAL.with_column("dual", [0, 0, 0]), spec, Fraction(1, 10))
    assert res.found and res.objective >= 2
    # the whole path is the unique heaviest balanced district
    assert res.objective == 4 and res.district.vertices == (0, 1, 2)
    assert res.margin > 0 and res.to_json()["found"]


def test_oracle_duals_equal_weight_finds_nothing():
    spec = ProblemSpec("balanced", 1, c=2)
    res = separation_oracle(P3, P3_BAL.with_column("dual", [1, 2, 1]), spec, Fraction(1, 10))
    assert not res.found and res.to_json() == {"v": 1, "found": False}


def test_oracle_threshold_too_large():
    wa = WeightAssignment.from_columns([1, 2, 1], [1, 2, 1], dual=[0, 0, 0])
    res = separation_oracle(P3, wa, ProblemSpec("threshold", 1, B=5), Fraction(1, 10))
    assert not res.found
    res = separation_oracle(P3, wa, ProblemSpec("threshold", 1, B=4), Fraction(1, 10))
    assert res.found and res.objective == 4


def test_oracle_config_errors():
    wa = P3_BAL.with_column("dual", [0, 0, 0])
    spec = ProblemSpec("balanced", 1, c=2)
    with pytest.raises(ConfigError):
        separation_oracle(P3, wa, spec, 0)
    with pytest.raises(ConfigError):
        separation_oracle(P3, wa, spec, 1)
    with pytest.raises(ConfigError):
        separation_oracle(P3, wa, ProblemSpec("balanced", 1, c=3), Fraction(1, 2), trim_eps=0.5)
    assert oracle_trim_eps(spec, Fraction(1, 10)) == 0
    assert oracle_trim_eps(ProblemSpec("threshold", 1, B=1), Fraction(8, 10)) == pytest.approx(0.1)


def test_oracle_thread_count_does_not_change_answer():
    rng = random.Random(9)
    for _ in range(10):
        n = rng.randint(3, 9)
        g = random_connected(rng, n)
        wa = random_weights(rng, n).with_column("dual", [rng.randint(0, 3) for _ in range(n)])
        spec = ProblemSpec("balanced", rng.choice([1, 2]), c=3)
        a = separation_oracle(g, wa, spec, Fraction(1, 5), threads=1)
        b = separation_oracle(g, wa, spec, Fraction(1, 5), threads=3)
        assert a == b


def test_oracle_output_is_valid_and_violating():
    rng = random.Random(12)
    eps = Fraction(1, 5)
    for _ in range(40):
        n = rng.randint(1, 8)
        g = random_connected(rng, n)
        wa = random_weights(rng, n)
        duals = [rng.randint(0, 4) for _ in range(n)]
        spec = (ProblemSpec("balanced", rng.choice([1, 2]), rng.choice(["strong", "weak"]), c=3)
                if rng.random() < 0.5 else
                ProblemSpec("threshold", 1, rng.choice(["strong", "weak"]), B=rng.randint(1, 8)))
        res = separation_oracle(g, wa.with_column("dual", duals), spec, eps, dual_scale=Fraction(1, 2))
        valid = {d.vertices for d in enumerate_valid_districts(g, wa, spec)}
        if res.found:
            s = res.district.vertices
            assert s in valid
            assert Fraction(sum(duals[v] for v in s), 2) < (1 - eps / 2) * wa.total(s)[0]
