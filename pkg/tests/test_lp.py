import random
from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import linprog

from districtpack.constraints import ProblemSpec, validate_districting
from districtpack.graph import District, Graph, WeightAssignment
from districtpack.lp import (FractionalSolution, correlation_ratio, enumerate_lp,
                             quantization_step, quantize_duals, randomized_round, round_trials,
                             rounding_order, simplex_packing, solve_and_round, solve_lp)

from corpus import instance

TENTH = Fraction(1, 10)
P3 = Graph.from_edges(3, [(0, 1), (1, 2)])
C4 = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
UNIT4 = WeightAssignment.from_columns([2] * 4, [1] * 4, [1] * 4)


def col(vs, w):
    return District(tuple(vs), vs[0], (w,))


def fs_of(cols, xs, n):
    return FractionalSolution(tuple(cols), tuple(xs), n)


def test_simplex_matches_linprog():
    rng = np.random.default_rng(4)
    for _ in range(60):
        m, p = rng.integers(1, 7), rng.integers(1, 12)
        a = (rng.random((m, p)) < 0.4).astype(float)
        # every district covers at least one vertex
        a[rng.integers(0, m, p), np.arange(p)] = 1.0
        c = rng.integers(0, 9, p).astype(float)
        res = simplex_packing(c, a)
        ref = linprog(-c, A_ub=a, b_ub=np.ones(m), bounds=(0, None), method="highs")
        assert res.objective == pytest.approx(-ref.fun, abs=1e-7)
        assert (a @ res.x <= 1 + 1e-9).all() and (res.x >= -1e-12).all()
        # weak duality with the returned duals
        assert res.duals.sum() >= res.objective - 1e-7
        assert (a.T @ res.duals >= c - 1e-7).all()


def test_solve_lp_p3_threshold():
    wa = WeightAssignment.from_columns([1, 2, 4], [1, 2, 4])
    fs, cert = solve_lp(P3, wa, ProblemSpec("threshold", 1, B=3), TENTH)
    assert fs.certified and fs.is_feasible()
    ref = enumerate_lp(P3, wa, ProblemSpec("threshold", 1, B=3))
    assert ref.objective == pytest.approx(7)
    assert fs.objective >= (1 - 0.1) * ref.objective - 1e-6
    for q, y in zip(cert.quantized, cert.y):
        assert q * cert.step >= Fraction(y) - Fraction(1, 10 ** 12)


def test_solve_lp_trivial_cases():
    wa = WeightAssignment.from_columns([1, 2, 4], [1, 2, 4])
    fs, _ = solve_lp(P3, wa, ProblemSpec("threshold", 1, B=100), TENTH)
    assert fs.objective == 0 and fs.columns == () and fs.certified
    one = Graph.from_edges(1, [])
    fs, _ = solve_lp(one, WeightAssignment.from_columns([3], [1], [1]),
                     ProblemSpec("balanced", 1, c=2), TENTH)
    assert fs.objective == pytest.approx(3)
    assert fs.support().x == pytest.approx((1.0,))


def test_enumerate_lp_examples():
    assert enumerate_lp(C4, UNIT4, ProblemSpec("balanced", 1, c=2)).objective == pytest.approx(8)
    two = Graph.from_edges(2, [])
    fs = enumerate_lp(two, WeightAssignment.from_columns([2, 5], [1, 1], [1, 1]),
                      ProblemSpec("balanced", 0, c=2))
    assert fs.objective == pytest.approx(7) and fs.x == pytest.approx((1.0, 1.0))


def test_solve_lp_corpus_against_reference():
    rng = random.Random(31)
    for _ in range(20):
        g, wa, spec = instance(rng, n_max=9)
        fs, _ = solve_lp(g, wa, spec, TENTH)
        ref = enumerate_lp(g, wa, spec)
        assert fs.is_feasible()
        if fs.certified:
            assert fs.objective >= 0.9 * ref.objective - 1e-6
        assert fs.objective <= ref.objective + 1e-6


def test_quantization():
    wa = WeightAssignment.from_columns([0, 2, 4])
    step = quantization_step(wa, TENTH)
    assert step == Fraction(1, 10) * 2 / 12
    assert quantize_duals([0.0, 0.125, 0.5, 1e-9], step) == (0, 8, 30, 1)
    assert quantization_step(WeightAssignment.from_columns([0, 0]), TENTH) is None


def test_rounding_examples():
    one = fs_of([col([0], 3)], [1.0], 1)
    assert randomized_round(one, 0).objective == 3
    two = fs_of([col([0], 2), col([1], 3)], [1.0, 1.0], 2)
    for seed in range(5):
        assert randomized_round(two, seed).objective == 5
    assert rounding_order(fs_of([col([0], 1), col([1], 3), col([2], 3)], [1, 1, 1], 3)) == [1, 2, 0]
    assert randomized_round(fs_of((), (), 2), 0).objective == 0


def test_rounding_frequency_single_column():
    fs = fs_of([col([0], 1)], [0.5], 1)
    hits = np.mean([t[0] for t in round_trials(fs, 7, 20000)])
    assert hits == pytest.approx(0.5, abs=0.02)


def test_rounding_is_thread_independent():
    fs = fs_of([col([0, 1], 4), col([1, 2], 4), col([2], 1)], [0.5, 0.5, 0.5], 3)
    assert round_trials(fs, 3, 101, threads=1) == round_trials(fs, 3, 101, threads=4)


def test_correlation_examples():
    assert correlation_ratio(fs_of([col([0], 1), col([1], 1)], [1, 1], 2)) == 0
    assert correlation_ratio(fs_of([col([0, 1], 1), col([1, 2], 1)], [0.5, 0.5], 3)) == pytest.approx(0.5)
    assert correlation_ratio(fs_of([col([0], 1)], [1.0], 1)) == 0


def test_solve_and_round_c4():
    spec = ProblemSpec("balanced", 1, c=2)
    rep = solve_and_round(C4, UNIT4, spec, TENTH, seed=0, repeats=50)
    assert rep.lp_value == pytest.approx(8, abs=0.8)
    assert 0 < rep.integer_value <= rep.lp_value + 1e-9
    assert validate_districting(C4, UNIT4, spec, rep.districting.districts).ok


def test_solve_and_round_infeasible():
    wa = WeightAssignment.from_columns([1, 2, 4], [1, 2, 4])
    rep = solve_and_round(P3, wa, ProblemSpec("threshold", 1, B=100), TENTH)
    assert rep.integer_value == 0 and len(rep.districting) == 0
