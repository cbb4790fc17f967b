import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from meandim import setcover
from meandim.covering import (Cover, covering_number, mdim_M_estimate, pressure_profile,
                              symbolic_covering_bound, tame_growth_report, tame_metric_transform)
from meandim.errors import BudgetExceededError, InsufficientGridError
from meandim.spaces import (FiniteSystem, Potential, SymbolicModel, birkhoff_sum, bowen_metric,
                            build_symbolic)

from corpus import corpus, line_system, random_metric_system
from oracles import brute_covering_number, min_cover_dp


POINT = FiniteSystem((0,), np.zeros((1, 1)), [0])


def test_single_set_when_eps_exceeds_diameter():
    sys = random_metric_system(6, 0)
    res = covering_number(sys, eps=sys.dist.max() + 0.01)
    assert res.value == 1.0
    assert len(res.cover) == 1


def test_collinear_examples():
    sys = line_system([0, 0.5, 1])
    res = covering_number(sys, eps=0.6)
    assert res.value == 2.0
    assert sorted(res.cover.sets) == [(0, 1), (1, 2)]
    res = covering_number(sys, phi=np.array([0.0, 1.0, 0.0]), eps=0.5)
    assert res.value == 4.0


def test_strict_diameter_excludes_ties():
    sys = line_system([0, 0.5])
    assert covering_number(sys, eps=0.5).value == 2.0
    assert covering_number(sys, eps=0.5000001).value == 1.0


def test_cover_metadata():
    d = line_system([0, 0.2, 0.7]).dist
    cov = Cover.from_sets([(0, 1), (2,)], d, np.array([1.0, 3.0, 2.0]))
    assert cov.diameters == (pytest.approx(0.2), 0.0)
    assert cov.sups == (3.0, 2.0)
    assert cov.covers(3)
    assert cov.carriers(3) == [(0,), (0,), (1,)]


@pytest.mark.parametrize("name,sys,phi", corpus(8), ids=lambda v: v if isinstance(v, str) else "")
def test_exact_matches_brute_force(name, sys, phi):
    diam = sys.dist.max()
    for frac in (0.15, 0.4, 0.7, 1.05):
        eps = max(diam * frac, 0.05)
        got = covering_number(sys, phi=phi, eps=eps)
        want = brute_covering_number(sys.dist, phi, eps)
        assert got.value == pytest.approx(want, rel=1e-12)
        assert got.cover.covers(sys.n)
        assert all(dm < eps for dm in got.cover.diameters)
        assert got.value == pytest.approx(sum((1 / eps) ** s for s in got.cover.sups), rel=1e-12)


@pytest.mark.parametrize("name,sys,phi", corpus(12), ids=lambda v: v if isinstance(v, str) else "")
def test_greedy_within_log_factor(name, sys, phi):
    for frac in (0.3, 0.6):
        eps = sys.dist.max() * frac + 1e-3
        ex = covering_number(sys, phi=phi, eps=eps, mode="exact").value
        gr = covering_number(sys, phi=phi, eps=eps, mode="greedy").value
        assert ex <= gr * (1 + 1e-12)
        assert gr <= ex * (1 + math.log(sys.n)) + 1e-9


def test_exact_budget():
    sys = random_metric_system(25, 0)
    with pytest.raises(BudgetExceededError):
        covering_number(sys, eps=0.3, mode="exact")
    assert covering_number(sys, eps=0.3, mode="greedy").value >= 1


def test_floor_and_monotonicity():
    sys = random_metric_system(9, 4)
    phi = np.random.default_rng(2).uniform(-1, 2, 9)
    prev = math.inf
    for eps in (0.05, 0.1, 0.2, 0.4, 0.8):
        v = covering_number(sys, phi=phi, eps=eps).value
        assert v >= (1 / eps) ** phi.max() * (1 - 1e-12)
        assert v <= prev * (1 + 1e-12) or phi.max() < 0
        prev = v


def test_monotone_in_eps_for_nonnegative_phi():
    sys = random_metric_system(8, 9)
    prev = math.inf
    for eps in np.linspace(0.05, 1.0, 12):
        v = covering_number(sys, eps=float(eps)).value
        assert v <= prev
        prev = v


def test_setcover_exact_against_dp():
    rng = np.random.default_rng(5)
    for _ in range(60):
        n = int(rng.integers(1, 9))
        k = int(rng.integers(1, 12))
        sets = [tuple(sorted(set(rng.integers(0, n, rng.integers(1, n + 1)).tolist())))
                for _ in range(k)]
        sets += [(i,) for i in range(n)]
        costs = rng.uniform(0.1, 5, len(sets)).tolist()
        masks = [setcover.to_mask(s) for s in sets]
        val, chosen = setcover.exact_cover(n, masks, costs)
        assert val == pytest.approx(min_cover_dp(n, sets, costs), rel=1e-12)
        assert set().union(*[sets[c] for c in chosen]) == set(range(n))
        gval, _ = setcover.greedy_cover(n, masks, costs)
        assert val <= gval + 1e-12


def test_mask_round_trip():
    assert setcover.from_mask(setcover.to_mask((0, 3, 5))) == (0, 3, 5)


def test_one_point_profile():
    c = 0.7
    prof = pressure_profile(POINT, Potential(np.array([c])), [0.5, 0.25, 0.125], 3)
    for r in prof.rows:
        assert r["log_cov"] == pytest.approx(r["N"] * c * math.log2(1 / r["eps"]))
        assert r["rate"] == pytest.approx(c * math.log2(1 / r["eps"]))
    est = mdim_M_estimate(prof)
    assert est.upper == pytest.approx(c) and est.lower == pytest.approx(c)
    assert est.fit_slope == pytest.approx(c)


def test_insufficient_grid():
    prof = pressure_profile(POINT, None, [0.5, 0.25], 1)
    with pytest.raises(InsufficientGridError):
        mdim_M_estimate(prof)


def test_subadditivity_in_N():
    sys = random_metric_system(8, 21)
    phi = Potential(np.random.default_rng(1).uniform(0, 1, 8))
    for eps in (0.2, 0.5):
        logs = {N: covering_number(None, bowen_metric(sys, N), birkhoff_sum(sys, phi, N), eps).log2_value
                for N in range(1, 5)}
        for N in range(1, 3):
            for M in range(1, 3):
                assert logs[N + M] <= logs[N] + logs[M] + 1e-9


def test_two_shift_entropy():
    sys = build_symbolic(SymbolicModel((0.0, 1.0), 6, 8))
    eps = sys.dist[sys.dist > 0].min() / 2
    prof = pressure_profile(sys, None, [eps], 6, mode="greedy")
    assert 0.9 <= prof.pressure_upper(eps) <= 1.1


def test_tame_transform():
    np.testing.assert_array_equal(tame_metric_transform(POINT).dist, [[0.0]])
    two = FiniteSystem((0, 1), np.array([[0, 1.0], [1.0, 0]]), [1, 0])
    # anchors 0 and 1: 1/2 |0 - 1| + 1/4 |1 - 0|
    assert tame_metric_transform(two).dist[0, 1] == pytest.approx(0.75)
    for seed in range(5):
        sys = random_metric_system(10, seed)
        t = tame_metric_transform(sys)
        assert np.all(t.dist <= sys.dist + 1e-15)
        assert t.triangle_defect() <= 1e-12


def test_tame_growth_report():
    rows = tame_growth_report(POINT, [0.5], [0.5, 0.1])
    assert all(r["value"] == 0 for r in rows)
    grid = line_system(np.linspace(0, 1, 16))
    rows = tame_growth_report(grid, [0.5, 1.0], [0.5, 0.25, 0.125])
    assert all(r["value"] >= 0 for r in rows)
    for d in (0.5, 1.0):
        vals = [r["value"] for r in rows if r["delta"] == d]
        assert vals == sorted(vals, reverse=True) or d == 0.5


def test_symbolic_bound_is_an_upper_bound_and_exact_when_forced():
    model = SymbolicModel.uniform_grid(3, 2, 4)
    sys = build_symbolic(model)
    phi = Potential.coordinate(sys)
    for eps in (0.3, 0.6, 1.2):
        for N in (1, 2):
            bits, _ = symbolic_covering_bound(model, eps, N)
            exact = covering_number(None, bowen_metric(sys, N), birkhoff_sum(sys, phi, N), eps).log2_value
            assert bits >= exact - 1e-9
    eps = sys.dist[sys.dist > 0].min() * 0.99
    bits, runs = symbolic_covering_bound(model, eps, 2)
    exact = covering_number(None, bowen_metric(sys, 2), birkhoff_sum(sys, phi, 2), eps).log2_value
    assert bits == pytest.approx(exact, abs=1e-9)
    assert list(runs) == [1, 1]


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 7), st.integers(0, 1000), st.floats(0.05, 1.2))
def test_exact_property(n, seed, eps):
    sys = random_metric_system(n, seed)
    phi = np.random.default_rng(seed).uniform(-0.5, 1.5, n)
    got = covering_number(sys, phi=phi, eps=eps).value
    assert got == pytest.approx(brute_covering_number(sys.dist, phi, eps), rel=1e-12)
