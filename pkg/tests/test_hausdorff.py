import numpy as np
import pytest

from meandim.covering import covering_number
from meandim.errors import InvalidQueryError, NonMonotoneContentError
from meandim.hausdorff import (HausdorffQuery, default_grain, dim_at_scale, hausdorff_content,
                               mean_hausdorff_profile)
from meandim.spaces import FiniteSystem, SymbolicModel, build_symbolic

from corpus import corpus, equidistant, line_system, random_metric_system
from oracles import brute_content

POINT = FiniteSystem((0,), np.zeros((1, 1)), [0])


def test_single_point_convention():
    c = 0.4
    assert hausdorff_content(POINT, None, [c], HausdorffQuery(s=c, eps=0.5)) == 1.0
    assert hausdorff_content(POINT, None, [c], HausdorffQuery(s=c + 0.3, eps=0.5)) == 0.0
    assert dim_at_scale(POINT, None, [c], 0.5) == pytest.approx(c)


def test_equidistant_example():
    sys = equidistant(4, 0.5)
    q = HausdorffQuery(s=2.0, eps=0.4, tau=0.5)
    assert hausdorff_content(sys, None, None, q) == pytest.approx(1.0)
    assert dim_at_scale(sys, None, None, 0.4, tau=0.5) == pytest.approx(2.0, abs=1e-5)


def test_two_points_no_grain():
    sys = line_system([0, 0.5])
    assert dim_at_scale(sys, None, None, 0.3) == 0.0


def test_query_validation():
    sys = line_system([0, 0.5])
    with pytest.raises(InvalidQueryError):
        hausdorff_content(sys, None, [1.0, 0.0], HausdorffQuery(s=0.5, eps=0.3))
    with pytest.raises(InvalidQueryError):
        dim_at_scale(sys, None, None, 0.3, tau=1.0)
    with pytest.raises(NonMonotoneContentError):
        dim_at_scale(line_system([0, 1.5]), None, None, 2.0, tau=0.1)


@pytest.mark.parametrize("grain_mode", ["max", "sum"])
@pytest.mark.parametrize("name,sys,phi", [c for c in corpus(7) if c[1].dist.max() < 0.9],
                         ids=lambda v: v if isinstance(v, str) else "")
def test_content_matches_brute_force(name, sys, phi, grain_mode):
    tau = 0.05
    for eps in (0.2, 0.5, 1.0):
        for s in (phi.max(), phi.max() + 0.7, phi.max() + 2.0):
            q = HausdorffQuery(s=float(s), eps=eps, tau=tau)
            got = hausdorff_content(sys, None, phi, q, grain_mode=grain_mode)
            want = brute_content(sys.dist, phi, eps, float(s), tau, grain_mode)
            assert got == pytest.approx(want, rel=1e-12, abs=1e-15)


def test_dim_bounds_on_random_spaces():
    for seed in range(8):
        sys = random_metric_system(7, seed)
        d = sys.dist / (sys.dist.max() * 1.01)
        phi = np.random.default_rng(seed).uniform(0, 1, 7)
        for eps in (0.3, 0.7):
            dim = dim_at_scale(None, d, phi, eps, tau=0.0)
            assert dim >= phi.max() - 1e-12
            # easy half: content at the covering exponent is at most 1
            logcov = covering_number(None, d, phi, eps).log2_value
            assert dim <= logcov / np.log2(1 / eps) + 1e-5


def test_sum_grain_dominates_max_grain():
    for seed in range(5):
        sys = random_metric_system(6, seed)
        d = sys.dist / (sys.dist.max() * 2.5)
        a = dim_at_scale(None, d, None, 0.3, tau=0.05, grain_mode="max")
        b = dim_at_scale(None, d, None, 0.3, tau=0.05, grain_mode="sum")
        assert b >= a - 1e-5


def test_greedy_content_is_upper_bound():
    sys = random_metric_system(8, 3)
    d = sys.dist / sys.dist.max()
    for s in (0.5, 1.0, 2.0):
        q = HausdorffQuery(s=s, eps=0.6, tau=0.1)
        ex = hausdorff_content(None, d, None, q)
        gr = hausdorff_content(None, d, None, q, mode="greedy")
        assert gr >= ex - 1e-12


def test_profile_one_point_and_averaged_metric():
    rows = mean_hausdorff_profile(POINT, [0.3], [0.5, 0.25], N_max=3)
    assert all(r["rate"] == pytest.approx(0.3) for r in rows)
    sys = build_symbolic(SymbolicModel((0.0, 0.5), 3, 4))
    assert default_grain(sys) > 0
    for kind in ("max", "avg"):
        rows = mean_hausdorff_profile(sys, None, [0.5], N_max=2, metric_kind=kind)
        assert all(r["dim"] >= 0 for r in rows)
