import itertools
from fractions import Fraction

import numpy as np
import pytest

from meandim.covering import Cover
from meandim.nerve import (build_cover_for_scale, mdim_profile, nerve_of, variation, widim_pair,
                           widim_upper)
from meandim.spaces import FiniteSystem

from corpus import corpus, line_system, random_metric_system

POINT = FiniteSystem((0,), np.zeros((1, 1)), [0])
COL = line_system([0, 0.6, 1.2])


def test_cover_for_scale():
    assert build_cover_for_scale(COL, None, 2.0).sets == ((0, 1, 2),)
    assert build_cover_for_scale(COL, None, 0.7).sets == ((0, 1), (1, 2))
    balls = build_cover_for_scale(COL, None, 0.7, "balls")
    assert all(dm < 0.7 for dm in balls.diameters)


def test_nerve_examples():
    n = nerve_of(build_cover_for_scale(COL, None, 0.7), 3)
    assert n.edges() == [(0, 1)]
    assert n.small_local_dim().tolist() == [0, 1, 0]
    assert n.local_dim().tolist() == [1, 1, 1]
    disjoint = nerve_of(Cover.from_sets([(0,), (1, 2)], COL.dist), 3)
    assert disjoint.edges() == []


def test_nerve_simplexes_have_common_points():
    for seed in range(10):
        sys = random_metric_system(8, seed)
        cov = build_cover_for_scale(sys, None, 0.5)
        nv = nerve_of(cov, sys.n)
        for face in nv.simplexes():
            common = set.intersection(*(set(cov.sets[k]) for k in face))
            assert common
        # every family with a common point is a simplex
        for k in range(2, 4):
            for face in itertools.combinations(range(len(cov)), k):
                if set.intersection(*(set(cov.sets[j]) for j in face)):
                    assert nv.is_simplex(face)


def test_widim_examples():
    phi = np.array([0.2, -1.0, 0.5])
    assert widim_upper(COL, None, phi, 2.0).value == 0.5
    assert widim_upper(COL, None, None, 0.7).value == 0.0
    assert widim_upper(POINT, None, [0.3], 0.5).value == pytest.approx(0.3)


def test_variation_examples():
    sys = line_system([0, 0.5, 1])
    assert variation(np.zeros(3), sys.dist, 0.6) == 0
    assert variation(np.array([0.0, 1.0, 0.0]), sys.dist, 0.6) == 1
    assert variation(np.array([0.0, 1.0, 0.0]), sys.dist, 0.5) == 0


@pytest.mark.parametrize("name,sys,phi", corpus(10), ids=lambda v: v if isinstance(v, str) else "")
def test_small_standard_lemma(name, sys, phi):
    fphi = [Fraction(v).limit_denominator(1000) for v in phi]
    vals = np.array([float(v) for v in fphi])
    for frac in (0.2, 0.5, 0.9):
        eps = sys.dist.max() * frac + 1e-3
        pair = widim_pair(sys.dist, vals, eps)
        small, std = Fraction(pair["small"]), Fraction(pair["standard"])
        var = Fraction(pair["var"])
        assert small <= std <= small + var
        assert pair["small"] >= vals.max()
    assert widim_upper(None, sys.dist, vals, 1e-6).value == vals.max()


def test_profile_running_minimum():
    sys = FiniteSystem.cycle(4)
    rows = mdim_profile(sys, np.array([0.0, 1.0, 0.0, 0.5]), [0.5, 2.0], N_max=3)
    for e in (0.5, 2.0):
        rs = sorted((r for r in rows if r["eps"] == e), key=lambda r: r["N"])
        assert [r["inf_small"] for r in rs] == sorted([r["inf_small"] for r in rs], reverse=True)
        assert all(r["small"] <= r["standard"] + 1e-12 for r in rs)
