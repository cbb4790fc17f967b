import numpy as np
import pytest

from meandim.measures import (ProbMeasure, empirical_average, frostman_measure,
                              fractional_cover_value, integrate, invariant_average, is_invariant,
                              optimal_coupling, product_measure, pushforward,
                              quantized_top_uniform, wasserstein)
from meandim.spaces import FiniteSystem, Potential, SymbolicModel, build_symbolic

from corpus import corpus, random_metric_system


def test_prob_measure_validation():
    with pytest.raises(ValueError):
        ProbMeasure(np.array([0.5, 0.6]))
    with pytest.raises(ValueError):
        ProbMeasure(np.array([-0.1, 1.1]))
    assert ProbMeasure.point_mass(3, 1).weights.tolist() == [0, 1, 0]


def test_product_uniform():
    model = SymbolicModel((0.0, 1.0), 2, 4)
    mu = product_measure(model, [0.5, 0.5])
    np.testing.assert_allclose(mu.weights, 0.25)
    sys = build_symbolic(model)
    assert is_invariant(sys, mu)


def test_product_weights_multiply():
    model = SymbolicModel((0.0, 1.0), 3, 4)
    sys = build_symbolic(model)
    mu = product_measure(model, [0.2, 0.8])
    for i, c in enumerate(sys.coords):
        ones = sum(1 for v in c if v == 1.0)
        assert mu.weights[i] == pytest.approx(0.8 ** ones * 0.2 ** (3 - ones))


def test_integrate_examples():
    sys = FiniteSystem.cycle(4)
    assert integrate(Potential.constant(4, 0.3), ProbMeasure.uniform(4)) == pytest.approx(0.3)
    phi = np.array([0.1, 0.4, 0.9, 0.2])
    assert integrate(phi, ProbMeasure.point_mass(4, 2)) == pytest.approx(0.9)


@pytest.mark.parametrize("k", [1, 2, 4])
def test_top_uniform_mean_approaches(k):
    prev = None
    for m in (16, 64, 256):
        vals = np.arange(m) / (m - 1)
        w = quantized_top_uniform(vals, k)
        assert w.sum() == pytest.approx(1.0)
        err = abs(float(w @ vals) - (1 - 1 / (2 * k)))
        assert err <= 1 / m
        if prev is not None:
            assert err <= prev + 1e-12
        prev = err


def test_empirical_averages():
    sys = build_symbolic(SymbolicModel((0.0, 1.0), 2, 4))
    x = sys.index("0,1")
    avg = empirical_average(sys, ProbMeasure.point_mass(sys.n, x), 2)
    assert avg.weights[x] == pytest.approx(0.5)
    assert avg.weights[sys.time_map[x]] == pytest.approx(0.5)
    inv = ProbMeasure.uniform(sys.n)
    np.testing.assert_allclose(empirical_average(sys, inv, 3).weights, inv.weights)
    rs = random_metric_system(7, 3)
    nu = ProbMeasure(np.random.default_rng(0).dirichlet(np.ones(7)))
    out = invariant_average(rs, nu)
    assert is_invariant(rs, out)
    np.testing.assert_allclose(pushforward(rs, out).weights, out.weights, atol=1e-12)


def test_measure_json_round_trip():
    sys = FiniteSystem.cycle(3)
    mu = ProbMeasure(np.array([0.2, 0.3, 0.5]))
    import json
    back = ProbMeasure.from_mapping(sys, json.loads(mu.to_json(sys)))
    np.testing.assert_allclose(back.weights, mu.weights)


@pytest.mark.parametrize("name,sys,phi", corpus(10), ids=lambda v: v if isinstance(v, str) else "")
def test_frostman_duality(name, sys, phi):
    d = sys.dist / max(sys.dist.max(), 1e-12)
    for s, delta, tau in ((0.5, 0.6, 0.05), (1.0, 1.1, 0.1), (2.0, 0.4, 0.02)):
        res = frostman_measure(None, d, s, delta, tau)
        assert res.duality_gap <= 1e-9
        assert res.max_violation() <= 1e-9
        assert np.all(res.weights >= -1e-12)
        assert fractional_cover_value(res.constraint_sets, res.bounds, sys.n) == \
            pytest.approx(res.dual_cover_value, abs=1e-12)


def test_frostman_subset_family():
    sys = random_metric_system(6, 2)
    d = sys.dist / sys.dist.max()
    res = frostman_measure(None, d, 1.0, 0.8, 0.1, family="subsets")
    assert res.duality_gap <= 1e-9 and res.max_violation() <= 1e-9


def test_transport_examples():
    c = np.array([[0.0, 1.0], [1.0, 0.0]])
    plan = optimal_coupling([1.0, 0.0], [0.0, 1.0], c)
    assert plan.cost == pytest.approx(1.0) and plan.plan[0, 1] == pytest.approx(1.0)
    sys = random_metric_system(6, 4)
    p = np.random.default_rng(2).dirichlet(np.ones(6))
    same = optimal_coupling(p, p, sys.dist)
    assert same.cost == pytest.approx(0.0, abs=1e-14)
    np.testing.assert_allclose(np.diag(same.plan), p, atol=1e-12)


def test_transport_matches_lp_and_marginals():
    from scipy.optimize import linprog
    rng = np.random.default_rng(11)
    for _ in range(20):
        n, m = rng.integers(1, 7, size=2)
        p, q = rng.dirichlet(np.ones(n)), rng.dirichlet(np.ones(m))
        c = rng.uniform(0, 2, (n, m))
        plan = optimal_coupling(p, q, c)
        np.testing.assert_allclose(plan.plan.sum(1), p, atol=1e-10)
        np.testing.assert_allclose(plan.plan.sum(0), q, atol=1e-10)
        A = np.vstack([np.kron(np.eye(n), np.ones(m)), np.kron(np.ones(n), np.eye(m))])
        lp = linprog(c.ravel(), A_eq=A, b_eq=np.concatenate([p, q]), method="highs")
        assert plan.cost == pytest.approx(lp.fun, abs=1e-9)


def test_transport_sequence_converges():
    sys = random_metric_system(6, 5)
    mu = np.random.default_rng(3).dirichlet(np.ones(6))
    target = np.eye(6)[0]
    costs, offs = [], []
    for k in range(1, 12):
        t = 2.0 ** -k
        mu_n = (1 - t) * mu + t * target
        plan = optimal_coupling(mu_n, mu, sys.dist)
        costs.append(plan.cost)
        offs.append(plan.plan.sum() - np.trace(plan.plan))
    assert all(b <= a + 1e-15 for a, b in zip(costs, costs[1:]))
    assert costs[-1] < 1e-3 and offs[-1] < 1e-3
    assert wasserstein(mu, mu, sys.dist) == pytest.approx(0.0, abs=1e-14)
