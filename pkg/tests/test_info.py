import math

import numpy as np
import pytest

from meandim.errors import InsufficientGridError
from meandim.info import (BA_TOL, Channel, RDCurve, binary_entropy, blahut_arimoto,
                          block_distortion, conditional_entropy, entropy, kl_divergence,
                          lemma_kl_bound_check, mutual_information, property_checks,
                          rate_distortion, rd_curve, rdim_estimate)
from meandim.spaces import FiniteSystem, SymbolicModel, average_metric, build_symbolic

from corpus import line_system, random_metric_system

HAMMING = np.array([[0.0, 1.0], [1.0, 0.0]])


def test_mutual_information_examples():
    p, q = np.array([0.2, 0.8]), np.array([0.5, 0.3, 0.2])
    assert mutual_information(np.outer(p, q)) == pytest.approx(0.0, abs=1e-15)
    assert mutual_information(np.eye(4) / 4) == pytest.approx(2.0)
    j = np.array([[1 / 3, 1 / 3], [0, 1 / 3]])
    px, py = j.sum(1), j.sum(0)
    direct = sum(j[a, b] * math.log2(j[a, b] / (px[a] * py[b]))
                 for a in range(2) for b in range(2) if j[a, b] > 0)
    assert mutual_information(j) == pytest.approx(direct, abs=1e-15)
    assert mutual_information(j) == pytest.approx(entropy(px) - conditional_entropy(j))


def test_kl_examples():
    assert kl_divergence([0.3, 0.7], [0.3, 0.7]) == 0
    assert kl_divergence([1, 0], [0.5, 0.5]) == pytest.approx(1.0)
    with pytest.raises(Exception):
        kl_divergence([0.5, 0.5], [1, 0])


def test_kl_bound_examples():
    c = lemma_kl_bound_check([0.5, 0.5], [1, 1], 0.5)
    assert c.lhs == pytest.approx(2.0) and c.rhs == pytest.approx(2.0) and c.ok
    c = lemma_kl_bound_check([1, 0], [0, 0], 0.5)
    assert c.lhs == 0 and c.rhs == pytest.approx(1.0)


def test_kl_bound_equality_at_gibbs():
    rng = np.random.default_rng(1)
    for _ in range(50):
        a = rng.uniform(-2, 3, rng.integers(1, 8))
        eps = rng.uniform(0.01, 0.9)
        w = (1 / eps) ** a
        c = lemma_kl_bound_check(w / w.sum(), a, eps)
        assert abs(c.lhs - c.rhs) <= 1e-9


def test_channel_validation():
    with pytest.raises(ValueError):
        Channel(np.array([[0.5, 0.6]]))
    ch = Channel(np.array([[1.0, 0.0], [0.25, 0.75]]))
    assert ch.joint([0.5, 0.5]).sum() == pytest.approx(1.0)


@pytest.mark.parametrize("D", [0.05, 0.11, 0.25, 0.45])
def test_binary_closed_form(D):
    curve = rd_curve(HAMMING, [0.5, 0.5], [D])
    assert curve.rows[0]["rate"] == pytest.approx(1 - binary_entropy(D), abs=1e-3)


def test_zero_rate_above_max_distortion():
    curve = rd_curve(HAMMING, [0.5, 0.5], [0.6, 1.0])
    assert curve.rates.tolist() == [0.0, 0.0]


def test_ba_lagrangian_monotone_and_gap():
    rng = np.random.default_rng(7)
    for _ in range(30):
        n, m = rng.integers(2, 7, size=2)
        rho = rng.uniform(0, 1, (n, m))
        px = rng.dirichlet(np.ones(n))
        res = blahut_arimoto(rho, px, float(rng.uniform(0.5, 30)))
        lag = np.array(res.lagrangian)
        assert np.all(np.diff(lag) <= 1e-12)
        assert res.converged and res.gaps[-1] <= BA_TOL
        assert np.allclose(res.channel.sum(axis=1), 1)


def test_rate_tends_to_entropy():
    sys = line_system([0.0, 0.3, 0.5, 0.9])
    mu = np.array([0.1, 0.2, 0.3, 0.4])
    eps = [1e-7, 1e-5, 1e-3, 1e-2]
    rates = rate_distortion(sys, mu, 1, eps, codebook="full").rates
    assert np.all(np.diff(rates) <= 1e-12)
    assert rates[0] <= entropy(mu) + 1e-9
    assert rates[0] == pytest.approx(entropy(mu), abs=1e-3)


def test_block_distortion_orbit_and_full():
    sys = random_metric_system(5, 1)
    np.testing.assert_allclose(block_distortion(sys, 2, "orbit"), average_metric(sys, 2))
    full = block_distortion(sys, 2, "full")
    assert full.shape == (5, 25)
    # the orbit words are among the full codebook words
    for x in range(5):
        w = x * 5 + sys.time_map[x]
        assert full[x, w] == 0.0


def test_rate_nonincreasing_and_block_rates():
    sys = build_symbolic(SymbolicModel((0.0, 1.0), 3, 6))
    mu = np.full(sys.n, 1 / sys.n)
    for N in (1, 2, 3):
        r = rate_distortion(sys, mu, N, [0.05, 0.2, 0.6, 1.5])
        assert np.all(np.diff(r.rates) <= 1e-12)
        assert r.rates[0] <= math.log2(sys.n) / N + 1e-9


def test_rdim_estimate():
    with pytest.raises(InsufficientGridError):
        rdim_estimate(RDCurve([{"eps": 0.5, "rate": 0.0}, {"eps": 0.25, "rate": 0.0}]))
    zero = RDCurve([{"eps": e, "rate": 0.0} for e in (0.5, 0.25, 0.125)])
    est = rdim_estimate(zero)
    assert est.upper == est.lower == 0 and est.fit_slope == pytest.approx(0)


def test_rdim_uniform_grid_is_near_one():
    m = 32
    vals = np.arange(m) / (m - 1)
    rho = np.abs(vals[:, None] - vals[None, :])
    eps = np.geomspace(1.5 / m, 0.09, 6)
    est = rdim_estimate(rd_curve(rho, np.full(m, 1 / m), eps))
    assert 0.8 <= est.fit_slope <= 1.1


def test_property_checks_clean():
    rep = property_checks(seed=3, n_instances=100)
    assert set(rep) >= {"data_processing", "subadditivity", "concavity_in_source",
                        "convexity_in_channel"}
    assert all(v["violations"] == 0 for v in rep.values())


def test_identity_channel_dpi_equality():
    j = np.diag([0.2, 0.3, 0.5])
    assert mutual_information(j) == pytest.approx(entropy([0.2, 0.3, 0.5]))


def test_single_point_system_rate_zero():
    sys = FiniteSystem.cycle(1)
    assert rate_distortion(sys, [1.0], 1, [0.1]).rates[0] == 0.0
