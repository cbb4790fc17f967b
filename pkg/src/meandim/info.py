"""Discrete information measures and Blahut-Arimoto rate-distortion curves.

Everything is in bits.  Rates reported by the solvers are mutual informations
of explicit channels whose expected distortion is below the requested level,
so they are upper bounds on the rate-distortion function for the codebook
used.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .errors import InsufficientGridError, SupportError
from .spaces import FiniteSystem, SymbolicModel, average_metric

NORM_TOL = 1e-9
LN2 = math.log(2.0)
STRICT_FACTOR = 1.0 - 1e-6
BA_MAX_ITER = 20000
BA_TOL = 1e-7


def _check_prob(p, name="distribution", tol=NORM_TOL) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    if np.any(p < 0) or not np.all(np.isfinite(p)):
        raise ValueError(f"{name} has negative or non-finite entries")
    if abs(p.sum() - 1.0) > tol:
        raise ValueError(f"{name} sums to {p.sum()!r}, not 1")
    return p


def entropy(p) -> float:
    p = np.asarray(p, dtype=np.float64).ravel()
    nz = p[p > 0]
    return float(-(nz * np.log2(nz)).sum())


def binary_entropy(x: float) -> float:
    return entropy([x, 1.0 - x])


def mutual_information(joint) -> float:
    """``I(X;Y)`` of a joint probability matrix, with ``0 log(0/a) = 0``."""
    joint = _check_prob(joint, "joint")
    if joint.ndim != 2:
        raise ValueError("joint must be a matrix")
    px = joint.sum(axis=1)
    py = joint.sum(axis=0)
    mask = joint > 0
    ratio = joint[mask] / np.outer(px, py)[mask]
    return max(0.0, float((joint[mask] * np.log2(ratio)).sum()))


def conditional_entropy(joint) -> float:
    """``H(X | Y)`` for a joint matrix indexed ``[x, y]``."""
    joint = np.asarray(joint, dtype=np.float64)
    return entropy(joint) - entropy(joint.sum(axis=0))


def kl_divergence(p, q) -> float:
    p = _check_prob(p, "p")
    q = _check_prob(q, "q")
    if np.any((p > 0) & (q == 0)):
        raise SupportError("support of p is not contained in support of q")
    m = p > 0
    return max(0.0, float((p[m] * np.log2(p[m] / q[m])).sum()))


@dataclass(frozen=True)
class KLBoundCheck:
    lhs: float
    rhs: float
    ok: bool


def lemma_kl_bound_check(p, a, eps: float, tol: float = 1e-9) -> KLBoundCheck:
    """``sum(-p log p + p a log(1/eps)) <= log sum (1/eps)^a``."""
    p = _check_prob(p, "p")
    a = np.asarray(a, dtype=np.float64)
    lg = math.log2(1.0 / eps)
    lhs = entropy(p) + float((p * a).sum()) * lg
    rhs = float(logsumexp(a * math.log(1.0 / eps))) / LN2
    return KLBoundCheck(lhs, rhs, lhs <= rhs + tol)


@dataclass(frozen=True)
class Channel:
    """Row-stochastic matrix ``nu(y | x)``; rows for zero-mass sources may be anything."""

    rows: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.rows, dtype=np.float64)
        if np.any(r < 0) or np.any(np.abs(r.sum(axis=1) - 1) > NORM_TOL):
            raise ValueError("channel rows must be probability vectors")
        object.__setattr__(self, "rows", r)

    def joint(self, mu) -> np.ndarray:
        return np.asarray(mu, dtype=np.float64)[:, None] * self.rows


@dataclass(frozen=True)
class BAResult:
    channel: np.ndarray
    output: np.ndarray
    rate: float
    distortion: float
    beta: float
    iterations: int
    converged: bool
    gaps: tuple = field(repr=False, default=())
    lagrangian: tuple = field(repr=False, default=())


def _ba_eval(px, log_q, rho):
    q = np.exp(log_q)
    out = px @ q
    with np.errstate(divide="ignore", invalid="ignore"):
        log_out = np.log(out)
        live = (q > 0) & (out[None, :] > 0)
        terms = np.where(live, q * (log_q - log_out[None, :]), 0.0)
    rate = float(px @ terms.sum(axis=1))
    dist = float(px @ (q * rho).sum(axis=1))
    return max(rate, 0.0), dist


def blahut_arimoto(rho, px, beta: float, max_iter: int = BA_MAX_ITER, tol: float = BA_TOL,
                   init=None) -> BAResult:
    """Alternating minimisation of ``I + beta * E rho`` (nats inside, bits out).

    ``rho`` is the ``|X| x |Y|`` distortion matrix and ``px`` the source law
    (zero-mass rows are dropped).  Stops when Blahut's duality gap
    ``max_y log c_y - sum_y q_y log c_y`` falls below ``tol`` bits, which bounds
    the excess of the Lagrangian over its minimum.  A warm start ``init`` is
    mixed with the uniform law so no reproduction symbol starts dead.
    """
    rho = np.asarray(rho, dtype=np.float64)
    px = np.asarray(px, dtype=np.float64)
    keep = px > 0
    rho_s, px_s = rho[keep], px[keep] / px[keep].sum()
    ny = rho.shape[1]
    if init is None:
        log_out = np.full(ny, -math.log(ny))
    else:
        mixed = 0.999 * np.asarray(init, dtype=np.float64) + 0.001 / ny
        log_out = np.log(mixed / mixed.sum())
    # shifting each row by its minimum cancels in the channel normalisation
    scaled = -beta * rho_s
    shift = scaled.max(axis=1)
    kern = np.exp(scaled - shift[:, None])
    q_out = np.exp(log_out)
    history, objective = [], []
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        z = np.maximum(kern @ q_out, 1e-300)
        # min over channels of I + beta * E rho for this output law (nats)
        objective.append(-float(px_s @ (np.log(z) + shift)))
        c = (px_s / z) @ kern
        with np.errstate(divide="ignore"):
            log_c = np.log(c)
        gap = float(log_c.max() - q_out @ np.where(q_out > 0, log_c, 0.0)) / LN2
        history.append(gap)
        q_out = q_out * c
        q_out /= q_out.sum()
        if gap < tol:
            converged = True
            break
    q_out[q_out < 1e-200] = 0.0
    q_out /= q_out.sum()
    with np.errstate(divide="ignore"):
        log_out = np.log(q_out)
    log_q = scaled + log_out[None, :]
    log_q -= logsumexp(log_q, axis=1, keepdims=True)
    rate_nats, dist = _ba_eval(px_s, log_q, rho_s)
    rate = rate_nats / LN2
    q_full = np.zeros((len(px), ny))
    q_full[keep] = np.exp(log_q)
    q_full[~keep] = np.exp(log_out)
    return BAResult(q_full, np.exp(log_out), rate, dist, beta, it, converged, tuple(history),
                    tuple(objective))


@dataclass
class RDCurve:
    """Rows ``(eps, rate, slope_param, iterations, converged)``; rate in bits per step."""

    rows: list = field(default_factory=list)

    @property
    def eps(self) -> np.ndarray:
        return np.array([r["eps"] for r in self.rows])

    @property
    def rates(self) -> np.ndarray:
        return np.array([r["rate"] for r in self.rows])


def _rd_point(rho, px, target, max_iter, tol, beta_max=1e7):
    """Smallest-rate BA point with distortion <= target, found by bisection on log beta."""
    def run(b, init=None):
        return blahut_arimoto(rho, px, b, max_iter, tol, init=init)

    beta = 1.0
    res = run(beta)
    if res.distortion <= target:
        # walk down to bracket the crossing from below
        feasible = res
        while True:
            b = beta / 4.0
            if b < 1e-9:
                return feasible
            trial = run(b, feasible.output)
            if trial.distortion > target:
                lo, hi = math.log(b), math.log(beta)
                break
            beta, feasible = b, trial
    else:
        while res.distortion > target:
            if beta >= beta_max:
                return None
            beta *= 4.0
            res = run(beta, res.output)
        feasible = res
        lo, hi = math.log(beta / 4.0), math.log(beta)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        trial = blahut_arimoto(rho, px, math.exp(mid), max_iter, tol, init=feasible.output)
        if trial.distortion <= target:
            hi, feasible = mid, trial
        else:
            lo = mid
        if hi - lo < 1e-10:
            break
    return feasible


def rd_curve(rho, px, eps_list, max_iter: int = BA_MAX_ITER, tol: float = BA_TOL,
             rate_scale: float = 1.0) -> RDCurve:
    """Rate-distortion upper curve for a given distortion matrix.

    Distortion below ``eps`` is targeted as ``eps * (1 - 1e-6)``.  Rates are
    multiplied by ``rate_scale`` (e.g. ``1/N`` for block codes) and made
    nonincreasing in eps by a running minimum, which stays an achievable bound.
    """
    rho = np.asarray(rho, dtype=np.float64)
    px = _check_prob(px, "source")
    zero_rate = float((px @ rho).min())
    rows = []
    for e in sorted(float(x) for x in eps_list):
        target = e * STRICT_FACTOR
        if zero_rate <= target:
            rows.append({"eps": e, "rate": 0.0, "slope_param": 0.0, "iterations": 0,
                         "converged": True, "distortion": zero_rate})
            continue
        res = _rd_point(rho, px, target, max_iter, tol)
        if res is None:
            rows.append({"eps": e, "rate": math.inf, "slope_param": math.inf, "iterations": 0,
                         "converged": False, "distortion": math.nan})
            continue
        rows.append({"eps": e, "rate": res.rate * rate_scale, "slope_param": res.beta,
                     "iterations": res.iterations, "converged": res.converged,
                     "distortion": res.distortion})
    best = math.inf
    for r in rows:
        best = min(best, r["rate"])
        r["rate"] = best
    return RDCurve(rows)


def block_codebook(sys: FiniteSystem, N: int, codebook="orbit", budget: int = 4096) -> np.ndarray:
    """Codebook as an array of N-tuples of point indices."""
    if isinstance(codebook, str):
        if codebook == "orbit":
            blocks = [np.arange(sys.n)]
            for _ in range(N - 1):
                blocks.append(sys.time_map[blocks[-1]])
            return np.stack(blocks, axis=1)
        if codebook == "full":
            if sys.n ** N > budget:
                raise ValueError(f"full codebook has {sys.n ** N} words, over budget {budget}")
            grids = np.indices((sys.n,) * N).reshape(N, -1).T
            return grids
        raise ValueError(f"unknown codebook {codebook!r}")
    cb = np.asarray(codebook, dtype=np.int64)
    if cb.ndim != 2 or cb.shape[1] != N:
        raise ValueError("codebook entries must be N-tuples of point indices")
    return cb


def block_distortion(sys: FiniteSystem, N: int, codebook) -> np.ndarray:
    """``rho[x, c] = (1/N) sum_n d(T^n x, c_n)``."""
    cb = block_codebook(sys, N, codebook)
    if isinstance(codebook, str) and codebook == "orbit":
        return average_metric(sys, N)
    rho = np.zeros((sys.n, len(cb)))
    idx = np.arange(sys.n)
    for k in range(N):
        rho += sys.dist[np.ix_(idx, cb[:, k])]
        idx = sys.time_map[idx]
    return rho / N


def rate_distortion(sys: FiniteSystem, mu, N: int, eps_list, codebook="orbit",
                    max_iter: int = BA_MAX_ITER, tol: float = BA_TOL) -> RDCurve:
    """Upper curve for ``R(d, mu, eps)`` at block length N over a reproduction codebook."""
    if N < 1:
        raise ValueError("N must be >= 1")
    weights = getattr(mu, "weights", mu)
    rho = block_distortion(sys, N, codebook)
    return rd_curve(rho, weights, eps_list, max_iter, tol, rate_scale=1.0 / N)


def product_rate_distortion(model: SymbolicModel, symbol_weights, eps_list,
                            max_iter: int = BA_MAX_ITER, tol: float = BA_TOL) -> RDCurve:
    """Upper curve for an i.i.d. product measure on a symbolic model.

    Coding each coordinate independently with a single-letter channel at
    distortion D costs ``R_1(D)`` bits per step and gives metric distortion
    ``D * sum_{|n|<=W} 2^-|n|``, so ``R(eps) <= R_1(eps / total_weight)``.
    """
    vals = np.asarray(model.alphabet_values)
    rho = np.abs(vals[:, None] - vals[None, :])
    total = float(model.residue_weights().sum())
    curve = rd_curve(rho, symbol_weights, [e / total for e in eps_list], max_iter, tol)
    for r, e in zip(curve.rows, sorted(eps_list)):
        r["eps"] = float(e)
    return curve


@dataclass(frozen=True)
class RdimEstimate:
    upper: float
    lower: float
    fit_slope: float
    saturated: tuple


def rdim_estimate(curve: RDCurve, eps_range=None, resolution: float | None = None) -> RdimEstimate:
    """Max/min of ``R/log2(1/eps)`` and the least-squares slope of R against ``log2(1/eps)``.

    Rows outside ``eps_range`` (open interval), with eps >= 1, or with infinite
    rate are ignored; rows at or below ``resolution`` are listed as saturated.
    """
    rows = [r for r in curve.rows if r["eps"] < 1 and math.isfinite(r["rate"])]
    if eps_range is not None:
        lo, hi = eps_range
        rows = [r for r in rows if lo < r["eps"] < hi]
    if len({r["eps"] for r in rows}) < 3:
        raise InsufficientGridError("need at least 3 resolvable eps rows")
    eps = np.array([r["eps"] for r in rows])
    rate = np.array([r["rate"] for r in rows])
    logs = np.log2(1.0 / eps)
    ratio = rate / logs
    slope = float(np.polyfit(logs, rate, 1)[0])
    sat = tuple(float(e) for e in eps if resolution is not None and e <= resolution)
    return RdimEstimate(float(ratio.max()), float(ratio.min()), slope, sat)


# ---------------------------------------------------------------- lemma checks

def _random_prob(rng, shape):
    x = rng.exponential(size=shape)
    # sprinkle exact zeros so the 0 log 0 convention is exercised
    x[rng.random(shape) < 0.15] = 0.0
    if x.sum() == 0:
        x.flat[0] = 1.0
    return x / x.sum()


def _random_rows(rng, n, m):
    rows = rng.exponential(size=(n, m))
    rows[rng.random((n, m)) < 0.15] = 0.0
    dead = rows.sum(axis=1) == 0
    rows[dead, 0] = 1.0
    return rows / rows.sum(axis=1, keepdims=True)


def _mi_from(mu, channel):
    joint = mu[:, None] * channel
    return mutual_information(joint / joint.sum())


def _continuity_bound(delta: float, size: int) -> float:
    """Bound on |H(P) - H(Q)| for total variation ``delta`` on ``size`` outcomes."""
    if delta <= 0:
        return 0.0
    delta = min(delta, 0.5)
    return delta * math.log2(max(size - 1, 1)) + binary_entropy(delta)


def property_checks(seed: int = 0, n_instances: int = 500, tol: float = 1e-9) -> dict:
    """Randomised checks of the mutual-information lemmas.

    Returns ``{name: {"instances", "violations", "worst"}}`` where ``worst`` is
    the largest amount by which an inequality failed (<= 0 when all hold).
    """
    rng = np.random.default_rng(seed)
    report = {}

    def record(name, defects):
        defects = np.asarray(defects)
        report[name] = {"instances": int(defects.size),
                        "violations": int((defects > tol).sum()),
                        "worst": float(defects.max())}

    dpi = []
    for _ in range(n_instances):
        nx_, ny, nz = rng.integers(1, 6, size=3)
        joint = _random_prob(rng, (nx_, ny))
        f = rng.integers(0, nz, size=ny)
        pushed = np.zeros((nx_, nz))
        for y in range(ny):
            pushed[:, f[y]] += joint[:, y]
        dpi.append(mutual_information(pushed) - mutual_information(joint))
    record("data_processing", dpi)

    sub = []
    for _ in range(n_instances):
        nx_, ny, nz = rng.integers(1, 5, size=3)
        pz = _random_prob(rng, nz)
        px_z = _random_rows(rng, nz, nx_)
        py_z = _random_rows(rng, nz, ny)
        joint = pz[:, None, None] * px_z[:, :, None] * py_z[:, None, :]
        xy_z = joint.reshape(nz, nx_ * ny).T
        x_z = joint.sum(axis=2).T
        y_z = joint.sum(axis=1).T
        sub.append(mutual_information(xy_z) - mutual_information(x_z) - mutual_information(y_z))
    record("subadditivity", sub)

    conc, conv = [], []
    for _ in range(n_instances):
        nx_, ny = rng.integers(1, 6, size=2)
        mu1, mu2 = _random_prob(rng, nx_), _random_prob(rng, nx_)
        nu1, nu2 = _random_rows(rng, nx_, ny), _random_rows(rng, nx_, ny)
        mu = _random_prob(rng, nx_)
        for t in (0.0, 0.25, 0.5, 0.75):
            mix = _mi_from((1 - t) * mu1 + t * mu2, nu1)
            conc.append((1 - t) * _mi_from(mu1, nu1) + t * _mi_from(mu2, nu1) - mix)
            mixc = _mi_from(mu, (1 - t) * nu1 + t * nu2)
            conv.append(mixc - (1 - t) * _mi_from(mu, nu1) - t * _mi_from(mu, nu2))
    record("concavity_in_source", conc)
    record("convexity_in_channel", conv)

    cont = []
    for _ in range(n_instances):
        nx_, ny = rng.integers(1, 5, size=2)
        base = _random_prob(rng, (nx_, ny))
        target = _random_prob(rng, (nx_, ny))
        i0 = mutual_information(base)
        for k in range(1, 11):
            t = 2.0 ** -k
            pert = (1 - t) * base + t * target
            delta = 0.5 * np.abs(pert - base).sum()
            bound = (_continuity_bound(delta, nx_ * ny) + _continuity_bound(delta, nx_)
                     + _continuity_bound(delta, ny))
            cont.append(abs(mutual_information(pert) - i0) - bound)
    record("convergence", cont)
    return report
