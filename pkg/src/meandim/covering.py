"""Covering numbers with potential and pressure profiles.

All logarithms are base 2.  ``#(X, d, phi, eps)`` is the minimum over covers by
sets of diameter strictly below ``eps`` of ``sum (1/eps)^(sup_U phi)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import setcover
from .errors import BudgetExceededError, InsufficientGridError
from .spaces import (FiniteSystem, Potential, SymbolicModel, birkhoff_sum,
                     bowen_metric, min_positive_distance)

DEFAULT_EXACT_BUDGET = 20


def _values(phi, n: int) -> np.ndarray:
    if phi is None:
        return np.zeros(n)
    if isinstance(phi, Potential):
        return np.asarray(phi.values)
    return np.asarray(phi, dtype=np.float64)


@dataclass(frozen=True)
class Cover:
    """Indexed family of point subsets with their diameters and potential sups."""

    sets: tuple
    diameters: tuple
    sups: tuple

    @classmethod
    def from_sets(cls, sets, dist: np.ndarray, phi=None) -> "Cover":
        sets = tuple(tuple(sorted(int(i) for i in s)) for s in sets)
        vals = _values(phi, dist.shape[0])
        diams = tuple(float(dist[np.ix_(s, s)].max()) if len(s) > 1 else 0.0 for s in sets)
        sups = tuple(float(vals[list(s)].max()) for s in sets)
        return cls(sets, diams, sups)

    def covers(self, n: int) -> bool:
        return set().union(*map(set, self.sets)) == set(range(n)) if self.sets else n == 0

    def carriers(self, n: int) -> list:
        """For each point, the indices of cover sets containing it."""
        out = [[] for _ in range(n)]
        for k, s in enumerate(self.sets):
            for i in s:
                out[i].append(k)
        return [tuple(c) for c in out]

    def __len__(self):
        return len(self.sets)


@dataclass(frozen=True)
class CoveringResult:
    value: float
    cover: Cover
    mode: str

    @property
    def log2_value(self) -> float:
        return math.log2(self.value)


def cover_weight(sups, eps: float) -> float:
    return float(sum((1.0 / eps) ** s for s in sups))


def covering_number(sys: FiniteSystem | None, dist: np.ndarray | None = None, phi=None,
                    eps: float = 1.0, mode: str = "exact",
                    exact_budget: int = DEFAULT_EXACT_BUDGET) -> CoveringResult:
    """Covering number with potential at scale ``eps``.

    ``dist`` defaults to the base metric of ``sys``.  Exact mode solves weighted
    set cover over the sublevel truncations of maximal ``eps``-cliques, which
    contains an optimal cover; greedy mode runs the ratio greedy on the same
    family and returns an upper bound.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if dist is None:
        dist = sys.dist
    dist = np.asarray(dist)
    n = dist.shape[0]
    vals = _values(phi, n)
    if mode == "exact" and n > exact_budget:
        raise BudgetExceededError(f"{n} points exceeds exact-search budget {exact_budget}")
    family = setcover.sublevel_truncations(setcover.maximal_cliques(dist, eps), vals)
    masks = [setcover.to_mask(s) for s in family]
    costs = [(1.0 / eps) ** float(vals[list(s)].max()) for s in family]
    if mode == "exact":
        value, chosen = setcover.exact_cover(n, masks, costs)
    elif mode == "greedy":
        value, chosen = setcover.greedy_cover(n, masks, costs)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    cover = Cover.from_sets([family[k] for k in chosen], dist, vals)
    return CoveringResult(cover_weight(cover.sups, eps), cover, mode)


def _auto_mode(n: int, mode: str, exact_budget: int) -> str:
    if mode == "auto":
        return "exact" if n <= exact_budget else "greedy"
    return mode


@dataclass
class PressureProfile:
    """Rows ``(N, eps, log_cov, rate)`` with ``rate = log_cov / N``."""

    rows: list = field(default_factory=list)
    resolution: float = math.inf
    mode: str = "exact"

    def eps_values(self) -> list:
        return sorted({r["eps"] for r in self.rows}, reverse=True)

    def rates(self, eps: float) -> list:
        return [(r["N"], r["rate"]) for r in sorted(self.rows, key=lambda r: r["N"]) if r["eps"] == eps]

    def pressure_upper(self, eps: float) -> float:
        """Fekete upper estimate: inf over computed N of log_cov / N."""
        return min(rate for _, rate in self.rates(eps))

    def last_rate(self, eps: float) -> float:
        return self.rates(eps)[-1][1]

    def log_cov(self, N: int, eps: float) -> float:
        for r in self.rows:
            if r["N"] == N and r["eps"] == eps:
                return r["log_cov"]
        raise KeyError((N, eps))


def pressure_profile(sys: FiniteSystem, phi=None, eps_grid=(0.5,), N_max: int = 1,
                     mode: str = "auto", exact_budget: int = DEFAULT_EXACT_BUDGET,
                     executor=None) -> PressureProfile:
    if N_max < 1:
        raise ValueError("N_max must be >= 1")
    if any(e <= 0 for e in eps_grid):
        raise ValueError("all eps must be positive")
    phi = phi if isinstance(phi, Potential) else Potential(_values(phi, sys.n))
    mode = _auto_mode(sys.n, mode, exact_budget)
    cells = [(N, float(e)) for N in range(1, N_max + 1) for e in eps_grid]
    metrics = {N: bowen_metric(sys, N) for N in range(1, N_max + 1)}
    sums = {N: birkhoff_sum(sys, phi, N) for N in range(1, N_max + 1)}

    def run(cell):
        N, e = cell
        res = covering_number(None, metrics[N], sums[N], e, mode, exact_budget)
        return {"N": N, "eps": e, "log_cov": res.log2_value, "rate": res.log2_value / N, "mode": mode}

    rows = list(executor.map(run, cells)) if executor is not None else [run(c) for c in cells]
    return PressureProfile(rows, min_positive_distance(sys.dist), mode)


@dataclass(frozen=True)
class SlopeEstimate:
    upper: float
    lower: float
    fit_slope: float
    ratios: tuple
    saturated: tuple


def _slope_summary(eps, values) -> SlopeEstimate:
    eps = np.asarray(eps, dtype=float)
    values = np.asarray(values, dtype=float)
    keep = eps < 1
    eps, values = eps[keep], values[keep]
    if len(np.unique(eps)) < 3:
        raise InsufficientGridError("need at least 3 distinct eps values below 1")
    logs = np.log2(1.0 / eps)
    ratios = values / logs
    slope = float(np.polyfit(logs, values, 1)[0])
    return SlopeEstimate(float(ratios.max()), float(ratios.min()), slope,
                         tuple(zip(eps.tolist(), ratios.tolist())), ())


def mdim_M_estimate(profile: PressureProfile) -> SlopeEstimate:
    """Max/min of ``P_est(eps)/log2(1/eps)`` and the least-squares slope of P_est.

    ``saturated`` lists the eps at or below the resolution of the base metric,
    where every cover is forced to be by singletons.
    """
    eps = profile.eps_values()
    est = _slope_summary(eps, [profile.pressure_upper(e) for e in eps])
    sat = tuple(e for e in eps if e <= profile.resolution)
    return SlopeEstimate(est.upper, est.lower, est.fit_slope, est.ratios, sat)


def tame_metric_transform(sys: FiniteSystem) -> FiniteSystem:
    """``d'(x, y) = sum_k 2^-(k+1) |d(x, a_k) - d(y, a_k)|`` over anchors in sorted id order."""
    try:
        order = sorted(range(sys.n), key=lambda i: sys.points[i])
    except TypeError:
        order = sorted(range(sys.n), key=lambda i: str(sys.points[i]))
    out = np.zeros_like(sys.dist)
    for k, a in enumerate(order):
        col = sys.dist[:, a]
        out += 2.0 ** -(k + 1) * np.abs(col[:, None] - col[None, :])
    out = 0.5 * (out + out.T)
    np.fill_diagonal(out, 0.0)
    return sys.with_metric(out, f"{sys.label} tame")


def tame_growth_report(sys: FiniteSystem, deltas, eps_grid, mode: str = "auto",
                       exact_budget: int = DEFAULT_EXACT_BUDGET) -> list:
    """Rows ``(delta, eps, log_cov, eps^delta * log_cov)``; a trend diagnostic only."""
    if any(d <= 0 for d in deltas):
        raise ValueError("delta must be positive")
    mode = _auto_mode(sys.n, mode, exact_budget)
    logs = {e: covering_number(sys, None, None, e, mode, exact_budget).log2_value for e in eps_grid}
    return [{"delta": d, "eps": e, "log_cov": logs[e], "value": e ** d * logs[e]}
            for d in deltas for e in sorted(eps_grid, reverse=True)]


def symbolic_covering_bound(model: SymbolicModel, eps: float, N: int,
                            phi_scale: float = 1.0, max_combos: int = 2_000_000) -> tuple:
    """Upper bound on ``log2 #(X, d_N, S_N phi, eps)`` by product covers, phi = scale * x_0.

    The cover is a product of per-coordinate partitions of the level set into
    runs of ``L_r`` consecutive levels (taken from the top).  Because the metric
    and the Birkhoff sum are both additive over coordinates of a period word,
    the weight of a product cover factorises and its diameter is
    ``max_n sum_r w_(r-n) * width_r``.  Returns ``(log2_bound, run_lengths)``;
    the bound is exact when singletons are forced.
    """
    vals = np.sort(np.asarray(model.alphabet_values))
    m, p = len(vals), model.period
    w = model.residue_weights()
    counts = np.array([len(range(r, N, p)) for r in range(p)], dtype=float)
    # width and sup of each block for each run length
    widths, blocks = [], []
    for L in range(1, m + 1):
        bl = [vals[max(0, hi - L):hi] for hi in range(m, 0, -L)]
        widths.append(max(b[-1] - b[0] for b in bl))
        blocks.append(np.array([b[-1] for b in bl]))
    widths = np.array(widths)
    lg = math.log2(1.0 / eps)
    # term[r][L-1] = log2 sum_blocks (1/eps)^(scale * count_r * sup)
    term = np.empty((p, m))
    for r in range(p):
        for L in range(m):
            ex = phi_scale * counts[r] * blocks[L] * lg
            top = ex.max()
            term[r, L] = top + math.log2(np.sum(2.0 ** (ex - top)))
    if m ** p > max_combos:
        raise BudgetExceededError(f"{m}^{p} run-length combinations exceeds {max_combos}")
    shifts = np.array([[w[(r - n) % p] for r in range(p)] for n in range(min(N, p))])
    combos = np.indices((m,) * p).reshape(p, -1).T
    diam = (widths[combos] @ shifts.T).max(axis=1)
    vals_all = term[np.arange(p), combos].sum(axis=1)
    vals_all[diam >= eps] = np.inf
    k = int(np.argmin(vals_all))
    return float(vals_all[k]), tuple(int(L) + 1 for L in combos[k])
