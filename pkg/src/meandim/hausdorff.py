"""Hausdorff content with potential at a scale, and scale-dependent dimension.

The content of a cover ``{E_i}`` is ``sum base(E_i)^(s - sup_{E_i} phi)`` with
``base = max(diam, tau)`` (``grain_mode='max'``, so ``tau = 0`` is the plain
definition with ``0^0 = 1``) or ``base = tau + diam`` (``grain_mode='sum'``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import setcover
from .covering import DEFAULT_EXACT_BUDGET, Cover, _values
from .errors import BudgetExceededError, InvalidQueryError, NonMonotoneContentError
from .spaces import (FiniteSystem, Potential, birkhoff_sum, dynamical_system,
                     min_positive_distance)

BISECTION_TOL = 1e-6


@dataclass(frozen=True)
class HausdorffQuery:
    s: float
    eps: float
    tau: float = 0.0
    metric_kind: str = "max"
    N: int = 1


def _power(base: float, exponent: float) -> float:
    if exponent == 0:
        return 1.0
    return 0.0 if base == 0 else base ** exponent


def _candidates(dist: np.ndarray, vals: np.ndarray, eps: float, mode: str,
                exact_budget: int, max_size: int | None) -> list:
    n = dist.shape[0]
    if mode == "exact":
        if n > exact_budget:
            raise BudgetExceededError(f"{n} points exceeds exact-search budget {exact_budget}")
        return setcover.all_cliques(dist, eps, max_size=max_size)
    if mode != "greedy":
        raise ValueError(f"unknown mode {mode!r}")
    cliques = setcover.maximal_cliques(dist, eps)
    fam = set(setcover.sublevel_truncations(cliques, vals))
    ii, jj = np.nonzero(np.triu(dist < eps, k=1))
    fam.update(zip(ii.tolist(), jj.tolist()))
    return sorted(fam)


def _set_stats(family, dist, vals):
    diams = np.array([dist[np.ix_(s, s)].max() if len(s) > 1 else 0.0 for s in family])
    sups = np.array([vals[list(s)].max() for s in family])
    return diams, sups


def _bases(diams, tau, grain_mode):
    if grain_mode == "max":
        return np.maximum(diams, tau)
    if grain_mode == "sum":
        return diams + tau
    raise ValueError(f"unknown grain_mode {grain_mode!r}")


class _ContentSolver:
    """Candidate family prepared once; content evaluated for many exponents."""

    def __init__(self, dist, vals, eps, tau, mode, grain_mode, exact_budget, max_size):
        if eps <= 0:
            raise InvalidQueryError("eps must be positive")
        if tau < 0:
            raise InvalidQueryError("tau must be nonnegative")
        self.n = dist.shape[0]
        self.mode = mode
        self.family = _candidates(dist, vals, eps, mode, exact_budget, max_size)
        self.masks = [setcover.to_mask(s) for s in self.family]
        diams, self.sups = _set_stats(self.family, dist, vals)
        self.bases = _bases(diams, tau, grain_mode)
        self.dist, self.vals = dist, vals

    def costs(self, s: float) -> list:
        return [_power(b, s - u) for b, u in zip(self.bases, self.sups)]

    def content(self, s: float) -> tuple:
        costs = self.costs(s)
        if self.mode == "exact":
            value, chosen = setcover.exact_cover(self.n, self.masks, costs)
        else:
            value, chosen = setcover.greedy_cover(self.n, self.masks, costs)
        return value, chosen


def hausdorff_content(sys: FiniteSystem | None, dist: np.ndarray | None, phi,
                      q: HausdorffQuery, mode: str = "exact", grain_mode: str = "max",
                      exact_budget: int = DEFAULT_EXACT_BUDGET,
                      max_set_size: int | None = None, return_cover: bool = False):
    """Minimum (exact) or greedy upper bound of the grained content at exponent ``q.s``."""
    if dist is None:
        dist = sys.dist
    dist = np.asarray(dist)
    vals = _values(phi, dist.shape[0])
    if q.s < vals.max() - 1e-12:
        raise InvalidQueryError(f"s = {q.s} is below max phi = {vals.max()}")
    solver = _ContentSolver(dist, vals, q.eps, q.tau, mode, grain_mode, exact_budget, max_set_size)
    value, chosen = solver.content(max(q.s, float(vals.max())))
    if return_cover:
        return value, Cover.from_sets([solver.family[k] for k in chosen], dist, vals)
    return value


def dim_at_scale(sys: FiniteSystem | None, dist: np.ndarray | None, phi, eps: float,
                 tau: float = 0.0, mode: str = "exact", grain_mode: str = "max",
                 tol: float = BISECTION_TOL, exact_budget: int = DEFAULT_EXACT_BUDGET,
                 max_set_size: int | None = None) -> float:
    """Largest ``s >= max phi`` with content ``>= 1``, by bisection to ``tol``."""
    if dist is None:
        dist = sys.dist
    dist = np.asarray(dist)
    vals = _values(phi, dist.shape[0])
    smax = float(vals.max())
    if tau >= 1:
        raise InvalidQueryError("grain tau must be below 1 for a bounded dimension")
    solver = _ContentSolver(dist, vals, eps, tau, mode, grain_mode, exact_budget, max_set_size)
    if solver.bases.size and solver.bases.max() > 1:
        raise NonMonotoneContentError("a candidate set has effective diameter above 1; "
                                      "rescale the metric or lower eps")
    n = dist.shape[0]
    if tau > 0:
        hi = smax + math.log2(max(n, 2)) / math.log2(1.0 / tau) + 1.0
    else:
        hi = smax + 1.0
        # with no grain, zero-diameter singletons make the content vanish above smax
        while solver.content(hi)[0] >= 1:
            hi = smax + 2 * (hi - smax)
            if hi - smax > 1e6:
                raise NonMonotoneContentError("content does not drop below 1")
    lo = smax
    if solver.content(lo + tol)[0] < 1:
        return lo
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if solver.content(mid)[0] >= 1:
            lo = mid
        else:
            hi = mid
    return lo


def default_grain(sys: FiniteSystem) -> float:
    """Smallest positive distance of the base metric (0 for a one-point space)."""
    d = min_positive_distance(sys.dist)
    return 0.0 if math.isinf(d) else d


def mean_hausdorff_profile(sys: FiniteSystem, phi=None, eps_grid=(0.5,), N_max: int = 1,
                           metric_kind: str = "max", tau="auto", mode: str = "auto",
                           grain_mode: str = "max", exact_budget: int = DEFAULT_EXACT_BUDGET,
                           executor=None) -> list:
    """Rows ``(N, eps, dim, rate = dim / N)`` over the (N, eps) grid.

    ``tau='auto'`` uses the smallest positive base distance for every cell, so
    the max and averaged profiles are computed at the same grain.
    """
    phi = phi if isinstance(phi, Potential) else Potential(_values(phi, sys.n))
    grain = default_grain(sys) if tau == "auto" else float(tau)
    if mode == "auto":
        mode = "exact" if sys.n <= exact_budget else "greedy"
    cells = [(N, float(e)) for N in range(1, N_max + 1) for e in eps_grid]
    dists = {N: dynamical_system(sys, N, metric_kind).dist for N in range(1, N_max + 1)}
    sums = {N: birkhoff_sum(sys, phi, N) for N in range(1, N_max + 1)}

    def run(cell):
        N, e = cell
        d = dim_at_scale(None, dists[N], sums[N], e, grain, mode, grain_mode,
                         exact_budget=exact_budget)
        return {"N": N, "eps": e, "dim": d, "rate": d / N, "metric": metric_kind,
                "tau": grain, "mode": mode}

    return list(executor.map(run, cells)) if executor is not None else [run(c) for c in cells]
