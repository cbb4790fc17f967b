"""Measures on finite systems: products, empirical averages, Frostman LPs, couplings."""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .errors import BudgetExceededError
from .lp import simplex_max
from .spaces import FiniteSystem, Potential, SymbolicModel

NORM_TOL = 1e-9
SUBSET_FAMILY_LIMIT = 15


@dataclass(frozen=True)
class ProbMeasure:
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 1 or np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be a finite nonnegative vector")
        if abs(w.sum() - 1.0) > NORM_TOL:
            raise ValueError(f"weights sum to {w.sum()!r}, not 1")
        w = w / w.sum()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def support(self) -> np.ndarray:
        return np.nonzero(self.weights > 0)[0]

    @classmethod
    def uniform(cls, n: int) -> "ProbMeasure":
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def point_mass(cls, n: int, i: int) -> "ProbMeasure":
        w = np.zeros(n)
        w[i] = 1.0
        return cls(w)

    def to_json(self, sys: FiniteSystem) -> str:
        return json.dumps({str(p): float(w) for p, w in zip(sys.points, self.weights)}, sort_keys=True)

    @classmethod
    def from_mapping(cls, sys: FiniteSystem, mapping: dict) -> "ProbMeasure":
        keys = {str(p): i for i, p in enumerate(sys.points)}
        w = np.zeros(sys.n)
        for k, v in mapping.items():
            if str(k) not in keys:
                raise KeyError(f"unknown point id {k!r}")
            w[keys[str(k)]] = float(v)
        return cls(w)


def product_measure(model: SymbolicModel, symbol_weights) -> ProbMeasure:
    """I.i.d. product of ``symbol_weights`` on period words, in ``build_symbolic`` order."""
    sw = np.asarray(symbol_weights, dtype=np.float64)
    if len(sw) != len(model.alphabet_values):
        raise ValueError("one weight per alphabet symbol is required")
    if abs(sw.sum() - 1) > NORM_TOL:
        raise ValueError("symbol weights must sum to 1")
    w = np.ones(1)
    for _ in range(model.period):
        w = np.outer(w, sw).ravel()
    return ProbMeasure(w)


def quantized_top_uniform(alphabet_values, k: float) -> np.ndarray:
    """Law of the nearest level to ``U ~ Uniform[1 - 1/k, 1]``.

    Each level gets ``k * |cell ∩ [1 - 1/k, 1]|`` where cells are the nearest-level
    (Voronoi) cells of the levels inside [0, 1].
    """
    vals = np.asarray(alphabet_values, dtype=np.float64)
    order = np.argsort(vals)
    sv = vals[order]
    mids = (sv[1:] + sv[:-1]) / 2
    edges = np.concatenate([[0.0], mids, [1.0]])
    lo = 1.0 - 1.0 / k
    w_sorted = k * np.clip(np.minimum(edges[1:], 1.0) - np.maximum(edges[:-1], lo), 0, None)
    w = np.empty_like(w_sorted)
    w[order] = w_sorted
    return w / w.sum()


def integrate(phi, mu) -> float:
    vals = phi.values if isinstance(phi, Potential) else np.asarray(phi, dtype=np.float64)
    weights = mu.weights if isinstance(mu, ProbMeasure) else np.asarray(mu, dtype=np.float64)
    return float(vals @ weights)


def pushforward(sys: FiniteSystem, mu: ProbMeasure, k: int = 1) -> ProbMeasure:
    """``T^k_* mu``: mass at x moves to ``T^k x``."""
    idx = sys.iterate(k)
    w = np.zeros(sys.n)
    np.add.at(w, idx, mu.weights)
    return ProbMeasure(w)


def is_invariant(sys: FiniteSystem, mu: ProbMeasure, tol: float = 1e-12) -> bool:
    return bool(np.max(np.abs(pushforward(sys, mu).weights - mu.weights)) <= tol)


def empirical_average(sys: FiniteSystem, nu: ProbMeasure, n: int) -> ProbMeasure:
    """``(1/n) sum_{m<n} T^m_* nu``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    acc = np.zeros(sys.n)
    cur = np.asarray(nu.weights)
    for _ in range(n):
        acc += cur
        nxt = np.zeros(sys.n)
        np.add.at(nxt, sys.time_map, cur)
        cur = nxt
    return ProbMeasure(acc / n)


def invariant_average(sys: FiniteSystem, nu: ProbMeasure) -> ProbMeasure:
    """Empirical average over the lcm of orbit lengths, which is exactly invariant."""
    n = math.lcm(*sys.orbit_lengths().tolist()) if sys.n else 1
    return empirical_average(sys, nu, n)


# ---------------------------------------------------------------- Frostman LP

@dataclass(frozen=True)
class FrostmanResult:
    measure: ProbMeasure | None
    weights: np.ndarray
    s: float
    delta: float
    tau: float
    lp_value: float
    dual_cover_value: float
    constraint_sets: tuple
    bounds: np.ndarray
    normalizable: bool

    @property
    def duality_gap(self) -> float:
        return abs(self.lp_value - self.dual_cover_value)

    def max_violation(self) -> float:
        """Largest ``mu(E) - bound(E)`` over the constraint family, for the returned weights."""
        loads = np.array([self.weights[list(E)].sum() for E in self.constraint_sets])
        return float((loads - self.bounds).max())


def constraint_family(dist: np.ndarray, delta: float, family: str = "balls") -> list:
    n = dist.shape[0]
    if family == "balls":
        radii = np.unique(dist)
        sets = set()
        for i in range(n):
            for r in radii:
                sets.add(tuple(np.nonzero(dist[i] <= r)[0].tolist()))
    elif family in ("subsets", "all-small-subsets"):
        if n > SUBSET_FAMILY_LIMIT:
            raise BudgetExceededError(f"subset family needs n <= {SUBSET_FAMILY_LIMIT}, got {n}")
        sets = {c for k in range(1, n + 1) for c in itertools.combinations(range(n), k)}
    else:
        raise ValueError(f"unknown family {family!r}")
    sets.update((i,) for i in range(n))
    keep = [s for s in sets if len(s) == 1 or dist[np.ix_(s, s)].max() < delta]
    return sorted(keep, key=lambda s: (len(s), s))


def fractional_cover_value(sets, bounds, n: int) -> float:
    """``min sum bound_E y_E`` subject to every point having cover weight >= 1."""
    A = np.zeros((n, len(sets)))
    for k, E in enumerate(sets):
        A[list(E), k] = 1.0
    res = linprog(bounds, A_ub=-A, b_ub=-np.ones(n), bounds=(0, None), method="highs")
    if res.status != 0:
        raise RuntimeError(f"fractional cover LP failed: {res.message}")
    return float(res.fun)


def frostman_measure(sys: FiniteSystem | None, dist: np.ndarray | None, s: float, delta: float,
                     tau: float = 0.0, family: str = "balls") -> FrostmanResult:
    """Maximise total mass subject to ``mu(E) <= (tau + diam E)^s`` for ``diam E < delta``.

    The optimum is compared with the minimum fractional cover over the same
    family (the LP dual), solved separately.
    """
    if tau < 0 or s < 0 or delta <= 0:
        raise ValueError("need s >= 0, delta > 0, tau >= 0")
    if dist is None:
        dist = sys.dist
    dist = np.asarray(dist)
    n = dist.shape[0]
    sets = constraint_family(dist, delta, family)
    diams = np.array([dist[np.ix_(E, E)].max() if len(E) > 1 else 0.0 for E in sets])
    base = tau + diams
    bounds = np.where(base == 0, 1.0 if s == 0 else 0.0, base ** s)
    A = np.zeros((len(sets), n))
    for k, E in enumerate(sets):
        A[k, list(E)] = 1.0
    primal = simplex_max(np.ones(n), A, bounds)
    weights = np.clip(primal.x, 0.0, None)
    dual = fractional_cover_value(sets, bounds, n)
    ok = primal.value >= 1.0 and primal.value > 0
    measure = ProbMeasure(weights / weights.sum()) if ok else None
    return FrostmanResult(measure, weights, s, delta, tau, primal.value, dual,
                          tuple(sets), bounds, ok)


# ---------------------------------------------------------------- transport

@dataclass(frozen=True)
class TransportPlan:
    plan: np.ndarray
    cost: float


def optimal_coupling(p, q, cost, tol: float = 1e-15) -> TransportPlan:
    """Exact min-cost coupling by successive shortest paths on the bipartite residual graph."""
    p = np.asarray(getattr(p, "weights", p), dtype=np.float64)
    q = np.asarray(getattr(q, "weights", q), dtype=np.float64)
    c = np.asarray(cost, dtype=np.float64)
    if np.any(c < 0):
        raise ValueError("costs must be nonnegative")
    n, m = c.shape
    flow = np.zeros((n, m))
    supply = p.copy()
    demand = q.copy()
    while supply.max(initial=0) > tol and demand.max(initial=0) > tol:
        # multi-source Bellman-Ford from rows with remaining supply
        da = np.where(supply > tol, 0.0, np.inf)
        db = np.full(m, np.inf)
        pred_b = np.full(m, -1)
        pred_a = np.full(n, -1)
        for _ in range(n + m + 1):
            cand = da[:, None] + c
            i_best = np.argmin(cand, axis=0)
            new_b = cand[i_best, np.arange(m)]
            upd_b = new_b < db - 1e-15
            db[upd_b] = new_b[upd_b]
            pred_b[upd_b] = i_best[upd_b]
            back = np.where(flow > tol, db[None, :] - c, np.inf)
            j_best = np.argmin(back, axis=1)
            new_a = back[np.arange(n), j_best]
            upd_a = new_a < da - 1e-15
            da[upd_a] = new_a[upd_a]
            pred_a[upd_a] = j_best[upd_a]
            if not upd_a.any() and not upd_b.any():
                break
        sinks = np.where(demand > tol, db, np.inf)
        j = int(np.argmin(sinks))
        if not np.isfinite(sinks[j]):
            break
        # trace path back to a source
        path = []
        jj = j
        for _ in range(n + m + 1):
            i = int(pred_b[jj])
            path.append((i, jj, +1))
            if pred_a[i] < 0:
                break
            jj_prev = int(pred_a[i])
            path.append((i, jj_prev, -1))
            jj = jj_prev
        src = path[-1][0]
        amount = min(supply[src], demand[j])
        for i, jj, sign in path:
            if sign < 0:
                amount = min(amount, flow[i, jj])
        for i, jj, sign in path:
            flow[i, jj] += sign * amount
        supply[src] -= amount
        demand[j] -= amount
    flow[flow < 0] = 0.0
    return TransportPlan(flow, float((flow * c).sum()))


def wasserstein(p, q, cost) -> float:
    return optimal_coupling(p, q, cost).cost
