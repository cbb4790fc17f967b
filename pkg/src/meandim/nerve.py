"""Nerves of covers and width-dimension upper bounds.

The canonical map sends a point into the open simplex spanned by its carrier
(the cover sets containing it), so for a nerve:

* small local dimension at f(x) is ``|carrier(x)| - 1``;
* local dimension at f(x) is ``max |tau| - 1`` over simplexes ``tau`` containing
  the carrier, and every maximal simplex is the carrier of some point.

The infimum defining the width dimension ranges over all complexes; here it
is only bounded above by minimising over a finite family of candidate covers.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import setcover
from .covering import Cover, _values
from .spaces import FiniteSystem, Potential, birkhoff_sum, bowen_metric

DEFAULT_SET_COUNT_BOUND = 12
BALL_SHRINK = 1.0 - 2.0 ** -20


@dataclass(frozen=True)
class NerveComplex:
    vertices: tuple
    carriers: tuple
    maximal_simplexes: tuple

    def is_simplex(self, face) -> bool:
        face = frozenset(face)
        return bool(face) and any(face <= m for m in self.maximal_simplexes)

    def simplexes(self) -> list:
        """All simplexes (nonempty faces of maximal simplexes), sorted."""
        out = set()
        for m in self.maximal_simplexes:
            items = sorted(m)
            for k in range(1, len(items) + 1):
                out.update(itertools.combinations(items, k))
        return sorted(out, key=lambda t: (len(t), t))

    def edges(self) -> list:
        return [s for s in self.simplexes() if len(s) == 2]

    def small_local_dim(self) -> np.ndarray:
        return np.array([len(c) - 1 for c in self.carriers], dtype=np.int64)

    def local_dim(self) -> np.ndarray:
        return np.array([max(len(m) for m in self.maximal_simplexes if frozenset(c) <= m) - 1
                         for c in self.carriers], dtype=np.int64)


def nerve_of(cover: Cover, n: int | None = None) -> NerveComplex:
    """Nerve of ``cover``; sets containing no point are dropped first."""
    if n is None:
        n = 1 + max((max(s) for s in cover.sets if s), default=-1)
    carriers = tuple(cover.carriers(n))
    used = sorted({k for c in carriers for k in c})
    fronts = {frozenset(c) for c in carriers}
    maximal = tuple(sorted((f for f in fronts if not any(f < g for g in fronts)),
                           key=lambda f: sorted(f)))
    return NerveComplex(tuple(used), carriers, maximal)


def build_cover_for_scale(sys: FiniteSystem | None, dist: np.ndarray | None, eps: float,
                          strategy: str = "cliques") -> Cover:
    """Cover by maximal eps-cliques, or by closed balls of radius slightly under eps/2."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if dist is None:
        dist = sys.dist
    dist = np.asarray(dist)
    if strategy == "cliques":
        sets = setcover.maximal_cliques(dist, eps)
    elif strategy == "balls":
        r = 0.5 * eps * BALL_SHRINK
        sets = sorted({tuple(np.nonzero(dist[i] <= r)[0].tolist()) for i in range(dist.shape[0])})
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    return Cover.from_sets(sets, dist)


def variation(phi, dist: np.ndarray, eps: float) -> float:
    """``sup |phi(x) - phi(y)|`` over pairs with ``d(x, y) < eps``."""
    vals = _values(phi, dist.shape[0])
    diff = np.abs(vals[:, None] - vals[None, :])
    close = dist < eps
    return float(diff[close].max()) if close.any() else 0.0


def cover_objective(cover: Cover, vals: np.ndarray, variant: str) -> float:
    nerve = nerve_of(cover, len(vals))
    if variant == "small":
        D = nerve.small_local_dim()
    elif variant == "standard":
        D = nerve.local_dim()
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return float(np.max(D + vals))


def _disjointify(sets, n):
    owner = {}
    for k, s in enumerate(sets):
        for i in s:
            owner.setdefault(i, k)
    parts = {}
    for i in range(n):
        parts.setdefault(owner[i], []).append(i)
    return [tuple(v) for _, v in sorted(parts.items())]


def candidate_family(dist: np.ndarray, eps: float) -> list:
    n = dist.shape[0]
    cliques = setcover.maximal_cliques(dist, eps)
    balls = build_cover_for_scale(None, dist, eps, "balls").sets
    fam = set(cliques) | set(balls) | {(i,) for i in range(n)}
    fam.update(_disjointify(cliques, n))
    return sorted(fam)


def _starting_covers(dist, eps):
    n = dist.shape[0]
    cliques = setcover.maximal_cliques(dist, eps)
    balls = list(build_cover_for_scale(None, dist, eps, "balls").sets)
    return [cliques, balls, [(i,) for i in range(n)], _disjointify(cliques, n)]


def _prune(sets, n, score):
    """Drop sets one at a time while the cover survives and the score does not rise."""
    sets = list(sets)
    current = score(sets)
    improved = True
    while improved:
        improved = False
        for k in range(len(sets)):
            trial = sets[:k] + sets[k + 1:]
            if set().union(*map(set, trial)) == set(range(n)):
                val = score(trial)
                if val <= current:
                    sets, current, improved = trial, val, True
                    break
    return sets, current


@dataclass(frozen=True)
class WidimResult:
    value: float
    cover: Cover
    covers_examined: int


def widim_upper(sys: FiniteSystem | None, dist: np.ndarray | None, phi, eps: float,
                variant: str = "small",
                set_count_bound: int = DEFAULT_SET_COUNT_BOUND) -> WidimResult:
    """Upper bound on the eps-width dimension with potential from nerves of candidate covers.

    Exhaustive over sub-families of the candidate family when it has at most
    ``set_count_bound`` sets, otherwise prune-style hill climbing from the
    clique, ball, singleton and disjointified-clique covers.  Every local
    dimension is nonnegative, so ``max phi`` is a floor and ends the search.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if dist is None:
        dist = sys.dist
    dist = np.asarray(dist)
    n = dist.shape[0]
    vals = _values(phi, n)
    floor = float(vals.max())
    family = candidate_family(dist, eps)
    full = set(range(n))

    def score(sets):
        return cover_objective(Cover.from_sets(sets, dist, vals), vals, variant)

    examined = 0
    best_val, best_sets = np.inf, None
    if len(family) <= set_count_bound:
        for k in range(1, len(family) + 1):
            for combo in itertools.combinations(family, k):
                if set().union(*map(set, combo)) != full:
                    continue
                examined += 1
                val = score(combo)
                if val < best_val:
                    best_val, best_sets = val, list(combo)
    else:
        for start in _starting_covers(dist, eps):
            sets, val = _prune(start, n, score)
            examined += 1
            if val < best_val:
                best_val, best_sets = val, sets
            if best_val <= floor:
                break
    return WidimResult(float(best_val), Cover.from_sets(best_sets, dist, vals), examined)


def widim_pair(dist: np.ndarray, phi, eps: float) -> dict:
    """Both variants on the same candidate covers, with the variation term."""
    small = widim_upper(None, dist, phi, eps, "small")
    std = widim_upper(None, dist, phi, eps, "standard")
    return {"small": small.value, "standard": std.value, "var": variation(phi, dist, eps)}


def mdim_profile(sys: FiniteSystem, phi=None, eps_grid=(0.5,), N_max: int = 1,
                 executor=None) -> list:
    """Rows with both widim variants over ``(d_N, S_N phi)`` and their rates per N.

    ``inf_small`` / ``inf_standard`` are running minima of the rates over N,
    the Fekete upper estimate of the inner limit.
    """
    phi = phi if isinstance(phi, Potential) else Potential(_values(phi, sys.n))
    cells = [(N, float(e)) for N in range(1, N_max + 1) for e in eps_grid]
    dists = {N: bowen_metric(sys, N) for N in range(1, N_max + 1)}
    sums = {N: birkhoff_sum(sys, phi, N) for N in range(1, N_max + 1)}

    def run(cell):
        N, e = cell
        pair = widim_pair(dists[N], sums[N], e)
        return {"N": N, "eps": e, "small": pair["small"], "standard": pair["standard"],
                "var": pair["var"], "rate_small": pair["small"] / N,
                "rate_standard": pair["standard"] / N}

    rows = list(executor.map(run, cells)) if executor is not None else [run(c) for c in cells]
    best: dict = {}
    for r in sorted(rows, key=lambda r: (r["eps"], r["N"])):
        s, t = best.get(r["eps"], (np.inf, np.inf))
        s, t = min(s, r["rate_small"]), min(t, r["rate_standard"])
        best[r["eps"]] = (s, t)
        r["inf_small"], r["inf_standard"] = s, t
    return rows
