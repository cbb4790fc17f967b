"""Finite models of dynamical systems.

A :class:`FiniteSystem` is a finite point set with a base metric and a
bijective time map.  Symbolic models (period-p points of a shift over a
finite alphabet of levels in [0, 1]) are the main source of systems; the
metric on them is the weighted coordinate sum truncated at ``|n| <= W``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Hashable, Sequence

import numpy as np

from .errors import BudgetExceededError, ConfigError

DEFAULT_WINDOW = 16
DEFAULT_POINT_BUDGET = 4096
METRIC_ATOL = 1e-12


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class FiniteSystem:
    """Finite stand-in for a compact system ``(X, T, d)``.

    ``time_map[i]`` is the index of ``T(points[i])``.
    """

    points: tuple
    dist: np.ndarray
    time_map: np.ndarray
    label: str = ""
    coords: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        points = tuple(self.points)
        dist = np.asarray(self.dist, dtype=np.float64)
        tmap = np.asarray(self.time_map, dtype=np.int64)
        n = len(points)
        if dist.shape != (n, n):
            raise ValueError(f"dist has shape {dist.shape}, expected {(n, n)}")
        if tmap.shape != (n,):
            raise ValueError("time_map must have one entry per point")
        if not np.all(np.isfinite(dist)) or np.any(dist < 0):
            raise ValueError("distances must be finite and nonnegative")
        if np.any(np.abs(np.diag(dist)) > 0):
            raise ValueError("dist must have a zero diagonal")
        if not np.array_equal(dist, dist.T):
            raise ValueError("dist must be symmetric")
        if n and (tmap.min() < 0 or tmap.max() >= n or len(np.unique(tmap)) != n):
            raise ValueError("time_map must be a bijection on point indices")
        if len(set(points)) != n:
            raise ValueError("point ids must be distinct")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "dist", _readonly(dist))
        object.__setattr__(self, "time_map", _readonly(tmap))
        if self.coords is not None:
            object.__setattr__(self, "coords", _readonly(np.asarray(self.coords, dtype=np.float64)))

    @property
    def n(self) -> int:
        return len(self.points)

    def index(self, point_id: Hashable) -> int:
        """Position of ``point_id``; ids given as strings also match by ``str(id)``."""
        try:
            return self.points.index(point_id)
        except ValueError:
            names = [str(p) for p in self.points]
            if str(point_id) in names:
                return names.index(str(point_id))
            raise

    def iterate(self, k: int) -> np.ndarray:
        """Index array of ``T^k`` (negative ``k`` uses the inverse map)."""
        idx = np.arange(self.n)
        step = self.time_map if k >= 0 else np.argsort(self.time_map)
        for _ in range(abs(k)):
            idx = step[idx]
        return idx

    def orbit_lengths(self) -> np.ndarray:
        lengths = np.zeros(self.n, dtype=np.int64)
        for i in range(self.n):
            if lengths[i]:
                continue
            cycle = [i]
            j = int(self.time_map[i])
            while j != i:
                cycle.append(j)
                j = int(self.time_map[j])
            lengths[cycle] = len(cycle)
        return lengths

    def with_metric(self, dist: np.ndarray, label: str | None = None) -> "FiniteSystem":
        return FiniteSystem(self.points, dist, self.time_map,
                            self.label if label is None else label, self.coords)

    def triangle_defect(self) -> float:
        """Largest violation of the triangle inequality (0 for a metric)."""
        d = self.dist
        if self.n == 0:
            return 0.0
        worst = 0.0
        for k in range(self.n):
            worst = max(worst, float(np.max(d - (d[:, [k]] + d[[k], :]))))
        return worst

    @classmethod
    def cycle(cls, p: int, label: str | None = None) -> "FiniteSystem":
        """Rotation of ``Z/pZ`` with the circular metric scaled to diameter <= 1/2."""
        if p < 1:
            raise ValueError("p must be positive")
        i = np.arange(p)
        gap = np.abs(i[:, None] - i[None, :])
        dist = np.minimum(gap, p - gap) / p
        return cls(tuple(range(p)), dist, (i + 1) % p, label or f"cycle-{p}")


@dataclass(frozen=True)
class Potential:
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1 or not np.all(np.isfinite(v)):
            raise ValueError("potential values must be a finite 1-d array")
        object.__setattr__(self, "values", _readonly(v))

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0

    @classmethod
    def constant(cls, n: int, c: float = 0.0) -> "Potential":
        return cls(np.full(n, float(c)), f"const({c:g})")

    @classmethod
    def coordinate(cls, sys: FiniteSystem, index: int = 0) -> "Potential":
        """phi(x) = x_index on a symbolic system."""
        if sys.coords is None:
            raise ConfigError("coordinate potential needs a symbolic system")
        p = sys.coords.shape[1]
        return cls(sys.coords[:, index % p], f"x{index}")


@dataclass(frozen=True)
class SymbolicModel:
    """Period-``period`` points of the shift on ``alphabet_values^Z``."""

    alphabet_values: tuple
    period: int
    window: int = DEFAULT_WINDOW

    def __post_init__(self):
        vals = tuple(float(a) for a in self.alphabet_values)
        object.__setattr__(self, "alphabet_values", vals)
        if len(vals) < 1:
            raise ConfigError("alphabet must be nonempty")
        if any(not 0.0 <= a <= 1.0 for a in vals):
            raise ConfigError("alphabet values must lie in [0, 1]")
        if self.period < 1 or self.window < 1:
            raise ConfigError("period and window must be positive")

    @property
    def size(self) -> int:
        return len(self.alphabet_values) ** self.period

    def residue_weights(self) -> np.ndarray:
        """Total weight ``sum 2^-|n|`` over ``|n| <= W`` in each residue class mod p."""
        w = np.zeros(self.period)
        for n in range(-self.window, self.window + 1):
            w[n % self.period] += 2.0 ** -abs(n)
        return w

    def tail_bound(self) -> float:
        vals = self.alphabet_values
        return 2.0 ** (-self.window + 1) * (max(vals) - min(vals))

    @classmethod
    def uniform_grid(cls, m: int, period: int, window: int = DEFAULT_WINDOW) -> "SymbolicModel":
        """``m`` equally spaced levels ``j/(m-1)`` (``{0}`` when m == 1)."""
        if m == 1:
            return cls((0.0,), period, window)
        return cls(tuple(j / (m - 1) for j in range(m)), period, window)


def word_metric(coords_a: np.ndarray, coords_b: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Pairwise weighted coordinate sums between two stacks of period words."""
    diff = np.abs(coords_a[:, None, :] - coords_b[None, :, :])
    return diff @ weights


def build_symbolic(model: SymbolicModel, budget: int = DEFAULT_POINT_BUDGET) -> FiniteSystem:
    m, p = len(model.alphabet_values), model.period
    if model.size > budget:
        raise BudgetExceededError(f"{m}^{p} = {model.size} points exceeds budget {budget}")
    words = np.array(list(itertools.product(range(m), repeat=p)), dtype=np.int64).reshape(-1, p)
    vals = np.asarray(model.alphabet_values)
    coords = vals[words]
    dist = word_metric(coords, coords, model.residue_weights())
    dist = 0.5 * (dist + dist.T)
    np.fill_diagonal(dist, 0.0)
    # shifting a word left by one letter
    radix = m ** np.arange(p - 1, -1, -1)
    tmap = np.roll(words, -1, axis=1) @ radix
    ids = tuple(",".join(map(str, w)) for w in words)
    label = f"shift(m={m}, p={p}, W={model.window})"
    return FiniteSystem(ids, dist, tmap, label, coords)


def bowen_metric(sys: FiniteSystem, N: int) -> np.ndarray:
    """``d_N(x, y) = max_{0<=n<N} d(T^n x, T^n y)``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    out = np.array(sys.dist)
    idx = np.arange(sys.n)
    for _ in range(N - 1):
        idx = sys.time_map[idx]
        np.maximum(out, sys.dist[np.ix_(idx, idx)], out=out)
    return out


def average_metric(sys: FiniteSystem, N: int) -> np.ndarray:
    """``(1/N) sum_{n<N} d(T^n x, T^n y)``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    out = np.array(sys.dist)
    idx = np.arange(sys.n)
    for _ in range(N - 1):
        idx = sys.time_map[idx]
        out += sys.dist[np.ix_(idx, idx)]
    return out / N


def birkhoff_sum(sys: FiniteSystem, phi: Potential, N: int) -> Potential:
    if N < 1:
        raise ValueError("N must be >= 1")
    vals = phi.values
    out = np.array(vals)
    idx = np.arange(sys.n)
    for _ in range(N - 1):
        idx = sys.time_map[idx]
        out = out + vals[idx]
    return Potential(out, f"S_{N}({phi.label})")


def dynamical_system(sys: FiniteSystem, N: int, kind: str = "max") -> FiniteSystem:
    """Copy of ``sys`` carrying ``d_N`` (kind='max') or the averaged metric (kind='avg')."""
    if kind == "max":
        return sys.with_metric(bowen_metric(sys, N), f"{sys.label} d_{N}")
    if kind in ("avg", "average"):
        return sys.with_metric(average_metric(sys, N), f"{sys.label} dbar_{N}")
    raise ValueError(f"unknown metric kind {kind!r}")


def min_positive_distance(dist: np.ndarray) -> float:
    pos = dist[dist > 0]
    return float(pos.min()) if pos.size else float("inf")


def diameter(dist: np.ndarray, members: Sequence[int] | None = None) -> float:
    if members is not None:
        members = list(members)
        if len(members) < 2:
            return 0.0
        dist = dist[np.ix_(members, members)]
    return float(dist.max()) if dist.size else 0.0
