"""Dynamical Voronoi tiling of the real line from a marker function.

For a point x, the markers are ``(a, 1/psi(T^a x))`` for integers a with
``psi(T^a x) > 0``.  The closed Voronoi cell of a marker meets the horizontal
axis in an interval (possibly empty or a single point); ties are shared by
both neighbouring closed cells.  Only markers with ``|a| <= horizon`` are
used, and every interval carries a flag saying whether markers beyond the
horizon could change it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DegenerateMarkersError, NoMarkerError, UncertifiedWindowError
from .spaces import FiniteSystem

INF = math.inf


def bisector_abscissa(a, h_a, b, h_b):
    """Axis point equidistant from ``(a, h_a)`` and ``(b, h_b)``.

    Works with floats or Fractions (exact when all inputs are rational).
    """
    if a == b:
        raise DegenerateMarkersError("markers share a position")
    return (b * b - a * a + h_b * h_b - h_a * h_a) / (2 * (b - a))


@dataclass(frozen=True)
class MarkerFunction:
    values: tuple

    def __post_init__(self):
        vals = tuple(Fraction(v) if isinstance(v, (int, Fraction)) else float(v) for v in self.values)
        if any(not 0 <= v <= 1 for v in vals):
            raise ValueError("marker values must lie in [0, 1]")
        object.__setattr__(self, "values", vals)

    def validate(self, sys: FiniteSystem) -> "MarkerFunction":
        """Check that every orbit contains a point with positive marker value."""
        if len(self.values) != sys.n:
            raise ValueError("one marker value per point is required")
        seen = np.zeros(sys.n, dtype=bool)
        for i in range(sys.n):
            if seen[i]:
                continue
            orbit, j = [], i
            while not seen[j]:
                seen[j] = True
                orbit.append(j)
                j = int(sys.time_map[j])
            if not any(self.values[k] > 0 for k in orbit):
                raise NoMarkerError(f"orbit of point {sys.points[i]!r} has no marker")
        return self

    @classmethod
    def constant(cls, sys: FiniteSystem, value=1) -> "MarkerFunction":
        return cls((value,) * sys.n).validate(sys)

    @classmethod
    def cylinder(cls, sys: FiniteSystem, prefix) -> "MarkerFunction":
        """1 on symbolic points whose word starts with ``prefix`` (level indices), else 0."""
        prefix = [int(v) for v in prefix]
        vals = []
        for pid in sys.points:
            word = [int(t) for t in str(pid).split(",")]
            vals.append(1 if word[:len(prefix)] == prefix else 0)
        return cls(tuple(vals)).validate(sys)

    @classmethod
    def on_points(cls, sys: FiniteSystem, indices, value=1) -> "MarkerFunction":
        vals = [0] * sys.n
        for i in indices:
            vals[i] = value
        return cls(tuple(vals)).validate(sys)


@dataclass(frozen=True)
class TileInterval:
    a: int
    lo: object
    hi: object
    lo_certified: bool
    hi_certified: bool

    @property
    def certified(self) -> bool:
        return self.lo_certified and self.hi_certified


@dataclass(frozen=True)
class TilingChart:
    point: int
    horizon: int
    markers: tuple
    intervals: tuple
    empty: tuple = field(default=())

    def boundary(self, certified_only: bool = False) -> list:
        pts = set()
        for iv in self.intervals:
            if iv.lo != -INF and (iv.lo_certified or not certified_only):
                pts.add(iv.lo)
            if iv.hi != INF and (iv.hi_certified or not certified_only):
                pts.add(iv.hi)
        return sorted(pts)

    def certified_span(self):
        """Union of the maximal run of certified intervals nearest the origin, or None."""
        cert = [iv for iv in self.intervals if iv.certified]
        if not cert:
            return None
        cert.sort(key=lambda iv: iv.lo)
        centre = min(cert, key=lambda iv: 0 if iv.lo <= 0 <= iv.hi else min(abs(iv.lo), abs(iv.hi)))
        k = cert.index(centre)
        lo_k = hi_k = k
        while lo_k > 0 and cert[lo_k - 1].hi == cert[lo_k].lo:
            lo_k -= 1
        while hi_k < len(cert) - 1 and cert[hi_k + 1].lo == cert[hi_k].hi:
            hi_k += 1
        return cert[lo_k].lo, cert[hi_k].hi

    def guard_margin(self):
        """Smallest M with every certified ``I(x, a)`` inside ``[a - M, a + M]``, or None."""
        cert = [iv for iv in self.intervals if iv.certified]
        if not cert:
            return None
        return max(max(iv.a - iv.lo, iv.hi - iv.a) for iv in cert)

    def to_dict(self) -> dict:
        def num(v):
            if v in (INF, -INF):
                return None
            return str(v) if isinstance(v, Fraction) else float(v)
        return {
            "point": self.point,
            "horizon": self.horizon,
            "markers": [[a, num(h)] for a, h in self.markers],
            "intervals": [{"a": iv.a, "lo": num(iv.lo), "hi": num(iv.hi),
                           "lo_certified": iv.lo_certified, "hi_certified": iv.hi_certified}
                          for iv in self.intervals],
            "empty": list(self.empty),
            "boundary": [num(t) for t in self.boundary()],
        }

    def interval(self, a: int):
        for iv in self.intervals:
            if iv.a == a:
                return iv
        return None


def _heights(psi: MarkerFunction, sys: FiniteSystem, x: int, horizon: int, exact: bool):
    markers = []
    idx = int(x)
    inv = np.argsort(sys.time_map)
    # walk backwards to -horizon, then forwards
    back = idx
    positions = {0: idx}
    for a in range(1, horizon + 1):
        back = int(inv[back])
        positions[-a] = back
    fwd = idx
    for a in range(1, horizon + 1):
        fwd = int(sys.time_map[fwd])
        positions[a] = fwd
    for a in range(-horizon, horizon + 1):
        v = psi.values[positions[a]]
        if v > 0:
            if exact:
                v = v if isinstance(v, Fraction) else Fraction(v)
                markers.append((a, 1 / v))
            else:
                markers.append((a, 1.0 / float(v)))
    return markers


def _cells_pairwise(markers):
    cells = []
    for i, (a, h) in enumerate(markers):
        lo, hi = -INF, INF
        for j, (b, g) in enumerate(markers):
            if j == i:
                continue
            t = bisector_abscissa(a, h, b, g)
            if b > a:
                hi = t if hi == INF else min(hi, t)
            else:
                lo = t if lo == -INF else max(lo, t)
        cells.append((lo, hi))
    return cells


def _cells_envelope(markers):
    """Lower envelope of ``t -> (t-a)^2 + h^2``; markers must be sorted by position."""
    stack = []
    for k, (a, h) in enumerate(markers):
        while len(stack) >= 2:
            p, q = markers[stack[-2]], markers[stack[-1]]
            if bisector_abscissa(*p, a, h) < bisector_abscissa(*p, *q):
                stack.pop()
            else:
                break
        stack.append(k)
    cells = [None] * len(markers)
    for pos, k in enumerate(stack):
        a, h = markers[k]
        lo = -INF if pos == 0 else bisector_abscissa(*markers[stack[pos - 1]], a, h)
        hi = INF if pos == len(stack) - 1 else bisector_abscissa(a, h, *markers[stack[pos + 1]])
        cells[k] = (lo, hi)
    for k in range(len(markers)):
        if cells[k] is None:
            cells[k] = (INF, -INF)
    return cells


def voronoi_intervals(markers, method: str = "envelope") -> list:
    """Axis cells ``(lo, hi)`` of markers ``(a, h)`` sorted by ``a``; empty cells have ``lo > hi``."""
    markers = sorted(markers)
    if method == "envelope":
        return _cells_envelope(markers)
    if method == "pairwise":
        return _cells_pairwise(markers)
    raise ValueError(f"unknown method {method!r}")


def _interval_safe(lo, hi, a, h, horizon) -> bool:
    """No marker beyond the horizon (height >= 1) can reach any t in ``[lo, hi]``.

    ``(t - a)^2 + h^2`` is convex, so its maximum sits at an endpoint; the
    distance to the nearest hidden marker only shrinks as ``|t|`` grows.
    """
    if lo in (INF, -INF) or hi in (INF, -INF):
        return False
    far = max(abs(lo), abs(hi))
    reach = horizon + 1 - far
    hidden = (reach * reach if reach > 0 else 0) + 1
    near = max((lo - a) ** 2, (hi - a) ** 2) + h * h
    return near < hidden


def tiling_for(sys: FiniteSystem, psi: MarkerFunction, x: int, horizon: int,
               exact: bool = False, method: str = "envelope") -> TilingChart:
    markers = _heights(psi, sys, x, horizon, exact)
    if not markers:
        raise NoMarkerError(f"no marker within horizon {horizon} of point {x}")
    cells = voronoi_intervals(markers, method)
    intervals, empty = [], []
    for (a, h), (lo, hi) in zip(markers, cells):
        if lo > hi:
            empty.append(a)
            continue
        safe = _interval_safe(lo, hi, a, h, horizon)
        lo_ok = lo != -INF and safe
        hi_ok = hi != INF and safe
        intervals.append(TileInterval(a, lo, hi, lo_ok, hi_ok))
    return TilingChart(int(x), horizon, tuple(markers), tuple(intervals), tuple(empty))


@dataclass(frozen=True)
class EquivarianceReport:
    n: int
    window: tuple
    compared: int
    max_mismatch: float
    ok: bool


def equivariance_check(sys: FiniteSystem, psi: MarkerFunction, x: int, n: int, horizon: int,
                       exact: bool = False, tol: float = 1e-9) -> EquivarianceReport:
    """Compare the boundary of ``T^n x`` with the boundary of x shifted by ``-n``."""
    y = int(sys.iterate(n)[x])
    cx = tiling_for(sys, psi, x, horizon, exact)
    cy = tiling_for(sys, psi, y, horizon, exact)
    sx, sy = cx.certified_span(), cy.certified_span()
    if sx is None or sy is None:
        raise UncertifiedWindowError("no certified window to compare")
    lo = max(sx[0] - n, sy[0])
    hi = min(sx[1] - n, sy[1])
    if lo >= hi:
        raise UncertifiedWindowError("certified windows do not overlap after the shift")
    bx = [t - n for t in cx.boundary() if lo <= t - n <= hi]
    by = [t for t in cy.boundary() if lo <= t <= hi]
    if len(bx) != len(by):
        mismatch = INF
    else:
        mismatch = max((abs(float(u - v)) for u, v in zip(bx, by)), default=0.0)
    return EquivarianceReport(n, (lo, hi), len(by), mismatch, mismatch <= tol)


def boundary_count(chart: TilingChart, lo, hi) -> int:
    """Boundary points in the half-open window ``[lo, hi)``.

    Half-open windows tile, so a boundary with period p gives exactly R/p
    points in ``[0, R)`` whenever p divides R.
    """
    return sum(1 for t in chart.boundary() if lo <= t < hi)


def boundary_density(sys: FiniteSystem, psi: MarkerFunction, R_list, exact: bool = False,
                     points=None, max_horizon: int = 1_000_000) -> list:
    """Rows ``(R, sup_x |boundary(x) ∩ [0, R)| / R)`` over the chosen points (default: all)."""
    pts = range(sys.n) if points is None else points
    rows = []
    for R in R_list:
        best = 0.0
        for x in pts:
            horizon = int(R) + 8
            while True:
                chart = tiling_for(sys, psi, x, horizon, exact)
                span = chart.certified_span()
                if span is not None and span[0] <= 0 and span[1] >= R:
                    break
                horizon *= 2
                if horizon > max_horizon:
                    raise UncertifiedWindowError(f"cannot certify [0, {R}] for point {x}")
            best = max(best, boundary_count(chart, 0, R) / R)
        rows.append({"R": R, "density": best})
    return rows
