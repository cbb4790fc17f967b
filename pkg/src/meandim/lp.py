"""Small dense primal simplex for ``max c.x  s.t.  A x <= b, x >= 0`` with ``b >= 0``.

The slack basis is feasible, so no phase one is needed.  Bland's rule keeps
degenerate problems (``b_i = 0`` is common for grain-free constraints) from
cycling.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PIVOT_TOL = 1e-12


@dataclass(frozen=True)
class LPResult:
    x: np.ndarray
    value: float
    duals: np.ndarray
    iterations: int


class LPUnbounded(ArithmeticError):
    pass


def simplex_max(c, A, b, max_iter: int = 100_000, tol: float = PIVOT_TOL) -> LPResult:
    c = np.asarray(c, dtype=np.float64)
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    m, n = A.shape
    if np.any(b < -tol):
        raise ValueError("right-hand side must be nonnegative")
    # tableau rows: [A | I | b]; objective row holds reduced costs
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = np.maximum(b, 0.0)
    T[m, :n] = -c
    basis = list(range(n, n + m))
    it = 0
    for it in range(1, max_iter + 1):
        row = T[m, :-1]
        entering = next((j for j in range(n + m) if row[j] < -tol), None)
        if entering is None:
            break
        col = T[:m, entering]
        ratios = np.full(m, np.inf)
        pos = col > tol
        ratios[pos] = T[:m, -1][pos] / col[pos]
        if not np.isfinite(ratios).any():
            raise LPUnbounded("objective is unbounded")
        best = ratios.min()
        ties = [i for i in range(m) if ratios[i] <= best + tol * max(1.0, abs(best))]
        leave = min(ties, key=lambda i: basis[i])
        T[leave] /= T[leave, entering]
        for i in range(m + 1):
            if i != leave and T[i, entering] != 0.0:
                T[i] -= T[i, entering] * T[leave]
        basis[leave] = entering
    else:
        raise RuntimeError("simplex iteration limit reached")
    x = np.zeros(n + m)
    for i, j in enumerate(basis):
        x[j] = T[i, -1]
    duals = T[m, n:n + m].copy()
    return LPResult(x[:n], float(T[m, -1]), duals, it)
