"""Verification of the dimension inequality chain on finite scenarios.

Each check is direction-aware.  Estimators that only give one-sided bounds
(the nerve search bounds widim from above, Blahut-Arimoto over a restricted
codebook bounds the rate from above) can make a true inequality look violated;
such shortfalls within tolerance are labelled ``slack``, never ``fail``.
"""
from __future__ import annotations

import csv
import io
import json
import math
import shlex
from dataclasses import dataclass, field

import numpy as np

from . import config as cfg
from .covering import DEFAULT_EXACT_BUDGET, covering_number, symbolic_covering_bound
from .hausdorff import default_grain, dim_at_scale
from .info import product_rate_distortion, rate_distortion, rdim_estimate
from .measures import ProbMeasure, integrate, invariant_average, is_invariant, quantized_top_uniform
from .nerve import variation, widim_upper
from .spaces import FiniteSystem, Potential, SymbolicModel, birkhoff_sum, bowen_metric

RATE_BOUND_TOL = 1e-2
CONTENT_TOL = 1e-9
BISECTION_SLACK = 1e-5


@dataclass(frozen=True)
class RateBoundCheck:
    eps: float
    N: int
    rate: float
    integral: float
    lhs: float
    rhs: float
    defect: float
    status: str


def _status(defect: float, tol: float, hard: bool = True) -> str:
    if defect >= 0:
        return "pass"
    if defect >= -tol:
        return "slack"
    return "fail" if hard else "slack"


def verify_rate_bound(sys: FiniteSystem, mu, phi, eps: float, N: int, codebook="orbit",
                  mode: str = "auto", tol: float = RATE_BOUND_TOL,
                  exact_budget: int = DEFAULT_EXACT_BUDGET) -> RateBoundCheck:
    """``R(eps) + log2(1/eps) * int phi dmu  <=  log2 #(X, d_N, S_N phi, eps) / N``.

    The rate is a Blahut-Arimoto upper bound over ``codebook`` at block length
    N, so a small negative defect is BA slack.  Only ``eps <= 1`` is checked:
    the bound passes from ``sup S_N phi`` to its mean, which needs
    ``log2(1/eps) >= 0``; larger eps are reported as ``skipped``.
    """
    mu = mu if isinstance(mu, ProbMeasure) else ProbMeasure(np.asarray(mu, dtype=float))
    phi = phi if isinstance(phi, Potential) else Potential(np.asarray(phi, dtype=float))
    if not is_invariant(sys, mu):
        mu = invariant_average(sys, mu)
    integral = integrate(phi, mu)
    if eps > 1:
        return RateBoundCheck(eps, N, math.nan, integral, math.nan, math.nan, math.nan, "skipped")
    curve = rate_distortion(sys, mu, N, [eps], codebook)
    rate = float(curve.rows[0]["rate"])
    if mode == "auto":
        mode = "exact" if sys.n <= exact_budget else "greedy"
    cov = covering_number(None, bowen_metric(sys, N), birkhoff_sum(sys, phi, N), eps, mode,
                          exact_budget)
    lhs = rate + math.log2(1.0 / eps) * integral
    rhs = cov.log2_value / N
    defect = rhs - lhs
    return RateBoundCheck(eps, N, rate, integral, lhs, rhs, defect, _status(defect, tol))


# ---------------------------------------------------------------- chain


@dataclass
class ChainReport:
    scenario: str
    rows: list = field(default_factory=list)
    checks: list = field(default_factory=list)

    @property
    def violations(self) -> list:
        return [c for c in self.checks if c["status"] == "fail"]

    @property
    def ok(self) -> bool:
        return not self.violations

    def rows_csv(self) -> str:
        return _to_csv(self.rows)

    def checks_csv(self) -> str:
        return _to_csv(self.checks)

    def manifest(self) -> dict:
        counts: dict = {}
        for c in self.checks:
            counts[c["status"]] = counts.get(c["status"], 0) + 1
        return {"scenario": self.scenario, "cells": len(self.rows), "checks": len(self.checks),
                "status_counts": dict(sorted(counts.items())), "ok": self.ok,
                "violations": self.violations}


def _fmt(v):
    if isinstance(v, float):
        return repr(round(v, 12)) if math.isfinite(v) else str(v)
    return v


def _to_csv(rows) -> str:
    if not rows:
        return ""
    keys = list(rows[0].keys())
    for r in rows[1:]:
        keys += [k for k in r if k not in keys]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: _fmt(r.get(k, "")) for k in keys})
    return buf.getvalue()


def _inline(data) -> str:
    return shlex.quote(json.dumps(data, sort_keys=True, separators=(",", ":")))


def _pot_arg(pot) -> str:
    if pot is None:
        return _inline({"kind": "constant", "value": 0})
    return pot if isinstance(pot, str) else _inline(pot)


def verify_chain(scenario: cfg.Scenario, budget: int | None = None,
                 exact_budget: int = DEFAULT_EXACT_BUDGET, executor=None) -> ChainReport:
    """Per-(eps, N) values of every estimator and the inequalities between them.

    Checked per cell:

    * ``easy_half``: ``dim_H(d_N, S_N phi, eps, tau=0) <= log2 #(eps) / log2(1/eps)``
      (hard, content tolerance 1e-9 plus the bisection tolerance);
    * ``widim_lemma``: ``small <= standard <= small + var`` on the same covers (hard);
    * ``widim_vs_hausdorff``: nerve upper bound against ``dim_H`` (slack only,
      since the nerve value over-estimates widim);
    * ``rate_bound`` per measure (BA slack tolerance 1e-2).
    """
    sys = cfg.load_system(scenario.system, **({"budget": budget} if budget else {}))
    phi = cfg.load_potential(scenario.potential, sys)
    measures = [(m.get("label") or m["kind"] + (f"-k{m['k']}" if "k" in m else ""),
                 cfg.load_measure(m, sys)) for m in scenario.measures]
    mode = "exact" if sys.n <= exact_budget else "greedy"
    report = ChainReport(scenario.label or sys.label)
    sys_arg, pot_arg = _inline(scenario.system), _pot_arg(scenario.potential)
    grain = default_grain(sys)
    cells = [(N, e) for N in range(1, scenario.N_max + 1) for e in sorted(scenario.eps, reverse=True)]

    def run(cell):
        N, e = cell
        dist = bowen_metric(sys, N)
        sums = birkhoff_sum(sys, phi, N)
        row = {"N": N, "eps": e, "mode": mode}
        checks = []
        L = math.log2(1.0 / e) if e != 1 else 0.0
        log_cov = None
        if "cover" in scenario.modules or "hausdorff" in scenario.modules:
            log_cov = covering_number(None, dist, sums, e, mode, exact_budget).log2_value
            row["log_cov_bits"] = log_cov
            row["pressure_rate"] = log_cov / N
            row["mdim_M_ratio"] = log_cov / (N * L) if L > 0 else math.nan
        dim0 = None
        if "hausdorff" in scenario.modules and e < 1:
            dim0 = dim_at_scale(None, dist, sums, e, 0.0, mode, exact_budget=exact_budget)
            row["dimH_tau0"] = dim0
            row["dimH_grained"] = dim_at_scale(None, dist, sums, e, grain, mode,
                                               exact_budget=exact_budget) if grain < 1 else math.nan
            bound = log_cov / L
            defect = bound - dim0 + CONTENT_TOL + BISECTION_SLACK
            checks.append({"check": "easy_half", "N": N, "eps": e, "measure": "",
                           "lhs": dim0, "rhs": bound, "defect": defect,
                           "status": _status(defect, 0.0),
                           "repro": f"meandim hausdorff --system {sys_arg} --phi {pot_arg} "
                                    f"--eps {e!r} --N {N} --grain 0 --out -; "
                                    f"meandim cover --system {sys_arg} --phi {pot_arg} "
                                    f"--eps {e!r} --N {N} --mode {mode} --out -"})
        if "widim" in scenario.modules:
            small = widim_upper(None, dist, sums, e, "small").value
            std = widim_upper(None, dist, sums, e, "standard").value
            var = variation(sums, dist, e)
            row.update({"widim_small": small, "widim_standard": std, "var": var})
            defect = min(std - small, small + var - std)
            checks.append({"check": "widim_lemma", "N": N, "eps": e, "measure": "",
                           "lhs": small, "rhs": std, "defect": defect,
                           "status": _status(defect, 0.0),
                           "repro": f"meandim widim --system {sys_arg} --phi {pot_arg} "
                                    f"--eps {e!r} --N {N} --variant small --out -"})
            if dim0 is not None:
                d = dim0 + BISECTION_SLACK - small
                checks.append({"check": "widim_vs_hausdorff", "N": N, "eps": e, "measure": "",
                               "lhs": small, "rhs": dim0, "defect": d,
                               "status": "pass" if d >= 0 else "slack", "repro": ""})
        if "rd" in scenario.modules:
            for name, mu in measures:
                chk = verify_rate_bound(sys, mu, phi, e, N, mode=mode, exact_budget=exact_budget)
                row[f"rate[{name}]"] = chk.rate
                row[f"integral[{name}]"] = chk.integral
                checks.append({"check": "rate_bound", "N": N, "eps": e, "measure": name,
                               "lhs": chk.lhs, "rhs": chk.rhs, "defect": chk.defect,
                               "status": chk.status,
                               "repro": f"meandim rd --system {sys_arg} --measure "
                                        f"{_inline(dict(scenario.measures[[n for n, _ in measures].index(name)]))} "
                                        f"--N {N} --eps {e!r} --codebook orbit --out -"})
        return row, checks

    results = list(executor.map(run, cells)) if executor is not None else [run(c) for c in cells]
    for row, checks in results:
        report.rows.append(row)
        report.checks.extend(checks)
    # Fekete running minimum of the pressure rate per eps
    best: dict = {}
    for row in sorted(report.rows, key=lambda r: (r["N"], -r["eps"])):
        if "pressure_rate" in row:
            best[row["eps"]] = min(best.get(row["eps"], math.inf), row["pressure_rate"])
            row["pressure_inf"] = best[row["eps"]]
    return report


# ---------------------------------------------------------------- Hilbert cube example


def hilbert_eps_grid(m: int, hi: float = 0.2, count: int = 8) -> list:
    """Geometric grid strictly inside ``(1/m, hi)``."""
    lo = 1.0 / m
    return [float(x) for x in np.geomspace(lo, hi, count + 2)[1:-1]]


def example_hilbert(m: int = 16, p: int = 5, W: int = 12, ks=(1, 2, 4),
                    eps_grid=None, pressure_eps: float | None = None,
                    slope_cap: float = 1.1) -> dict:
    """Quantized ``[0,1]^Z`` with the shift and ``phi(x) = x_0``.

    The levels are ``j/(m-1)``; ``mu_k`` is the i.i.d. product of the nearest-level
    quantization of ``Uniform[1 - 1/k, 1]``.  Rates use the single-letter product
    route, the pressure uses product covers at ``N = p`` (the largest block
    length that still carries information on period-p points).
    """
    if m < 2:
        raise ValueError("need m >= 2 levels")
    model = SymbolicModel.uniform_grid(m, p, W)
    eps_grid = hilbert_eps_grid(m) if eps_grid is None else sorted(eps_grid)
    vals = np.asarray(model.alphabet_values)
    rows = []
    for k in ks:
        w = quantized_top_uniform(vals, k)
        integral = float(w @ vals)
        target = 1.0 - 1.0 / (2 * k)
        curve = product_rate_distortion(model, w, eps_grid)
        est = rdim_estimate(curve, (1.0 / m, 0.2))
        rows.append({"k": k, "integral": integral, "target": target,
                     "bias": abs(integral - target), "bias_ok": abs(integral - target) <= 1.0 / m,
                     "rdim_slope": est.fit_slope, "rdim_upper": est.upper,
                     "slope_ok": est.fit_slope <= slope_cap,
                     "sum": est.fit_slope + integral, "sum_target": 2.0 - 1.0 / (2 * k),
                     "rates": [(r["eps"], r["rate"]) for r in curve.rows]})
    e = 1.0 / m if pressure_eps is None else pressure_eps
    pressure = []
    for N in range(1, p + 1):
        bits, runs = symbolic_covering_bound(model, e, N)
        pressure.append({"N": N, "log_cov_bits": bits, "rate": bits / N,
                         "ratio": bits / N / math.log2(1.0 / e), "run_lengths": list(map(int, runs))})
    best = min(pressure, key=lambda r: r["rate"])
    ratio = best["ratio"]
    return {"m": m, "p": p, "W": W, "eps_grid": eps_grid, "measures": rows,
            "pressure_eps": e, "pressure": pressure, "pressure_ratio": ratio,
            "pressure_ok": 1.6 <= ratio <= 2.3,
            "ok": all(r["bias_ok"] and r["slope_ok"] for r in rows) and 1.6 <= ratio <= 2.3}
