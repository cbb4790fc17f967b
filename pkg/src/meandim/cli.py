"""Command line entry point ``meandim``.

Exit codes: 0 when every check passes, 2 when a check reports a violation,
1 on an execution error (bad config, budget exceeded, solver failure).
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from . import config as cfg
from .chain import _to_csv, example_hilbert, verify_chain
from .covering import DEFAULT_EXACT_BUDGET, pressure_profile
from .errors import MeandimError
from .hausdorff import mean_hausdorff_profile
from .info import lemma_kl_bound_check, property_checks, rate_distortion
from .measures import frostman_measure
from .nerve import variation, widim_upper
from .spaces import DEFAULT_POINT_BUDGET, birkhoff_sum, bowen_metric
from .tiling import tiling_for

EXIT_OK, EXIT_ERROR, EXIT_VIOLATION = 0, 1, 2


def _floats(text: str) -> list:
    out = []
    for part in text.split(","):
        part = part.strip()
        if part:
            out.append(float(cfg._num(part)))
    if not out:
        raise argparse.ArgumentTypeError("empty list")
    return out


def _ints(text: str) -> list:
    return [int(v) for v in text.split(",") if v.strip()]


def _emit(text: str, out: str | None):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _emit_json(data, out):
    _emit(json.dumps(data, indent=2, sort_keys=True, default=_json_default) + "\n", out)


def _json_default(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    return str(v)


def _clean(v):
    """Replace non-finite floats so the JSON stays standard."""
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    return v


@contextmanager
def _pool(threads: int):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            yield ex
    else:
        yield None


def _load(args):
    system = cfg.load_system(args.system, budget=args.budget)
    return system


# ---------------------------------------------------------------- subcommands


def cmd_cover(args) -> int:
    sys_ = _load(args)
    phi = cfg.load_potential(args.phi, sys_)
    with _pool(args.threads) as ex:
        prof = pressure_profile(sys_, phi, args.eps, args.N, args.mode, args.exact_budget, ex)
    rows = [{"N": r["N"], "eps": r["eps"], "log_cov_bits": r["log_cov"], "rate": r["rate"],
             "mode": r["mode"]} for r in sorted(prof.rows, key=lambda r: (r["N"], -r["eps"]))]
    _emit(_to_csv(rows), args.out)
    return EXIT_OK


def cmd_hausdorff(args) -> int:
    sys_ = _load(args)
    phi = cfg.load_potential(args.phi, sys_)
    tau = "auto" if args.grain == "auto" else float(cfg._num(args.grain))
    with _pool(args.threads) as ex:
        rows = mean_hausdorff_profile(sys_, phi, args.eps, args.N, args.metric, tau,
                                      args.mode, args.grain_mode, args.exact_budget, ex)
    rows.sort(key=lambda r: (r["N"], -r["eps"]))
    _emit(_to_csv(rows), args.out)
    return EXIT_OK


def cmd_widim(args) -> int:
    sys_ = _load(args)
    phi = cfg.load_potential(args.phi, sys_)
    cells = [(N, e) for N in range(1, args.N + 1) for e in sorted(args.eps, reverse=True)]

    def run(cell):
        N, e = cell
        dist, sums = bowen_metric(sys_, N), birkhoff_sum(sys_, phi, N)
        res = widim_upper(None, dist, sums, e, args.variant)
        return {"N": N, "eps": e, "variant": args.variant, "widim_upper": res.value,
                "rate": res.value / N, "var": variation(sums, dist, e),
                "cover_sets": len(res.cover.sets)}

    with _pool(args.threads) as ex:
        rows = list(ex.map(run, cells)) if ex else [run(c) for c in cells]
    _emit(_to_csv(rows), args.out)
    return EXIT_OK


def _codebook(arg: str, sys_, N: int):
    if arg in ("orbit", "full"):
        return arg
    data = json.loads(Path(arg).read_text())
    words = data["words"] if isinstance(data, dict) else data
    return np.array([[sys_.index(str(p)) for p in w] for w in words], dtype=np.int64)


def cmd_rd(args) -> int:
    sys_ = _load(args)
    mu = cfg.load_measure(args.measure, sys_)
    cells = list(args.N)

    def run(N):
        curve = rate_distortion(sys_, mu, N, args.eps, _codebook(args.codebook, sys_, N))
        return [{"N": N, "eps": r["eps"], "rate": r["rate"], "distortion": r["distortion"],
                 "iterations": r["iterations"], "converged": r["converged"]} for r in curve.rows]

    with _pool(args.threads) as ex:
        parts = list(ex.map(run, cells)) if ex else [run(N) for N in cells]
    rows = [r for part in parts for r in part]
    _emit(_to_csv(rows), args.out)
    return EXIT_OK if all(r["converged"] for r in rows) else EXIT_VIOLATION


def cmd_frostman(args) -> int:
    sys_ = _load(args)
    res = frostman_measure(sys_, None, args.s, args.delta, args.grain, args.family)
    data = {
        "s": args.s, "delta": args.delta, "grain": args.grain, "family": args.family,
        "lp_value": res.lp_value, "dual_cover_value": res.dual_cover_value,
        "duality_gap": res.duality_gap, "max_violation": res.max_violation(),
        "normalizable": res.normalizable,
        "weights": {str(p): float(w) for p, w in zip(sys_.points, res.weights)},
        "measure": None if res.measure is None else json.loads(res.measure.to_json(sys_)),
        "constraints": len(res.constraint_sets),
    }
    _emit_json(_clean(data), args.out)
    ok = res.duality_gap <= 1e-9 and res.max_violation() <= 1e-9
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_tiling(args) -> int:
    sys_ = _load(args)
    psi = cfg.load_psi(args.psi, sys_)
    x = sys_.index(args.point)
    chart = tiling_for(sys_, psi, x, args.horizon, exact=args.exact)
    data = chart.to_dict()
    data["point"] = str(sys_.points[x])
    _emit_json(data, args.out)
    return EXIT_OK


def _write_report(report, out: str | None, seed: int):
    manifest = _clean(report.manifest())
    manifest["seed"] = seed
    if out in (None, "-"):
        sys.stdout.write(report.rows_csv())
        sys.stdout.write(report.checks_csv())
        sys.stdout.write(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        return
    base = Path(out)
    base.mkdir(parents=True, exist_ok=True)
    (base / "cells.csv").write_text(report.rows_csv())
    (base / "checks.csv").write_text(report.checks_csv())
    manifest["files"] = ["cells.csv", "checks.csv"]
    (base / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def cmd_verify_chain(args) -> int:
    scenario = cfg.load_scenario(args.scenario)
    with _pool(args.threads) as ex:
        report = verify_chain(scenario, args.budget, args.exact_budget, ex)
    _write_report(report, args.out or scenario.outputs.get("dir"), scenario.seed)
    for v in report.violations:
        print(f"VIOLATION {v['check']} N={v['N']} eps={v['eps']} defect={v['defect']!r}\n"
              f"  reproduce: {v['repro']}", file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_VIOLATION


def cmd_example_hilbert(args) -> int:
    rep = example_hilbert(args.m, args.p, args.W, tuple(args.k))
    _emit_json(_clean(rep), args.out)
    return EXIT_OK if rep["ok"] else EXIT_VIOLATION


def cmd_selftest(args) -> int:
    """Fast sanity suite; prints one line per check."""
    rng = np.random.default_rng(args.seed)
    results = []
    worst = -math.inf
    for _ in range(200):
        n = int(rng.integers(1, 8))
        p = rng.dirichlet(np.ones(n))
        a = rng.uniform(-2, 2, n)
        eps = float(rng.uniform(0.01, 0.99))
        chk = lemma_kl_bound_check(p, a, eps)
        worst = max(worst, chk.lhs - chk.rhs)
    results.append(("kl_bound", worst <= 1e-9, f"max excess {worst:.3g}"))
    from .info import binary_entropy, rd_curve
    curve = rd_curve(1 - np.eye(2), [0.5, 0.5], [0.11, 0.25])
    err = max(abs(r["rate"] - (1 - binary_entropy(r["eps"]))) for r in curve.rows)
    results.append(("blahut_arimoto", err <= 1e-3, f"max error {err:.3g}"))
    props = property_checks(args.seed, 50)
    bad = sum(v["violations"] for v in props.values())
    results.append(("info_lemmas", bad == 0, f"{bad} violations"))
    scenario = cfg.Scenario({"kind": "symbolic", "alphabet": [0, 1], "period": 2, "window": 4},
                            "x0", ({"kind": "uniform"},), (0.5, 0.25), 2)
    rep = verify_chain(scenario)
    results.append(("chain", rep.ok, f"{len(rep.checks)} checks"))
    status = 0
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        status |= not ok
    return EXIT_VIOLATION if status else EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    # defaults are filled in by main() so flags work before or after the subcommand
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="seed for stochastic subroutines (default 0)")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                        help="worker threads for grid cells (default 1)")
    common.add_argument("--budget", type=int, default=argparse.SUPPRESS,
                        help=f"maximum number of points a system may have (default {DEFAULT_POINT_BUDGET})")
    p = argparse.ArgumentParser(prog="meandim", parents=[common],
                                description="Finite-scale mean dimension with potential.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=fn)
        return sp

    def grid(sp, phi=True):
        sp.add_argument("--system", required=True, help="system config (path or inline JSON)")
        if phi:
            sp.add_argument("--phi", default=None, help="potential config, or x0 (default: 0)")
        sp.add_argument("--eps", type=_floats, required=True, help="comma-separated scales")
        sp.add_argument("--N", type=int, default=1, help="largest block length")
        sp.add_argument("--exact-budget", type=int, default=DEFAULT_EXACT_BUDGET)
        sp.add_argument("--out", default="-")

    sp = add("cover", cmd_cover, "covering numbers with potential")
    grid(sp)
    sp.add_argument("--mode", choices=["exact", "greedy", "auto"], default="auto")

    sp = add("hausdorff", cmd_hausdorff, "Hausdorff dimension at scale")
    grid(sp)
    sp.add_argument("--metric", choices=["max", "avg"], default="max")
    sp.add_argument("--grain", default="auto", help="grain tau, or auto")
    sp.add_argument("--grain-mode", choices=["max", "sum"], default="max")
    sp.add_argument("--mode", choices=["exact", "greedy", "auto"], default="auto")

    sp = add("widim", cmd_widim, "nerve upper bounds on widim")
    grid(sp)
    sp.add_argument("--variant", choices=["small", "standard"], default="small")

    sp = add("rd", cmd_rd, "Blahut-Arimoto rate-distortion curves")
    sp.add_argument("--system", required=True)
    sp.add_argument("--measure", required=True)
    sp.add_argument("--N", type=_ints, default=[1], help="comma-separated block lengths")
    sp.add_argument("--eps", type=_floats, required=True)
    sp.add_argument("--codebook", default="orbit", help="orbit, full, or a JSON file of id words")
    sp.add_argument("--out", default="-")

    sp = add("frostman", cmd_frostman, "Frostman LP and its dual cover")
    sp.add_argument("--system", required=True)
    sp.add_argument("--s", type=float, required=True)
    sp.add_argument("--delta", type=float, required=True)
    sp.add_argument("--grain", type=float, default=0.0)
    sp.add_argument("--family", choices=["balls", "subsets"], default="balls")
    sp.add_argument("--out", default="-")

    sp = add("tiling", cmd_tiling, "dynamical Voronoi tiling chart")
    sp.add_argument("--system", required=True)
    sp.add_argument("--psi", required=True)
    sp.add_argument("--point", required=True)
    sp.add_argument("--horizon", type=int, required=True)
    sp.add_argument("--exact", action="store_true", help="rational arithmetic")
    sp.add_argument("--out", default="-")

    sp = add("verify-chain", cmd_verify_chain, "check the inequality chain on a scenario")
    sp.add_argument("--scenario", required=True)
    sp.add_argument("--exact-budget", type=int, default=DEFAULT_EXACT_BUDGET)
    sp.add_argument("--out", default=None, help="output directory (default: stdout)")

    sp = add("example-hilbert", cmd_example_hilbert, "quantized Hilbert cube example")
    sp.add_argument("--m", type=int, default=16)
    sp.add_argument("--p", type=int, default=5)
    sp.add_argument("--W", type=int, default=12)
    sp.add_argument("--k", type=_ints, default=[1, 2, 4])
    sp.add_argument("--out", default="-")

    add("selftest", cmd_selftest, "fast sanity suite")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name, default in (("seed", 0), ("threads", 1), ("budget", DEFAULT_POINT_BUDGET)):
        if not hasattr(args, name):
            setattr(args, name, default)
    try:
        return args.func(args)
    except (MeandimError, ValueError, KeyError, OSError, RuntimeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
