"""Every estimator on one small system, side by side.

The period-3 points of the full 2-shift with phi(x) = x_0.  For each (eps, N)
we compute the covering number, the Hausdorff dimension at scale, both width
dimension bounds and the rate-distortion side for two invariant measures,
then check the inequalities that link them.

Run: python demos/two_shift_chain.py   (or: meandim verify-chain --scenario demos/two_shift.json)
"""
from pathlib import Path

from meandim import config as cfg
from meandim.chain import verify_chain

HERE = Path(__file__).parent


def main():
    scenario = cfg.load_scenario(str(HERE / "two_shift.json"))
    rep = verify_chain(scenario)
    cols = ["N", "eps", "pressure_rate", "pressure_inf", "dimH_tau0", "widim_small",
            "widim_standard", "rate[uniform]", "rate[bernoulli-3/4]"]
    print(" ".join(f"{c:>14}" for c in cols))
    for row in sorted(rep.rows, key=lambda r: (r["N"], -r["eps"])):
        print(" ".join(f"{row.get(c, float('nan')):>14.4f}" if isinstance(row.get(c), float)
                       else f"{row.get(c, ''):>14}" for c in cols))
    man = rep.manifest()
    print(f"\n{man['checks']} checks: {man['status_counts']}, ok = {man['ok']}")
    worst = min((c for c in rep.checks if c["check"] == "rate_bound"), key=lambda c: c["defect"])
    print(f"tightest rate/covering cell: N={worst['N']} eps={worst['eps']} "
          f"measure={worst['measure']} defect={worst['defect']:.4f}")


if __name__ == "__main__":
    main()
