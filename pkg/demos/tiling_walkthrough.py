"""Dynamical Voronoi tiling on a 7-cycle, in exact rational arithmetic.

Each orbit position a with psi(T^a x) > 0 becomes a marker at height
1/psi(T^a x) above the real axis; the axis is cut by the Voronoi cells of
the markers.  Intervals whose endpoints cannot move when the horizon grows
are flagged certified.  Shifting the point by T^n shifts the tiling by -n.

Run: python demos/tiling_walkthrough.py
"""
from fractions import Fraction

from meandim.spaces import FiniteSystem
from meandim.tiling import MarkerFunction, boundary_density, equivariance_check, tiling_for


def main():
    sys = FiniteSystem.cycle(7)
    psi = MarkerFunction(tuple(Fraction(v, 4) for v in (4, 1, 0, 3, 0, 2, 0))).validate(sys)
    chart = tiling_for(sys, psi, 0, horizon=10, exact=True)
    print("markers (a, height):", [(a, str(h)) for a, h in chart.markers if -7 <= a <= 7])
    for iv in chart.intervals:
        if -7 <= iv.a <= 7:
            flag = "certified" if iv.certified else "open"
            print(f"  I(x, {iv.a:>3}) = [{iv.lo}, {iv.hi}]  {flag}")
    print("empty cells at", list(chart.empty))
    for n in (1, 3, 7):
        rep = equivariance_check(sys, psi, 0, n, 40, exact=True, tol=0)
        print(f"T^{n}: {rep.compared} boundary points compared, mismatch {rep.max_mismatch}")
    for row in boundary_density(sys, psi, [70, 700], exact=True):
        print(f"density on [0, {row['R']}): {row['density']}")


if __name__ == "__main__":
    main()
