"""Cooling-power scaling as T_c -> 0 for constant-mu and bang-bang adiabats."""

import argparse

import numpy as np

from qotto.analysis import thirdlaw_scan

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--tc-min", type=float, default=1e-3)
    ap.add_argument("--tc-max", type=float, default=1e-1)
    ap.add_argument("--points", type=int, default=9)
    ap.add_argument("--eta-cv", type=float, default=None, help="bath heat-capacity exponent for zeta")
    args = ap.parse_args()
    grid = np.geomspace(args.tc_min, args.tc_max, args.points)
    for scheme in ("constmu", "optimal"):
        res = thirdlaw_scan(scheme, grid, eta_cv=args.eta_cv)
        line = f"{scheme}: slope={res.slope:.4f} alpha={res.alpha:.4f}"
        if res.zeta is not None:
            line += f" zeta={res.zeta:.4f}"
        print(line)
        for T, R in zip(res.T_c, res.cooling_rate):
            print(f"  T_c={T:.4e} R_c={R:.6e}")
