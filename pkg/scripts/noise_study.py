"""Control-noise study on a frictionless l = 1 adiabat.

For each noise strength the numeric noisy map is compared with the Magnus
reference in the interaction frame ``U_noisy @ U_clean^-1``, and the extra
energy ``delta_f`` is reported.
"""

import argparse
import math

import numpy as np

from qotto.protocols import frictionless_constmu
from qotto.strokes import NoiseSpec, delta_f, magnus_reference, noisy_adiabat_propagator


def study(mu: float, omega0: float, gammas) -> list[tuple]:
    wf = omega0 * math.exp(2 * math.pi * mu / math.sqrt(4 - mu * mu))
    p = frictionless_constmu(omega0, wf, 1)
    inv = np.linalg.inv(noisy_adiabat_propagator(p, None, tol=1e-12).matrix)
    rows = []
    for g in gammas:
        for kind, noise in (("amplitude", NoiseSpec(g, 0.0)), ("phase", NoiseSpec(0.0, g))):
            full = noisy_adiabat_propagator(p, noise, tol=1e-12)
            inter = full.matrix @ inv
            ref = magnus_reference(kind, gamma=g, omega0=omega0, mu=p.mu).matrix
            if kind == "amplitude":
                num, mag = inter[0, 0] - 1, ref[0, 0] - 1
            else:
                num, mag = inter[0, 1], ref[0, 1]
            rows.append((kind, g, num, mag, delta_f(full)))
    return rows


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mu", type=float, default=1e-2)
    ap.add_argument("--omega0", type=float, default=1.0)
    args = ap.parse_args()
    print("kind,gamma,numeric,magnus,delta_f")
    for kind, g, num, mag, df in study(args.mu, args.omega0, np.geomspace(1e-4, 1e-1, 7)):
        print(f"{kind},{g:.3e},{num:.6e},{mag:.6e},{df:.6e}")
