"""Fit the decay of the origin probability towards its limit for several coins and starts.

Prints the log-log slope of the residual envelope for each basis start and
the mixed start. A coin with a trapped component keeps an interference term
between the bound state and the spreading part, which decays as t^-1/2;
coins without point spectrum show the faster t^-1 decay of |amplitude|^2.
"""

import argparse

from qwalk3 import coins, simulator as sim, trapping as tr


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=4096)
    args = ap.parse_args()
    cases = {
        "grover": (coins.grover(), coins.grover_params()),
        "c_rho(0.6)": (coins.c_rho(0.6), coins.c_rho_params(0.6)),
        "dft3": (coins.dft3(), None),
    }
    for name, (C, params) in cases.items():
        for start in ("L", "S", "R", "mixed"):
            run = sim.simulate(C, start, args.steps)
            if params is None:
                limit = 0.0
            elif start == "mixed":
                limit = tr.limiting_amplitudes(params).P_infinity
            else:
                psi = tr.limiting_amplitudes(params).psi
                limit = float(sum(abs(psi[:, "LSR".index(start)]) ** 2))
            slope = sim.decay_exponent(run.origin_series, limit)
            print(f"{name:12s} {start:5s} limit={limit:.6f} slope={slope:+.3f}")


if __name__ == "__main__":
    main()
