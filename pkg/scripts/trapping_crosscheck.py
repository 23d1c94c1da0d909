"""Compare closed-form trapping and peak velocity with simulated walks for random family coins."""

import argparse

import numpy as np

from qwalk3 import coins, kinematics as kin, simulator as sim, trapping as tr


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=5, help="draws per family")
    ap.add_argument("--steps", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    print("family,P_infinity,P_simulated,v_peak,v_front")
    for family in ("c1", "c2"):
        for _ in range(args.points):
            if family == "c1":
                p = coins.random_c1_params(rng)
                C = coins.build_c1(p)
                d = kin.c1_dispersion_params(p.theta13, p.theta23, p.gamma2 + p.gamma4)
            else:
                p = coins.random_c2_params(rng)
                C = coins.build_c2(p)
                d = kin.c2_dispersion_params(p.delta, p.kappa, p.theta23, p.gamma1)
            run = sim.simulate(C, "mixed", args.steps)
            P = tr.limiting_amplitudes(p).P_infinity
            v = kin.peak_velocity(d).v_peak
            print(f"{family},{P:.6f},{run.tail_average_trapping:.6f},{v:.6f},{run.front_velocity_estimate:.6f}")


if __name__ == "__main__":
    main()
