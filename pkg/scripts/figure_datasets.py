"""Write the velocity and trapping surfaces of both localizing families as CSV files.

Each dataset is checked for its structural features before it is written:
zeros at theta23 = +-pi/2, two cusp spikes on the theta23 = pi/4 cut, the
second-family maximum at (theta23 = 0, delta = pi/2 - kappa) and the
admissibility region of the second family.
"""

import argparse
import csv
import math
from pathlib import Path

import numpy as np

from qwalk3 import coins, kinematics as kin, trapping as tr
from qwalk3.errors import PoleOnContour

KAPPA = math.pi / 5


def grid(n, lo=-math.pi, hi=math.pi):
    return np.linspace(lo, hi, n)


def fmt(x):
    return "" if x is None else format(float(x), ".12g")


def write(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(x) if not isinstance(x, str) else x for x in r])
    print(f"wrote {path} ({len(rows)} rows)")


def safe_p_infinity(params):
    try:
        return tr.p_infinity_closed_form(params)
    except PoleOnContour:
        return None


def c1_velocity(n):
    rows = []
    for t13 in grid(n):
        for t23 in grid(n, -math.pi / 2, math.pi / 2):
            rows.append((t13, t23, kin.peak_velocity(kin.c1_dispersion_params(t13, t23)).v_peak))
    edge = [v for _, t23, v in rows if abs(abs(t23) - math.pi / 2) < 1e-12]
    assert max(edge) < 1e-12, "velocity must vanish at theta23 = +-pi/2"
    return rows


def c1_cut(n, theta23=math.pi / 4):
    t13 = grid(n)
    v = np.array([kin.peak_velocity(kin.c1_dispersion_params(t, theta23)).v_peak for t in t13])
    spikes = [i for i in range(1, n - 1) if v[i] >= v[i - 1] and v[i] >= v[i + 1]]
    predicted = sorted(t for t in t13[spikes])
    print(f"theta23 = pi/4 cut: spikes at theta13 = {', '.join(f'{t:.4f}' for t in predicted)}")
    assert len(spikes) == 2, "expected two cusp spikes"
    for i in spikes:
        assert abs(v[i] - kin.c1_vmax(theta23)) < 1e-2
    return list(zip(t13, np.full(n, theta23), v))


def c2_velocity(n, kappa=KAPPA):
    rows = []
    for delta in grid(n):
        for t23 in grid(n, -math.pi / 2, math.pi / 2):
            p = coins.C2Params.from_kappa(kappa, delta, t23)
            if not p.is_valid():
                rows.append((delta, t23, None, "1"))
                continue
            rows.append((delta, t23, kin.peak_velocity(kin.c2_dispersion_params(delta, kappa, t23)).v_peak, "0"))
    valid = [r for r in rows if r[3] == "0"]
    assert len(valid) < len(rows), "some deltas must be inadmissible"
    best = max(r[2] for r in valid)
    assert best <= abs(math.cos(kappa)) + 1e-12
    at_max = kin.peak_velocity(kin.c2_dispersion_params(math.pi / 2 - kappa, kappa, 0.0)).v_peak
    assert abs(at_max - abs(math.cos(kappa))) < 1e-9
    return rows


def c2_vmax_curve(n):
    kappas = grid(n, -math.pi / 2, math.pi / 2)
    rows = []
    for kappa in kappas:
        v = kin.peak_velocity(kin.c2_dispersion_params(math.pi / 2 - kappa, kappa, 0.0)).v_peak
        rows.append((kappa, v, kin.c2_vmax(kappa)))
    return rows


def c1_trapping(n):
    rows = []
    for t13 in grid(n):
        for t23 in grid(n, -math.pi / 2, math.pi / 2):
            rows.append((t13, t23, safe_p_infinity(coins.C1Params(theta13=t13, theta23=t23))))
    return rows


def c2_trapping(n, kappa=KAPPA):
    rows = []
    for delta in grid(n):
        for t23 in grid(n, -math.pi / 2, math.pi / 2):
            p = coins.C2Params.from_kappa(kappa, delta, t23)
            rows.append((delta, t23, safe_p_infinity(p) if p.is_valid() else None, "0" if p.is_valid() else "1"))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", type=Path, default=Path("figures"))
    ap.add_argument("--n", type=int, default=101, help="grid points per axis")
    args = ap.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)
    o = args.out_dir
    write(o / "fig1_c1_velocity.csv", ["theta13", "theta23", "v_peak"], c1_velocity(args.n))
    write(o / "fig1_c1_velocity_cut.csv", ["theta13", "theta23", "v_peak"], c1_cut(4 * args.n))
    write(o / "fig1_c1_vmax.csv", ["theta23", "v_max"],
          [(t, kin.c1_vmax(t)) for t in grid(args.n, -math.pi / 2, math.pi / 2)])
    write(o / "fig2_c2_velocity.csv", ["delta", "theta23", "v_peak", "invalid"], c2_velocity(args.n))
    write(o / "fig2_c2_vmax.csv", ["kappa", "v_peak_at_max", "v_max"], c2_vmax_curve(args.n))
    write(o / "fig3_c1_trapping.csv", ["theta13", "theta23", "P_infinity"], c1_trapping(args.n))
    write(o / "fig4_c2_trapping.csv", ["delta", "theta23", "P_infinity", "invalid"], c2_trapping(args.n))


if __name__ == "__main__":
    main()
