"""
Command-line front end.

    qwalk3 coin build --family c1 --theta13 0.7297 --theta23 2.0344
    qwalk3 coin classify --matrix grover.json
    qwalk3 scan --family c1 --output velocity --sweep theta13=-1.5708:1.5708:101 --fixed theta23=0.7854
    qwalk3 scan --output spectrum --preset grover --samples 256
    qwalk3 simulate --preset grover --steps 2000 --initial mixed --out-dir run/
    qwalk3 verify --family c1 --random 20

Errors go to standard error as a single ``error:<code>: message`` line.
Exit codes: 1 failed verification, 2 malformed input, 3 non-unitary coin,
4 lattice overflow.
"""

import argparse
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import coins, kinematics, simulator, spectrum, trapping
from .errors import InvalidC2Params, LatticeOverflow, NotUnitary, QWalkError

EXIT_VERIFY = 1
EXIT_INPUT = 2
EXIT_UNITARY = 3
EXIT_OVERFLOW = 4

ANGLE_NAMES = ["theta12", "theta13", "theta23", "delta", "kappa",
               "gamma1", "gamma2", "gamma3", "gamma4", "gamma5"]
PRESETS = {"grover": coins.grover, "dft3": coins.dft3, "identity": coins.identity}


class UsageError(QWalkError):
    code = "UsageError"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def fmt(x):
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if isinstance(x, str):
        return x
    return format(float(x), ".12g")


def write_csv(path, header, rows):
    buf = io.StringIO(newline="")
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    text = buf.getvalue()
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, newline="")


# --- coin sources -----------------------------------------------------------

def _add_coin_source(p, matrix=True):
    if matrix:
        p.add_argument("--matrix", help="coin JSON file")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--family", choices=["general", "c1", "c2"])
    for name in ANGLE_NAMES:
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--degrees", action="store_true", help="angle flags are in degrees")


def _angle(args, value):
    return math.radians(value) if args.degrees else value


def _family_params(args):
    given = {n: _angle(args, getattr(args, n)) for n in ANGLE_NAMES if getattr(args, n, None) is not None}
    if args.family == "c2" and "kappa" in given:
        if "gamma2" in given:
            raise UsageError("give either --kappa or --gamma2 for the c2 family, not both")
        kappa = given.pop("kappa")
        extra = set(given) - {"delta", "theta23", "gamma1", "gamma4", "gamma5"}
        if extra:
            raise UsageError(f"unknown parameters for family 'c2': {sorted(extra)}")
        return coins.C2Params.from_kappa(kappa, **given)
    try:
        return coins.params_from_dict(args.family, given)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def load_coin(args):
    """(UnitaryCoin, family params or None) from --matrix, --preset or --family."""
    sources = [s for s in ("matrix", "preset", "family") if getattr(args, s, None)]
    if len(sources) != 1:
        raise UsageError("give exactly one of --matrix, --preset, --family")
    if sources[0] == "matrix":
        try:
            obj = json.loads(Path(args.matrix).read_text())
            return coins.UnitaryCoin(coins.coin_from_json(obj)), None
        except (OSError, ValueError, TypeError, KeyError) as exc:
            raise UsageError(f"cannot read coin file {args.matrix}: {exc}") from exc
    if sources[0] == "preset":
        return PRESETS[args.preset](), None
    params = _family_params(args)
    builders = {coins.CoinParams: coins.build_unitary, coins.C1Params: coins.build_c1, coins.C2Params: coins.build_c2}
    return builders[type(params)](params), params


# --- coin -------------------------------------------------------------------

def classification_report(C):
    cls = coins.classify_coin(C)
    out = {"class": cls.coin_class.value}
    if cls.coin_class.localizing:
        out["det_phase"] = cls.det_phase
        lam = cls.constant_eigenvalue
        out["constant_eigenvalue"] = [lam.real, lam.imag]
        out["gauge_phase"] = cls.gauge_phase
        if cls.also_class2:
            out["also_class2"] = True
        d = coins.extract_dispersion_params(C, cls)
        out.update(rho=d.rho, mu=d.mu, gamma=d.gamma)
    return out


def cmd_coin(args):
    if args.action == "build":
        C, _ = load_coin(args)
        print(json.dumps(coins.coin_to_json(C)))
    else:
        if not args.matrix:
            raise UsageError("coin classify needs --matrix")
        try:
            m = coins.coin_from_json(json.loads(Path(args.matrix).read_text()))
        except (OSError, ValueError, TypeError, KeyError) as exc:
            raise UsageError(f"cannot read coin file {args.matrix}: {exc}") from exc
        print(json.dumps(classification_report(coins.UnitaryCoin(m))))
    return 0


# --- scan -------------------------------------------------------------------

FAMILY_AXES = {
    "c1": ("theta13", "theta23"),
    "c2": ("delta", "theta23", "kappa"),
}
FAMILY_EXTRAS = {"c1": ("gamma2", "gamma4", "gamma5"), "c2": ("gamma1", "gamma4", "gamma5")}


def _parse_sweep(text, degrees):
    try:
        name, rng = text.split("=", 1)
        start, stop, count = rng.split(":")
        start, stop, count = float(start), float(stop), int(count)
    except ValueError as exc:
        raise UsageError(f"--sweep expects name=start:stop:count, got {text!r}") from exc
    if count < 2:
        raise UsageError("each swept axis needs count >= 2")
    if degrees:
        start, stop = math.radians(start), math.radians(stop)
    return name, np.linspace(start, stop, count)


def _parse_fixed(text, degrees):
    try:
        name, value = text.split("=", 1)
        value = float(value)
    except ValueError as exc:
        raise UsageError(f"--fixed expects name=value, got {text!r}") from exc
    return name, math.radians(value) if degrees else value


def family_row(family, point, outputs, sim_steps=0):
    """Velocity/trapping values for one grid point; None cells for invalid points."""
    values = {}
    invalid = False
    try:
        if family == "c1":
            params = coins.C1Params(theta13=point["theta13"], theta23=point["theta23"],
                                    **{k: point[k] for k in FAMILY_EXTRAS["c1"] if k in point})
            disp = kinematics.c1_dispersion_params(params.theta13, params.theta23)
        else:
            params = coins.C2Params.from_kappa(point["kappa"], point["delta"], point["theta23"],
                                               **{k: point[k] for k in FAMILY_EXTRAS["c2"] if k in point})
            params.check()
            disp = kinematics.c2_dispersion_params(params.delta, params.kappa, params.theta23)
    except InvalidC2Params:
        invalid = True
    if not invalid and outputs in ("velocity", "both"):
        res = kinematics.peak_velocity(disp)
        values.update(v_peak=res.v_peak, method=res.method)
    if not invalid and outputs in ("trapping", "both"):
        try:
            tr = trapping.limiting_amplitudes(params, check=True)
            values.update(P_infinity=tr.P_infinity, P_quadrature=tr.P_quadrature)
        except QWalkError:
            pass
        if sim_steps:
            C = coins.build_c1(params) if family == "c1" else coins.build_c2(params)
            values["P_simulated"] = simulator.simulate(C, "mixed", sim_steps).tail_average_trapping
    return values, invalid


def scan_family(family, sweeps, fixed, outputs, sim_steps=0):
    """Header and rows of a velocity/trapping grid, in deterministic grid order."""
    axes = FAMILY_AXES[family]
    allowed = set(axes) | set(FAMILY_EXTRAS[family])
    for name in list(sweeps) + list(fixed):
        if name not in allowed:
            raise UsageError(f"parameter {name!r} does not belong to family {family}")
    if len(sweeps) > 2:
        raise UsageError("at most two swept axes")
    missing = [a for a in axes if a not in sweeps and a not in fixed]
    if missing:
        raise UsageError(f"missing values for {missing}")
    value_cols = []
    if outputs in ("velocity", "both"):
        value_cols += ["v_peak", "method"]
    if outputs in ("trapping", "both"):
        value_cols += ["P_infinity", "P_quadrature"] + (["P_simulated"] if sim_steps else [])
    header = list(axes) + value_cols + (["invalid"] if family == "c2" else [])
    names = list(sweeps)
    grids = np.meshgrid(*[sweeps[n] for n in names], indexing="ij") if names else []
    flat = [g.ravel() for g in grids]
    n = flat[0].size if flat else 1
    rows = []
    for i in range(n):
        point = dict(fixed)
        point.update({name: float(f[i]) for name, f in zip(names, flat)})
        values, invalid = family_row(family, point, outputs, sim_steps)
        row = [point[a] for a in axes] + [values.get(c) for c in value_cols]
        if family == "c2":
            row.append(int(invalid))
        rows.append(row)
    return header, rows


def scan_spectrum(C, n_samples):
    """Rows k, re/im of the constant eigenvalue (blank if none), omega_plus, omega_minus."""
    cls = coins.classify_coin(C)
    scan = spectrum.spectral_scan(C, n_samples)
    header = ["k", "re_lambda0", "im_lambda0", "omega_plus", "omega_minus"]
    g = np.exp(1j * cls.gauge_phase)
    if cls.coin_class.localizing and scan.constant_track_index is not None:
        lam0 = scan.tracks[scan.constant_track_index]
        a, b = scan.moving_tracks
        om_a, om_b = np.angle(scan.tracks[a] * g), np.angle(scan.tracks[b] * g)
        om_plus, om_minus = np.maximum(om_a, om_b), np.minimum(om_a, om_b)
        rows = [[k, z.real, z.imag, wp, wm] for k, z, wp, wm in zip(scan.k_grid, lam0, om_plus, om_minus)]
    else:
        # no single constant eigenvalue: report the phases of the two outer tracks
        ph = np.sort(np.angle(scan.tracks * g), axis=0)
        rows = [[k, None, None, ph[2, i], ph[0, i]] for i, k in enumerate(scan.k_grid)]
    return header, rows


def cmd_scan(args):
    if args.output == "spectrum":
        C, _ = load_coin(args)
        header, rows = scan_spectrum(C, args.samples)
    else:
        if args.family not in FAMILY_AXES:
            raise UsageError("family scans need --family c1 or c2")
        sweeps = dict(_parse_sweep(s, args.degrees) for s in args.sweep)
        fixed = dict(_parse_fixed(s, args.degrees) for s in args.fixed)
        header, rows = scan_family(args.family, sweeps, fixed, args.output, args.simulate)
    write_csv(args.out, header, rows)
    return 0


# --- simulate ---------------------------------------------------------------

def cmd_simulate(args):
    C, params = load_coin(args)
    initial = args.initial
    if initial not in ("L", "S", "R", "mixed"):
        try:
            initial = np.array([complex(x) for x in initial.split(",")])
        except ValueError as exc:
            raise UsageError(f"--initial must be L, S, R, mixed or three comma-separated amplitudes: {exc}") from exc
    try:
        summary = simulator.simulate(C, initial, args.steps, half_width=args.lattice)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    p_inf = 0.0
    cls = coins.classify_coin(C)
    if cls.coin_class.localizing:
        try:
            p_inf = _reference_trapping(C, params, initial)
        except QWalkError:
            p_inf = summary.tail_average_trapping
    try:
        slope = simulator.decay_exponent(summary.origin_series, p_inf)
    except QWalkError:
        slope = None
    out = {
        "trapping_estimate": summary.tail_average_trapping,
        "front_velocity": summary.front_velocity_estimate,
        "decay_exponent": slope,
    }
    if args.out_dir:
        d = Path(args.out_dir)
        d.mkdir(parents=True, exist_ok=True)
        comps = summary.final_components
        write_csv(d / "distribution.csv", ["x", "P_L", "P_S", "P_R", "P_total"],
                  [[int(x), *comps[:, i], summary.final_distribution[i]] for i, x in enumerate(summary.positions)])
        write_csv(d / "series.csv", ["t", "P_origin"], [[t, p] for t, p in enumerate(summary.origin_series)])
        (d / "summary.json").write_text(json.dumps(out, indent=2) + "\n")
    print(json.dumps(out))
    return 0


def _reference_trapping(C, params, initial):
    psi = trapping.coin_amplitude_matrix(C)
    if isinstance(initial, str) and initial == "mixed":
        return trapping.mixed_trapping(psi)
    v = simulator._coin_vector(initial)
    # amplitude at the origin tends to sum_j v_j psi^j
    return float(np.sum(np.abs(v @ psi) ** 2))


# --- verify -----------------------------------------------------------------

class Report:
    def __init__(self):
        self.lines = []
        self.failed = []

    def check(self, name, value, tol, ok=None):
        ok = (value <= tol) if ok is None else ok
        bound = f"tol {tol:g}" if isinstance(tol, (int, float)) else f"band {tol}"
        self.lines.append(f"{'PASS' if ok else 'FAIL'}  {name}: {value:.3e} ({bound})")
        if not ok:
            self.failed.append(name)

    def note(self, text):
        self.lines.append(f"      {text}")


def verify_coin(C, params, report, steps, label=""):
    pre = f"{label}" if label else ""
    cls = coins.classify_coin(C)
    report.note(f"{pre}class {cls.coin_class.value}")
    if isinstance(params, (coins.C1Params, coins.C2Params)):
        # family coins may also land on a decoupled or purely point branch
        own = coins.CoinClass.CLASS1 if isinstance(params, coins.C1Params) else coins.CoinClass.CLASS2
        other = {coins.CoinClass.CLASS1, coins.CoinClass.CLASS2} - {own}
        ok = cls.coin_class.localizing and (cls.coin_class not in other or cls.also_class2)
        report.check(f"{pre}classified as a localizing {own.value} coin", 0.0 if ok else 1.0, 0.5, ok=ok)
    scan = spectrum.spectral_scan(C, 256)
    if not cls.coin_class.localizing:
        report.check(f"{pre}no constant track (min phase deviation)", float(np.min(scan.deviations)), 1e-4,
                     ok=bool(np.min(scan.deviations) >= 1e-4))
        report.note(f"{pre}NoPointSpectrum: trapping checks skipped, decay check run")
        if steps:
            s = simulator.simulate(C, "mixed", max(steps, 256))
            slope = simulator.decay_exponent(s.origin_series, 0.0)
            report.check(f"{pre}decay exponent", slope, "[-1.4, -0.6]", ok=-1.4 <= slope <= -0.6)
        return
    lam0 = cls.constant_eigenvalue
    pure = scan.constant_tracks and len(scan.constant_tracks) == 3
    const_err = min(float(np.max(np.abs(scan.tracks[j] - lam0))) for j in scan.constant_tracks) \
        if scan.constant_tracks else 1.0
    report.check(f"{pre}constant track at the predicted eigenvalue", const_err, 1e-8)
    if pure:
        report.note(f"{pre}purely point spectrum: dispersion and trapping checks skipped")
        return
    report.check(f"{pre}dispersion relation", spectrum.verify_dispersion(C, scan, cls), 1e-8)
    disp = kinematics.DispersionParams.from_data(coins.extract_dispersion_params(C, cls))
    pv = kinematics.peak_velocity(disp)
    if pv.method == kinematics.CLOSED_FORM and disp.rho > 0 and disp.mu != 0:
        num = kinematics.numeric_peak_velocity(disp)
        report.check(f"{pre}peak velocity closed form vs numeric", abs(pv.v_peak - num.v_peak), 1e-8)
    if params is not None and not isinstance(params, coins.CoinParams):
        report.check(f"{pre}stationary state eigen-residual",
                     trapping.eigenvector_residual(params, np.linspace(-np.pi, np.pi, 16, endpoint=False)), 1e-10)
        tr = trapping.limiting_amplitudes(params, check=False)
        psi_q = trapping.amplitude_matrix_quadrature(params)
        report.check(f"{pre}limiting amplitudes vs quadrature", float(np.max(np.abs(tr.psi - psi_q))), 1e-8)
        p_inf = tr.P_infinity
        report.check(f"{pre}P_inf closed form vs quadrature", abs(p_inf - trapping.mixed_trapping(psi_q)), 1e-8)
    else:
        try:
            p_inf = trapping.coin_trapping(C)
        except QWalkError as exc:
            report.note(f"{pre}trapping skipped: {exc}")
            return
    if steps:
        s = simulator.simulate(C, "mixed", steps)
        report.check(f"{pre}simulated trapping vs P_inf", abs(s.tail_average_trapping - p_inf), 0.02)
        if pv.v_peak > 2 * simulator.FRONT_MIN_VELOCITY:
            report.check(f"{pre}simulated front vs v_peak", abs(s.front_velocity_estimate - pv.v_peak), 0.03)


def cmd_verify(args):
    report = Report()
    if args.random:
        if args.family not in ("c1", "c2", "general"):
            raise UsageError("--random needs --family c1, c2 or general")
        rng = np.random.default_rng(args.seed)
        draw = {"c1": coins.random_c1_params, "c2": coins.random_c2_params,
                "general": coins.random_coin_params}[args.family]
        build = {"c1": coins.build_c1, "c2": coins.build_c2, "general": coins.build_unitary}[args.family]
        for i in range(args.random):
            p = draw(rng)
            verify_coin(build(p), p, report, args.steps, label=f"[{i}] ")
    else:
        C, params = load_coin(args)
        verify_coin(C, params, report, args.steps)
    print("\n".join(report.lines))
    if report.failed:
        print(f"{len(report.failed)} check(s) failed: " + "; ".join(report.failed))
        return EXIT_VERIFY
    print("all checks passed")
    return 0


# --- entry point ------------------------------------------------------------

def build_parser():
    parser = _Parser(prog="qwalk3", description="Three-state quantum walks: coins, spectra, velocities, trapping.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_coin = sub.add_parser("coin", help="build or classify a coin")
    p_coin.add_argument("action", choices=["build", "classify"])
    _add_coin_source(p_coin)
    p_coin.set_defaults(func=cmd_coin)

    p_scan = sub.add_parser("scan", help="velocity/trapping grids or a spectral scan as CSV")
    _add_coin_source(p_scan)
    p_scan.add_argument("--output", choices=["velocity", "trapping", "both", "spectrum"], default="velocity")
    p_scan.add_argument("--sweep", action="append", default=[], help="name=start:stop:count")
    p_scan.add_argument("--fixed", action="append", default=[], help="name=value")
    p_scan.add_argument("--samples", type=int, default=256, help="k samples for --output spectrum")
    p_scan.add_argument("--simulate", type=int, default=0, metavar="T", help="add a simulated trapping column")
    p_scan.add_argument("--out", default="-", help="CSV path (default: standard output)")
    p_scan.set_defaults(func=cmd_scan)

    p_sim = sub.add_parser("simulate", help="position-space simulation")
    _add_coin_source(p_sim)
    p_sim.add_argument("--steps", type=int, required=True)
    p_sim.add_argument("--initial", default="mixed")
    p_sim.add_argument("--lattice", type=int, default=None, help="lattice half-width (default steps + 1)")
    p_sim.add_argument("--out-dir", default=None)
    p_sim.set_defaults(func=cmd_simulate)

    p_ver = sub.add_parser("verify", help="run the cross-oracle checks on a coin or random draws")
    _add_coin_source(p_ver)
    p_ver.add_argument("--random", type=int, default=0, metavar="N")
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.add_argument("--steps", type=int, default=1000, help="simulation length; 0 skips simulation checks")
    p_ver.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except QWalkError as exc:
        if isinstance(exc, NotUnitary):
            code = EXIT_UNITARY
        elif isinstance(exc, LatticeOverflow):
            code = EXIT_OVERFLOW
        else:
            code = EXIT_INPUT
        print(f"error:{exc.code}: {' '.join(str(exc).split())}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
