"""Command-line interface: dispersion sweeps, Doppler point solutions and
sweeps, plasma and Cherenkov demos, and the validation suite.

THz in, THz out: every frequency at this boundary is an ordinary frequency in
terahertz; positions are in length-scale units (default 75 nm) and times in
length-scale/c units.  CSV output uses a header row, comma separators, '.'
decimals and 9 significant digits, and is byte-identical across runs.

Exit codes:
    0  success / all validation checks passed
    1  validation failure
    2  invalid arguments, ranges or scenario file
    3  solver did not converge
    4  no Doppler root in the scanned band
"""

import argparse
import json
import math
import sys

import numpy as np

from . import dispersion as disp
from . import fields as fld
from . import stationary_phase as sph
from . import trajectory as trj
from . import validation
from .errors import (DegeneratePoint, DopshiftError, NoCherenkovRoot,
                     NoConvergence, NoRootInBand, ScenarioError)
from .scenario import Scenario, load_scenario
from .units import omega_from_thz, thz_from_omega

EXIT_OK, EXIT_VALIDATION, EXIT_USAGE, EXIT_NOCONV, EXIT_NOROOT = 0, 1, 2, 3, 4


def _fmt(x) -> str:
    """One CSV cell: 9 significant digits, empty for missing values."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if math.isnan(x):
        return ""
    return f"{x:.9g}"


def _emit(header, rows, fmt, path):
    """Write rows as CSV or JSON to path ('-' = stdout), deterministically."""
    if fmt == "json":
        payload = [dict(zip(header, row)) for row in rows]
        text = json.dumps(payload, indent=2, default=_fmt) + "\n"
    else:
        lines = [",".join(header)]
        lines += [",".join(_fmt(c) for c in row) for row in rows]
        text = "\n".join(lines) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _medium_from_args(args) -> disp.DispersionModel:
    if args.medium == "nondispersive":
        return disp.NonDispersive(eps=args.eps, mu=args.mu)
    if args.medium == "plasma":
        return disp.ColdPlasma(omega_p=omega_from_thz(args.fp_thz))
    return disp.lorentz_from_thz(neglect_imaginary=not args.keep_imaginary)


def _add_medium_flags(p):
    p.add_argument("--medium", choices=("lorentz", "plasma", "nondispersive"),
                   default="lorentz")
    p.add_argument("--eps", type=float, default=1.0,
                   help="non-dispersive permittivity")
    p.add_argument("--mu", type=float, default=1.0,
                   help="non-dispersive permeability")
    p.add_argument("--fp-thz", type=float, default=500.0,
                   help="plasma frequency in THz")
    p.add_argument("--keep-imaginary", action="store_true",
                   help="keep Im n in the metamaterial wavenumber")


def _add_output_flags(p):
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _add_scenario_flags(p):
    p.add_argument("--config", help="scenario file (flat sectioned key=value)")
    p.add_argument("--f0-thz", type=float, help="source carrier in THz")
    p.add_argument("--v", type=float, help="source speed, units of c")
    p.add_argument("--x1", type=float)
    p.add_argument("--x2", type=float)
    p.add_argument("--x3", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--method", choices=("newton", "fixed-point", "closed-form"))
    p.add_argument("--tol", type=float)
    p.add_argument("--max-iter", type=int)


def _scenario_from_args(args) -> Scenario:
    sc = load_scenario(args.config) if args.config else Scenario()
    if getattr(args, "medium", None):
        sc.medium_kind = args.medium
        if args.medium == "nondispersive":
            sc.medium_params = {"eps": str(args.eps), "mu": str(args.mu)}
        elif args.medium == "plasma":
            sc.medium_params = {"f_p_thz": str(args.fp_thz)}
        else:
            sc.medium_params = {}
    for attr, key in (("f0_thz", "f0_thz"), ("v", "v"), ("x1", "x1"),
                      ("x2", "x2"), ("x3", "x3"), ("t", "t"),
                      ("method", "method"), ("tol", "tol"),
                      ("max_iter", "max_iter")):
        val = getattr(args, attr, None)
        if val is not None:
            setattr(sc, key, val)
    if getattr(args, "out", None) is not None:
        sc.out_path = args.out
    if getattr(args, "format", None) is not None:
        sc.out_format = args.format
    return sc.validate()


# -- subcommands --------------------------------------------------------------

def cmd_dispersion_sweep(args) -> int:
    if not (args.f_start_thz < args.f_end_thz) or args.n < 2:
        print("error: need f_start < f_end and n >= 2", file=sys.stderr)
        return EXIT_USAGE
    model = _medium_from_args(args)
    header = ["f_thz", "re_n", "im_n", "v_p", "v_g"]
    rows = []
    for f in np.linspace(args.f_start_thz, args.f_end_thz, args.n):
        s = disp.sample(model, omega_from_thz(float(f)))
        rows.append((float(f), s.n.real, s.n.imag, s.v_phase, s.v_group))
    _emit(header, rows, args.format, args.out)
    return EXIT_OK


def _solve_scenario_point(sc: Scenario):
    """One Doppler point per the scenario's method.  Returns a result dict."""
    model = sc.medium()
    w0 = omega_from_thz(sc.f0_thz)
    if sc.method == "closed-form":
        if sc.x1 != 0 or sc.x3 != 0 or sc.h != 0:
            raise ScenarioError(
                "closed-form method needs collinear geometry (x1=x3=h=0)")
        if sc.medium_kind == "plasma":
            w = fld.plasma_doppler_closed_form(
                w0, model.omega_p, abs(sc.v), approaching=sc.v >= 0)
        else:
            w = fld.metamaterial_doppler_1d(model, w0, sc.v, +1)[0]
        s = disp.sample(model, w)
        tau = fld.retard_1d(sc.v, s.v_group, sc.x2, sc.t)
        ctx = sph.PhaseContext(t=sc.t, x=(sc.x1, sc.x2, sc.x3), omega0=w0,
                               trajectory=trj.OffsetLine(v=sc.v, H=sc.h),
                               dispersion=model)
        g = trj.geometry(ctx.trajectory, ctx.x, tau)
        resid = float(np.hypot(*sph.gradient(ctx, w, tau))) \
            if disp.sample(model, w).propagating else math.nan
        det = sig = None
        vrad = g.v_rad
    else:
        ctx = sph.PhaseContext(t=sc.t, x=(sc.x1, sc.x2, sc.x3), omega0=w0,
                               trajectory=trj.OffsetLine(v=sc.v, H=sc.h),
                               dispersion=model)
        solver = sph.solve_newton if sc.method == "newton" \
            else sph.solve_fixed_point
        sp = solver(ctx, tol=sc.tol, max_iter=sc.max_iter)
        w, tau = sp.omega_s, sp.tau_s
        resid, det, sig = sp.residual_norm, sp.det, sp.signature
        vrad = trj.geometry(ctx.trajectory, ctx.x, tau).v_rad
    s = disp.sample(model, w)
    cls = fld.doppler_classification(s.k.real, vrad)
    return {
        "f0_thz": sc.f0_thz,
        "f_shift_thz": thz_from_omega(w),
        "tau": tau,
        "retarded_time": sc.t - tau,
        "residual": resid,
        "classification": cls.value,
        "det": det,
        "signature": sig,
        "v_group": s.v_group,
    }


def cmd_doppler(args) -> int:
    sc = _scenario_from_args(args)
    try:
        row = _solve_scenario_point(sc)
    except (NoConvergence, DegeneratePoint) as err:
        print(f"error: no convergence: {err}", file=sys.stderr)
        return EXIT_NOCONV
    except NoRootInBand as err:
        print(f"error: no root in band: {err}", file=sys.stderr)
        return EXIT_NOROOT
    header = list(row.keys())
    _emit(header, [tuple(row.values())], sc.out_format, sc.out_path)
    return EXIT_OK


def cmd_doppler_sweep(args) -> int:
    sc = _scenario_from_args(args)
    if not (args.f0_start_thz < args.f0_end_thz) or args.n < 2:
        print("error: need f0_start < f0_end and n >= 2", file=sys.stderr)
        return EXIT_USAGE
    header = ["f0_thz", "f_shift_thz", "tau", "error"]
    rows = []
    good = []
    for f0 in np.linspace(args.f0_start_thz, args.f0_end_thz, args.n):
        sc.f0_thz = float(f0)
        try:
            row = _solve_scenario_point(sc)
            rows.append((float(f0), row["f_shift_thz"], row["tau"], None))
            good.append((float(f0), row["f_shift_thz"]))
        except DopshiftError as err:
            rows.append((float(f0), None, None, type(err).__name__))
    _emit(header, rows, sc.out_format, sc.out_path)
    if len(good) >= 3:
        f0s = np.array([g[0] for g in good])
        fss = np.array([g[1] for g in good])
        line = fss[0] + (fss[-1] - fss[0]) * (f0s - f0s[0]) / (f0s[-1] - f0s[0])
        metric = float(np.max(np.abs(fss - line)))
        print(f"nonlinearity_metric_thz = {metric:.9g}", file=sys.stderr)
    return EXIT_OK


def cmd_plasma(args) -> int:
    if not 0 <= args.mach < 1:
        print("error: Mach number must lie in [0, 1)", file=sys.stderr)
        return EXIT_USAGE
    w0 = omega_from_thz(args.f0_thz)
    wp = omega_from_thz(args.fp_thz)
    model = disp.ColdPlasma(omega_p=wp)
    try:
        closed = fld.plasma_doppler_closed_form(w0, wp, args.mach,
                                                args.direction == "approaching")
    except DopshiftError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    x2 = 4.0 if args.direction == "approaching" else -4.0
    ctx = sph.PhaseContext(
        t=1.0, x=(0.0, x2, 0.0), omega0=w0,
        trajectory=trj.StraightLine(velocity=(0.0, args.mach, 0.0)),
        dispersion=model)
    try:
        if args.direction == "approaching":
            sp = sph.solve_newton(ctx, tol=1e-12)
        else:
            vg_c = disp.sample(model, closed).v_group
            tau_rec = (vg_c * ctx.t - abs(x2)) / (args.mach + vg_c)
            sp = sph.solve_newton(ctx, seed=(1.001 * closed, tau_rec - 0.1),
                                  tol=1e-12)
    except DopshiftError as err:
        print(f"error: no convergence: {err}", file=sys.stderr)
        return EXIT_NOCONV
    header = ["f0_thz", "fp_thz", "mach", "direction", "f_closed_thz",
              "f_newton_thz", "relative_gap", "det", "signature"]
    rows = [(args.f0_thz, args.fp_thz, args.mach, args.direction,
             thz_from_omega(closed), thz_from_omega(sp.omega_s),
             abs(sp.omega_s - closed) / closed, sp.det, sp.signature)]
    _emit(header, rows, args.format, args.out)
    return EXIT_OK


def cmd_cherenkov(args) -> int:
    model = disp.NonDispersive(eps=args.eps, mu=args.mu)
    try:
        contr = fld.cherenkov_solve(model, (0.0, 0.0, args.v),
                                    (args.x1, args.x2, args.x3), args.t)
    except NoCherenkovRoot as err:
        print(f"no Cherenkov radiation: {err}", file=sys.stderr)
        return EXIT_NOROOT
    except DopshiftError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    s = disp.sample(model, 1.0)
    g = trj.geometry(trj.StraightLine(velocity=(0.0, 0.0, args.v)),
                     (args.x1, args.x2, args.x3), contr.point.tau_s)
    angle = math.acos(min(1.0, max(-1.0, g.v_rad / args.v)))
    header = ["cone_half_angle_rad", "cos_angle", "tau_emission",
              "retarded_time", "gate", "beta", "degenerate_hessian"]
    rows = [(angle, g.v_rad / args.v, contr.point.tau_s, contr.retarded_time,
             contr.gate, args.v / s.v_group, contr.point.degenerate)]
    _emit(header, rows, args.format, args.out)
    return EXIT_OK


def cmd_validate(args) -> int:
    if args.list:
        for name in validation.CHECKS:
            print(name)
        return EXIT_OK
    try:
        results = validation.run_checks(args.cases or None)
    except KeyError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.details} "
              f"[{r.elapsed:.2f}s]")
    return EXIT_OK if all(r.passed for r in results) else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="dopshift", description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dispersion-sweep",
                       help="tabulate n, v_p, v_g over a frequency range")
    _add_medium_flags(p)
    p.add_argument("--f-start-thz", type=float, required=True)
    p.add_argument("--f-end-thz", type=float, required=True)
    p.add_argument("--n", type=int, default=200)
    _add_output_flags(p)
    p.set_defaults(fn=cmd_dispersion_sweep)

    p = sub.add_parser("doppler", help="solve one scenario point")
    _add_medium_flags(p)
    _add_scenario_flags(p)
    _add_output_flags(p)
    p.set_defaults(fn=cmd_doppler, medium=None)

    p = sub.add_parser("doppler-sweep",
                       help="shifted frequency vs carrier frequency")
    _add_medium_flags(p)
    _add_scenario_flags(p)
    p.add_argument("--f0-start-thz", type=float, required=True)
    p.add_argument("--f0-end-thz", type=float, required=True)
    p.add_argument("--n", type=int, default=41)
    _add_output_flags(p)
    p.set_defaults(fn=cmd_doppler_sweep, medium=None)

    p = sub.add_parser("plasma", help="plasma closed form vs Newton")
    p.add_argument("--f0-thz", type=float, default=1000.0)
    p.add_argument("--fp-thz", type=float, default=500.0)
    p.add_argument("--mach", type=float, default=0.5)
    p.add_argument("--direction", choices=("approaching", "receding"),
                   default="approaching")
    _add_output_flags(p)
    p.set_defaults(fn=cmd_plasma)

    p = sub.add_parser("cherenkov", help="cone geometry of a moving charge")
    p.add_argument("--eps", type=float, default=4.0)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--v", type=float, default=0.75)
    p.add_argument("--x1", type=float, default=0.3)
    p.add_argument("--x2", type=float, default=0.4)
    p.add_argument("--x3", type=float, default=0.2)
    p.add_argument("--t", type=float, default=2.0)
    _add_output_flags(p)
    p.set_defaults(fn=cmd_cherenkov)

    p = sub.add_parser("validate", help="run registered validation checks")
    p.add_argument("cases", nargs="*",
                   help="check names (default: the full suite)")
    p.add_argument("--list", action="store_true", help="list check names")
    p.set_defaults(fn=cmd_validate)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as err:
        return EXIT_USAGE if err.code not in (0, None) else EXIT_OK
    try:
        return args.fn(args)
    except ScenarioError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except DopshiftError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_NOCONV


if __name__ == "__main__":
    sys.exit(main())
