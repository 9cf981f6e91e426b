"""
Command-line front end.

Exit codes: 0 success, 1 I/O failure, 2 usage or validation error.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys

import numpy as np

from . import analysis, gridio, kernel, oracle
from .fk import Section, SingularPolicy
from .kernel import OperatorKind
from .pipeline import DmoConfig, impulse_response, run_dmo
from .wavelets import ricker

log = logging.getLogger("logdmo")

EXIT_OK, EXIT_IO, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _operator(text):
    try:
        return OperatorKind.parse(text)
    except ValueError as err:
        raise argparse.ArgumentTypeError(str(err))


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def _positive(kind):
    def parse(text):
        value = kind(text)
        if not value > 0:
            raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
        return value

    return parse


def _nonneg_int(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return value


def _emit_csv(columns, out):
    text = gridio.csv_text(columns)
    if out is None:
        sys.stdout.write(text)
    else:
        gridio.atomic_write(out, text)


def _emit_section(sec, out):
    gridio.atomic_write(out, gridio.section_bytes(sec))


def _threads(args):
    return args.threads or os.cpu_count() or 1


def _dmo_config(args, t_c):
    return DmoConfig(
        operator=args.operator,
        t_c=t_c,
        n_tau=args.ntau,
        singular_policy=args.policy,
        pad_x=args.pad_x,
        pad_tau=args.pad_tau,
    )


def cmd_phase(args):
    if args.samples < 2:
        raise UsageError("--samples must be >= 2")
    xis = np.linspace(0.0, args.xi_max, args.samples)
    phases, amps, validity = [], [], []
    for x in xis:
        if args.operator is OperatorKind.BALE_FULL:
            res = kernel.phase_bale(args.omega, x)
        elif args.operator is OperatorKind.NOTFORS:
            res = kernel.phase_notfors(args.omega, x)
        else:
            res = kernel.phase_exact(args.omega, x)
        amp = res.amplitude
        if args.operator is OperatorKind.LINER_EXACT:
            amp = float(kernel.liner_amplitude(x))
        phases.append(float("nan") if res.phase is None else res.phase)
        amps.append(amp)
        validity.append(res.validity.value)
    _emit_csv({"xi": xis, "phase": phases, "amplitude": amps, "validity": validity}, args.out)


def cmd_impulse(args):
    t_start = args.t_start if args.t_start is not None else args.dt
    x_start = args.x_start if args.x_start is not None else -(args.nx // 2) * args.dx
    geometry = Section(np.zeros((args.nt, args.nx)), args.dt, args.dx, t_start, x_start, args.h)
    cfg = _dmo_config(args, args.tc)
    wavelet = ricker(args.freq, args.dt)
    response = impulse_response(cfg, args.t, args.x, wavelet, geometry, workers=_threads(args))
    _emit_section(response, args.out)


def cmd_apply(args):
    sec = gridio.read_section(args.input)
    cfg = _dmo_config(args, args.tc)
    _emit_section(run_dmo(sec, cfg, workers=_threads(args)), args.out)


def cmd_decompose(args):
    if args.omega == 0:
        raise UsageError("--omega must be non-zero")
    if not args.h > 0:
        raise UsageError("--h must be > 0")
    cols = {n: [] for n in ("xi", "space_shift", "time_shift", "space_phase", "time_phase", "total", "kernel_phase", "validity")}
    for x in args.xi_list:
        p = kernel.FkPoint(args.omega, x * args.omega / args.h, args.h)
        d = analysis.decompose(args.operator, p)
        for name, value in (
            ("xi", x),
            ("space_shift", d.space_shift),
            ("time_shift", d.time_shift),
            ("space_phase", d.space_phase),
            ("time_phase", d.time_phase),
            ("total", d.total),
            ("kernel_phase", analysis.kernel_phase(args.operator, p)),
            ("validity", d.validity.value),
        ):
            cols[name].append(value)
    _emit_csv(cols, args.out)


def cmd_asymptote(args):
    if args.samples < 2 or not 0 < args.xi_min < args.xi_max:
        raise UsageError("need --samples >= 2 and 0 < --xi-min < --xi-max")
    grid = np.geomspace(args.xi_min, args.xi_max, args.samples)
    report = analysis.asymptotic_report(args.operators, grid, args.omega)
    _emit_csv(report.rows(), args.out)


def _random_live_section(args):
    # live samples share one time row so Hale and Black phases are comparable bin by bin
    rng = np.random.default_rng(args.seed)
    grid = np.zeros((args.nt, args.nx))
    row = rng.integers(args.nt)
    cols = rng.choice(args.nx, size=min(args.live, args.nx), replace=False)
    grid[row, cols] = rng.standard_normal(cols.size)
    return Section(grid, args.dt, args.dx, args.t_start, args.x_start, args.h)


def cmd_oracle(args):
    if args.method == "ellipse":
        if not (args.tn > 0 and args.h > 0) or args.points < 2:
            raise UsageError("ellipse needs --tn > 0, --h > 0, --points >= 2")
        curve = oracle.ellipse(args.tn, args.xn, args.h, args.points)
        _emit_csv({"x0": curve.x0, "t0": curve.t0}, args.out)
        return

    sizes = (args.nomega, args.nk)
    if args.input is None and max(args.nt, args.nx) > oracle.MAX_DIRECT_SIZE or max(sizes) > oracle.MAX_DIRECT_SIZE:
        raise UsageError(f"direct oracle grids are limited to {oracle.MAX_DIRECT_SIZE} per axis")
    sec = gridio.read_section(args.input) if args.input else _random_live_section(args)
    omegas = np.linspace(-math.pi / sec.dt, math.pi / sec.dt, args.nomega)
    ks = np.linspace(-math.pi / sec.dx, math.pi / sec.dx, args.nk)
    workers = _threads(args)
    try:
        main = oracle.direct_dmo(sec, args.method, omegas, ks, workers=workers)
    except ValueError as err:
        raise UsageError(str(err))
    W, K = np.meshgrid(omegas, ks, indexing="ij")
    cols = {
        "omega": W.ravel(),
        "k": K.ravel(),
        "re": main.grid.real.ravel(),
        "im": main.grid.imag.ravel(),
        "magnitude": np.abs(main.grid).ravel(),
        "phase": np.angle(main.grid).ravel(),
    }
    if args.compare:
        other_method = "black" if args.method == "hale" else "hale"
        other = oracle.direct_dmo(sec, other_method, omegas, ks, workers=workers)
        diff = np.angle(main.grid * np.conj(other.grid))
        both = (np.abs(main.grid) > 1e-12) & (np.abs(other.grid) > 1e-12)
        cols[f"phase_{other_method}"] = np.angle(other.grid).ravel()
        cols["phase_diff"] = np.where(both, diff, np.nan).ravel()
        worst = float(np.max(np.abs(diff[both]))) if both.any() else 0.0
        print(f"max |phase({args.method}) - phase({other_method})| = {worst:.3e} rad", file=sys.stderr)
    _emit_csv(cols, args.out)


def cmd_compare(args):
    response = gridio.read_section(args.response)
    h = response.h if args.h is None else args.h
    if not h > 0 or not args.tn > 0:
        raise UsageError("need --tn > 0 and a positive half-offset")
    if h != response.h:
        raise UsageError(f"--h {h} does not match the response half-offset {response.h}")
    curve = oracle.ellipse(args.tn, args.xn, h)
    report = analysis.ridge_metrics(response, curve, window=args.window)
    print(
        f"max |residual| = {report.max_abs_residual:.3f} samples, "
        f"mean = {report.mean_abs_residual:.3f}, missing = {int(report.missing.sum())}",
        file=sys.stderr,
    )
    _emit_csv(report.rows(), args.out)


def _add_dmo_flags(p):
    p.add_argument("--operator", type=_operator, default=OperatorKind.ZHOU_EXACT)
    p.add_argument("--tc", type=_positive(float), default=None, help="cutoff time (s); default first sample")
    p.add_argument("--ntau", type=int, default=None, help="log-time samples; default 2x next power of two")
    p.add_argument("--policy", type=SingularPolicy, choices=list(SingularPolicy), default=SingularPolicy.ZERO)
    p.add_argument("--pad-x", type=_nonneg_int, default=None)
    p.add_argument("--pad-tau", type=_nonneg_int, default=None)
    p.add_argument("--threads", type=_positive(int), default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="logdmo", description="Log-stretch f-k dip moveout toolkit")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phase", help="tabulate an operator's phase against xi")
    p.add_argument("--operator", type=_operator, required=True)
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--xi-max", type=_positive(float), default=1.0)
    p.add_argument("--samples", type=int, default=101)
    p.add_argument("--out")
    p.set_defaults(func=cmd_phase)

    p = sub.add_parser("impulse", help="DMO impulse response to an FKG1 file")
    _add_dmo_flags(p)
    p.add_argument("--h", type=float, default=500.0)
    p.add_argument("--t", type=float, default=1.0, help="impulse time (s)")
    p.add_argument("--x", type=float, default=0.0, help="impulse midpoint (m)")
    p.add_argument("--nt", type=_positive(int), default=512)
    p.add_argument("--nx", type=_positive(int), default=256)
    p.add_argument("--dt", type=_positive(float), default=0.004)
    p.add_argument("--dx", type=_positive(float), default=12.5)
    p.add_argument("--t-start", type=_positive(float), default=None, help="default: dt")
    p.add_argument("--x-start", type=float, default=None, help="default: centre trace at x=0")
    p.add_argument("--freq", type=_positive(float), default=30.0, help="Ricker peak frequency (Hz)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_impulse)

    p = sub.add_parser("apply", help="run DMO on an FKG1 section")
    _add_dmo_flags(p)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("decompose", help="space/time split of operator phases")
    p.add_argument("--operator", type=_operator, required=True)
    p.add_argument("--xi-list", type=_float_list, required=True)
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--h", type=float, default=500.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("asymptote", help="small- and large-xi diagnostic ratios")
    p.add_argument(
        "--operators",
        type=lambda s: [OperatorKind.parse(v) for v in s.split(",")],
        default=[OperatorKind.BALE_FULL, OperatorKind.NOTFORS, OperatorKind.ZHOU_EXACT],
    )
    p.add_argument("--xi-min", type=float, default=1e-3)
    p.add_argument("--xi-max", type=float, default=1e4)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_asymptote)

    p = sub.add_parser("oracle", help="ellipse and direct Hale/Black integrals")
    p.add_argument("--method", choices=["hale", "black", "ellipse"], required=True)
    p.add_argument("--tn", type=float, default=1.0)
    p.add_argument("--xn", type=float, default=0.0)
    p.add_argument("--h", type=float, default=500.0)
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--in", dest="input", default=None, help="FKG1 input; default random live samples")
    p.add_argument("--nt", type=_positive(int), default=64)
    p.add_argument("--nx", type=_positive(int), default=64)
    p.add_argument("--dt", type=_positive(float), default=0.004)
    p.add_argument("--dx", type=_positive(float), default=12.5)
    p.add_argument("--t-start", type=_positive(float), default=0.1)
    p.add_argument("--x-start", type=float, default=0.0)
    p.add_argument("--live", type=_positive(int), default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--nomega", type=_positive(int), default=32)
    p.add_argument("--nk", type=_positive(int), default=32)
    p.add_argument("--compare", action="store_true", help="also run the other method and report phase differences")
    p.add_argument("--threads", type=_positive(int), default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("compare", help="ridge picks of a response against the ellipse")
    p.add_argument("--response", required=True)
    p.add_argument("--tn", type=float, required=True)
    p.add_argument("--xn", type=float, default=0.0)
    p.add_argument("--h", type=float, default=None, help="default: the file's half-offset")
    p.add_argument("--window", type=_positive(float), default=0.8)
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        args.func(args)
    except UsageError as err:
        print(f"logdmo {args.command}: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, gridio.FormatError) as err:
        print(f"logdmo {args.command}: {err}", file=sys.stderr)
        return EXIT_IO
    except ValueError as err:
        print(f"logdmo {args.command}: {err}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
