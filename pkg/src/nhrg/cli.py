"""``nhrg`` command-line front end: flow, poles, nuclei, dineutron, xsec."""
from __future__ import annotations

import argparse
import math
import re
import sys

import numpy as np

from . import _io
from .core import FlowDivergence, PoleNotFound, SingularFlow, SystemConfig, loss_part
from .nuclear import (
    DineutronParams,
    TableError,
    default_table_path,
    dineutron_critical_x,
    dineutron_gamma_peak,
    dineutron_solve,
    estimate_ai_from_cross_section,
    load_nucleus_table,
    phase_diagram_points,
    semicircle_polyline,
)
from .poles import (
    count_emergent_resonances,
    pole_trajectory,
    resonance_windows,
)
from .rgflow import beta_components, integrate_flow
from .scattering import cross_sections

_NEG_TOKEN = re.compile(r"^-\.?\d")
_COMPLEX = re.compile(
    r"^(?P<re>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?"
    r"(?:(?P<im>[+-](?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?)[ij])?$"
)


def parse_complex(text):
    """``a``, ``a+bi``, ``a-bi``, ``bi`` (``j`` also accepted); no spaces."""
    s = text.strip()
    if not s:
        raise argparse.ArgumentTypeError("empty complex number")
    s_imag_only = re.fullmatch(r"([+-]?(?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?)[ij]", s)
    if s_imag_only:
        mag = s_imag_only.group(1)
        if mag in ("", "+", "-"):
            mag += "1"
        return complex(0.0, float(mag))
    m = _COMPLEX.match(s)
    if not m or m.group("re") is None:
        raise argparse.ArgumentTypeError(f"cannot parse complex number {text.strip()!r} (use a+bi)")
    re_part = float(m.group("re"))
    im = m.group("im")
    if im is None:
        return complex(re_part, 0.0)
    if im in ("+", "-"):
        im += "1"
    return complex(re_part, float(im))


def parse_float(text):
    try:
        return float(text.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text.strip()!r}") from None


def parse_grid(text):
    """Grid ``start:stop:N``, ``start:stop:step``, ``start:stop:logN`` or a comma list.

    ``N`` is a point count (integer), ``step`` a spacing (decimal) and ``logN``
    gives N log-spaced points.  A log grid starting at 0 is 0 followed by N-1 points
    from ``stop * 1e-6`` to ``stop``.
    """
    s = text.strip()
    if ":" not in s:
        try:
            vals = [float(v) for v in s.split(",")]
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad grid {s!r}") from None
        return _check_grid(np.array(vals), s)
    parts = s.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"grid {s!r} must be start:stop:N, start:stop:step or start:stop:logN")
    try:
        start, stop = float(parts[0]), float(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid bounds in {s!r}") from None
    tail = parts[2].strip()
    if not stop > start:
        raise argparse.ArgumentTypeError(f"grid {s!r} needs stop > start")
    if tail.startswith("log"):
        n = _count(tail[3:], s)
        if start < 0 or stop <= 0:
            raise argparse.ArgumentTypeError("log grids need non-negative bounds")
        if start == 0:
            if n < 2:
                raise argparse.ArgumentTypeError("log grid from 0 needs at least 2 points")
            vals = np.concatenate(([0.0], np.geomspace(stop * 1e-6, stop, n - 1)))
        else:
            vals = np.geomspace(start, stop, n)
    elif re.fullmatch(r"\d+", tail):
        vals = np.linspace(start, stop, _count(tail, s))
    else:
        try:
            step = float(tail)
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad grid spacing {tail!r}") from None
        if not step > 0:
            raise argparse.ArgumentTypeError("grid step must be positive")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        vals = start + step * np.arange(n)
    return _check_grid(vals, s)


def _count(text, s):
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad point count in {s!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"grid {s!r} is empty")
    return n


def _check_grid(vals, s):
    if vals.size == 0:
        raise argparse.ArgumentTypeError(f"grid {s!r} is empty")
    if vals.size > 1 and not np.all(np.diff(vals) > 0):
        raise argparse.ArgumentTypeError(f"grid {s!r} must be strictly increasing")
    return vals


def _protect_negative(argv):
    # argparse reads "-3:1:0.1" or "-0.3-0.2i" as option names
    return [" " + a if _NEG_TOKEN.match(a) else a for a in argv]


def _add_common(p, physics=True):
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", "-o", default=None, help="output file (default: stdout)")
    if physics:
        p.add_argument("--d", type=int, choices=(1, 2, 3), default=3)
        p.add_argument("--mu", type=parse_float, default=1.0)
        p.add_argument("--lambda0", type=parse_float, default=1.0)


def build_parser():
    parser = argparse.ArgumentParser(prog="nhrg", description="Non-Hermitian contact-interaction RG toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("flow", help="beta-function field or flow trajectories")
    _add_common(p)
    p.add_argument("--grid", nargs=3, metavar=("UR", "x", "UI"), help="vector-field grid: UR_GRID x UI_GRID")
    p.add_argument("--u0", type=parse_complex, action="append", help="initial coupling a+bi (repeatable)")
    p.add_argument("--tmax", type=parse_float, default=10.0)
    p.add_argument("--tol", type=parse_float, default=1e-10)
    p.add_argument("--samples", type=int, default=201, help="output times (0: every accepted step)")

    p = sub.add_parser("poles", help="pole trajectories under coupling sweeps")
    _add_common(p)
    p.add_argument("--pure-imaginary", action="store_true", help="sweep U0 = -i U_i0")
    p.add_argument("--ui", type=parse_grid, help="U_i0 grid for pure-imaginary sweeps")
    p.add_argument("--ur", type=parse_float, help="fixed U_r0 <= 0")
    p.add_argument("--kappa", type=parse_grid, help="kappa = U_i0/|U_r0| grid")

    p = sub.add_parser("nuclei", help="neutron-nucleus phase diagram")
    _add_common(p, physics=False)
    p.add_argument("--table", default=None, help="nucleus CSV (default: bundled table)")
    p.add_argument("--lambda", dest="lambdas", type=parse_float, nargs="+", default=[0.1, 1.0],
                   help="cutoffs Lambda_t in fm^-1")
    p.add_argument("--polyline", default=None, help="also write the critical semicircle to this CSV")

    p = sub.add_parser("dineutron", help="dineutron near an absorptive core")
    _add_common(p, physics=False)
    p.add_argument("--x", type=parse_grid, default=None, help="grid of x = u/|g_nn| (default 0:3:301)")
    p.add_argument("--a-nn", type=parse_float, default=-18.5)
    p.add_argument("--r-nn", type=parse_float, default=2.7)
    p.add_argument("--mn", type=parse_float, default=939.0)

    p = sub.add_parser("xsec", help="elastic/absorption/total cross sections")
    _add_common(p, physics=False)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--a", type=parse_complex, help="complex scattering length a_r+a_ii (fm)")
    src.add_argument("--isotope", help="take a from the nucleus table")
    p.add_argument("--table", default=None)
    p.add_argument("--k", type=parse_grid, required=True, help="momentum grid (fm^-1)")
    return parser


def _cfg(args):
    return SystemConfig(args.d, args.mu, args.lambda0)


def cmd_flow(args):
    if args.grid is None and not args.u0:
        raise _UsageError("flow needs --grid or --u0")
    meta = {"command": "flow", "d": args.d}
    if args.grid is not None:
        ur_s, sep, ui_s = args.grid
        if sep.strip() != "x":
            raise _UsageError("--grid takes UR_GRID x UI_GRID")
        ur, ui = parse_grid(ur_s), parse_grid(ui_s)
        R, I = np.meshgrid(ur, ui, indexing="ij")
        dr, di = beta_components(R, I, args.d)
        rows = [(float(a), float(b), float(c), float(e))
                for a, b, c, e in zip(R.ravel(), I.ravel(), dr.ravel(), di.ravel())]
        return ["U_r", "U_i", "dU_r/dt", "dU_i/dt"], rows, meta
    rows = []
    diverged = []
    t_eval = None if args.samples == 0 else np.linspace(0.0, args.tmax, max(args.samples, 2))[1:]
    for j, u0 in enumerate(args.u0):
        traj = integrate_flow(u0, args.d, args.tmax, tol=args.tol, t_eval=t_eval)
        diverged.append(traj.diverged)
        rows += [(j, float(t), float(u.real), loss_part(u) + 0.0) for t, u in zip(traj.t, traj.U)]
    meta.update(tmax=args.tmax, tol=args.tol, u0=[repr(u) for u in args.u0], diverged=diverged)
    return ["trajectory", "t", "U_r", "U_i"], rows, meta


def cmd_poles(args):
    cfg = _cfg(args)
    if args.pure_imaginary:
        if args.ui is None:
            raise _UsageError("--pure-imaginary needs --ui")
        traj = pole_trajectory(0.0, args.ui, cfg, pure_imaginary=True)
        meta = {"command": "poles", "d": args.d, "sweep": "pure-imaginary"}
    else:
        if args.ur is None or args.kappa is None:
            raise _UsageError("poles needs --pure-imaginary --ui GRID, or --ur U --kappa GRID")
        if args.ur >= 0:
            raise _UsageError("--ur must be negative")
        traj = pole_trajectory(args.ur, args.kappa, cfg)
        meta = {"command": "poles", "d": args.d, "sweep": "kappa", "U_r0": args.ur}
        if args.d == 2:
            contacts = [e.kappa for e in traj.events if e.kind == "gamma-zero" and e.E_R_sign > 0]
            oracle = resonance_windows(args.ur)
            meta.update(
                N_ER_formula=count_emergent_resonances(args.ur),
                N_ER_oracle=oracle.n_threshold,
                N_ER_grid=len(contacts),
                windows_total=oracle.n_windows,
            )
    meta.update(mu=cfg.mu, lambda0=cfg.lambda0, n_events=len(traj.events))
    notes = [f"event kappa={e.kappa!r} kind={e.kind} direction={e.direction}" for e in traj.events]
    return ["kappa", "E_R_dimless", "Gamma_dimless", "admissible", "kind"], traj.to_rows(), meta, notes


def cmd_nuclei(args):
    records = load_nucleus_table(args.table)
    points = phase_diagram_points(records, args.lambdas)
    cols = ["isotope", "lambda_t", "U_r", "U_i", "classification", "boundary_distance"]
    rows = [tuple(p.as_row()[c] for c in cols) for p in points]
    poly = semicircle_polyline()
    meta = {"command": "nuclei", "table": str(args.table or default_table_path().name)}
    if args.format == "json":
        meta["semicircle"] = poly
    if args.polyline:
        _io.emit(_io.render(["U_r", "U_i"], poly, {"curve": "critical-semicircle"}, "csv"), args.polyline)
    return cols, rows, meta


def cmd_dineutron(args):
    p = DineutronParams(args.a_nn, args.r_nn, args.mn)
    grid = args.x if args.x is not None else np.linspace(0.0, 3.0, 301)
    if np.any(grid < 0):
        raise _UsageError("x must be non-negative")
    rows = []
    scale = abs(p.a_nn)
    for x in grid:
        r = dineutron_solve(p.at(float(x)))
        rows.append((float(x), r.a_eff.real / scale, r.a_eff.imag / scale,
                     r.energy_dimless.real, -r.energy_dimless.imag + 0.0, r.xi_r, r.regime.value))
    x_c = dineutron_critical_x(p)
    x_peak, g_peak = dineutron_gamma_peak(p)
    meta = {"command": "dineutron", "a_nn": p.a_nn, "r_nn": p.r_nn, "M_n": p.M_n,
            "x_c": x_c, "gamma_peak_x": x_peak, "gamma_peak": g_peak}
    cols = ["x", "Re_a_eff/|a_nn|", "Im_a_eff/|a_nn|", "E_R_Mn_ann2", "Gamma_Mn_ann2", "xi_r_fm", "regime"]
    return cols, rows, meta


def cmd_xsec(args):
    if args.isotope:
        recs = {r.isotope: r for r in load_nucleus_table(args.table)}
        if args.isotope not in recs:
            raise _UsageError(f"isotope {args.isotope!r} not in table (have {sorted(recs)})")
        a = recs[args.isotope].a
    else:
        a = args.a
    if np.any(args.k <= 0):
        raise _UsageError("k must be positive")
    rows = []
    for k in args.k:
        cs = cross_sections(float(k), a)
        rows.append((cs.k, cs.sigma_el, cs.sigma_abs, cs.sigma_tot))
    k0, s0 = rows[0][0], rows[0][2]
    meta = {"command": "xsec", "a_r": a.real, "a_i": a.imag,
            "a_i_estimate_at_kmin": estimate_ai_from_cross_section(k0, max(s0, 0.0))}
    if args.isotope:
        meta["isotope"] = args.isotope
    return ["k", "sigma_el", "sigma_abs", "sigma_tot"], rows, meta


class _UsageError(Exception):
    pass


_COMMANDS = {
    "flow": cmd_flow,
    "poles": cmd_poles,
    "nuclei": cmd_nuclei,
    "dineutron": cmd_dineutron,
    "xsec": cmd_xsec,
}

_SUMMARY_KEYS = ("N_ER_formula", "N_ER_oracle", "N_ER_grid", "x_c", "gamma_peak_x", "diverged")


def main(argv=None):
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_protect_negative(argv))
    try:
        cols, rows, meta, *notes = _COMMANDS[args.command](args)
        text = _io.render(cols, rows, meta, args.format, notes[0] if notes else ())
        _io.emit(text, args.output)
    except _UsageError as exc:
        parser.error(str(exc))
    except argparse.ArgumentTypeError as exc:
        parser.error(str(exc))
    except (OSError, TableError, ValueError, ArithmeticError, FlowDivergence, SingularFlow, PoleNotFound) as exc:
        print(f"nhrg {args.command}: error: {exc}", file=sys.stderr)
        return 1
    summary = [f"{k}={meta[k]}" for k in _SUMMARY_KEYS if k in meta]
    if summary:
        print(f"nhrg {args.command}: " + " ".join(summary), file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
