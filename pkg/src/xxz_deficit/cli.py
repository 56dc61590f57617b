"""Command-line front door.

Subcommands:

* ``point``     deficit branches and winner at one (T, B) point
* ``profile``   dump of S~(theta) samples plus refined extrema
* ``boundary``  trace one boundary curve to CSV
* ``triple``    locate the triple point of two (or three) curves
* ``jumps``     optimal-angle jump table across the interior-crossing line
* ``diagram``   full grid sweep to CSV or JSON, optional level lines

Exit codes: 0 success, 1 usage or validation error, 2 partial results
(incomplete trace, missing root or triple point).  The temperature floor
honors the QWD_T_FLOOR environment variable.  All files are written only
after the computation finished, with numbers at 9 significant digits, so
reruns of one configuration are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .boundaries import (
    AmbiguousBracket,
    BoundaryKind,
    NoRoot,
    curve_to_csv,
    find_triple_point,
    solve_boundary_on_line,
    trace_boundary,
)
from .diagram import (
    GridSpec,
    contours_to_csv,
    diagram_to_csv,
    diagram_to_json,
    level_lines,
    sweep,
)
from .model import ModelParams
from .optimizer import optimal_angle_jump, optimize_deficit, scan_profile
from .model import thermal_state

__all__ = ["main"]

LN2 = math.log(2.0)

_KINDS = {
    "zero": BoundaryKind.ZERO,
    "halfpi": BoundaryKind.HALF_PI,
    "equal": BoundaryKind.EQUAL_ENDPOINTS,
    "zeroprime": BoundaryKind.ZERO_PRIME,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits with 2
        raise UsageError(message)


def _fmt(x: float) -> str:
    return format(float(x), ".9g")


def _parse_range(text: str, name: str) -> tuple[float, float, float | None]:
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise UsageError(f"{name} must look like lo:hi or lo:hi:step")
    try:
        lo, hi = float(parts[0]), float(parts[1])
        step = float(parts[2]) if len(parts) == 3 else None
    except ValueError as err:
        raise UsageError(f"bad number in {name}: {err}") from None
    if step is not None and step <= 0.0:
        raise UsageError(f"{name} step must be positive")
    return lo, hi, step


def _parse_grid(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise UsageError("--grid must look like 100x100")
    try:
        n_t, n_b = int(parts[0]), int(parts[1])
    except ValueError as err:
        raise UsageError(f"bad --grid: {err}") from None
    return n_t, n_b


def _norm_value(args) -> float:
    unit = abs(args.J) if args.norm == "J" else abs(args.Jz)
    if unit <= 0.0:
        raise UsageError(f"cannot normalize on |{args.norm}| = 0")
    return unit


def _write(args, text: str) -> None:
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _require(args, *names) -> None:
    for name in names:
        if getattr(args, name, None) is None:
            raise UsageError(f"--{name.replace('_', '-')} is required here")


def cmd_point(args) -> int:
    _require(args, "B", "T")
    res = optimize_deficit(ModelParams(args.J, args.Jz, args.B, args.T))
    u = _norm_value(args)
    doc = {
        "T": float(args.T) / u,
        "B": float(args.B) / u,
        "branch": res.branch.value,
        "optimal_theta": res.optimal_theta,
        "delta0_nats": res.delta0,
        "delta_halfpi_nats": res.delta_halfpi,
        "delta_theta_nats": res.delta_theta,
        "deficit_nats": res.deficit,
        "deficit_bits": res.deficit_bits,
        "shape": res.shape_label,
    }
    if args.format == "json":
        _write(args, json.dumps(
            {k: (v if isinstance(v, str) or v is None else float(_fmt(v)))
             for k, v in doc.items()},
            sort_keys=True, indent=1) + "\n")
    else:
        lines = []
        for key, val in doc.items():
            if val is None:
                lines.append(f"{key},")
            elif isinstance(val, str):
                lines.append(f"{key},{val}")
            else:
                lines.append(f"{key},{_fmt(val)}")
        _write(args, "\n".join(lines) + "\n")
    return 0


def cmd_profile(args) -> int:
    _require(args, "B", "T")
    state = thermal_state(ModelParams(args.J, args.Jz, args.B, args.T))
    profile = scan_profile(state, args.n)
    unit = LN2 if args.units == "bits" else 1.0
    lines = [
        f"# J={_fmt(args.J)} Jz={_fmt(args.Jz)} B={_fmt(args.B)} T={_fmt(args.T)}"
        f" units={args.units}",
        f"# shape={profile.shape_label}",
    ]
    for theta, entropy in profile.interior_minima:
        lines.append(f"# interior_min,{_fmt(theta)},{_fmt(entropy / unit)}")
    for theta, entropy in profile.interior_maxima:
        lines.append(f"# interior_max,{_fmt(theta)},{_fmt(entropy / unit)}")
    lines.append("theta,entropy")
    if args.extended:
        import numpy as np

        from .measurement import entropy_curve

        thetas = np.linspace(-math.pi / 2.0, math.pi / 2.0, 2 * args.n - 1)
        values = entropy_curve(state, thetas)
        for th, en in zip(thetas, values):
            lines.append(f"{_fmt(th)},{_fmt(en / unit)}")
    else:
        for th, en in profile.samples:
            lines.append(f"{_fmt(th)},{_fmt(en / unit)}")
    _write(args, "\n".join(lines) + "\n")
    return 0


def cmd_boundary(args) -> int:
    kind = _KINDS[args.kind]
    if args.march == "B":
        _require(args, "B_range")
        lo, hi, step = _parse_range(args.B_range, "--B-range")
    else:
        _require(args, "T_range")
        lo, hi, step = _parse_range(args.T_range, "--T-range")
    step = step or 0.01
    bracket = (args.bracket_lo, args.bracket_hi)
    template = ModelParams(args.J, args.Jz, B=max(lo, 1e-4), T=max(lo, 0.1))
    curve = trace_boundary(
        kind, template, args.march, lo, hi, step,
        first_bracket=bracket, classify=not args.no_classify,
    )
    _write(args, curve_to_csv(curve, _norm_value(args)))
    if not curve.points:
        print("no root found anywhere on the requested span", file=sys.stderr)
        return 2
    return 0 if curve.complete else 2


def cmd_triple(args) -> int:
    _require(args, "B_range")
    lo, hi, step = _parse_range(args.B_range, "--B-range")
    step = step or 0.01
    template = ModelParams(args.J, args.Jz, B=lo, T=0.5)
    bracket = (args.bracket_lo, args.bracket_hi)
    kinds = [_KINDS[k.strip()] for k in args.kinds.split(",") if k.strip()]
    curves = []
    for kind in kinds:
        if kind is BoundaryKind.ZERO_PRIME:
            # exists only above the triple point; trace downward to meet it
            curve = trace_boundary(
                kind, template, "B", hi, lo, step,
                first_bracket=bracket, classify=False,
            )
        else:
            curve = trace_boundary(
                kind, template, "B", lo, hi, step,
                first_bracket=bracket, classify=False,
            )
        curves.append(curve)
    point = find_triple_point(curves)
    if point is None:
        print("curves do not meet inside the scanned range", file=sys.stderr)
        return 2
    u = _norm_value(args)
    doc = {
        "T": float(_fmt(point.T / u)),
        "B": float(_fmt(point.B / u)),
        "kinds": sorted(k.value for k in point.meeting_kinds),
    }
    if args.format == "json":
        _write(args, json.dumps(doc, sort_keys=True, indent=1) + "\n")
    else:
        _write(args, f"T,B,kinds\n{_fmt(point.T / u)},{_fmt(point.B / u)},"
                     + "|".join(doc["kinds"]) + "\n")
    return 0


def cmd_jumps(args) -> int:
    _require(args, "B_list")
    try:
        b_values = [float(x) for x in args.B_list.split(",") if x.strip()]
    except ValueError as err:
        raise UsageError(f"bad --B-list: {err}") from None
    if not b_values:
        raise UsageError("--B-list is empty")
    u = _norm_value(args)
    rows = []
    failures = 0
    for b in b_values:
        template = ModelParams(args.J, args.Jz, B=b, T=0.5)
        try:
            t_half, _ = solve_boundary_on_line(
                BoundaryKind.HALF_PI, template, "B",
                (args.bracket_lo, args.bracket_hi),
            )
            t_cross, _ = solve_boundary_on_line(
                BoundaryKind.ZERO_PRIME, template, "B",
                (t_half + 1e-4, t_half + 0.2), n_scan=801,
            )
        except (NoRoot, AmbiguousBracket):
            failures += 1
            rows.append(f"{_fmt(b / u)},,")
            continue
        jump = optimal_angle_jump(
            ModelParams(args.J, args.Jz, b, t_cross + args.eps),
            ModelParams(args.J, args.Jz, b, t_cross - args.eps),
            n=801,
        )
        rows.append(f"{_fmt(b / u)},{_fmt(t_cross / u)},{_fmt(jump)}")
    header = (
        f"# J={_fmt(args.J)} Jz={_fmt(args.Jz)} norm={args.norm}"
        f" eps={_fmt(args.eps)}\nB,T,jump"
    )
    _write(args, header + "\n" + "\n".join(rows) + "\n")
    return 2 if failures else 0


def cmd_diagram(args) -> int:
    _require(args, "T_range", "B_range")
    t_lo, t_hi, _ = _parse_range(args.T_range, "--T-range")
    b_lo, b_hi, _ = _parse_range(args.B_range, "--B-range")
    n_t, n_b = _parse_grid(args.grid)
    try:
        grid = GridSpec(t_lo, t_hi, b_lo, b_hi, n_t, n_b)
    except ValueError as err:
        raise UsageError(str(err)) from None
    diagram = sweep(
        args.J, args.Jz, grid, workers=args.workers, norm_unit=args.norm
    )
    if args.format == "json":
        _write(args, diagram_to_json(diagram))
    else:
        _write(args, diagram_to_csv(diagram))
    if args.levels:
        try:
            levels = [float(x) for x in args.levels.split(",") if x.strip()]
        except ValueError as err:
            raise UsageError(f"bad --levels: {err}") from None
        contours = level_lines(diagram, levels)
        text = contours_to_csv(contours, diagram.norm_value)
        path = (args.out or "contours") + ".levels.csv"
        with open(path, "w") as fh:
            fh.write(text)
    return 0


def _add_common(sub) -> None:
    sub.add_argument("--J", type=float, required=True, help="transverse coupling")
    sub.add_argument("--Jz", type=float, required=True, help="longitudinal coupling")
    sub.add_argument("--norm", choices=("J", "Jz"), default="J",
                     help="report T and B in units of |J| or |Jz|")
    sub.add_argument("--format", choices=("csv", "json"), default="csv")
    sub.add_argument("--units", choices=("nats", "bits"), default="nats")
    sub.add_argument("--out", default=None, help="output path (default stdout)")


def _add_bracket(sub, lo: float, hi: float) -> None:
    sub.add_argument("--bracket-lo", type=float, default=lo,
                     help="initial solve bracket, lower end")
    sub.add_argument("--bracket-hi", type=float, default=hi,
                     help="initial solve bracket, upper end")


def build_parser() -> _Parser:
    parser = _Parser(prog="xxz-deficit", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("point", help="deficit at one (T, B) point")
    _add_common(p)
    p.add_argument("--B", type=float)
    p.add_argument("--T", type=float)
    p.set_defaults(func=cmd_point)

    p = subs.add_parser("profile", help="S~(theta) samples; CSV columns theta,entropy")
    _add_common(p)
    p.add_argument("--B", type=float)
    p.add_argument("--T", type=float)
    p.add_argument("--n", type=int, default=201, help="sample count")
    p.add_argument("--extended", action="store_true",
                   help="sample theta over [-pi/2, pi/2] instead of [0, pi/2]")
    p.set_defaults(func=cmd_profile)

    p = subs.add_parser("boundary", help="trace one boundary curve; CSV columns "
                                         "kind,T,B,residual,is_physical")
    _add_common(p)
    p.add_argument("--kind", choices=sorted(_KINDS), required=True)
    p.add_argument("--march", choices=("T", "B"), default="B",
                   help="coordinate to march along")
    p.add_argument("--B-range", dest="B_range", help="lo:hi[:step] when marching B")
    p.add_argument("--T-range", dest="T_range", help="lo:hi[:step] when marching T")
    p.add_argument("--no-classify", action="store_true",
                   help="skip the per-point phase-change check")
    _add_bracket(p, 0.02, 3.0)
    p.set_defaults(func=cmd_boundary)

    p = subs.add_parser("triple", help="triple point of boundary curves")
    _add_common(p)
    p.add_argument("--B-range", dest="B_range", default="0.8:2.2:0.02",
                   help="march range lo:hi[:step]")
    p.add_argument("--kinds", default="equal,halfpi",
                   help="comma list of curve kinds to intersect")
    _add_bracket(p, 0.05, 1.2)
    p.set_defaults(func=cmd_triple)

    p = subs.add_parser("jumps", help="optimal-angle jump table; CSV columns B,T,jump")
    _add_common(p)
    p.add_argument("--B-list", dest="B_list", help="comma list of field strengths")
    p.add_argument("--eps", type=float, default=1e-5,
                   help="temperature offset around the crossing")
    _add_bracket(p, 0.3, 1.0)
    p.set_defaults(func=cmd_jumps)

    p = subs.add_parser("diagram", help="grid sweep; CSV columns "
                                        "T,B,branch,theta_opt,deficit_nats,deficit_bits")
    _add_common(p)
    p.add_argument("--T-range", dest="T_range", help="lo:hi")
    p.add_argument("--B-range", dest="B_range", help="lo:hi")
    p.add_argument("--grid", default="200x200", help="n_T x n_B cells")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--levels", default=None,
                   help="comma list of deficit levels; contours go to "
                        "OUT.levels.csv")
    p.set_defaults(func=cmd_diagram)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
