"""Command-line front end.

Every command prints canonical JSON (sorted keys, numbers as decimal
strings) unless ``--format`` asks for something else, and echoes its flags
under ``"config"``.  Exit codes: 0 success, 2 usage, 3 precision escalation,
4 pipeline or no-root failure, 5 a proven bound was violated.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

import mpmath

from . import constants as C
from . import curves as K
from . import height_search as HS
from .errors import (
    DependentRowsError,
    DomainError,
    NoRootError,
    NoSentinelRowError,
    PrecisionEscalationError,
    RedirectError,
    ZeroOnContourError,
)
from .numerics import PrecisionContext, format_decimal
from .zeta_eval import DEFAULT_PRIME_LIMIT, limit_function_half, limit_series_half, limit_series_liouville, zeta

EXIT_OK, EXIT_USAGE, EXIT_PRECISION, EXIT_PIPELINE, EXIT_FALSIFIED = 0, 2, 3, 4, 5

UNITS = "sigma and t are dimensionless real and imaginary parts of s; --digits counts decimal digits."


class Falsified(Exception):
    """A bound proved for zeta failed numerically."""


def _digits(text: str) -> int:
    d = int(text)
    if not 10 <= d <= 200:
        raise argparse.ArgumentTypeError("digits must lie in [10, 200]")
    return d


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _config(args) -> dict:
    skip = {"func", "command", "out"}
    return {k: (v if isinstance(v, (bool, int)) or v is None else str(v)) for k, v in sorted(vars(args).items()) if k not in skip}


def _report(args, body: dict) -> dict:
    return {"command": args.command, "config": _config(args), **body}


def _text(report: dict, indent: str = "") -> str:
    lines = []
    for k, v in report.items():
        if isinstance(v, dict):
            lines.append(f"{indent}{k}:")
            lines.append(_text(v, indent + "  "))
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            lines.append(f"{indent}{k}:")
            for item in v:
                block = _text(item, indent + "    ").split("\n")
                lines.append(indent + "  - " + block[0].lstrip())
                lines.extend(block[1:])
        else:
            lines.append(f"{indent}{k}: {v}")
    return "\n".join(lines)


def _write_report(args, report: dict):
    if getattr(args, "format", "json") == "text":
        _emit(_text(report) + "\n", args.out)
    else:
        _emit(HS.dumps(report), args.out)


# ---------------------------------------------------------------------------
# commands

_SOLVERS = {"sigma1": C.solve_sigma_one, "E": C.solve_E, "A": C.solve_A}


def cmd_constants(args) -> int:
    which = ["A", "sigma1", "E"] if args.which == "all" else [args.which]
    results = {}
    status = EXIT_OK
    for name in which:
        root = _SOLVERS[name](args.digits)
        results[name] = root.to_dict()
        if root.enclosure_width > mpmath.mpf(10) ** (-args.digits) * (1 + mpmath.mpf(10) ** -10):
            status = EXIT_PRECISION
    _write_report(args, _report(args, {"constants": results}))
    return status


def cmd_sigma_a(args) -> int:
    if args.a == 1:
        raise RedirectError("a = 1 is the constant sigma1", "zetabound constants --which sigma1")
    root = C.solve_sigma_a(args.a, args.digits)
    _write_report(args, _report(args, {"sigma_a": root.to_dict()}))
    return EXIT_OK


def cmd_l_bound(args) -> int:
    root = C.solve_l_bound(args.q, args.a, args.digits)
    _write_report(args, _report(args, {"l_bound": root.to_dict()}))
    return EXIT_OK


def _lattice_params(args) -> HS.LatticeParams:
    thetas = tuple(x.strip() for x in args.theta.split(",")) if args.theta else None
    return HS.LatticeParams(n=args.n, nu=args.nu, r=args.r, weights_base=args.weights_base, thetas=thetas)


def cmd_search_height(args) -> int:
    ctx = PrecisionContext(args.digits)
    if args.verify_height is not None:
        pair = HS.verify_height(args.verify_height, ctx, args.prime_limit, float(args.window))
        body = {"verify_height": str(args.verify_height), "pair": pair.to_dict()}
    else:
        body = HS.search_report(_lattice_params(args), not args.no_refine, ctx, args.prime_limit, args.keep)
        pair = None
    _write_report(args, _report(args, body))
    violations = body["pair"]["bound_violations"] if "pair" in body else []
    if violations:
        raise Falsified("; ".join(violations))
    return EXIT_OK


def _segment_json(seg: K.CurveSegment) -> dict:
    return {
        "kind": seg.kind,
        "closed": seg.closed,
        "ends": list(seg.ends),
        "sigma": [repr(float(x)) for x in seg.sigma],
        "t": seg.t_strings(),
    }


def cmd_trace(args) -> int:
    window = K.Window.parse(args.window, args.grid_step)
    fn = K.ZetaFunction(window.default_height(), args.prime_limit)
    segs = K.trace_real_curves(window, fn, heavy=args.heavy)
    re_zero = K.trace_real_curves(window, K.RotatedFunction(fn, 1j), heavy=args.heavy) if args.overlay_re_zero else []
    tps = K.turning_points_on(segs, fn) if args.turning_points else []
    bound = K.verify_turning_bound(tps)
    if args.format == "csv":
        if args.out:
            K.write_csv(segs, args.out)
        else:
            sys.stdout.write("".join(K.segment_csv(s) for s in segs))
    elif args.format == "svg":
        _emit(K.segments_svg(segs, window, re_zero, tps), args.out)
    else:
        body = {
            "window": window.to_dict(),
            "segments": [_segment_json(s) for s in segs],
            "re_zero_segments": [_segment_json(s) for s in re_zero],
            "turning_points": [t.to_dict() for t in tps],
            "turning_bound": bound,
        }
        _write_report(args, _report(args, body))
    if bound["falsified"]:
        raise Falsified("a turning point lies right of E")
    return EXIT_OK


def series_oracles(N: int = 10**5, digits: int = 30) -> list[dict]:
    """Partial sums of the two signed Dirichlet series against their closed forms."""
    ctx = PrecisionContext(digits)
    out = []
    for label, s in (("2", 2), ("3", 3), ("2.5+7i", mpmath.mpc(2.5, 7))):
        half = limit_series_half(s, N, ctx)
        target = limit_function_half(s, ctx)[0]
        liou = limit_series_liouville(s, N, ctx)
        with ctx.workdps():
            z2, z1 = zeta(2 * mpmath.mpc(s), None, ctx), zeta(s, None, ctx)
            target2 = z2.value / z1.value
            r2 = (z2.error_radius + abs(target2) * z1.error_radius) / abs(z1.value)
            for name, series, value, radius in (
                ("two_adic", half, target.value, target.error_radius),
                ("liouville", liou, target2, r2),
            ):
                diff = abs(series.value - value)
                out.append({
                    "series": name,
                    "s": label,
                    "N": N,
                    "difference": format_decimal(diff, 4),
                    "tail_bound": format_decimal(series.error_radius + radius, 4),
                    "ok": bool(diff <= series.error_radius + radius),
                })
    return out


def cmd_check(args) -> int:
    suites = ["a3", "u-bound", "series-oracles"] if args.suite == "all" else [args.suite]
    body: dict = {}
    ok = True
    if "a3" in suites:
        v = K.check_inequality_A3(args.grid, args.grid)
        u = K.check_U_minimum(min(args.grid, 50), min(args.grid, 50))
        body["a3"] = {"grid": args.grid, "violations": [x.to_dict() for x in v], "u_minimum_violations": [x.to_dict() for x in u]}
        ok &= not v and not u
    if "u-bound" in suites:
        rows = K.check_u_bound()
        T = K.half_period(PrecisionContext(60))
        uE = K.solve_u_of_t(T, 35)
        E = C.solve_E(40)
        with mpmath.workdps(60):
            gap = abs(uE.value - E.value)
        dec = K.check_H_decreasing()
        body["u-bound"] = {
            "samples": rows,
            "u_half_period": uE.decimal(35),
            "u_half_period_minus_E": format_decimal(gap, 4),
            "H_decreasing_failures": [list(map(repr, p)) for p in dec],
        }
        ok &= all(r["ok"] for r in rows) and gap < mpmath.mpf(10) ** -30 and not dec
    if "series-oracles" in suites:
        rows = series_oracles()
        body["series-oracles"] = rows
        ok &= all(r["ok"] for r in rows)
    body["pass"] = bool(ok)
    _write_report(args, _report(args, body))
    return EXIT_OK if ok else EXIT_FALSIFIED


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="zetabound",
        description="Extremal constants, near-extremal heights and turning points of the Riemann zeta function.",
        epilog=UNITS,
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt=("json", "text"), digits=45):
        sp.add_argument("--digits", type=_digits, default=digits, help=f"decimal digits of the result, 10..200 (default {digits})")
        sp.add_argument("--format", choices=fmt, default=fmt[0], help="output format")
        sp.add_argument("--out", help="output path (default stdout)")

    sp = sub.add_parser("constants", help="sigma(1), E and A", epilog=UNITS)
    sp.add_argument("--which", choices=["sigma1", "E", "A", "all"], default="all")
    common(sp)
    sp.set_defaults(func=cmd_constants)

    sp = sub.add_parser("sigma-a", help="sup Re s over zeta(s) = a, for a > 0, a != 1", epilog=UNITS)
    sp.add_argument("--a", type=_rational, required=True, help="target value a (decimal or p/q)")
    common(sp, digits=30)
    sp.set_defaults(func=cmd_sigma_a)

    sp = sub.add_parser("l-bound", help="bound for Dirichlet L-functions of modulus q", epilog=UNITS)
    sp.add_argument("--q", type=_positive_int, required=True, help="modulus")
    sp.add_argument("--a", type=_rational, default=Fraction(1), help="a = 1 or 0 < a < 1 (default 1)")
    common(sp, digits=30)
    sp.set_defaults(func=cmd_l_bound)

    sp = sub.add_parser("search-height", help="LLL search for heights t where zeta nears its extremal behaviour", epilog=UNITS)
    sp.add_argument("--n", type=_positive_int, default=10, help="number of primes")
    sp.add_argument("--nu", type=_positive_int, default=90, help="bits of phase scaling (2^nu)")
    sp.add_argument("--r", type=int, default=30, help="bits of height resolution (t = x/2^r)")
    sp.add_argument("--weights-base", default="1.15", help="weight base b; weight j is b^(40-j)")
    sp.add_argument("--theta", help="comma-separated phase targets, e.g. pi,0,0 (default pi then zeros)")
    sp.add_argument("--prime-limit", type=_positive_int, default=DEFAULT_PRIME_LIMIT, help="primes in the Euler product")
    sp.add_argument("--keep", type=_positive_int, default=5, help="candidates to report")
    sp.add_argument("--no-refine", action="store_true", help="skip root refinement")
    sp.add_argument("--verify-height", type=_rational, help="skip the search; locate the extremal roots within --window of this height")
    sp.add_argument("--window", default="3", help="half-width in t for --verify-height")
    common(sp, digits=20)
    sp.set_defaults(func=cmd_search_height)

    sp = sub.add_parser("trace", help="curves Im zeta = 0 in a window, with turning points", epilog=UNITS)
    sp.add_argument("--window", required=True, help="sigma_min,sigma_max,t_min,t_max")
    sp.add_argument("--grid-step", help="grid step (default window width / 20)")
    sp.add_argument("--heavy", action="store_true", help="Euler-Maclaurin strip mode: sigma >= 0.1, |t| <= 1e4")
    sp.add_argument("--overlay-re-zero", action="store_true", help="also trace Re zeta = 0")
    sp.add_argument("--turning-points", action="store_true", help="locate turning points on the traced curves")
    sp.add_argument("--prime-limit", type=_positive_int, default=DEFAULT_PRIME_LIMIT, help="primes in the Euler product (heights above 1e5)")
    common(sp, fmt=("json", "csv", "svg", "text"), digits=20)
    sp.set_defaults(func=cmd_trace)

    sp = sub.add_parser("check", help="grid checks of the inequalities behind the turning-point bound", epilog=UNITS)
    sp.add_argument("--suite", choices=["a3", "u-bound", "series-oracles", "all"], default="all")
    sp.add_argument("--grid", type=int, default=100, help="points per axis for the a3 grid (>= 10)")
    common(sp, digits=30)
    sp.set_defaults(func=cmd_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except RedirectError as exc:
        print(f"error: {exc} (use {exc.target})", file=sys.stderr)
        return EXIT_USAGE
    except PrecisionEscalationError as exc:
        print(f"error: {exc}; retry with --digits {exc.required_digits}", file=sys.stderr)
        return EXIT_PRECISION
    except (NoRootError, NoSentinelRowError, DependentRowsError, ZeroOnContourError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PIPELINE
    except Falsified as exc:
        print(f"FALSIFICATION: {exc}", file=sys.stderr)
        return EXIT_FALSIFIED
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
