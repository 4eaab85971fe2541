"""Command-line front end.

Exit status: 0 on success or a passing check, 1 when a theorem check fails,
2 on bad input or unmet preconditions.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .geodesic import evaluate, make_geodesic, uniform_grid
from .harness import (
    campaign,
    theorem1_instance,
    theorem3_instance,
    verify_theorem1,
    verify_theorem2,
    verify_theorem3,
)
from .intervals import c_s, diam_iu, hausdorff_distance
from .io import dumps, read_intervals, read_partition, read_space, series_csv, space_to_json
from .metric import MetricError, diagnostics, gh_to_point, diam
from .partition import PreconditionError, canonical_partition, verify_partition
from .solver import BudgetExceeded, gh_exact, gh_exact_bruteforce, gh_lower_bound

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _emit(args, payload) -> None:
    text = dumps(payload)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _write_csv(args, header, rows) -> None:
    if args.csv:
        Path(args.csv).write_text(series_csv(header, rows))


def _plot(args, x, curves, xlabel, **kw) -> None:
    if getattr(args, "plot", None):
        from .plotting import plot_series

        plot_series(args.plot, x, curves, xlabel, **kw)


def _space(args, path):
    return read_space(path, tol=args.tol)


# --- subcommands ------------------------------------------------------------


def cmd_validate(args):
    try:
        X = _space(args, args.space)
    except MetricError as exc:
        _emit(args, {"valid": False, "axiom": exc.axiom, "indices": list(exc.indices),
                     "message": str(exc)})
        return EXIT_INPUT
    _emit(args, {"valid": True, "n": X.n})
    return EXIT_OK


def cmd_diag(args):
    X = _space(args, args.space)
    out = diagnostics(X).to_dict()
    out["n"] = X.n
    out["gh_to_point"] = gh_to_point(X)
    _emit(args, out)
    return EXIT_OK


def cmd_ghd(args):
    X, Y = _space(args, args.x), _space(args, args.y)
    if args.bruteforce:
        res = gh_exact_bruteforce(X, Y)
    else:
        res = gh_exact(X, Y, node_budget=args.node_budget)
    out = res.to_dict()
    out["lower_bound_diam"] = gh_lower_bound(X, Y)
    _emit(args, out)
    return EXIT_OK


def cmd_geodesic(args):
    X, Y = _space(args, args.x), _space(args, args.y)
    curve = make_geodesic(X, Y)
    ts = [float(t) for t in uniform_grid(args.grid)]
    spaces = [evaluate(curve, t) for t in ts]
    diams = [diam(S) for S in spaces]
    rows = [(t, d, d / 2) for t, d in zip(ts, diams)]
    out = curve.to_dict()
    out["series"] = [{"t": t, "diam": d, "gh_to_point": g} for t, d, g in rows]
    if args.at is not None:
        out["at"] = {"t": args.at, "space": space_to_json(evaluate(curve, args.at))}
    _write_csv(args, ["t", "diam", "gh_to_point"], rows)
    _plot(args, ts, {"diam(R_t)": diams, "d_GH(point, R_t)": [d / 2 for d in diams]}, "t",
          title=f"geodesic, d_GH = {curve.gh:.6g}")
    _emit(args, out)
    return EXIT_OK


def cmd_hgeo(args):
    A, B = read_intervals(args.a), read_intervals(args.b)
    if args.exact:
        A = A.map(Fraction)
        B = B.map(Fraction)
    r = hausdorff_distance(A, B)
    ss = [r * i / (args.grid - 1) for i in range(args.grid)]
    curve = [c_s(A, B, s, r) for s in ss]
    rows = [(float(s), float(diam_iu(c)), float(diam_iu(c)) / 2) for s, c in zip(ss, curve)]
    out = {
        "d_H": float(r),
        "series": [
            {"s": float(s), "c_s": c.to_dict()["intervals"], "diam": float(diam_iu(c)),
             "d_H(c_s,A)": float(hausdorff_distance(c, A)),
             "d_H(c_s,B)": float(hausdorff_distance(c, B))}
            for s, c in zip(ss, curve)
        ],
    }
    if args.at is not None:
        s = Fraction(args.at) if args.exact else args.at
        out["at"] = {"s": float(s), "c_s": c_s(A, B, s, r).to_dict()["intervals"]}
    _write_csv(args, ["s", "diam", "gh_to_point"], rows)
    _plot(args, [row[0] for row in rows], {"diam(C_s)": [row[1] for row in rows],
                                           "d_GH(C_s, point)": [row[2] for row in rows]}, "s",
          title=f"Hausdorff geodesic, d_H = {float(r):.6g}")
    _emit(args, out)
    return EXIT_OK


def cmd_partition(args):
    M, X = _space(args, args.m), _space(args, args.x)
    if args.check:
        P = read_partition(args.check, M.n)
    else:
        P = canonical_partition(M, X, args.eps)
    rep = verify_partition(M, X, args.eps, P)
    out = P.to_dict()
    out["properties"] = rep.to_dict()
    _emit(args, out)
    return EXIT_OK if rep.ok else EXIT_FAIL


def _report_exit(args, rep, csv_cols, plot_kw):
    payload = rep.to_dict()
    _emit(args, payload)
    if csv_cols:
        header, rows = csv_cols
        _write_csv(args, header, rows)
    if plot_kw:
        _plot(args, **plot_kw)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_thm1(args):
    if args.x and args.y:
        X, Y = _space(args, args.x), _space(args, args.y)
        r = args.r if args.r is not None else max(diam(X), diam(Y)) / 2
    elif args.x or args.y:
        raise InputError("give both X and Y, or neither")
    else:
        X, Y, r0 = theorem1_instance(args.seed, args.n)
        r = args.r if args.r is not None else r0
    rep = verify_theorem1(X, Y, r, args.grid, seed=None if args.x else args.seed)
    ts = [s["t"] for s in rep.samples]
    rows = [(s["t"], s["diam"], s["gh_to_point"]) for s in rep.samples]
    return _report_exit(
        args, rep, (["t", "diam", "gh_to_point"], rows),
        {"x": ts, "curves": {"d_GH(point, R_t)": [s["gh_to_point"] for s in rep.samples]},
         "xlabel": "t", "hlines": {"r": r}, "title": "ball about the point"},
    )


def cmd_thm2(args):
    rep = verify_theorem2(args.r, tuple(args.grid))
    last = rep.samples[-1]["curve"]
    rows = [(c["s"], c["diam"], c["diam"] / 2) for c in last]
    return _report_exit(
        args, rep, (["s", "diam", "gh_to_point"], rows),
        {"x": [c["s"] for c in last], "curves": {"d_GH(C_s, point)": [c["diam"] / 2 for c in last]},
         "xlabel": "s", "hlines": {"r": float(Fraction(args.r))}, "title": "Hausdorff geodesic leaves the ball"},
    )


def cmd_thm3(args):
    files = [args.m, args.x, args.y]
    if all(files):
        M, X, Y = (_space(args, f) for f in files)
        seed = None
    elif any(files):
        raise InputError("give M, X and Y, or none of them")
    else:
        M, X, Y = theorem3_instance(args.seed, args.n)
        seed = args.seed
    rep = verify_theorem3(M, X, Y, args.grid, seed=seed)
    rows = [(s["t"], s["gh_exact"], s.get("analytic", float("nan"))) for s in rep.samples]
    plot = None
    if rep.samples:
        curves = {"d_GH(M, R_t)": [row[1] for row in rows]}
        if "analytic" in rep.samples[0]:
            curves["dis(R')/2"] = [row[2] for row in rows]
        plot = {"x": [row[0] for row in rows], "curves": curves, "xlabel": "t",
                "hlines": {"r": rep.params["r"]}, "title": "ball about a general-position space"}
    return _report_exit(args, rep, (["t", "gh_exact", "analytic"], rows), plot)


def cmd_campaign(args):
    summary = campaign(args.seed, args.trials, tuple(args.sizes), args.grid, workers=args.workers)
    _emit(args, summary)
    return EXIT_OK if summary["pass"] else EXIT_FAIL


# --- parser -------------------------------------------------------------------


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ghlab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"ghlab {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write JSON here instead of stdout")
    common.add_argument("--tol", type=float, default=0.0, help="slack for metric validation of inputs")
    common.add_argument("--deterministic", action=argparse.BooleanOptionalAction, default=True,
                        help="reproducible witnesses (default on)")
    series = argparse.ArgumentParser(add_help=False)
    series.add_argument("--csv", help="write the plot series as CSV")
    series.add_argument("--plot", help="render the series to an image file (png, pdf, svg)")

    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="check metric axioms")
    s.add_argument("space")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("diag", parents=[common], help="diam, s, e, general position")
    s.add_argument("space")
    s.set_defaults(func=cmd_diag)

    s = sub.add_parser("ghd", parents=[common], help="exact Gromov-Hausdorff distance")
    s.add_argument("x")
    s.add_argument("y")
    s.add_argument("--node-budget", type=int, default=None)
    s.add_argument("--bruteforce", action="store_true", help="enumerate all correspondences")
    s.set_defaults(func=cmd_ghd)

    s = sub.add_parser("geodesic", parents=[common, series], help="geodesic between two spaces")
    s.add_argument("x")
    s.add_argument("y")
    s.add_argument("--grid", type=int, default=33)
    s.add_argument("--at", type=float, default=None, help="also output the space at this t")
    s.set_defaults(func=cmd_geodesic)

    s = sub.add_parser("hgeo", parents=[common, series], help="Hausdorff geodesic of interval unions")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--grid", type=int, default=11)
    s.add_argument("--at", type=float, default=None, help="also output C_s at this s")
    s.add_argument("--exact", action="store_true", help="rational arithmetic on endpoints")
    s.set_defaults(func=cmd_hgeo)

    s = sub.add_parser("partition", parents=[common], help="canonical partition w.r.t. M")
    s.add_argument("m")
    s.add_argument("x")
    s.add_argument("--eps", type=float, required=True)
    s.add_argument("--check", help="verify this partition file instead of computing one")
    s.set_defaults(func=cmd_partition)

    s = sub.add_parser("verify-thm1", parents=[common, series], help="ball about the point, weak convexity")
    s.add_argument("x", nargs="?")
    s.add_argument("y", nargs="?")
    s.add_argument("--r", type=float, default=None)
    s.add_argument("--grid", type=int, default=33)
    s.add_argument("--seed", type=int, default=7)
    s.add_argument("--n", type=int, default=4)
    s.set_defaults(func=cmd_thm1)

    s = sub.add_parser("verify-thm2", parents=[common, series], help="ball about the point, no strong convexity")
    s.add_argument("--r", type=Fraction, default=Fraction(1))
    s.add_argument("--grid", type=_int_list, default=[11])
    s.set_defaults(func=cmd_thm2)

    s = sub.add_parser("verify-thm3", parents=[common, series], help="small ball about a general-position space")
    s.add_argument("m", nargs="?")
    s.add_argument("x", nargs="?")
    s.add_argument("y", nargs="?")
    s.add_argument("--grid", type=int, default=33)
    s.add_argument("--seed", type=int, default=7)
    s.add_argument("--n", type=int, default=4)
    s.set_defaults(func=cmd_thm3)

    s = sub.add_parser("campaign", parents=[common], help="batch of all three checks")
    s.add_argument("--seed", type=int, default=7)
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--sizes", type=_int_list, default=[3, 4])
    s.add_argument("--grid", type=int, default=33)
    s.add_argument("--workers", type=int, default=None, help="processes (default: GHLAB_THREADS or 1)")
    s.set_defaults(func=cmd_campaign)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (MetricError, PreconditionError, InputError, BudgetExceeded,
            ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, MetricError):
            err["axiom"] = exc.axiom
            err["indices"] = list(exc.indices)
        if isinstance(exc, PreconditionError):
            err["kind"] = exc.kind
        sys.stderr.write(dumps(err))
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
