"""Command-line front end.

Commands:
    spectrum   compute eigenpairs, write the JSON cache and a CSV listing
    solve      solve a boundary value problem, write grids / point values
    grid       grid-only variant of solve
    tables     recompute the published tables and grade agreement
    check      run the spectrum invariant suite

Exit codes: 0 success, 1 failed checks, 2 invalid configuration or
incompatible data, 3 root-finder failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import reference_tables as ref
from .analysis import TolProfile, invariant_suite
from .boundary import QuadratureError, parse_expression
from .catalog import boundary_data_from_spec, builtin_boundary, exact_solution_for
from .geometry import GeometryError, Rectangle
from .solvers import IncompatibleDataError, grid_points, solve_dirichlet, solve_neumann, solve_robin
from .spectrum import (
    GLOBAL_SORTED,
    PER_FAMILY,
    RootFindError,
    Spectrum,
    build_spectrum,
    build_spectrum_by_count,
    load_spectrum,
    save_spectrum,
)
from .tables import POLICY_PREFIX, TableWorkspace, reproduce_table

EXIT_CHECK_FAILED = 1
EXIT_BAD_CONFIG = 2
EXIT_ROOTFIND = 3


def _fmt(x, digits: int) -> str:
    if isinstance(x, bool):
        return str(x)
    if isinstance(x, float):
        return format(x, f".{digits}g")
    return str(x)


def _write_csv(path, rows, digits: int):
    rows = ([_fmt(v, digits) for v in row] for row in rows)
    if path in (None, "-"):
        w = csv.writer(sys.stdout, lineterminator="\n")
        for row in rows:
            w.writerow(row)
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            for row in rows:
                w.writerow(row)


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--h", type=float, default=1.0, help="aspect ratio of the rectangle (0 < h <= 1)")
    p.add_argument("--abstol", type=float, default=1e-10, help="quadrature absolute tolerance")
    p.add_argument("--reltol", type=float, default=1e-6, help="quadrature relative tolerance")
    p.add_argument("--digits", type=int, choices=(6, 17), default=6, help="significant digits in output")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    p.add_argument("--threads", type=int, default=1, help="worker threads for coefficient quadrature")


def _add_truncation(p: argparse.ArgumentParser):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--per-family", dest="per_family", type=int, metavar="M",
                   help="keep the first M roots of each family")
    g.add_argument("--global", dest="global_m", type=int, metavar="M",
                   help="keep the 8M smallest eigenvalues overall")
    g.add_argument("--count", type=int, metavar="N",
                   help="keep the N smallest nonconstant eigenvalues")
    p.add_argument("--M", type=int, default=None,
                   help="shorthand for --per-family M")


def _spectrum_from_args(args) -> Spectrum:
    rect = Rectangle(args.h)
    if getattr(args, "cache", None):
        spec = load_spectrum(args.cache)
        if spec.rectangle.h != rect.h and args.h != 1.0:
            raise ValueError(
                f"cache is for h={spec.rectangle.h}, command asked for h={args.h}"
            )
        return spec
    if args.count is not None:
        return build_spectrum_by_count(rect, args.count)
    if args.global_m is not None:
        return build_spectrum(rect, args.global_m, GLOBAL_SORTED)
    m = args.per_family if args.per_family is not None else (args.M if args.M is not None else 5)
    return build_spectrum(rect, m, PER_FAMILY)


def cmd_spectrum(args) -> int:
    rect = Rectangle(args.h)
    if args.count is not None:
        spec = build_spectrum_by_count(rect, args.count)
    elif args.global_m is not None:
        spec = build_spectrum(rect, args.global_m, GLOBAL_SORTED)
    else:
        m = args.per_family if args.per_family is not None else (args.M or 5)
        spec = build_spectrum(rect, m, PER_FAMILY)
    out = args.out or "spectrum.json"
    save_spectrum(spec, out)
    listing = [("index", "family", "nu", "delta")]
    listing += [(md.index, md.family.value, md.nu, md.delta) for md in spec.modes]
    _write_csv(args.csv, listing, args.digits)
    print(f"wrote {len(spec.modes)} modes to {out}" + (f" and {args.csv}" if args.csv else ""))
    return 0


def _load_points(spec_text: str):
    if spec_text == "paper":
        return list(ref.PROBE_POINTS)
    if spec_text.startswith("file:"):
        path = spec_text[5:]
        pts = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.lower().startswith("x"):
                    continue
                a, b = line.split(",")[:2]
                pts.append((float(a), float(b)))
        return pts
    raise ValueError(f"--points takes 'paper' or 'file:PATH', got {spec_text!r}")


def _boundary_from_arg(text: str, rect: Rectangle, b=None):
    if text.startswith("builtin:"):
        return builtin_boundary(text[8:], rect, b)
    if text.startswith("expr:"):
        return parse_expression(text[5:], rect)
    if text.startswith("file:"):
        with open(text[5:], encoding="utf-8") as fh:
            return boundary_data_from_spec(json.load(fh), rect, b)
    raise ValueError(f"--g takes builtin:NAME, expr:SRC, or file:PATH, got {text!r}")


def cmd_solve(args, grid_only: bool = False) -> int:
    rect = Rectangle(args.h)
    b = args.b if args.kind == "robin" else None
    g = _boundary_from_arg(args.g, rect, b)
    spec = _spectrum_from_args(args)
    common = dict(abstol=args.abstol, reltol=args.reltol, threads=args.threads)
    if args.kind == "dirichlet":
        u = solve_dirichlet(g, spec, use_corner_reduction=args.corner_reduction, **common)
    elif args.kind == "robin":
        if args.b is None or args.b <= 0:
            raise ValueError("--kind robin requires --b > 0")
        u = solve_robin(g, args.b, spec, **common)
    else:
        u = solve_neumann(g, spec, **common)

    exact = exact_solution_for(args.g[8:]) if args.g.startswith("builtin:") else None
    use_exact = args.with_exact and exact is not None

    if args.print_coefficients:
        rows = [("index", "family", "nu", "delta", "coefficient", "weight")]
        rows += [
            (md.index, md.family.value, md.nu, md.delta, c, w)
            for md, c, w in zip(spec.nonconstant, u.coefficients.values, u.weights)
        ]
        _write_csv(None, rows, args.digits)

    wrote = []
    if args.grid:
        U = u.eval_grid(args.grid, args.grid)
        X, Y = grid_points(rect, args.grid, args.grid)
        header = ["x", "y", "u"] + (["exact", "error"] if use_exact else [])
        rows = [header]
        for iy in range(args.grid):
            for ix in range(args.grid):
                row = [X[iy, ix], Y[iy, ix], U[iy, ix]]
                if use_exact:
                    e = exact.value(X[iy, ix], Y[iy, ix])
                    row += [e, U[iy, ix] - e]
                rows.append(row)
        _write_csv(args.out, rows, args.digits)
        wrote.append(args.out or "stdout")
    elif grid_only:
        raise ValueError("the grid command requires --grid N")

    if args.points and not grid_only:
        pts = _load_points(args.points)
        header = ["x", "y", "u"] + (["exact", "error"] if use_exact else [])
        rows = [header]
        for x, y in pts:
            row = [x, y, u.eval(x, y)]
            if use_exact:
                e = exact.value(x, y)
                row += [e, row[2] - e]
            rows.append(row)
        if args.format == "json":
            payload = [dict(zip(header, r)) for r in rows[1:]]
            text = json.dumps(payload, indent=2)
            if args.points_out in (None, "-"):
                print(text)
            else:
                Path(args.points_out).write_text(text + "\n", encoding="utf-8")
        else:
            _write_csv(args.points_out, rows, args.digits)
        wrote.append(args.points_out or "stdout")
    if wrote:
        print(f"# wrote: {', '.join(wrote)}", file=sys.stderr)
    return 0


def cmd_tables(args) -> int:
    ids = _parse_which(args.which)
    ws = TableWorkspace(args.abstol, args.reltol)
    all_ok = True
    outdir = Path(args.out) if args.out else None
    if outdir:
        outdir.mkdir(parents=True, exist_ok=True)
    for tid in ids:
        result = reproduce_table(tid, ws, args.policy)
        print(result.summary_line())
        for note in result.notes:
            print(f"  note: {note}")
        all_ok = all_ok and result.n_within == result.n_total
        if outdir:
            _write_csv(outdir / f"table_{tid:02d}.csv", result.csv_rows(), args.digits)
    print("all tables within tolerance" if all_ok else "some entries out of tolerance")
    return 0


def _parse_which(text: str):
    if text in ("all", None):
        return list(ref.ALL_TABLE_IDS)
    ids = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            a, b = part.split("-")
            ids.extend(range(int(a), int(b) + 1))
        else:
            ids.append(int(part))
    bad = [i for i in ids if i not in ref.ALL_TABLE_IDS]
    if bad:
        raise ValueError(f"unknown table ids {bad}; valid ids are 1..14")
    return ids


def cmd_check(args) -> int:
    rect = Rectangle(args.h)
    m = args.per_family if args.per_family is not None else (args.M or 5)
    spec = build_spectrum(rect, m, PER_FAMILY)
    report = invariant_suite(spec, TolProfile(), seed=args.seed)
    for c in report.checks:
        print(c.line())
    if args.json:
        Path(args.json).write_text(report.to_json() + "\n", encoding="utf-8")
    print("all checks passed" if report.passed else "CHECK FAILURES")
    return 0 if report.passed else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="steklov",
        description="Laplace boundary value problems on rectangles by Steklov expansion",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="compute and cache eigenpairs")
    _add_common(p)
    _add_truncation(p)
    p.add_argument("--out", default="spectrum.json", help="JSON cache path")
    p.add_argument("--csv", default=None, help="CSV listing path (default stdout)")
    p.set_defaults(func=cmd_spectrum)

    for name, grid_only in (("solve", False), ("grid", True)):
        p = sub.add_parser(name, help="solve a boundary value problem")
        _add_common(p)
        _add_truncation(p)
        p.add_argument("--kind", choices=("dirichlet", "robin", "neumann"), default="dirichlet")
        p.add_argument("--b", type=float, default=None, help="Robin constant (b > 0)")
        p.add_argument("--g", required=True, help="boundary data: builtin:NAME | expr:SRC | file:PATH")
        p.add_argument("--grid", type=int, default=101 if grid_only else None,
                       help="write an N x N grid CSV")
        p.add_argument("--points", default=None,
                       help="point evaluations: 'paper' or file:PATH")
        p.add_argument("--out", default=None, help="grid CSV path (default stdout)")
        p.add_argument("--points-out", dest="points_out", default=None,
                       help="point-evaluation output path (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv",
                       help="format of point evaluations")
        p.add_argument("--with-exact", dest="with_exact", action="store_true",
                       help="add exact/error columns for builtin data with known solutions")
        p.add_argument("--corner-reduction", dest="corner_reduction", action="store_true",
                       help="subtract the corner bilinear before expanding (Dirichlet)")
        p.add_argument("--print-coefficients", dest="print_coefficients", action="store_true")
        p.add_argument("--cache", default=None, help="load the spectrum from a cache file")
        p.set_defaults(func=lambda a, go=grid_only: cmd_solve(a, grid_only=go))

    p = sub.add_parser("tables", help="recompute the published tables")
    _add_common(p)
    p.add_argument("--which", default="all", help="table ids, e.g. 1-3,11 (default all)")
    p.add_argument("--out", default=None, help="directory for per-table CSVs")
    p.add_argument("--policy", choices=(POLICY_PREFIX, PER_FAMILY, GLOBAL_SORTED),
                   default=POLICY_PREFIX,
                   help="truncation policy (default: the published series-prefix reading)")
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("check", help="run the invariant suite")
    _add_common(p)
    _add_truncation(p)
    p.add_argument("--json", default=None, help="write the report as JSON")
    p.set_defaults(func=cmd_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except RootFindError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ROOTFIND
    except (IncompatibleDataError, GeometryError, QuadratureError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG


if __name__ == "__main__":
    sys.exit(main())
