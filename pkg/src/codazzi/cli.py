"""Command-line front end: run verification suites, generate structures, check files.

Exit codes: 0 all checks pass, 1 at least one check failed, 2 usage or
configuration error, 3 precondition infeasibility under --strict.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .errors import CodazziError, SchemaError
from .generators import FAMILIES, GeneratorSpec, generate
from .structures_io import emit, ingest
from .suites import SUITE_NAMES, SuiteConfig, run_suite

USAGE_ERROR = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="codazzi",
        description="Numerical verification of statistical-structure identities",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run a named verification suite")
    verify.add_argument("--suite", required=True, choices=SUITE_NAMES)
    verify.add_argument("--seeds", type=int, default=3)
    verify.add_argument("--h", type=float, default=1e-3, help="finite-difference step")
    verify.add_argument("--tol-scale", type=float, default=None)
    verify.add_argument("--sweep-count", type=int, default=2000)
    verify.add_argument("--lattice", type=int, default=32)
    verify.add_argument("--fiber-nodes", type=int, default=12)
    verify.add_argument("--report", type=str, default=None, help="write the JSON report here")
    verify.add_argument("--emit-csv", action="store_true", help="write a CSV next to the report")
    verify.add_argument("--plot", type=str, default=None,
                        help="write a residual-vs-h convergence plot (SVG)")
    verify.add_argument("--strict", action="store_true",
                        help="treat precondition skips as exit status 3")

    gen = sub.add_parser("gen", help="generate a structure file")
    gen.add_argument("--family", required=True, choices=FAMILIES)
    gen.add_argument("--out", required=True)
    gen.add_argument("--n", type=int, default=2)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--params", type=str, default="{}",
                     help="JSON object of family parameters")

    check = sub.add_parser("check", help="ingest a structure file and run a suite against it")
    check.add_argument("--file", required=True)
    check.add_argument("--suite", default="algebraic", choices=SUITE_NAMES)
    check.add_argument("--report", type=str, default=None)
    check.add_argument("--strict", action="store_true")
    return parser


def _suite_config(args) -> SuiteConfig:
    cfg = SuiteConfig(
        seeds=args.seeds,
        h=args.h,
        lattice=args.lattice,
        fiber_order=args.fiber_nodes,
        sweep_count=args.sweep_count,
        strict=args.strict,
    )
    if args.tol_scale is not None:
        cfg.tol_scale = args.tol_scale
    return cfg


def _print_summary(report) -> None:
    for check in report.checks:
        mark = {"pass": "ok  ", "fail": "FAIL", "precondition-skipped": "skip"}[check.verdict]
        print(f"[{mark}] {check.id}: residual {check.residual:.3e} "
              f"tol {check.tolerance:.3e} ({check.location})")
    s = report.to_dict()["summary"]
    print(f"{report.suite}: {s['passed']}/{s['total']} passed, "
          f"{s['failed']} failed, {s['skipped']} skipped")


def _write_report(report, path: str, emit_csv: bool) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(report.to_json() + "\n")
    if emit_csv:
        csv_path = path[:-5] + ".csv" if path.endswith(".json") else path + ".csv"
        with open(csv_path, "w", encoding="utf-8") as fh:
            fh.write(report.to_csv())


def _convergence_plot(path: str, h_values, series: dict) -> None:
    """Line plot of residual vs step on log-log axes, written as bare SVG."""
    width, height, margin = 640, 420, 60
    xs = [np.log10(h) for h in h_values]
    all_vals = [v for values in series.values() for v in values if v > 0]
    if not all_vals:
        all_vals = [1e-16]
    ys_lo = np.floor(np.log10(min(all_vals))) - 0.5
    ys_hi = np.ceil(np.log10(max(all_vals))) + 0.5
    x_lo, x_hi = min(xs) - 0.1, max(xs) + 0.1

    def px(x):
        return margin + (x - x_lo) / (x_hi - x_lo) * (width - 2 * margin)

    def py(y):
        return height - margin - (y - ys_lo) / (ys_hi - ys_lo) * (height - 2 * margin)

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" '
        f'stroke="black"/>',
        f'<text x="{width // 2}" y="{height - 15}" text-anchor="middle" '
        f'font-size="13">log10 h</text>',
        f'<text x="18" y="{height // 2}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 18 {height // 2})">log10 residual</text>',
    ]
    for i, (name, values) in enumerate(sorted(series.items())):
        color = colors[i % len(colors)]
        points = " ".join(
            f"{px(x):.1f},{py(np.log10(max(v, 1e-300))):.1f}" for x, v in zip(xs, values)
        )
        parts.append(f'<polyline points="{points}" fill="none" stroke="{color}" '
                     f'stroke-width="1.5"/>')
        parts.append(f'<text x="{width - margin + 4}" '
                     f'y="{py(np.log10(max(values[-1], 1e-300))):.1f}" font-size="10" '
                     f'fill="{color}">{name}</text>')
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")


def _emit_convergence_plot(path: str, args) -> None:
    from .charts import (
        hessian_from_potential,
        ricci_identity_residual,
        simons_residual,
    )

    h_values = [4.0 * args.h, 2.0 * args.h, args.h]
    x = np.array([0.15, -0.22])
    series = {"ricci-identity": [], "simons-formula": []}
    for h in h_values:
        cs = hessian_from_potential(
            "0.5*x1**2*x2**2 + 0.5*(x1**2 + x2**2)", [[-0.6, 0.6]] * 2, h=h
        )
        series["ricci-identity"].append(ricci_identity_residual(cs, cs.a_field, x))
        series["simons-formula"].append(simons_residual(cs, cs.a_field, x))
    _convergence_plot(path, h_values, series)


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0

    try:
        if args.command == "verify":
            cfg = _suite_config(args)
            report = run_suite(args.suite, cfg)
            _print_summary(report)
            if args.report:
                _write_report(report, args.report, args.emit_csv)
            if args.plot:
                _emit_convergence_plot(args.plot, args)
            return report.exit_status(strict=args.strict)

        if args.command == "gen":
            try:
                params = json.loads(args.params)
            except json.JSONDecodeError as exc:
                print(f"error: --params is not valid JSON: {exc}", file=sys.stderr)
                return USAGE_ERROR
            spec = GeneratorSpec(args.family, n=args.n, seed=args.seed, params=params)
            structure = generate(spec)
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(emit(structure) + "\n")
            print(f"wrote {args.family} structure to {args.out}")
            return 0

        if args.command == "check":
            structure = ingest(args.file)
            report = _check_structure(structure, args.suite)
            _print_summary(report)
            if args.report:
                _write_report(report, args.report, False)
            return report.exit_status(strict=args.strict)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except CodazziError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    return USAGE_ERROR


def _check_structure(structure, suite_name: str):
    """Run the applicable checks on an ingested structure, as a mini report."""
    from . import charts as charts_mod
    from . import points as points_mod
    from .charts import ChartStructure
    from .suites import (
        A_EIGHTH,
        A_NORMGAP,
        A_QUARTER,
        A_RHOK,
        A_RICK,
        A_RIC_DECOMP,
        A_SYM2,
        A_TWO_ROUTES,
        A_WEITZENBOCK,
        ResidualReport,
        _Collector,
        fd_tol,
    )
    from .errors import PreconditionError

    col = _Collector()
    if isinstance(structure, ChartStructure):
        mid = structure.domain.mean(axis=1)
        sps = [structure.point(mid)]
        loc = "chart-midpoint"
        conn = charts_mod.statistical_connections(structure, mid)
        scale = conn.residuals.pop("scale")
        h = structure.h
        col.add("curvature-two-routes", A_TWO_ROUTES,
                conn.residuals["curvature-two-routes"],
                fd_tol("curvature-two-routes", h) * scale, loc)
        rd = charts_mod.ricci_decomposition_residuals(structure, mid)
        col.add("ricci-decomposition", A_RIC_DECOMP, rd["ricci-decomposition"],
                fd_tol("ricci-decomposition", h) * scale, loc)
        for name, aux in structure.aux_fields.items():
            if aux.degree == 1:
                out = charts_mod.weitzenbock_residual(structure, aux.fn, mid)
                col.add(f"weitzenbock[{name}]", A_WEITZENBOCK, out["weitzenbock"],
                        fd_tol("weitzenbock", h) * scale, loc)
            elif aux.degree == 2:
                try:
                    residual, _ = charts_mod.sym2_simons_residual(structure, aux.fn, mid)
                    col.add(f"sym2-simons[{name}]", A_SYM2, residual,
                            fd_tol("sym2-simons", h) * scale, loc)
                except PreconditionError as exc:
                    col.skip(f"sym2-simons[{name}]", A_SYM2, str(exc)[:60], loc)
    else:
        sps = [structure]
        loc = "point"
    for sp in sps:
        n = sp.n
        u = np.zeros(n)
        u[0] = 1.0
        lhs, rhs, _ = points_mod.check_ineq_quarter(sp, u)
        col.add("quarter-inequality", A_QUARTER, max(lhs - rhs, 0.0), 1e-12, loc)
        try:
            lhs, rhs, _ = points_mod.check_ineq_eighth(sp, u)
            col.add("eighth-inequality", A_EIGHTH, max(lhs - rhs, 0.0), 1e-12, loc)
        except PreconditionError as exc:
            col.skip("eighth-inequality", A_EIGHTH, str(exc)[:60], loc)
        residual, _ = points_mod.check_ineq_n2over3(sp)
        col.add("normgap-inequality", A_NORMGAP, max(-residual, 0.0), 1e-12, loc)
        via_trace, via_norms = points_mod.rho_k(sp)
        col.add("commutator-scalar-two-routes", A_RHOK, abs(via_trace - via_norms), 1e-12, loc)
        col.add(
            "commutator-ricci-two-routes",
            A_RICK,
            float(np.max(np.abs(points_mod.ric_k(sp) - points_mod.ric_k_from_bracket(sp)))),
            1e-12,
            loc,
        )
    report = ResidualReport(suite=f"check:{suite_name}", checks=col.checks,
                            environment={"source": "check"})
    return report


if __name__ == "__main__":
    sys.exit(main())
