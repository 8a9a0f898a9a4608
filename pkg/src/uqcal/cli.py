"""Command-line interface.

Subcommands::

    uqcal compute  --input F --bins N           ENCE / ZVE at one bin count
    uqcal scan     --input F [--fit-threshold]  sweep N and fit against sqrt(N)
    uqcal diag     --input F --bins N           reliability-diagram points
    uqcal simulate fig1|appendix                synthetic studies

Results go to stdout as JSON, or into the ``--out`` directory as
``report.json`` plus CSV series. Exit codes: 0 success, 2 usage error,
3 data error, 4 computation error. Failures print a JSON error record on
stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .binning import ZVAR_MODES, bin_stats, make_binning, max_bins
from .errors import UQCalError
from .io import (
    InputSpec,
    dumps,
    load_csv,
    report_to_dict,
    write_diagram_csv,
    write_series_csv,
)
from .metrics import ence, reliability_diagram, zve
from .scanfit import ReportConfig, calibration_report, dataset_summary, default_grid
from . import sim

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_COMPUTE = 0, 2, 3, 4


def _int_list(text):
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _float_list(text):
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _metrics(choice):
    return ("ence", "zve") if choice == "both" else (choice,)


def _add_input(p):
    p.add_argument("--input", required=True, help="CSV file with a header row")
    p.add_argument("--schema", choices=["eu", "rvu"], default="eu",
                   help="eu: columns E,u; rvu: columns R,V,uV (E = R - V)")
    p.add_argument("--delimiter", default=",")


def _add_common(p):
    p.add_argument("--metric", choices=["ence", "zve", "both"], default="both")
    p.add_argument("--min-bin-size", type=int, default=30)
    p.add_argument("--zvar", choices=list(ZVAR_MODES), default="sample")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None, help="output directory (default: JSON on stdout)")
    p.add_argument("--percent", action="store_true", help="present ENCE values as percentages")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uqcal", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="metrics at a single bin count")
    _add_input(p)
    _add_common(p)
    p.add_argument("--bins", type=int, required=True)

    p = sub.add_parser("scan", help="sweep the bin count and fit against sqrt(N)")
    _add_input(p)
    _add_common(p)
    p.add_argument("--grid", type=_int_list, default=None, help="comma-separated bin counts")
    p.add_argument("--fit-threshold", type=float, default=0.0,
                   help="fit only points with sqrt(N) strictly above this value")
    p.add_argument("--bins", type=int, default=None, help="bin count for the reliability diagram")

    p = sub.add_parser("diag", help="reliability-diagram points")
    _add_input(p)
    _add_common(p)
    p.add_argument("--bins", type=int, required=True)

    p = sub.add_parser("simulate", help="synthetic studies")
    p.add_argument("study", choices=["fig1", "appendix"])
    p.add_argument("--m", type=int, default=None, help="dataset size (5000 for fig1, 10000 for appendix)")
    p.add_argument("--factors", type=_float_list, default=[1.0, 1.05, 1.1, 1.15, 1.2, 1.25])
    p.add_argument("--grid", type=_int_list, default=None)
    p.add_argument("--min-bin-size", type=int, default=30)
    p.add_argument("--draws", type=int, default=sim.DEFAULT_DRAWS)
    p.add_argument("--realizations", type=int, default=None, help="50 for fig1, 200 for appendix")
    p.add_argument("--ux", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.add_argument("--percent", action="store_true")
    return parser


def _emit(payload, args, files=()):
    if args.out is None:
        sys.stdout.write(dumps(payload))
        return
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(dumps(payload), encoding="utf-8")
    for name, writer in files:
        writer(out / name)


def _ence_scale(args):
    return 100.0 if args.percent else 1.0


def cmd_compute(args):
    d = load_csv(InputSpec(args.input, args.schema, args.delimiter))
    stats = bin_stats(d, make_binning(d, args.bins), zvar=args.zvar if "zve" in _metrics(args.metric) else None)
    result = {"M": d.size, "N": args.bins, "summary": dataset_summary(d, args.zvar)}
    if "ence" in _metrics(args.metric):
        result["ence"] = ence(stats) * _ence_scale(args)
    if "zve" in _metrics(args.metric):
        result["zve"] = zve(stats)
    result["units"] = {"ence": "percent" if args.percent else "fraction"}
    _emit(result, args)


def cmd_scan(args):
    d = load_csv(InputSpec(args.input, args.schema, args.delimiter))
    config = ReportConfig(
        metrics=_metrics(args.metric),
        min_bin_size=args.min_bin_size,
        grid=None if args.grid is None else tuple(args.grid),
        fit_threshold=args.fit_threshold,
        diagram_bins=args.bins,
        zvar=args.zvar,
        seed=args.seed,
    )
    report = calibration_report(d, config)
    payload = report_to_dict(report)
    scale = _ence_scale(args)
    if args.percent:
        _scale_ence(payload, scale)
    files = [
        (f"series_{m}.csv", lambda p, s=s, m=m: write_series_csv(s, p, scale if m == "ence" else 1.0))
        for m, s in report.series.items()
    ]
    files.append(("diagram.csv", lambda p: write_diagram_csv(report.diagram, p)))
    _emit(payload, args, files)


def _scale_ence(payload, scale):
    if "ence" in payload["series"]:
        s = payload["series"]["ence"]
        s["value"] = [v * scale for v in s["value"]]
    if "ence" in payload["fits"]:
        f = payload["fits"]["ence"]
        for key in ("intercept", "slope", "intercept_se", "slope_se", "ci_low", "ci_high", "residual_error"):
            f[key] *= scale
    payload["units"] = {"ence": "percent"}


def cmd_diag(args):
    d = load_csv(InputSpec(args.input, args.schema, args.delimiter))
    points = reliability_diagram(bin_stats(d, make_binning(d, args.bins), zvar=None))
    payload = {"M": d.size, "N": args.bins, "points": [p.__dict__ for p in points]}
    _emit(payload, args, [("diagram.csv", lambda p: write_diagram_csv(points, p))])


def cmd_simulate(args):
    if args.study == "fig1":
        m = args.m or 5000
        grid = args.grid or default_grid(max_bins(m, args.min_bin_size))
        realizations = args.realizations or 50
        curves = sim.expected_curves(m, args.factors, grid, args.draws, args.seed)
        spec = sim.SimSpec(m=m, u=1.0, grid=tuple(grid), draws=args.draws,
                           realizations=realizations, seed=args.seed)
        scatter = sim.mc_ence_realizations(spec, sim.RngStream(args.seed, "realizations"))
        fit = sim.fit_scatter(scatter)
        scale = _ence_scale(args)
        for c in curves["curves"]:
            for key in ("chi", "chi_se", "quadrature"):
                c[key] = [v * scale for v in c[key]]
        payload = {
            "study": "fig1",
            "M": m,
            "seed": args.seed,
            "draws": args.draws,
            "grid": curves["grid"],
            "curves": curves["curves"],
            "realizations": {
                "u": 1.0,
                "values": (scatter.values * scale).tolist(),
                "mean": (scatter.mean() * scale).tolist(),
                "stderr": (scatter.stderr() * scale).tolist(),
                "fit": dict(fit.__dict__),
            },
            "units": {"ence": "percent" if args.percent else "fraction"},
        }

        def write_curves(path):
            cols = ["N", "sqrtN"] + [f"chi_u{c['u']:g}" for c in curves["curves"]] + [
                f"quad_u{c['u']:g}" for c in curves["curves"]
            ]
            rows = []
            for j, n in enumerate(curves["grid"]):
                rows.append([n, float(np.sqrt(n))] + [c["chi"][j] for c in curves["curves"]]
                            + [c["quadrature"][j] for c in curves["curves"]])
            _rows(path, cols, rows)

        def write_scatter(path):
            rows = [[r, int(n), float(v * scale)] for r, row in enumerate(scatter.values)
                    for n, v in zip(scatter.grid, row)]
            _rows(path, ["realization", "N", "ence"], rows)

        _emit(payload, args, [("curves.csv", write_curves), ("realizations.csv", write_scatter)])
        return

    m = args.m or 10_000
    grid = args.grid or [1, 25, 100, 400]
    realizations = args.realizations or 200
    base = sim.RngStream(args.seed, "appendix")
    rows = []
    for j, n in enumerate(grid):
        mc, closed = sim.mad_binned_means(args.ux, m, n, realizations, base.child(j))
        rows.append({"N": n, "mc": mc, "closed_form": closed, "ratio": mc / closed})
    payload = {"study": "appendix", "M": m, "u_x": args.ux, "realizations": realizations,
               "seed": args.seed, "rows": rows}
    _emit(payload, args, [("appendix.csv", lambda p: _rows(
        p, ["N", "mc", "closed_form", "ratio"], [[r["N"], r["mc"], r["closed_form"], r["ratio"]] for r in rows]))])


def _rows(path, header, rows):
    from .io import _write_rows

    _write_rows(path, header, rows)


COMMANDS = {"compute": cmd_compute, "scan": cmd_scan, "diag": cmd_diag, "simulate": cmd_simulate}


def _fail(record, code):
    sys.stderr.write(json.dumps({"error": record}) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        COMMANDS[args.command](args)
    except UQCalError as exc:
        return _fail(exc.to_record(), exc.exit_code)
    except OSError as exc:
        return _fail({"kind": "io", "module": "cli-io", "message": str(exc), "context": {}}, EXIT_USAGE)
    except Exception as exc:  # noqa: BLE001
        return _fail(
            {"kind": "internal", "module": type(exc).__module__, "message": repr(exc), "context": {}},
            EXIT_COMPUTE,
        )
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
