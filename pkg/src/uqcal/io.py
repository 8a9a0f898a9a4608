"""CSV ingestion and report serialization.

Input files need a header row. Two layouts are understood:

``eu``
    columns ``E`` (error) and ``u`` (uncertainty)
``rvu``
    columns ``R`` (reference), ``V`` (prediction) and ``uV`` (prediction
    uncertainty); errors are computed as ``E = R - V``

Column names are matched case-insensitively and extra columns are ignored.
Reports are written as JSON; Python's float repr is the shortest string
that round-trips, so nothing is lost. Series files use ``%.17g``.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .core import Dataset, RawRecord, from_raw
from .errors import DataError, EmptyInputError, ParameterError
from .metrics import ReliabilityPoint
from .scanfit import CalibrationReport, FitResult, ReportConfig, ScanSeries

__all__ = [
    "SCHEMAS",
    "InputSpec",
    "load_csv",
    "report_to_dict",
    "report_from_dict",
    "write_report",
    "read_report",
    "write_series_csv",
    "write_diagram_csv",
    "dumps",
]

SCHEMAS = {"eu": ("E", "u"), "rvu": ("R", "V", "uV")}


@dataclass(frozen=True)
class InputSpec:
    path: Union[str, Path]
    schema: str = "eu"
    delimiter: str = ","
    header: bool = True

    def __post_init__(self):
        schema = self.schema.lower()
        if schema not in SCHEMAS:
            raise ParameterError(
                f"unknown schema {self.schema!r}; expected one of {sorted(SCHEMAS)}", module="cli-io"
            )
        object.__setattr__(self, "schema", schema)
        if not self.header:
            raise ParameterError("input files must have a header row", module="cli-io")


def _parse(value: str, row: int, column: str) -> float:
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise DataError(
            f"row {row}: cannot parse {column}={value!r} as a number",
            module="cli-io",
            row=row,
            column=column,
        ) from None
    if not math.isfinite(x):
        raise DataError(f"row {row}: {column} is not finite", module="cli-io", row=row, column=column)
    return x


def load_csv(spec: InputSpec) -> Dataset:
    """Read a dataset from a delimited text file.

    Row numbers in error messages count data rows from 1 (the header is
    not counted).
    """
    path = Path(spec.path)
    if not path.is_file():
        raise ParameterError(f"input file not found: {path}", module="cli-io", path=str(path))
    with path.open(newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh, delimiter=spec.delimiter)
        header = next(reader, None)
        if header is None or not any(h.strip() for h in header):
            raise EmptyInputError(f"{path} is empty", module="cli-io", path=str(path))
        lookup = {h.strip().lower(): i for i, h in enumerate(header)}
        wanted = SCHEMAS[spec.schema]
        missing = [c for c in wanted if c.lower() not in lookup]
        if missing:
            raise DataError(
                f"{path}: missing column(s) {missing} for schema {spec.schema!r} (header: {header})",
                module="cli-io",
                missing=missing,
            )
        cols = [lookup[c.lower()] for c in wanted]
        rows = []
        for row_no, fields in enumerate(reader, start=1):
            if not fields or all(not f.strip() for f in fields):
                continue
            if len(fields) <= max(cols):
                raise DataError(f"row {row_no}: too few fields", module="cli-io", row=row_no)
            rows.append([_parse(fields[c], row_no, name) for c, name in zip(cols, wanted)])
    if not rows:
        raise EmptyInputError(f"{path} has no data rows", module="cli-io", path=str(path))
    values = np.asarray(rows)
    u = values[:, -1]
    bad = np.flatnonzero(~(u > 0))
    if bad.size:
        row_no = int(bad[0]) + 1
        raise DataError(
            f"row {row_no}: uncertainty must be > 0 (got {u[bad[0]]!r})",
            module="cli-io",
            row=row_no,
        )
    if spec.schema == "rvu":
        return from_raw(RawRecord(r, v, uv) for r, v, uv in rows)
    return Dataset(values[:, 0], u)


# --------------------------------------------------------------------------
# reports


def _series_to_dict(s: ScanSeries) -> dict:
    return {
        "metric": s.metric,
        "zvar": s.zvar,
        "N": s.n.tolist(),
        "sqrtN": s.sqrt_n.tolist(),
        "value": s.values.tolist(),
        "skipped": [{"N": int(n), "reason": reason} for n, reason in s.skipped],
    }


def _series_from_dict(data: dict) -> ScanSeries:
    return ScanSeries(
        data["metric"],
        np.asarray(data["N"], dtype=np.int64),
        np.asarray(data["value"], dtype=float),
        tuple((item["N"], item["reason"]) for item in data["skipped"]),
        data["zvar"],
    )


def _fit_to_dict(f: FitResult) -> dict:
    return dict(f.__dict__)


def report_to_dict(report: CalibrationReport) -> dict:
    return {
        "version": report.version,
        "config": report.config.as_dict(),
        "seed": report.config.seed,
        "summary": dict(report.summary),
        "series": {k: _series_to_dict(v) for k, v in report.series.items()},
        "fits": {k: _fit_to_dict(v) for k, v in report.fits.items()},
        "fit_errors": dict(report.fit_errors),
        "diagram_bins": report.diagram_bins,
        "diagram": [p.__dict__ for p in report.diagram],
        "limitations": report.limitations,
    }


def report_from_dict(data: dict) -> CalibrationReport:
    return CalibrationReport(
        summary=dict(data["summary"]),
        series={k: _series_from_dict(v) for k, v in data["series"].items()},
        fits={k: FitResult(**v) for k, v in data["fits"].items()},
        fit_errors=dict(data["fit_errors"]),
        diagram=[ReliabilityPoint(**p) for p in data["diagram"]],
        diagram_bins=data["diagram_bins"],
        config=ReportConfig.from_dict(data["config"]),
        version=data["version"],
        limitations=data["limitations"],
    )


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def write_report(report: CalibrationReport, path) -> None:
    Path(path).write_text(dumps(report_to_dict(report)), encoding="utf-8")


def read_report(path) -> CalibrationReport:
    return report_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def _write_rows(path, header, rows, delimiter=","):
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([format(v, ".17g") if isinstance(v, float) else v for v in row])


def write_series_csv(s: ScanSeries, path, scale: float = 1.0) -> None:
    rows = zip(s.n.tolist(), s.sqrt_n.tolist(), (s.values * scale).tolist())
    _write_rows(path, ["N", "sqrtN", s.metric], rows)


def write_diagram_csv(points, path) -> None:
    rows = ((p.bin, p.size, p.rmv, p.rmse) for p in points)
    _write_rows(path, ["bin", "size", "rmv", "rmse"], rows)
