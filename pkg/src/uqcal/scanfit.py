"""Bin-count sweeps and the sqrt(N) regression.

For calibrated or nearly calibrated data, ENCE and ZVE grow linearly with
the square root of the number of bins. Regressing the metric on ``sqrt(N)``
over a sweep of bin counts and reading off the intercept gives a value that
does not depend on the binning, and the 95% confidence interval of the
intercept doubles as a calibration test: it should contain 0 for the ENCE
and 1 for the ZVE.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import stats as sps

from . import __version__
from .binning import ZVAR_MODES, bin_stats, make_binning, max_bins
from .core import Dataset, mean_error, mean_squared_error, mean_variance, z_scores, z_variance
from .errors import ComputationError, ParameterError, UQCalError
from .metrics import ReliabilityPoint, ence, reliability_diagram, zve

__all__ = [
    "METRICS",
    "TARGETS",
    "ScanSeries",
    "FitResult",
    "ReportConfig",
    "CalibrationReport",
    "default_grid",
    "scan",
    "fit_sqrt_n",
    "calibration_report",
]

METRICS = ("ence", "zve")
TARGETS = {"ence": 0.0, "zve": 1.0}

LIMITATIONS = (
    "Unweighted OLS; scan points computed from the same data are correlated "
    "and this correlation is ignored, so the intercept interval may be optimistic."
)


def _metric_name(metric: str) -> str:
    key = str(metric).lower()
    if key not in METRICS:
        raise ParameterError(f"unknown metric {metric!r}; expected one of {METRICS}", module="scan-fit")
    return key


@dataclass(frozen=True, eq=False)
class ScanSeries:
    """Metric values indexed by bin count.

    ``skipped`` lists ``(N, reason)`` for grid points where the metric could
    not be evaluated; those never enter a fit.
    """

    metric: str
    n: np.ndarray
    values: np.ndarray
    skipped: tuple = ()
    zvar: Optional[str] = None

    @property
    def sqrt_n(self) -> np.ndarray:
        return np.sqrt(self.n.astype(float))

    def __len__(self):
        return int(self.n.size)

    def __eq__(self, other):
        if not isinstance(other, ScanSeries):
            return NotImplemented
        return (
            self.metric == other.metric
            and np.array_equal(self.n, other.n)
            and np.array_equal(self.values, other.values)
            and tuple(map(tuple, self.skipped)) == tuple(map(tuple, other.skipped))
            and self.zvar == other.zvar
        )


@dataclass(frozen=True)
class FitResult:
    """Straight-line fit of a metric against ``sqrt(N)``."""

    metric: str
    intercept: float
    slope: float
    intercept_se: float
    slope_se: float
    ci_low: float
    ci_high: float
    threshold: float
    n_points: int
    target: float
    calibrated: bool
    residual_error: float


def default_grid(n_max: int, n_points: int = 25) -> list[int]:
    """Bin counts whose square roots are evenly spaced on ``[1, sqrt(n_max)]``."""
    if n_max < 1:
        raise ParameterError(f"no feasible bin count (max_bins={n_max})", module="scan-fit")
    s = np.linspace(1.0, math.sqrt(n_max), n_points)
    grid = np.floor(s * s + 0.5).astype(int)
    grid = np.clip(grid, 1, n_max)
    return sorted(set(grid.tolist()))


def _evaluate(d, metric, n_bins, zvar):
    b = make_binning(d, n_bins)
    if metric == "ence":
        return ence(bin_stats(d, b, zvar=None))
    return zve(bin_stats(d, b, zvar=zvar))


def scan(
    d: Dataset,
    metric: str = "ence",
    min_bin_size: int = 30,
    grid: Optional[Sequence[int]] = None,
    zvar: str = "sample",
) -> ScanSeries:
    """Evaluate ``metric`` for a range of bin counts.

    Parameters
    ----------
    d : Dataset
    metric : {"ence", "zve"}
    min_bin_size : int
        Smallest allowed bin population; the default grid spans
        ``1 .. M // min_bin_size``.
    grid : sequence of int, optional
        Explicit bin counts. Entries that would produce bins smaller than
        ``min_bin_size`` are skipped and recorded.
    zvar : {"sample", "zero-mean"}
        z-score variance flavour used by the ZVE.

    Raises
    ------
    ParameterError
        If no bin count is feasible for this dataset size.
    """
    metric = _metric_name(metric)
    if zvar not in ZVAR_MODES:
        raise ParameterError(f"unknown z-variance mode {zvar!r}", module="scan-fit")
    n_max = max_bins(d, min_bin_size)
    if n_max < 1:
        raise ParameterError(
            f"dataset of size {d.size} is too small for bins of at least {min_bin_size} points",
            module="scan-fit",
            size=d.size,
            min_bin_size=min_bin_size,
        )
    if grid is None:
        grid = default_grid(n_max)
    else:
        grid = sorted(set(int(g) for g in grid))
        if not grid:
            raise ParameterError("empty bin-count grid", module="scan-fit")
    ns, values, skipped = [], [], []
    for n_bins in grid:
        if n_bins < 1 or n_bins > n_max:
            skipped.append((n_bins, f"outside feasible range 1..{n_max}"))
            continue
        try:
            value = _evaluate(d, metric, n_bins, zvar)
        except UQCalError as exc:
            skipped.append((n_bins, str(exc)))
            continue
        ns.append(n_bins)
        values.append(value)
    return ScanSeries(
        metric,
        np.asarray(ns, dtype=np.int64),
        np.asarray(values, dtype=float),
        tuple(skipped),
        zvar if metric == "zve" else None,
    )


def fit_sqrt_n(s: ScanSeries, threshold_sqrtN: float = 0.0) -> FitResult:
    """Ordinary least-squares fit of ``value = a + b * sqrt(N)``.

    Only points with ``sqrt(N) > threshold_sqrtN`` (strictly) are used. The
    95% interval on the intercept is ``a +/- t(0.975, n-2) * se(a)``, and
    the dataset is declared calibrated when it contains the metric's ideal
    value (0 for ENCE, 1 for ZVE).

    Raises
    ------
    ComputationError
        Fewer than 3 retained points, or all retained abscissae equal.
    """
    metric = _metric_name(s.metric)
    x_all = s.sqrt_n
    keep = x_all > threshold_sqrtN
    x = x_all[keep]
    y = s.values[keep]
    n = int(x.size)
    if n < 3:
        raise ComputationError(
            f"need at least 3 points with sqrt(N) > {threshold_sqrtN}, got {n}",
            module="scan-fit",
            n_points=n,
        )
    x_mean = math.fsum(x.tolist()) / n
    y_mean = math.fsum(y.tolist()) / n
    dx = x - x_mean
    sxx = math.fsum((dx * dx).tolist())
    if not sxx > 0 or np.ptp(x) == 0:
        raise ComputationError("degenerate abscissa: all sqrt(N) values are equal", module="scan-fit")
    slope = math.fsum((dx * (y - y_mean)).tolist()) / sxx
    intercept = y_mean - slope * x_mean
    resid = y - (intercept + slope * x)
    s2 = math.fsum((resid * resid).tolist()) / (n - 2)
    slope_se = math.sqrt(s2 / sxx)
    intercept_se = math.sqrt(s2 * (1.0 / n + x_mean * x_mean / sxx))
    half = float(sps.t.ppf(0.975, n - 2)) * intercept_se
    target = TARGETS[metric]
    lo, hi = intercept - half, intercept + half
    return FitResult(
        metric=metric,
        intercept=intercept,
        slope=slope,
        intercept_se=intercept_se,
        slope_se=slope_se,
        ci_low=lo,
        ci_high=hi,
        threshold=float(threshold_sqrtN),
        n_points=n,
        target=target,
        calibrated=bool(lo <= target <= hi),
        residual_error=intercept - target,
    )


@dataclass(frozen=True)
class ReportConfig:
    metrics: tuple = METRICS
    min_bin_size: int = 30
    grid: Optional[tuple] = None
    fit_threshold: float = 0.0
    diagram_bins: Optional[int] = None
    zvar: str = "sample"
    seed: Optional[int] = None

    def as_dict(self):
        return {
            "metrics": list(self.metrics),
            "min_bin_size": self.min_bin_size,
            "grid": None if self.grid is None else list(self.grid),
            "fit_threshold": self.fit_threshold,
            "diagram_bins": self.diagram_bins,
            "zvar": self.zvar,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        data["metrics"] = tuple(data["metrics"])
        if data.get("grid") is not None:
            data["grid"] = tuple(data["grid"])
        return cls(**data)


@dataclass(frozen=True)
class CalibrationReport:
    summary: dict
    series: dict
    fits: dict
    fit_errors: dict
    diagram: list
    diagram_bins: int
    config: ReportConfig
    version: str = __version__
    limitations: str = LIMITATIONS


def dataset_summary(d: Dataset, zvar: str = "sample") -> dict:
    return {
        "M": d.size,
        "MV": mean_variance(d),
        "MSE": mean_squared_error(d),
        "VarZ": z_variance(z_scores(d), zero_mean=(zvar == "zero-mean")),
        "mean_error": mean_error(d),
    }


def calibration_report(d: Dataset, config: Optional[ReportConfig] = None) -> CalibrationReport:
    """Scan and fit every requested metric and collect the results.

    Fit failures (too few points) are recorded per metric instead of
    aborting the report. The reliability diagram uses ``diagram_bins`` or,
    when unset, the largest feasible bin count.
    """
    config = config or ReportConfig()
    metrics = tuple(_metric_name(m) for m in config.metrics)
    series, fits, fit_errors = {}, {}, {}
    for metric in metrics:
        s = scan(d, metric, config.min_bin_size, config.grid, config.zvar)
        series[metric] = s
        try:
            fits[metric] = fit_sqrt_n(s, config.fit_threshold)
        except ComputationError as exc:
            fit_errors[metric] = exc.to_record()
    n_diag = config.diagram_bins or max(1, max_bins(d, config.min_bin_size))
    diagram: list[ReliabilityPoint] = reliability_diagram(
        bin_stats(d, make_binning(d, n_diag), zvar=None)
    )
    return CalibrationReport(
        summary=dataset_summary(d, config.zvar),
        series=series,
        fits=fits,
        fit_errors=fit_errors,
        diagram=diagram,
        diagram_bins=n_diag,
        config=config,
    )
