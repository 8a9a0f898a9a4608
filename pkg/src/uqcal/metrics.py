"""Binned calibration metrics: ENCE, ZVE and reliability-diagram points."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .binning import BinStats, bin_stats, make_binning
from .core import Dataset
from .errors import MetricUndefinedError

__all__ = ["ReliabilityPoint", "ence", "zve", "reliability_diagram", "ence_at", "zve_at"]


@dataclass(frozen=True)
class ReliabilityPoint:
    rmv: float
    rmse: float
    bin: int
    size: int

    @property
    def x(self):
        return self.rmv

    @property
    def y(self):
        return self.rmse


def ence(stats: BinStats) -> float:
    """Expected Normalized Calibration Error, as a fraction.

    Mean over bins of ``|sqrt(MV_i) - sqrt(MSE_i)| / sqrt(MV_i)``.
    """
    zero = np.flatnonzero(~(stats.mv > 0))
    if zero.size:
        raise MetricUndefinedError(
            f"ENCE undefined: mean variance is zero in bin {zero[0]}",
            module="metrics",
            bin=int(zero[0]),
        )
    rmv = np.sqrt(stats.mv)
    rmse = np.sqrt(stats.mse)
    return math.fsum((np.abs(rmv - rmse) / rmv).tolist()) / stats.n_bins


def zve(stats: BinStats) -> float:
    """Z-Variance Error: ``exp(mean_i |ln v_i|)``; equal to 1 at perfect calibration."""
    if stats.zvar is None:
        raise MetricUndefinedError("ZVE needs per-bin z-score variances", module="metrics")
    bad = np.flatnonzero(~(stats.zvar > 0) | ~np.isfinite(stats.zvar))
    if bad.size:
        raise MetricUndefinedError(
            f"ZVE undefined: z-score variance is {stats.zvar[bad[0]]!r} in bin {bad[0]}",
            module="metrics",
            bin=int(bad[0]),
        )
    return math.exp(math.fsum(np.abs(np.log(stats.zvar)).tolist()) / stats.n_bins)


def reliability_diagram(stats: BinStats) -> list[ReliabilityPoint]:
    """One ``(sqrt(MV_i), sqrt(MSE_i))`` point per bin, in bin order."""
    return [
        ReliabilityPoint(float(math.sqrt(mv)), float(math.sqrt(mse)), i, int(n))
        for i, (mv, mse, n) in enumerate(zip(stats.mv, stats.mse, stats.sizes))
    ]


def ence_at(d: Dataset, n_bins: int) -> float:
    return ence(bin_stats(d, make_binning(d, n_bins), zvar=None))


def zve_at(d: Dataset, n_bins: int, zvar: str = "sample") -> float:
    return zve(bin_stats(d, make_binning(d, n_bins), zvar=zvar))
