"""Equal-size binning of a dataset ordered by uncertainty.

Rows are sorted by increasing uncertainty (stable, so ties keep their row
order) and cut into ``N`` contiguous bins. When ``N`` does not divide ``M``
the first ``M mod N`` bins, i.e. the lowest-uncertainty ones, get one extra
element.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import Dataset, fmean, z_variance
from .errors import ParameterError

__all__ = ["Binning", "BinStats", "make_binning", "bin_stats", "max_bins", "ZVAR_MODES"]

ZVAR_MODES = ("sample", "zero-mean")


@dataclass(frozen=True, eq=False)
class Binning:
    """Ordered partition of row indices into ``N`` equal-size bins.

    ``order`` is the uncertainty-sorted permutation of row indices and
    ``edges`` the ``N + 1`` cut positions into it.
    """

    order: np.ndarray
    edges: np.ndarray

    @property
    def n_bins(self) -> int:
        return len(self.edges) - 1

    @property
    def sizes(self) -> np.ndarray:
        return np.diff(self.edges)

    @property
    def assignments(self) -> list[np.ndarray]:
        return [self.order[a:b] for a, b in zip(self.edges[:-1], self.edges[1:])]

    def __iter__(self):
        return iter(self.assignments)


@dataclass(frozen=True, eq=False)
class BinStats:
    """Per-bin mean variance, mean squared error and z-score variance.

    ``zvar`` is ``None`` when the z-score variance was not requested.
    """

    mv: np.ndarray
    mse: np.ndarray
    zvar: Optional[np.ndarray]
    sizes: np.ndarray
    zvar_mode: Optional[str] = None

    @property
    def n_bins(self) -> int:
        return int(self.mv.size)

    def __eq__(self, other):
        if not isinstance(other, BinStats):
            return NotImplemented
        same_z = (self.zvar is None and other.zvar is None) or (
            self.zvar is not None
            and other.zvar is not None
            and np.array_equal(self.zvar, other.zvar)
        )
        return (
            same_z
            and np.array_equal(self.mv, other.mv)
            and np.array_equal(self.mse, other.mse)
            and np.array_equal(self.sizes, other.sizes)
        )


def make_binning(d: Dataset, n_bins: int) -> Binning:
    """Split ``d`` into ``n_bins`` equal-size bins of increasing uncertainty.

    Raises
    ------
    ParameterError
        If ``n_bins`` is not in ``[1, M]``.
    """
    m = d.size
    if isinstance(n_bins, bool) or int(n_bins) != n_bins:
        raise ParameterError(f"number of bins must be an integer, got {n_bins!r}", module="binning")
    n_bins = int(n_bins)
    if not 1 <= n_bins <= m:
        raise ParameterError(
            f"number of bins must be between 1 and M={m}, got {n_bins}",
            module="binning",
            n_bins=n_bins,
            size=m,
        )
    order = np.argsort(d.uncertainties, kind="stable")
    k, extra = divmod(m, n_bins)
    sizes = np.full(n_bins, k, dtype=np.int64)
    sizes[:extra] += 1
    edges = np.concatenate(([0], np.cumsum(sizes)))
    order.setflags(write=False)
    edges.setflags(write=False)
    return Binning(order, edges)


def bin_stats(d: Dataset, b: Binning, zvar: Optional[str] = "sample") -> BinStats:
    """Compute ``MV_i``, ``MSE_i`` and optionally ``v_i`` for every bin.

    Parameters
    ----------
    d : Dataset
        The dataset ``b`` was built from.
    b : Binning
    zvar : {"sample", "zero-mean", None}
        How to compute the z-score variance per bin. ``"sample"`` uses the
        unbiased sample variance, ``"zero-mean"`` the mean of ``z**2``.
        ``None`` skips it.

    Raises
    ------
    ParameterError
        If a sample z-variance is requested and a bin holds a single point.
    """
    if zvar is not None and zvar not in ZVAR_MODES:
        raise ParameterError(f"unknown z-variance mode {zvar!r}", module="binning")
    if b.edges[-1] != d.size:
        raise ParameterError("binning does not match dataset size", module="binning")
    sizes = b.sizes
    if zvar == "sample" and sizes.min() < 2:
        raise ParameterError(
            f"z-score variance is undefined for bins of size 1 "
            f"(N={b.n_bins}, M={d.size}); use a smaller number of bins",
            module="binning",
            n_bins=b.n_bins,
        )
    e2 = d.errors[b.order] ** 2
    u2 = d.uncertainties[b.order] ** 2
    z = (d.errors / d.uncertainties)[b.order]
    n = b.n_bins
    mv = np.empty(n)
    mse = np.empty(n)
    zv = np.empty(n) if zvar else None
    for i, (lo, hi) in enumerate(zip(b.edges[:-1], b.edges[1:])):
        mv[i] = fmean(u2[lo:hi])
        mse[i] = fmean(e2[lo:hi])
        if zv is not None:
            zv[i] = z_variance(z[lo:hi], zero_mean=(zvar == "zero-mean"))
    return BinStats(mv, mse, zv, np.asarray(sizes), zvar)


def max_bins(d: Dataset | int, min_size: int = 30) -> int:
    """Largest bin count keeping every bin at ``min_size`` points or more.

    Returns 0 when even a single bin would be too small; callers decide
    whether that is an error.
    """
    m = d if isinstance(d, (int, np.integer)) else d.size
    if min_size < 1:
        raise ParameterError(f"min_size must be >= 1, got {min_size}", module="binning")
    return min(int(m) // int(min_size), int(m))


def weighted_recombination(stats: BinStats) -> tuple[float, float]:
    """Size-weighted averages of ``MV_i`` and ``MSE_i`` (equal to MV and MSE)."""
    total = stats.sizes.sum()
    mv = math.fsum((stats.sizes * stats.mv).tolist()) / total
    mse = math.fsum((stats.sizes * stats.mse).tolist()) / total
    return mv, mse
