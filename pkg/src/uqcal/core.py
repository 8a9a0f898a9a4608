"""Dataset container and average-calibration statistics.

A :class:`Dataset` holds paired prediction errors ``E`` and prediction
uncertainties ``u``. Sums go through :func:`math.fsum` so that every
statistic is independent of row order up to correct rounding.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError, EmptyInputError

__all__ = [
    "Dataset",
    "RawRecord",
    "from_raw",
    "mean_variance",
    "mean_squared_error",
    "mean_error",
    "z_scores",
    "z_variance",
    "fmean",
]


def fmean(values) -> float:
    """Correctly rounded mean of a 1-d array."""
    values = np.asarray(values, dtype=float)
    return math.fsum(values.tolist()) / values.size


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Dataset:
    """Prediction errors and their claimed standard uncertainties.

    Parameters
    ----------
    errors : array_like
        Prediction errors ``E_i``.
    uncertainties : array_like
        Strictly positive standard uncertainties ``u_i`` in the same units.

    Non-finite values and non-positive uncertainties are rejected rather
    than dropped, since dropping would silently change the dataset size.
    """

    errors: np.ndarray
    uncertainties: np.ndarray

    def __post_init__(self):
        errors = _frozen(self.errors)
        uncertainties = _frozen(self.uncertainties)
        if errors.size == 0:
            raise EmptyInputError("dataset is empty", module="core")
        if errors.size != uncertainties.size:
            raise DataError(
                f"errors and uncertainties differ in length "
                f"({errors.size} != {uncertainties.size})",
                module="core",
            )
        bad = np.flatnonzero(~np.isfinite(errors))
        if bad.size:
            raise DataError(f"non-finite error at row {bad[0]}", module="core", row=int(bad[0]))
        bad = np.flatnonzero(~np.isfinite(uncertainties) | (uncertainties <= 0))
        if bad.size:
            raise DataError(
                f"uncertainty at row {bad[0]} must be finite and > 0 "
                f"(got {uncertainties[bad[0]]!r})",
                module="core",
                row=int(bad[0]),
            )
        object.__setattr__(self, "errors", errors)
        object.__setattr__(self, "uncertainties", uncertainties)

    @property
    def size(self) -> int:
        return int(self.errors.size)

    def __len__(self):
        return self.size

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return np.array_equal(self.errors, other.errors) and np.array_equal(
            self.uncertainties, other.uncertainties
        )

    def scaled(self, factor: float) -> "Dataset":
        """Return the dataset with errors and uncertainties multiplied by ``factor``."""
        return Dataset(self.errors * factor, self.uncertainties * factor)

    def take(self, indices) -> "Dataset":
        return Dataset(self.errors[indices], self.uncertainties[indices])


@dataclass(frozen=True)
class RawRecord:
    """Reference value, prediction and prediction uncertainty for one system."""

    reference: float
    prediction: float
    uncertainty: float


def from_raw(records: Sequence[RawRecord] | Iterable[RawRecord]) -> Dataset:
    """Build a :class:`Dataset` with ``E = R - V`` and ``u = u_V``.

    Raises
    ------
    DataError
        If a row has a non-finite value or a non-positive uncertainty; the
        message names the offending (0-based) row.
    """
    records = list(records)
    if not records:
        raise EmptyInputError("no records", module="core")
    errors = np.empty(len(records))
    uncertainties = np.empty(len(records))
    for i, rec in enumerate(records):
        r, v, uv = float(rec.reference), float(rec.prediction), float(rec.uncertainty)
        if not (math.isfinite(r) and math.isfinite(v)):
            raise DataError(f"non-finite reference or prediction at row {i}", module="core", row=i)
        if not math.isfinite(uv) or uv <= 0:
            raise DataError(
                f"prediction uncertainty at row {i} must be finite and > 0 (got {uv!r})",
                module="core",
                row=i,
            )
        errors[i] = r - v
        uncertainties[i] = uv
    return Dataset(errors, uncertainties)


def mean_variance(d: Dataset) -> float:
    """Mean of the squared uncertainties (MV)."""
    return fmean(d.uncertainties**2)


def mean_squared_error(d: Dataset) -> float:
    """Mean of the squared errors (MSE). No bias correction is applied."""
    return fmean(d.errors**2)


def mean_error(d: Dataset) -> float:
    # diagnostic only, never subtracted from the errors
    return fmean(d.errors)


def z_scores(d: Dataset) -> np.ndarray:
    return d.errors / d.uncertainties


def z_variance(z, zero_mean: bool = False) -> float:
    """Variance of z-scores.

    With ``zero_mean=False`` this is the unbiased sample variance (bin mean
    subtracted, denominator ``n - 1``). With ``zero_mean=True`` the mean is
    assumed to be 0 and the second moment ``mean(z**2)`` is returned.
    """
    z = np.asarray(z, dtype=float)
    n = z.size
    if zero_mean:
        return math.fsum((z * z).tolist()) / n
    if n < 2:
        return math.nan
    dev = z - fmean(z)
    return math.fsum((dev * dev).tolist()) / (n - 1)
