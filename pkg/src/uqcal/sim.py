"""Synthetic studies of how binned calibration metrics depend on the bin count.

For a homoscedastic dataset with uncertainty ``u`` and standard normal
errors, the root mean squared error of a bin of ``k`` points is distributed
as ``chi_k / sqrt(k)``. The expected ENCE is then the mean of
``|chi_k / sqrt(k) - u| / u``, which this module estimates three ways:

* by sampling chi variables directly (:func:`expected_ence_chi`),
* by quadrature against the chi density (:func:`expected_ence_quadrature`),
* by running the full binning pipeline on simulated datasets
  (:func:`mc_ence_realizations`).

:func:`mad_binned_means` checks the mean absolute value of binned means of
normal draws against its closed form ``u_X * sqrt(2 N / (pi M))``.

Random numbers come from :class:`RngStream`: a seed plus a stream key mapped
to an independent Philox generator, so each task gets its own stream and
results do not depend on execution order.
"""
from __future__ import annotations

import math
import zlib
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np
from scipy import integrate
from scipy import stats as sps

from .binning import bin_stats, make_binning
from .core import Dataset
from .errors import ComputationError, ParameterError
from .metrics import ence

__all__ = [
    "RngStream",
    "SimSpec",
    "EnceScatter",
    "MadComparison",
    "as_generator",
    "sample_normal",
    "sample_chi",
    "expected_ence_chi",
    "expected_ence_quadrature",
    "mc_ence_realizations",
    "mad_binned_means",
    "expected_curves",
    "fit_scatter",
]

DEFAULT_DRAWS = 100_000


def _stream_key(stream) -> tuple:
    # names map to stable integers; nested tuples are flattened
    if isinstance(stream, str):
        return (zlib.crc32(stream.encode("utf-8")),)
    if isinstance(stream, (int, np.integer)):
        return (int(stream),)
    return tuple(k for part in stream for k in _stream_key(part))


@dataclass(frozen=True)
class RngStream:
    """Named, reproducible random stream.

    The same ``(seed, stream)`` always yields the same sequence; different
    stream keys give statistically independent generators.
    """

    seed: int = 0
    stream: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "stream", _stream_key(self.stream))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.seed), spawn_key=self.stream)
        return np.random.Generator(np.random.Philox(ss))

    def child(self, *key) -> "RngStream":
        return RngStream(self.seed, self.stream + _stream_key(key))


RngLike = Union[None, int, RngStream, np.random.Generator]


def as_generator(rng: RngLike) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngStream):
        return rng.generator()
    if rng is None:
        return RngStream(0).generator()
    return RngStream(int(rng)).generator()


def _as_stream(rng: RngLike, default_seed: int = 0) -> RngStream:
    if isinstance(rng, RngStream):
        return rng
    if rng is None:
        return RngStream(default_seed)
    if isinstance(rng, np.random.Generator):
        raise ParameterError(
            "pass a seed or RngStream here so each task can get its own stream", module="sim"
        )
    return RngStream(int(rng))


def sample_normal(rng: RngLike, mean: float = 0.0, sd: float = 1.0, size=None):
    if not sd > 0:
        raise ParameterError(f"standard deviation must be > 0, got {sd}", module="sim")
    return as_generator(rng).normal(mean, sd, size)


def sample_chi(rng: RngLike, k: float, size=None):
    """Chi variates with ``k`` degrees of freedom, as ``sqrt(Gamma(k/2, scale=2))``."""
    if not k >= 1:
        raise ParameterError(f"degrees of freedom must be >= 1, got {k}", module="sim")
    return np.sqrt(as_generator(rng).gamma(k / 2.0, 2.0, size))


def _bin_size(m: int, n_bins: int) -> int:
    if m < 1 or n_bins < 1:
        raise ParameterError(f"M and N must be >= 1 (M={m}, N={n_bins})", module="sim")
    k = m // n_bins
    if k < 1:
        raise ParameterError(f"bin size M//N is {k} for M={m}, N={n_bins}", module="sim")
    return k


def expected_ence_chi(
    m: int,
    n_bins: int,
    u: float = 1.0,
    draws: int = DEFAULT_DRAWS,
    rng: RngLike = None,
    return_stderr: bool = False,
):
    """Monte Carlo expected ENCE of a homoscedastic, normally distributed dataset.

    Each of the ``n_bins`` bins gets its own sample of ``draws`` values of
    ``X = chi_k / sqrt(k)`` with ``k = m // n_bins``; the bin contribution is
    the sample mean of ``|X - u| / u`` and the ENCE the average over bins.

    Returns the estimate, or ``(estimate, stderr)`` if ``return_stderr``.
    """
    k = _bin_size(m, n_bins)
    if not u > 0:
        raise ParameterError(f"uncertainty must be > 0, got {u}", module="sim")
    if draws < 1:
        raise ParameterError("draws must be >= 1", module="sim")
    gen = as_generator(rng)
    scale = math.sqrt(k)
    bin_means = np.empty(n_bins)
    sum_sq = 0.0
    for i in range(n_bins):
        x = np.abs(sample_chi(gen, k, draws) / scale - u) / u
        bin_means[i] = x.mean()
        sum_sq += float(np.dot(x, x))
    value = float(bin_means.mean())
    if not return_stderr:
        return value
    total = n_bins * draws
    var = max(sum_sq / total - value * value, 0.0) * total / max(total - 1, 1)
    return value, math.sqrt(var / total)


def expected_ence_quadrature(k: int, u: float = 1.0) -> float:
    """Expected ``|chi_k / sqrt(k) - u| / u`` by adaptive quadrature.

    The integration range covers the chi density from 12 standard deviations
    below its mode to 12 above, split at the kink ``x = u sqrt(k)``.
    Absolute accuracy is better than 1e-8.
    """
    if not k >= 1:
        raise ParameterError(f"bin size must be >= 1, got {k}", module="sim")
    if not u > 0:
        raise ParameterError(f"uncertainty must be > 0, got {u}", module="sim")
    dist = sps.chi(k)
    root_k = math.sqrt(k)
    mode = math.sqrt(max(k - 1.0, 0.0))
    sd = float(dist.std())
    lo = max(0.0, mode - 12.0 * sd)
    hi = mode + 12.0 * sd
    kink = u * root_k

    def integrand(x):
        return abs(x / root_k - u) / u * dist.pdf(x)

    cuts = [lo] + ([kink] if lo < kink < hi else []) + [hi]
    total, err = 0.0, 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        val, abserr = integrate.quad(integrand, a, b, epsabs=1e-12, epsrel=1e-11, limit=200)
        total += val
        err += abserr
    if err > 1e-8 or not math.isfinite(total):
        raise ComputationError(
            f"quadrature did not converge for k={k}, u={u} (error estimate {err:.3g})",
            module="sim",
        )
    return total


@dataclass(frozen=True)
class SimSpec:
    m: int = 5000
    u: float = 1.0
    grid: tuple = (1, 4, 9, 16, 25, 36, 49, 64, 81, 100, 121, 144)
    draws: int = DEFAULT_DRAWS
    realizations: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.m < 1 or self.draws < 1 or self.realizations < 1:
            raise ParameterError("M, draws and realizations must all be >= 1", module="sim")
        if not self.u > 0:
            raise ParameterError(f"uncertainty must be > 0, got {self.u}", module="sim")
        grid = tuple(int(n) for n in self.grid)
        if not grid or min(grid) < 1 or max(grid) > self.m:
            raise ParameterError(f"bin counts must lie in 1..{self.m}", module="sim")
        object.__setattr__(self, "grid", grid)


@dataclass(frozen=True, eq=False)
class EnceScatter:
    """ENCE of simulated datasets: ``values[r, j]`` is realization ``r`` at ``grid[j]``."""

    grid: np.ndarray
    values: np.ndarray

    def pairs(self):
        return [(int(n), float(v)) for row in self.values for n, v in zip(self.grid, row)]

    def mean(self) -> np.ndarray:
        return self.values.mean(axis=0)

    def stderr(self) -> np.ndarray:
        r = self.values.shape[0]
        if r < 2:
            return np.full(self.grid.size, np.nan)
        return self.values.std(axis=0, ddof=1) / math.sqrt(r)


def mc_ence_realizations(spec: SimSpec, rng: RngLike = None) -> EnceScatter:
    """ENCE of ``spec.realizations`` simulated datasets at every grid bin count.

    Errors are standard normal and the claimed uncertainty is ``spec.u`` for
    every point. Realization ``r`` draws from stream ``r`` of the base
    stream, so the output is reproducible for a given seed.
    """
    base = _as_stream(rng, spec.seed)
    grid = np.asarray(spec.grid, dtype=np.int64)
    values = np.empty((spec.realizations, grid.size))
    u = np.full(spec.m, float(spec.u))
    for r in range(spec.realizations):
        errors = sample_normal(base.child(r), 0.0, 1.0, spec.m)
        d = Dataset(errors, u)
        for j, n_bins in enumerate(grid):
            values[r, j] = ence(bin_stats(d, make_binning(d, int(n_bins)), zvar=None))
    return EnceScatter(grid, values)


class MadComparison(NamedTuple):
    mc_estimate: float
    closed_form: float


def mad_binned_means(
    u_x: float, m: int, n_bins: int, realizations: int = 200, rng: RngLike = None
) -> MadComparison:
    """Mean absolute value of bin means of ``N(0, u_x)`` draws, simulated and exact.

    ``m`` values are split into ``n_bins`` bins of ``k = m // n_bins`` points
    (the ``m mod n_bins`` remainder is not drawn when ``n_bins`` does not
    divide ``m``). The exact value is ``u_x * sqrt(2 / (pi * m)) * sqrt(n_bins)``,
    which assumes ``k = m / n_bins``.
    """
    k = _bin_size(m, n_bins)
    if not u_x > 0:
        raise ParameterError(f"u_x must be > 0, got {u_x}", module="sim")
    if realizations < 1:
        raise ParameterError("realizations must be >= 1", module="sim")
    gen = as_generator(rng)
    mads = np.empty(realizations)
    for r in range(realizations):
        x = gen.normal(0.0, u_x, (n_bins, k))
        mads[r] = np.abs(x.mean(axis=1)).mean()
    closed = u_x * math.sqrt(2.0 / (math.pi * m)) * math.sqrt(n_bins)
    return MadComparison(float(mads.mean()), closed)


def expected_curves(
    m: int,
    factors: Sequence[float],
    grid: Sequence[int],
    draws: int = DEFAULT_DRAWS,
    seed: int = 0,
) -> dict:
    """Expected ENCE versus bin count for several miscalibration factors.

    Returns ``{"grid": [...], "curves": [{"u", "chi", "chi_se", "quadrature"}]}``.
    The sampled curve for factor ``i`` at grid point ``j`` uses stream
    ``("curve", i, j)``.
    """
    base = RngStream(seed, "curve")
    grid = [int(n) for n in grid]
    curves = []
    for i, u in enumerate(factors):
        chi_vals, chi_se, quad = [], [], []
        for j, n_bins in enumerate(grid):
            v, se = expected_ence_chi(m, n_bins, u, draws, base.child(i, j), return_stderr=True)
            chi_vals.append(v)
            chi_se.append(se)
            quad.append(expected_ence_quadrature(m // n_bins, u))
        curves.append({"u": float(u), "chi": chi_vals, "chi_se": chi_se, "quadrature": quad})
    return {"grid": grid, "curves": curves}


def fit_scatter(scatter: EnceScatter, threshold_sqrtN: float = 0.0):
    """Fit the mean ENCE curve of several realizations against ``sqrt(N)``.

    The intercept and slope are those of the OLS fit of the mean curve,
    which equal the averages of the per-realization fits. Their standard
    errors come from the spread of the per-realization fits, not from the
    residuals: every point of a realization's curve is computed from the
    same simulated data, so the residual-based interval is far too narrow.
    """
    from .scanfit import FitResult, ScanSeries, fit_sqrt_n

    r = scatter.values.shape[0]
    if r < 2:
        raise ParameterError("need at least 2 realizations", module="sim")
    fits = [fit_sqrt_n(ScanSeries("ence", scatter.grid, row), threshold_sqrtN) for row in scatter.values]
    mean_fit = fit_sqrt_n(ScanSeries("ence", scatter.grid, scatter.mean()), threshold_sqrtN)
    intercepts = np.array([f.intercept for f in fits])
    slopes = np.array([f.slope for f in fits])
    a_se = float(intercepts.std(ddof=1) / math.sqrt(r))
    b_se = float(slopes.std(ddof=1) / math.sqrt(r))
    half = float(sps.t.ppf(0.975, r - 1)) * a_se
    lo, hi = mean_fit.intercept - half, mean_fit.intercept + half
    return FitResult(
        metric="ence",
        intercept=mean_fit.intercept,
        slope=mean_fit.slope,
        intercept_se=a_se,
        slope_se=b_se,
        ci_low=lo,
        ci_high=hi,
        threshold=float(threshold_sqrtN),
        n_points=mean_fit.n_points,
        target=0.0,
        calibrated=bool(lo <= 0.0 <= hi),
        residual_error=mean_fit.intercept,
    )
