"""Binning-based calibration metrics (ENCE, ZVE) for regression uncertainties,
and bin-count-independent estimates obtained by regression on sqrt(N)."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ComputationError,
    DataError,
    EmptyInputError,
    MetricUndefinedError,
    ParameterError,
    UQCalError,
)
from .core import (  # noqa: E402
    Dataset,
    RawRecord,
    from_raw,
    mean_error,
    mean_squared_error,
    mean_variance,
    z_scores,
    z_variance,
)
from .binning import Binning, BinStats, bin_stats, make_binning, max_bins  # noqa: E402
from .metrics import ReliabilityPoint, ence, reliability_diagram, zve  # noqa: E402
from .scanfit import (  # noqa: E402
    CalibrationReport,
    FitResult,
    ReportConfig,
    ScanSeries,
    calibration_report,
    default_grid,
    fit_sqrt_n,
    scan,
)
