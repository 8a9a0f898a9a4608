"""Exception hierarchy shared by every module.

Each error records the module it originated from so the command line can
report it, and carries the process exit code it maps to.
"""


class UQCalError(Exception):
    """Base class for all package errors."""

    exit_code = 4
    kind = "error"

    def __init__(self, message, module="uqcal", **context):
        super().__init__(message)
        self.module = module
        self.context = context

    def to_record(self):
        return {
            "kind": self.kind,
            "module": self.module,
            "message": str(self),
            "context": {k: _plain(v) for k, v in self.context.items()},
        }


class ParameterError(UQCalError, ValueError):
    """Invalid argument (bin count, sample size, configuration...)."""

    exit_code = 2
    kind = "parameter"


class DataError(UQCalError, ValueError):
    """Invalid dataset content: non-finite values, non-positive uncertainties."""

    exit_code = 3
    kind = "data"


class EmptyInputError(DataError):
    # an empty input file is reported as a usage problem
    exit_code = 2
    kind = "empty-input"


class MetricUndefinedError(UQCalError, ArithmeticError):
    """A metric cannot be evaluated for the given bin statistics."""

    exit_code = 4
    kind = "metric-undefined"


class ComputationError(UQCalError, RuntimeError):
    exit_code = 4
    kind = "computation"


def _plain(value):
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return str(value)
