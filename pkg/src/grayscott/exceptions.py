"""Simulator specific exceptions."""

from typing import Any, Optional


class DimensionError(ValueError):
    """Exception raised for nonpositive or mismatched grid dimensions.

    Examples
    --------
    >>> from grayscott.grid import field_constant
    >>> from grayscott.exceptions import DimensionError
    >>> try:
    ...     field_constant(0, 4, 1.0)
    ... except DimensionError as e:
    ...     print(e)
    Grid dimensions must be positive integers. Got nx=0, ny=4.
    """


class ParameterError(ValueError):
    """Exception raised when a model, kernel or seeding parameter is out of range."""


class SizeGuardError(ParameterError):
    """Exception raised when the direct convolution is asked to run on a grid above its guard size.

    The direct path is quartic in the side length. The guard can be lifted with
    ``allow_large=True``.
    """


class DivergenceError(FloatingPointError):
    """Exception raised when a trajectory produces a non-finite or runaway value.

    Parameters
    ----------
    message :
        Human readable description.
    step :
        Index of the first step at which the divergence was detected.
    state :
        Last finite state before the divergence, if available.
    """

    def __init__(self, message: str, step: int, state: Optional[Any] = None):
        super().__init__(message)
        self.step = step
        self.state = state


class SnapshotFormatError(ValueError):
    """Exception raised when a snapshot file is malformed."""


class ConfigError(ValueError):
    """Exception raised by the configuration parser.

    Parameters
    ----------
    message :
        Human readable description.
    line :
        1-based line number of a syntax error, if any.
    key :
        Name of the offending key for semantic or unknown-key errors, if any.
    """

    def __init__(
        self, message: str, line: Optional[int] = None, key: Optional[str] = None
    ):
        super().__init__(message)
        self.line = line
        self.key = key
