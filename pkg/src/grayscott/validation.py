"""Collection of argument checks shared by the simulator modules."""

import math
from typing import Any

import jax.numpy as jnp
import numpy as np

from .exceptions import DimensionError, ParameterError


def check_grid_dimensions(nx: Any, ny: Any):
    """
    Raise if the grid dimensions are not positive integers.

    Parameters
    ----------
    nx :
        Number of grid points per x-row.
    ny :
        Number of grid points per y-column.

    Raises
    ------
    DimensionError
        If either dimension is not an integer or is smaller than 1.
    """
    valid = all(
        isinstance(n, (int, np.integer)) and not isinstance(n, bool) and n >= 1
        for n in (nx, ny)
    )
    if not valid:
        raise DimensionError(
            f"Grid dimensions must be positive integers. Got nx={nx}, ny={ny}."
        )


def check_positive(value: float, name: str, strict: bool = True):
    """
    Raise if a scalar parameter is not positive (or non-negative).

    Parameters
    ----------
    value :
        The value to check.
    name :
        Name of the parameter, used in the error message.
    strict :
        If True the value must be > 0, otherwise >= 0.

    Raises
    ------
    ParameterError
        If the value is not finite or violates the bound.
    """
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ParameterError(f"`{name}` must be a real number. Got {value!r}.")
    if not math.isfinite(value):
        raise ParameterError(f"`{name}` must be finite. Got {value}.")
    if strict and value <= 0:
        raise ParameterError(f"`{name}` must be > 0. Got {value}.")
    if not strict and value < 0:
        raise ParameterError(f"`{name}` must be >= 0. Got {value}.")


def convert_to_field(x: Any, name: str) -> jnp.ndarray:
    """
    Convert an array-like to a float64 two-dimensional field.

    Parameters
    ----------
    x :
        Array-like of shape ``(nx, ny)``.
    name :
        Name of the argument, used in the error message.

    Returns
    -------
    :
        The field as a ``jax.numpy`` float64 array.

    Raises
    ------
    TypeError
        If the conversion fails because of an incompatible type.
    DimensionError
        If the array is not two-dimensional or is empty.
    """
    try:
        field = jnp.asarray(x, dtype=jnp.float64)
    except (ValueError, TypeError):
        raise TypeError(f"`{name}` must be an array-like of real numbers.")
    if field.ndim != 2:
        raise DimensionError(
            f"`{name}` must be a 2 dimensional array. "
            f"{field.ndim} dimensions provided instead."
        )
    if 0 in field.shape:
        raise DimensionError(f"Empty array provided. `{name}` has shape {field.shape}.")
    return field


def check_same_shape(*fields: jnp.ndarray, err_message: str):
    """
    Check that all fields share the same grid shape.

    Parameters
    ----------
    *fields :
        Fields to compare.
    err_message :
        Error message to raise if the shapes differ.

    Raises
    ------
    DimensionError
        If the fields do not all have the same shape.
    """
    if len(fields) > 1:
        if any(f.shape != fields[0].shape for f in fields[1:]):
            raise DimensionError(err_message)
