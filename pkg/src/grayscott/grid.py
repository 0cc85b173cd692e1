"""Periodic two-dimensional scalar fields.

A field is a ``jax.numpy`` float64 array of shape ``(nx, ny)``: row ``i`` is
the x index and column ``j`` the y index of the lattice node
``(x_i, y_j) = (i h, j h)``. Every index is understood modulo the grid shape.
"""

import math
from typing import NamedTuple, Tuple

import jax.numpy as jnp

from . import validation
from .exceptions import ParameterError

Field = jnp.ndarray


class LatticeSpec(NamedTuple):
    """Square periodic lattice ``[0, L)^2`` with ``n`` points per coordinate.

    Parameters
    ----------
    L :
        Domain side length.
    n :
        Number of grid points per coordinate.
    h :
        Lattice spacing, ``L / n``.
    """

    L: float
    n: int
    h: float

    @classmethod
    def from_side(cls, L: float, n: int) -> "LatticeSpec":
        """Build a lattice from its side length and point count, deriving ``h = L / n``."""
        validation.check_positive(L, "L")
        validation.check_grid_dimensions(n, n)
        return cls(float(L), int(n), float(L) / int(n))

    def validate(self):
        """Raise if the spacing is inconsistent with side length and point count."""
        validation.check_positive(self.L, "L")
        validation.check_positive(self.h, "h")
        validation.check_grid_dimensions(self.n, self.n)
        if abs(self.h * self.n - self.L) > 1e-12 * self.L:
            raise ParameterError(
                f"Inconsistent lattice: h * n = {self.h * self.n} but L = {self.L}."
            )

    @property
    def shape(self) -> Tuple[int, int]:
        return self.n, self.n

    @property
    def area(self) -> float:
        """Measure of the domain, ``L^2``."""
        return self.L**2


def field_constant(nx: int, ny: int, c: float) -> Field:
    """
    Create a field filled with a constant.

    Parameters
    ----------
    nx :
        Grid points per x-row.
    ny :
        Grid points per y-column.
    c :
        The fill value.

    Returns
    -------
    :
        Array of shape ``(nx, ny)`` whose entries all equal ``c``.

    Raises
    ------
    DimensionError
        If ``nx`` or ``ny`` is not a positive integer.
    """
    validation.check_grid_dimensions(nx, ny)
    return jnp.full((nx, ny), c, dtype=jnp.float64)


def sup_norm(f: Field) -> jnp.ndarray:
    """Discrete sup norm, the maximum of ``|f|`` over all entries."""
    return jnp.max(jnp.abs(f))


def mass(f: Field, h: float) -> jnp.ndarray:
    """
    Discrete integral of a field over the periodic domain.

    Parameters
    ----------
    f :
        The field.
    h :
        Lattice spacing.

    Returns
    -------
    :
        ``h^2`` times the sum of all entries.
    """
    return h**2 * jnp.sum(f)


def min_entry(f: Field) -> jnp.ndarray:
    """Smallest entry of the field."""
    return jnp.min(f)


def value_at(f: Field, i: int, j: int) -> jnp.ndarray:
    """Read entry ``(i, j)`` with periodic wrapping of both indices."""
    nx, ny = f.shape
    return f[i % nx, j % ny]


def shift(f: Field, a: int, b: int) -> Field:
    """Cyclically translate a field so that ``out[i + a, j + b] = f[i, j]``."""
    return jnp.roll(f, (a, b), axis=(0, 1))


def spatial_std(f: Field) -> jnp.ndarray:
    """Standard deviation of the entries of a field, used as a pattern metric."""
    return jnp.std(f)


def plane_wave(nx: int, ny: int, p: int, q: int) -> Field:
    """
    Sample the discrete plane wave ``cos(2 pi p i / nx + 2 pi q j / ny)``.

    Parameters
    ----------
    nx, ny :
        Grid shape.
    p, q :
        Integer wavenumbers along x and y.

    Returns
    -------
    :
        The sampled plane wave.
    """
    validation.check_grid_dimensions(nx, ny)
    a, b = wavevector(nx, ny, p, q)
    i = jnp.arange(nx, dtype=jnp.float64)[:, None]
    j = jnp.arange(ny, dtype=jnp.float64)[None, :]
    return jnp.cos(a * i + b * j)


def wavevector(nx: int, ny: int, p: int, q: int) -> Tuple[float, float]:
    """Angular wavevector ``(2 pi p / nx, 2 pi q / ny)`` of the discrete mode ``(p, q)``."""
    return 2 * math.pi * p / nx, 2 * math.pi * q / ny
