"""Spatial operators: the isotropic 9-point Laplacian and the nonlocal operator Gamma.

Both operators are circulant on the periodic lattice, so they are diagonalized
by the discrete Fourier transform. Their symbol ranges feed the explicit time
step stability check of the integrator.
"""

# required to get ArrayLike to render correctly
from __future__ import annotations

from typing import NamedTuple

import jax
import jax.numpy as jnp
from numpy.typing import ArrayLike

from . import grid, kernel, validation

# coefficients of the isotropic 9-point stencil at h = 1
CENTER = -1.0
AXIS = 0.2
DIAGONAL = 0.05

# minimum of the stencil symbol at h = 1, attained at the checkerboard mode
LAPLACIAN9_SYMBOL_MIN = -1.6


class StencilSymbol(NamedTuple):
    """Range of the Fourier symbol of a diffusion-type operator.

    Parameters
    ----------
    min_eigenvalue :
        Most negative eigenvalue.
    max_eigenvalue :
        Largest eigenvalue (0 for operators annihilating constants).
    """

    min_eigenvalue: float
    max_eigenvalue: float


@jax.jit
def _stencil(f: jnp.ndarray) -> jnp.ndarray:
    def roll(a, b):
        return jnp.roll(f, (a, b), axis=(0, 1))

    axis = roll(1, 0) + roll(-1, 0) + roll(0, 1) + roll(0, -1)
    diag = roll(1, 1) + roll(1, -1) + roll(-1, 1) + roll(-1, -1)
    # neighbours first: the weights then cancel the center exactly on constants
    return AXIS * axis + DIAGONAL * diag + CENTER * f


def laplacian9_apply(f: jnp.ndarray, h: float) -> jnp.ndarray:
    """Unchecked 9-point Laplacian, safe to call inside jitted code."""
    return _stencil(f) / h**2


def laplacian9(f: ArrayLike, h: float = 1.0) -> grid.Field:
    r"""
    Isotropic 9-point Laplacian with periodic wrap.

    $$
    (\mathcal{L}A)_{i,j} = h^{-2}\big[-A_{i,j}
    + 0.2\,(A_{i\pm1,j} + A_{i,j\pm1})
    + 0.05\,(A_{i\pm1,j\pm1})\big]
    $$

    Parameters
    ----------
    f :
        Field to differentiate.
    h :
        Lattice spacing.

    Returns
    -------
    :
        The discrete Laplacian of ``f``.

    Raises
    ------
    ParameterError
        If ``h`` is not positive.
    """
    validation.check_positive(h, "h")
    f = validation.convert_to_field(f, "f")
    return laplacian9_apply(f, h)


def laplacian9_symbol(a, b):
    """Closed-form symbol ``-1 + 0.4 (cos a + cos b) + 0.2 cos a cos b`` of the h = 1 stencil."""
    ca, cb = jnp.cos(a), jnp.cos(b)
    return CENTER + 2 * AXIS * (ca + cb) + 4 * DIAGONAL * ca * cb


def laplacian9_symbol_range(h: float = 1.0) -> StencilSymbol:
    """
    Extrema of the 9-point Laplacian symbol over all wavevectors.

    The h = 1 symbol ``s(a, b)`` is maximal (0) at ``a = b = 0`` and minimal
    (-1.6) at ``a = b = pi``; both scale with ``h^-2``.

    Parameters
    ----------
    h :
        Lattice spacing.

    Returns
    -------
    :
        ``StencilSymbol(-1.6 / h^2, 0)``.
    """
    validation.check_positive(h, "h")
    return StencilSymbol(LAPLACIAN9_SYMBOL_MIN / h**2, 0.0)


def gamma_apply(
    spectrum: jnp.ndarray, total_mass: jnp.ndarray, f: jnp.ndarray
) -> jnp.ndarray:
    """Unchecked spectral Gamma, safe to call inside jitted code."""
    return kernel.spectral_apply(spectrum, f) - total_mass * f


def nonlocal_gamma(
    k: kernel.DiscreteKernel, f: ArrayLike, use_spectral: bool = True
) -> grid.Field:
    r"""
    Nonlocal diffusion operator $\Gamma f = w * f - \lambda f$.

    For a circulant kernel this equals $\sum_y w(x, y) [f(y) - f(x)]$, with
    $\lambda$ the kernel total mass.

    Parameters
    ----------
    k :
        The kernel.
    f :
        Field of the same shape as the kernel.
    use_spectral :
        Evaluate the convolution through the cached spectrum (default) or with
        the direct double sum.

    Returns
    -------
    :
        ``Gamma f``.

    Raises
    ------
    DimensionError
        If the kernel and field shapes differ.
    """
    f = validation.convert_to_field(f, "f")
    if use_spectral:
        conv = kernel.convolve_spectral(k, f)
    else:
        conv = kernel.convolve_direct(k, f)
    return conv - k.total_mass * f


def gamma_symbol_range(k: kernel.DiscreteKernel) -> StencilSymbol:
    """
    Range of the symbol of Gamma, found by scanning the cached spectrum.

    Parameters
    ----------
    k :
        The kernel.

    Returns
    -------
    :
        ``StencilSymbol(min Re(spectrum) - total_mass, 0)``.
    """
    low = float(jnp.min(k.spectrum.real) - k.total_mass)
    return StencilSymbol(low, 0.0)


def gamma_operator_bound(k: kernel.DiscreteKernel) -> float:
    """Bound ``2 lambda`` on the operator norm of Gamma in the sup norm, ``|Gamma z| <= 2 lambda |z|``."""
    return 2 * kernel.kernel_mass_bound(k)
