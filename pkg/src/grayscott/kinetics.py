"""Gray-Scott reaction terms.

The kinetics are defined for any real input: nonnegativity is a property of
trajectories, audited by :mod:`grayscott.monitors`, not a restriction of the
domain of ``g1`` and ``g2``. All functions broadcast over arrays.
"""

import math
from typing import NamedTuple, Optional, Tuple

import jax
import jax.numpy as jnp

from . import validation

# substeps per model time step used by the homogeneous reference integrator
REFERENCE_SUBSTEPS = 100


class ModelParams(NamedTuple):
    """Model and discretization parameters.

    Defaults reproduce the published experiment.

    Parameters
    ----------
    f :
        Feed rate.
    kappa :
        Kill rate.
    d_u :
        Diffusivity of ``u``.
    d_v :
        Diffusivity of ``v``.
    dt :
        Time step.
    h :
        Lattice spacing.
    """

    f: float = 0.04
    kappa: float = 0.0636
    d_u: float = 1.0
    d_v: float = 0.5
    dt: float = 1.0
    h: float = 1.0

    def validate(self):
        """
        Check the parameter ranges.

        Raises
        ------
        ParameterError
            If ``kappa``, ``dt`` or ``h`` is not positive, or ``f`` or a
            diffusivity is negative.
        """
        validation.check_positive(self.f, "f", strict=False)
        validation.check_positive(self.kappa, "kappa")
        validation.check_positive(self.d_u, "d_u", strict=False)
        validation.check_positive(self.d_v, "d_v", strict=False)
        validation.check_positive(self.dt, "dt")
        validation.check_positive(self.h, "h")

    @property
    def kappa_tilde(self) -> float:
        """``min(kappa, 1)``, the decay constant of the mass bound."""
        return min(self.kappa, 1.0)


def g1(u, v, p: ModelParams):
    """Reaction term of ``u``: ``-u v^2 + f (1 - u)``."""
    return -u * v**2 + p.f * (1 - u)


def g2(u, v, p: ModelParams):
    """Reaction term of ``v``: ``u v^2 - (f + kappa) v``."""
    return u * v**2 - (p.f + p.kappa) * v


def _reaction(y: jnp.ndarray, p: ModelParams) -> jnp.ndarray:
    return jnp.stack([g1(y[0], y[1], p), g2(y[0], y[1], p)])


def reaction_jacobian(u, v, p: ModelParams) -> jnp.ndarray:
    """
    Jacobian of ``(g1, g2)`` with respect to ``(u, v)`` at every cell.

    Parameters
    ----------
    u, v :
        Concentrations, scalars or fields of equal shape.
    p :
        Model parameters.

    Returns
    -------
    :
        Array of shape ``(*u.shape, 2, 2)``.
    """
    u, v = jnp.broadcast_arrays(jnp.asarray(u, float), jnp.asarray(v, float))
    y = jnp.stack([u.ravel(), v.ravel()], axis=1)
    jac = jax.vmap(jax.jacfwd(_reaction), in_axes=(0, None))(y, p)
    return jac.reshape(*u.shape, 2, 2)


@jax.jit
def _rk4(y0: jnp.ndarray, p: ModelParams, step: float, n_steps: int) -> jnp.ndarray:
    def rk4_step(_, y):
        k1 = _reaction(y, p)
        k2 = _reaction(y + 0.5 * step * k1, p)
        k3 = _reaction(y + 0.5 * step * k2, p)
        k4 = _reaction(y + step * k3, p)
        return y + step / 6 * (k1 + 2 * k2 + 2 * k3 + k4)

    return jax.lax.fori_loop(0, n_steps, rk4_step, y0)


def homogeneous_reference(
    u0: float,
    v0: float,
    p: ModelParams,
    t_end: float,
    n_steps: Optional[int] = None,
) -> Tuple[float, float]:
    """
    Integrate the space-free kinetics with the classical fourth-order Runge-Kutta method.

    This is the reference solution for diffusion-free runs of the simulator.
    The step is fixed (``p.dt / 100`` by default, adjusted down so that an
    integer number of steps lands exactly on ``t_end``).

    Parameters
    ----------
    u0, v0 :
        Initial concentrations.
    p :
        Model parameters; only ``f``, ``kappa`` and ``dt`` are used.
    t_end :
        Final time, ``>= 0``.
    n_steps :
        Override the number of Runge-Kutta steps. Used for convergence studies.

    Returns
    -------
    :
        ``(u(t_end), v(t_end))``.

    Raises
    ------
    ParameterError
        If ``t_end`` is negative or ``n_steps`` is not positive.
    """
    validation.check_positive(t_end, "t_end", strict=False)
    if t_end == 0:
        return float(u0), float(v0)
    if n_steps is None:
        n_steps = max(1, math.ceil(t_end * REFERENCE_SUBSTEPS / p.dt - 1e-9))
    validation.check_positive(n_steps, "n_steps")
    y = _rk4(jnp.array([u0, v0], dtype=jnp.float64), p, t_end / n_steps, int(n_steps))
    return float(y[0]), float(y[1])
