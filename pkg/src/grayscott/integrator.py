"""Explicit forward-Euler time stepping of the local, mixed and reversed models.

Every update is fully explicit and simultaneous: both the diffusion terms and
the reaction terms read the fields of the previous time level only.

- ``local``: ``u`` and ``v`` diffuse with the 9-point Laplacian.
- ``mixed``: ``u`` diffuses with the nonlocal operator Gamma, ``v`` with the Laplacian.
- ``reversed``: ``u`` diffuses with the Laplacian, ``v`` with Gamma. This
  arrangement carries no sup-norm guarantee and is kept to exercise the monitors.
"""

# required to get ArrayLike to render correctly
from __future__ import annotations

import logging
import warnings
from functools import partial
from typing import Dict, Literal, NamedTuple, Optional

import jax
import jax.numpy as jnp
import numpy as np
from numpy.typing import ArrayLike

from . import grid, kernel, kinetics, operators, validation
from .exceptions import DivergenceError, ParameterError

logger = logging.getLogger(__name__)

ModelVariant = Literal["local", "mixed", "reversed"]
VARIANTS = ("local", "mixed", "reversed")
SEED_MODES = ("uniform", "center-square", "center-square-noise")

# explicit Euler is linearly stable while dt * |symbol| stays within this limit
STABILITY_LIMIT = 2.0

# sup-norm above which a trajectory is declared divergent
DIVERGENCE_SUP = 1e6


class SimState(NamedTuple):
    """State of a trajectory at a time level.

    Parameters
    ----------
    u, v :
        Concentration fields of identical shape.
    step :
        Number of steps taken since the initial condition.
    time :
        ``step * dt``.
    """

    u: jnp.ndarray
    v: jnp.ndarray
    step: int = 0
    time: float = 0.0


class SeedSpec(NamedTuple):
    """Recipe for the initial condition.

    Parameters
    ----------
    mode :
        ``"uniform"`` (``u = 1``, ``v = 0``), ``"center-square"`` (uniform with a
        centered block set to ``(u_in, v_in)``) or ``"center-square-noise"``
        (as ``"center-square"`` plus uniform noise in ``[0, noise_amplitude)``
        added to the block).
    block_side :
        Side of the centered block, in cells.
    u_in, v_in :
        Concentrations inside the block.
    noise_amplitude :
        Amplitude of the block noise.
    rng_seed :
        Seed of the noise generator.
    """

    mode: str = "center-square-noise"
    block_side: int = 20
    u_in: float = 0.5
    v_in: float = 0.25
    noise_amplitude: float = 0.02
    rng_seed: int = 0

    def validate(self, nx: int, ny: int):
        """
        Check that the recipe fits a grid.

        Raises
        ------
        ParameterError
            If the mode is unknown, the block does not fit the grid or the noise
            amplitude is negative.
        """
        if self.mode not in SEED_MODES:
            raise ParameterError(
                f"Unknown seed mode {self.mode!r}. Available modes are {SEED_MODES}."
            )
        if self.mode == "uniform":
            return
        if not isinstance(self.block_side, (int, np.integer)) or self.block_side < 0:
            raise ParameterError(
                f"`block_side` must be a nonnegative integer. Got {self.block_side}."
            )
        if self.block_side > min(nx, ny):
            raise ParameterError(
                f"`block_side`={self.block_side} does not fit a {nx}x{ny} grid."
            )
        validation.check_positive(self.noise_amplitude, "noise_amplitude", strict=False)


class StabilityReport(NamedTuple):
    """Outcome of the linear stability check of the explicit scheme.

    Parameters
    ----------
    passed :
        True if every species margin is within ``limit``.
    margins :
        ``dt * D * |min symbol|`` per species.
    limit :
        The stability limit (2).
    reaction_stiffness :
        ``dt`` times the largest row-sum norm of the reaction Jacobian over the
        sampled state; informational only.
    """

    passed: bool
    margins: Dict[str, float]
    limit: float
    reaction_stiffness: Optional[float] = None


def check_variant(variant: str, k: Optional[kernel.DiscreteKernel] = None):
    """
    Check that a model variant is known and has the kernel it needs.

    Raises
    ------
    ParameterError
        If the variant is unknown or a nonlocal variant has no kernel.
    """
    if variant not in VARIANTS:
        raise ParameterError(
            f"Unknown model variant {variant!r}. Available variants are {VARIANTS}."
        )
    if variant != "local" and k is None:
        raise ParameterError(f"The {variant!r} variant requires a kernel.")


@partial(jax.jit, static_argnames=("variant",))
def _euler_update(u, v, p: kinetics.ModelParams, k, variant: str):
    if variant == "local":
        diff_u = p.d_u * operators.laplacian9_apply(u, p.h)
        diff_v = p.d_v * operators.laplacian9_apply(v, p.h)
    elif variant == "mixed":
        diff_u = p.d_u * operators.gamma_apply(k.spectrum, k.total_mass, u)
        diff_v = p.d_v * operators.laplacian9_apply(v, p.h)
    else:
        diff_u = p.d_u * operators.laplacian9_apply(u, p.h)
        diff_v = p.d_v * operators.gamma_apply(k.spectrum, k.total_mass, v)
    u_new = u + p.dt * (diff_u + kinetics.g1(u, v, p))
    v_new = v + p.dt * (diff_v + kinetics.g2(u, v, p))
    return u_new, v_new


def _check_state(s: SimState, k: Optional[kernel.DiscreteKernel]):
    validation.check_same_shape(
        s.u, s.v, err_message="`u` and `v` must have the same shape."
    )
    if k is not None:
        validation.check_same_shape(
            s.u,
            k.weights,
            err_message=f"Kernel shape {k.weights.shape} does not match grid shape {s.u.shape}.",
        )


def _single_step(
    s: SimState,
    p: kinetics.ModelParams,
    k: Optional[kernel.DiscreteKernel],
    variant: str,
) -> SimState:
    _check_state(s, k)
    u, v = _euler_update(s.u, s.v, p, k, variant)
    step = s.step + 1
    if not (bool(jnp.all(jnp.isfinite(u))) and bool(jnp.all(jnp.isfinite(v)))):
        raise DivergenceError(
            f"Non-finite value produced at step {step}.", step=step, state=s
        )
    return SimState(u, v, step, step * p.dt)


def step_local(s: SimState, p: kinetics.ModelParams) -> SimState:
    r"""
    Advance the local model by one forward-Euler step.

    $$
    u^{n+1} = u^n + \Delta t\,[D_u \mathcal{L}u^n + g_1(u^n, v^n)], \quad
    v^{n+1} = v^n + \Delta t\,[D_v \mathcal{L}v^n + g_2(u^n, v^n)]
    $$

    Parameters
    ----------
    s :
        Current state.
    p :
        Model parameters.

    Returns
    -------
    :
        The state at the next time level.

    Raises
    ------
    DivergenceError
        If a non-finite value is produced.
    """
    return _single_step(s, p, None, "local")


def step_mixed(
    s: SimState, p: kinetics.ModelParams, k: kernel.DiscreteKernel
) -> SimState:
    r"""
    Advance the mixed model by one forward-Euler step.

    The ``u`` update uses $D_u\,(\phi * u - u)$ in place of the Laplacian,
    evaluated spectrally; the ``v`` update is the one of :func:`step_local`.

    Parameters
    ----------
    s :
        Current state.
    p :
        Model parameters.
    k :
        Nonlocal kernel matching the grid.

    Returns
    -------
    :
        The state at the next time level.

    Raises
    ------
    DimensionError
        If the kernel does not match the grid.
    DivergenceError
        If a non-finite value is produced.
    """
    return _single_step(s, p, k, "mixed")


def step_reversed(
    s: SimState, p: kinetics.ModelParams, k: kernel.DiscreteKernel
) -> SimState:
    """Advance the reversed model (Laplacian on ``u``, Gamma on ``v``) by one step."""
    return _single_step(s, p, k, "reversed")


@partial(jax.jit, static_argnames=("variant",))
def _advance(u, v, p, k, n_steps, sup_limit, variant: str):
    def bounded(a):
        # NaN compares False, so this also rejects non-finite entries
        return jnp.max(jnp.abs(a)) <= sup_limit

    def cond(carry):
        _, _, n, ok = carry
        return ok & (n < n_steps)

    def body(carry):
        u, v, n, _ = carry
        u_new, v_new = _euler_update(u, v, p, k, variant)
        ok = bounded(u_new) & bounded(v_new)
        # keep the last good state on failure
        u = jnp.where(ok, u_new, u)
        v = jnp.where(ok, v_new, v)
        return u, v, n + ok.astype(n.dtype), ok

    init = (u, v, jnp.asarray(0, dtype=jnp.int64), jnp.asarray(True))
    return jax.lax.while_loop(cond, body, init)


def advance(
    s: SimState,
    p: kinetics.ModelParams,
    n_steps: int,
    variant: ModelVariant = "local",
    k: Optional[kernel.DiscreteKernel] = None,
    sup_limit: float = DIVERGENCE_SUP,
) -> SimState:
    """
    Advance a state by ``n_steps`` steps inside a single compiled loop.

    Parameters
    ----------
    s :
        Initial state.
    p :
        Model parameters.
    n_steps :
        Number of steps to take.
    variant :
        ``"local"``, ``"mixed"`` or ``"reversed"``.
    k :
        Kernel, required by the nonlocal variants.
    sup_limit :
        Sup-norm above which the trajectory is declared divergent.

    Returns
    -------
    :
        The state after ``n_steps`` steps.

    Raises
    ------
    DivergenceError
        If a step produces a non-finite entry or a sup-norm above ``sup_limit``.
        The exception carries the index of the failing step and the last good
        state.
    """
    check_variant(variant, k)
    _check_state(s, k)
    if n_steps == 0:
        return s
    kern = k if variant != "local" else None
    u, v, done, ok = _advance(s.u, s.v, p, kern, n_steps, sup_limit, variant)
    step = s.step + int(done)
    if not bool(ok):
        last_good = SimState(u, v, step, step * p.dt)
        raise DivergenceError(
            f"Trajectory diverged at step {step + 1}: non-finite value or sup-norm above {sup_limit:g}.",
            step=step + 1,
            state=last_good,
        )
    return SimState(u, v, step, step * p.dt)


def stability_check(
    p: kinetics.ModelParams,
    variant: ModelVariant,
    k: Optional[kernel.DiscreteKernel] = None,
    state: Optional[SimState] = None,
) -> StabilityReport:
    """
    Linear stability of the explicit scheme from the operator symbol ranges.

    Each species passes when ``dt * D * |min symbol| <= 2``, where the symbol
    is the one of the operator that diffuses the species (9-point Laplacian:
    ``-1.6 / h^2``; Gamma: ``min Re(spectrum) - total_mass``). Reaction
    stiffness is reported but never fails the check.

    Parameters
    ----------
    p :
        Model parameters.
    variant :
        Model variant.
    k :
        Kernel, required by the nonlocal variants.
    state :
        Optional state at which the reaction Jacobian is sampled.

    Returns
    -------
    :
        The stability report.
    """
    check_variant(variant, k)
    lap = abs(operators.laplacian9_symbol_range(p.h).min_eigenvalue)
    gam = abs(operators.gamma_symbol_range(k).min_eigenvalue) if k is not None else None
    symbol = {
        "local": {"u": lap, "v": lap},
        "mixed": {"u": gam, "v": lap},
        "reversed": {"u": lap, "v": gam},
    }[variant]
    margins = {
        "u": p.dt * p.d_u * symbol["u"],
        "v": p.dt * p.d_v * symbol["v"],
    }
    stiffness = None
    if state is not None:
        jac = kinetics.reaction_jacobian(state.u, state.v, p)
        stiffness = p.dt * float(jnp.max(jnp.sum(jnp.abs(jac), axis=-1)))
    passed = all(m <= STABILITY_LIMIT for m in margins.values())
    logger.debug("stability margins %s (limit %g)", margins, STABILITY_LIMIT)
    return StabilityReport(passed, margins, STABILITY_LIMIT, stiffness)


def seed(spec: SeedSpec, lattice: grid.LatticeSpec) -> SimState:
    """
    Build the initial state from a seeding recipe.

    Parameters
    ----------
    spec :
        Seeding recipe.
    lattice :
        Lattice the state lives on.

    Returns
    -------
    :
        State at step 0.

    Raises
    ------
    ParameterError
        If the recipe does not fit the lattice.
    """
    nx, ny = lattice.shape
    spec.validate(nx, ny)
    u = np.ones((nx, ny), dtype=np.float64)
    v = np.zeros((nx, ny), dtype=np.float64)
    if spec.mode != "uniform" and spec.block_side > 0:
        b = spec.block_side
        i0, j0 = (nx - b) // 2, (ny - b) // 2
        block = (slice(i0, i0 + b), slice(j0, j0 + b))
        u[block] = spec.u_in
        v[block] = spec.v_in
        if spec.mode == "center-square-noise":
            rng = np.random.default_rng(spec.rng_seed)
            u[block] += spec.noise_amplitude * rng.random((b, b))
            v[block] += spec.noise_amplitude * rng.random((b, b))
    return SimState(jnp.asarray(u), jnp.asarray(v), 0, 0.0)


def state_from_arrays(
    u: ArrayLike, v: ArrayLike, step: int = 0, dt: float = 1.0
) -> SimState:
    """Wrap two array-likes into a validated state at the given step."""
    u = validation.convert_to_field(u, "u")
    v = validation.convert_to_field(v, "v")
    validation.check_same_shape(u, v, err_message="`u` and `v` must have the same shape.")
    return SimState(u, v, int(step), int(step) * dt)


def warn_if_unstable(report: StabilityReport, waive: bool):
    """
    Enforce the stability gate before a run.

    Raises
    ------
    ParameterError
        If the check failed and was not waived.
    """
    if report.passed:
        return
    if not waive:
        raise ParameterError(
            f"Time step fails the stability check: margins {report.margins} exceed "
            f"{report.limit}. Reduce `dt` or set `waive_stability`."
        )
    warnings.warn(
        f"Stability check failed (margins {report.margins}) and was waived; "
        "the trajectory may diverge.",
        UserWarning,
    )
