"""Runtime audit of trajectories against the analytical estimates.

For nonnegative initial data the continuous mixed model satisfies

- componentwise nonnegativity (quasi-positivity of the kinetics),
- ``sup u(t) <= max(sup u0, 1)``,
- ``int (u + v)(t) <= max(|Omega| / kappa_tilde, int (u0 + v0))`` with
  ``kappa_tilde = min(kappa, 1)``,

and both diffusion operators conserve mass. :func:`audit` checks the discrete
counterparts of these statements at a checkpoint and names every breach.
"""

import csv
import logging
import math
from typing import List, NamedTuple, Optional, TextIO

import jax.numpy as jnp

from . import grid, kernel, operators, validation
from .integrator import ModelVariant, SimState
from .kinetics import ModelParams

logger = logging.getLogger(__name__)

NEGATIVITY_TOL = 1e-9
BOUND_RTOL = 1e-6
SUP_ATOL = 1e-9
CONSERVATION_RTOL = 1e-8

# breaches carrying this suffix are reported but do not fail a run
ADVISORY_SUFFIX = "_advisory"

REPORT_HEADER = (
    "step",
    "time",
    "min_u",
    "min_v",
    "sup_u",
    "sup_v",
    "total_mass",
    "sup_bound",
    "mass_bound",
    "gamma_residual",
    "laplacian_residual",
    "violations",
)


class Bounds(NamedTuple):
    """Run constants of the sup-norm and mass estimates."""

    sup_bound: float
    mass_bound: float


class InvariantReport(NamedTuple):
    """Checkpoint record of a trajectory against its bounds."""

    step: int
    time: float
    min_u: float
    min_v: float
    sup_u: float
    sup_v: float
    total_mass: float
    sup_bound: float
    mass_bound: float
    gamma_residual: float
    laplacian_residual: float
    violations: List[str]

    @property
    def has_violations(self) -> bool:
        """True if any non-advisory breach was recorded."""
        return any(not v.endswith(ADVISORY_SUFFIX) for v in self.violations)


def compute_bounds(
    u0: grid.Field, v0: grid.Field, p: ModelParams, lattice: grid.LatticeSpec
) -> Bounds:
    """
    Constants of the sup-norm and L1 estimates for a given initial condition.

    Parameters
    ----------
    u0, v0 :
        Initial fields.
    p :
        Model parameters; ``kappa`` must be positive.
    lattice :
        The lattice, providing ``h`` (``|Omega| = nx ny h^2``).

    Returns
    -------
    :
        ``sup_bound = max(sup u0, 1)`` and
        ``mass_bound = max(|Omega| / min(kappa, 1), mass(u0) + mass(v0))``.

    Raises
    ------
    ParameterError
        If ``kappa`` is not positive.
    """
    validation.check_positive(p.kappa, "kappa")
    nx, ny = u0.shape
    area = nx * ny * lattice.h**2
    sup_bound = max(float(grid.sup_norm(u0)), 1.0)
    initial_mass = float(grid.mass(u0, lattice.h) + grid.mass(v0, lattice.h))
    mass_bound = max(area / p.kappa_tilde, initial_mass)
    return Bounds(sup_bound, mass_bound)


def sup_envelope(t: float, sup_u0: float, f: float) -> float:
    """Time-dependent sup-norm estimate ``exp(-f t) sup u0 + 1 - exp(-f t)`` of the mixed model."""
    decay = math.exp(-f * t)
    return decay * sup_u0 + 1 - decay


def mass_envelope(t: float, mass0: float, f: float, kappa: float, area: float) -> float:
    """
    Time-dependent solution of the mass differential inequality.

    ``exp(-f kt t) mass0 + (area / kt) (1 - exp(-f kt t))`` with ``kt = min(kappa, 1)``.
    It never exceeds the constant mass bound.
    """
    kt = min(kappa, 1.0)
    decay = math.exp(-f * kt * t)
    return decay * mass0 + area / kt * (1 - decay)


def audit(
    s: SimState,
    bounds: Bounds,
    p: ModelParams,
    lattice: grid.LatticeSpec,
    variant: ModelVariant,
    k: Optional[kernel.DiscreteKernel] = None,
) -> InvariantReport:
    """
    Check a state against the nonnegativity, sup-norm, mass and conservation estimates.

    A breach is recorded when

    - ``min u`` or ``min v`` is below ``-1e-9`` (``u_negative``, ``v_negative``);
    - ``sup u > sup_bound (1 + 1e-6) + 1e-9`` (``u_sup_bound``; the estimate is
      proved for the mixed model only, so other variants report
      ``u_sup_bound_advisory``);
    - ``total_mass > mass_bound (1 + 1e-6)`` (``mass_bound``);
    - ``|mass(Gamma u)|`` or ``|mass(L v)|`` exceeds
      ``1e-8 (1 + sup u + sup v) |Omega|`` (``gamma_conservation``,
      ``laplacian_conservation``);
    - any entry is not finite (``non_finite``).

    The audit never raises; policy is left to the caller.

    Parameters
    ----------
    s :
        State to audit.
    bounds :
        Run constants from :func:`compute_bounds`.
    p :
        Model parameters.
    lattice :
        The lattice.
    variant :
        Model variant of the trajectory.
    k :
        Kernel used for the Gamma residual. Without a kernel the residual is 0.

    Returns
    -------
    :
        The filled report.
    """
    h = lattice.h
    nx, ny = s.u.shape
    area = nx * ny * h**2
    min_u, min_v = float(grid.min_entry(s.u)), float(grid.min_entry(s.v))
    sup_u, sup_v = float(grid.sup_norm(s.u)), float(grid.sup_norm(s.v))
    total_mass = float(grid.mass(s.u, h) + grid.mass(s.v, h))

    finite = bool(jnp.all(jnp.isfinite(s.u))) and bool(jnp.all(jnp.isfinite(s.v)))
    gamma_residual = 0.0
    if k is not None and finite:
        gamma_u = operators.gamma_apply(k.spectrum, k.total_mass, s.u)
        gamma_residual = abs(float(grid.mass(gamma_u, h)))
    laplacian_residual = abs(float(grid.mass(operators.laplacian9(s.v, h), h)))

    violations = []
    if not finite:
        violations.append("non_finite")
    if min_u < -NEGATIVITY_TOL:
        violations.append("u_negative")
    if min_v < -NEGATIVITY_TOL:
        violations.append("v_negative")
    if sup_u > bounds.sup_bound * (1 + BOUND_RTOL) + SUP_ATOL:
        violations.append(
            "u_sup_bound" if variant == "mixed" else "u_sup_bound" + ADVISORY_SUFFIX
        )
    if total_mass > bounds.mass_bound * (1 + BOUND_RTOL):
        violations.append("mass_bound")
    conservation_tol = CONSERVATION_RTOL * (1 + sup_u + sup_v) * area
    # NaN residuals count as breaches
    if not gamma_residual <= conservation_tol:
        violations.append("gamma_conservation")
    if not laplacian_residual <= conservation_tol:
        violations.append("laplacian_conservation")

    if violations:
        logger.info("step %d: %s", s.step, ";".join(violations))

    return InvariantReport(
        step=int(s.step),
        time=float(s.time),
        min_u=min_u,
        min_v=min_v,
        sup_u=sup_u,
        sup_v=sup_v,
        total_mass=total_mass,
        sup_bound=bounds.sup_bound,
        mass_bound=bounds.mass_bound,
        gamma_residual=gamma_residual,
        laplacian_residual=laplacian_residual,
        violations=violations,
    )


def _fmt(x: float) -> str:
    return format(x, ".17g")


def _at_start(sink: TextIO) -> bool:
    try:
        return sink.seekable() and sink.tell() == 0
    except (AttributeError, OSError, ValueError):
        return False


def write_report_row(r: InvariantReport, sink: TextIO, header: Optional[bool] = None):
    """
    Append one report to an invariant CSV sink.

    Floats use 17 significant digits; violations are joined with ``;`` and
    left empty when there are none.

    Parameters
    ----------
    r :
        The report.
    sink :
        Open text stream.
    header :
        Write the column header before the row. By default the header is
        written when the sink is seekable and at position 0, so callers
        streaming to a pipe or a terminal pass ``header=True`` with their
        first row.

    Raises
    ------
    OSError
        If the write fails; the message names the sink.
    """
    writer = csv.writer(sink, lineterminator="\n")
    row = [str(r.step)]
    row += [
        _fmt(x)
        for x in (
            r.time,
            r.min_u,
            r.min_v,
            r.sup_u,
            r.sup_v,
            r.total_mass,
            r.sup_bound,
            r.mass_bound,
            r.gamma_residual,
            r.laplacian_residual,
        )
    ]
    row.append(";".join(r.violations))
    try:
        if header is None:
            header = _at_start(sink)
        if header:
            writer.writerow(REPORT_HEADER)
        writer.writerow(row)
    except OSError as e:
        name = getattr(sink, "name", repr(sink))
        raise OSError(f"Failed to write invariant report to {name}: {e}") from e
