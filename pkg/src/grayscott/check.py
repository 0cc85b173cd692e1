"""Self-check suite run by ``grayscott check``.

Every check evaluates one property of the discrete operators or the time
stepper on small grids against an independent oracle (the direct double sum,
a closed-form symbol, ``scipy.signal.convolve2d`` with periodic wrap, or the
space-free kinetics integrated with Runge-Kutta) and compares the error to a
fixed tolerance.
"""

import logging
import os
import tempfile
from typing import Callable, List, NamedTuple, Tuple

import jax.numpy as jnp
import numpy as np
from scipy.signal import convolve2d

from . import grid, integrator, io, kernel, kinetics, monitors, operators

logger = logging.getLogger(__name__)

ORACLE_SIZES = (8, 16, 32)
FIELDS_PER_SIZE = 10

# 9-point stencil as a 3x3 correlation mask
STENCIL_MASK = np.array(
    [
        [operators.DIAGONAL, operators.AXIS, operators.DIAGONAL],
        [operators.AXIS, operators.CENTER, operators.AXIS],
        [operators.DIAGONAL, operators.AXIS, operators.DIAGONAL],
    ]
)


class CheckResult(NamedTuple):
    """Outcome of one check: the measured error against its tolerance."""

    name: str
    error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        # NaN errors fail
        return bool(self.error <= self.tolerance)


def _rel_err(a, b) -> float:
    scale = max(float(grid.sup_norm(b)), 1e-300)
    return float(jnp.max(jnp.abs(a - b))) / scale


def check_spectral_vs_direct() -> Tuple[float, float]:
    rng = np.random.default_rng(1)
    err = 0.0
    for n in ORACLE_SIZES:
        k = kernel.build_gaussian_kernel(kernel.KernelSpec(1.0, n, n))
        for _ in range(FIELDS_PER_SIZE):
            f = jnp.asarray(rng.random((n, n)))
            err = max(
                err,
                _rel_err(kernel.convolve_spectral(k, f), kernel.convolve_direct(k, f)),
            )
    return err, 1e-12


def check_kernel_normalization() -> Tuple[float, float]:
    k = kernel.build_gaussian_kernel(kernel.KernelSpec(1.0, 32, 32))
    err = abs(float(k.total_mass) - 1.0)
    err = max(err, float(jnp.max(jnp.abs(k.weights - kernel._reflect(k.weights)))))
    err = max(err, float(jnp.max(jnp.abs(k.spectrum.imag))))
    excess = float(jnp.max(jnp.abs(k.spectrum))) - float(k.total_mass)
    return max(err, excess, 0.0), 1e-12


def check_laplacian_symbol() -> Tuple[float, float]:
    n = 16
    err = 0.0
    for p in range(n):
        for q in range(n):
            w = grid.plane_wave(n, n, p, q)
            a, b = grid.wavevector(n, n, p, q)
            expected = operators.laplacian9_symbol(a, b) * w
            err = max(err, float(jnp.max(jnp.abs(operators.laplacian9(w) - expected))))
    checker = grid.plane_wave(n, n, n // 2, n // 2)
    err = max(
        err,
        float(jnp.max(jnp.abs(operators.laplacian9(checker) + 1.6 * checker))),
    )
    return err, 1e-12


def check_laplacian_vs_scipy() -> Tuple[float, float]:
    rng = np.random.default_rng(2)
    f = rng.random((16, 12))
    expected = convolve2d(f, STENCIL_MASK, mode="same", boundary="wrap")
    return float(np.max(np.abs(np.asarray(operators.laplacian9(f)) - expected))), 1e-13


def check_conservation() -> Tuple[float, float]:
    rng = np.random.default_rng(3)
    n = 32
    k = kernel.build_gaussian_kernel(kernel.KernelSpec(1.0, n, n))
    f = jnp.asarray(rng.random((n, n)))
    tol_scale = float(grid.sup_norm(f)) * n * n
    err = abs(float(grid.mass(operators.nonlocal_gamma(k, f), 1.0))) / tol_scale
    err = max(err, abs(float(grid.mass(operators.laplacian9(f), 1.0))) / tol_scale)
    const = grid.field_constant(n, n, 0.7)
    err = max(err, float(grid.sup_norm(operators.nonlocal_gamma(k, const))))
    err = max(err, float(grid.sup_norm(operators.laplacian9(const))))
    return err, 1e-10


def check_equilibrium() -> Tuple[float, float]:
    n = 16
    lattice = grid.LatticeSpec.from_side(n, n)
    k = kernel.build_gaussian_kernel(kernel.KernelSpec(1.0, n, n))
    p = kinetics.ModelParams()
    s0 = integrator.seed(integrator.SeedSpec(mode="uniform"), lattice)
    err = 0.0
    for variant in integrator.VARIANTS:
        s = integrator.advance(s0, p, 1000, variant, k)
        err = max(err, float(jnp.max(jnp.abs(s.u - 1.0))), float(grid.sup_norm(s.v)))
    return err, 1e-13


def check_reaction_only() -> Tuple[float, float]:
    p = kinetics.ModelParams(d_u=0.0, d_v=0.0, dt=0.01)
    s0 = integrator.state_from_arrays(
        jnp.full((4, 4), 0.5), jnp.full((4, 4), 0.25), dt=p.dt
    )
    s = integrator.advance(s0, p, 1000, "local")
    u_ref, v_ref = kinetics.homogeneous_reference(0.5, 0.25, p, 1000 * p.dt)
    err = max(
        float(jnp.max(jnp.abs(s.u - u_ref))), float(jnp.max(jnp.abs(s.v - v_ref)))
    )
    return err, 1e-4


def check_stability_gate() -> Tuple[float, float]:
    passing = integrator.stability_check(kinetics.ModelParams(dt=1.0), "local")
    failing = integrator.stability_check(kinetics.ModelParams(dt=1.3), "local")
    return float(not passing.passed) + float(failing.passed), 0.0


def check_monitor_bounds() -> Tuple[float, float]:
    lattice = grid.LatticeSpec.from_side(200, 200)
    u0 = grid.field_constant(200, 200, 1.0)
    v0 = grid.field_constant(200, 200, 0.0)
    bounds = monitors.compute_bounds(u0, v0, kinetics.ModelParams(), lattice)
    return abs(bounds.mass_bound - 40000 / 0.0636) + abs(bounds.sup_bound - 1.0), 1e-9


def check_snapshot_roundtrip() -> Tuple[float, float]:
    rng = np.random.default_rng(4)
    s = integrator.state_from_arrays(rng.random((4, 5)), rng.random((4, 5)), 7, 0.5)
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "roundtrip.gsf")
        io.write_snapshot(s, path, 0.5)
        back = io.read_snapshot(path)
        size_ok = os.path.getsize(path) == io.snapshot_size(4, 5)
    same = (
        np.array_equal(np.asarray(s.u), np.asarray(back.u))
        and np.array_equal(np.asarray(s.v), np.asarray(back.v))
        and back.step == 7
        and size_ok
    )
    return float(not same), 0.0


CHECKS: List[Tuple[str, Callable[[], Tuple[float, float]]]] = [
    ("spectral_vs_direct", check_spectral_vs_direct),
    ("kernel_normalization", check_kernel_normalization),
    ("laplacian_symbol", check_laplacian_symbol),
    ("laplacian_vs_scipy", check_laplacian_vs_scipy),
    ("conservation", check_conservation),
    ("equilibrium", check_equilibrium),
    ("reaction_only", check_reaction_only),
    ("stability_gate", check_stability_gate),
    ("monitor_bounds", check_monitor_bounds),
    ("snapshot_roundtrip", check_snapshot_roundtrip),
]


def run_checks() -> List[CheckResult]:
    """
    Run every check.

    A check that raises is recorded as failed with an infinite error.

    Returns
    -------
    :
        One result per check, in a fixed order.
    """
    results = []
    for name, fn in CHECKS:
        try:
            error, tol = fn()
        except Exception:
            logger.exception("check %s raised", name)
            error, tol = float("inf"), 0.0
        result = CheckResult(name, error, tol)
        logger.info(
            "%-22s %s (error %.3g, tolerance %.3g)",
            name,
            "ok" if result.passed else "FAILED",
            error,
            tol,
        )
        results.append(result)
    return results
