"""Timing of the convolution paths and of the time steppers.

The direct convolution is quartic in the side length and the spectral one is
``O(N^2 log N)``; :func:`bench_convolutions` measures both on the same fields so
that the scaling can be read off the CSV.
"""

import csv
import logging
import time
from typing import Callable, Iterable, List, NamedTuple, Sequence, TextIO

import jax
import jax.numpy as jnp
import numpy as np

from . import integrator, kernel
from .config import SimConfig

logger = logging.getLogger(__name__)

BENCH_SIZES = (16, 32, 64)
BENCH_HEADER = ("size", "op", "mean_ns", "reps")


class BenchRow(NamedTuple):
    """Mean wall time of one operation at one grid size."""

    size: int
    op: str
    mean_ns: float
    reps: int


def time_call(fn: Callable[[], jnp.ndarray], reps: int) -> float:
    """
    Mean wall time of ``fn`` in nanoseconds.

    One untimed call compiles and warms up; each timed call waits for the
    device result.
    """
    jax.block_until_ready(fn())
    total = 0
    for _ in range(reps):
        start = time.perf_counter_ns()
        jax.block_until_ready(fn())
        total += time.perf_counter_ns() - start
    return total / reps


def _random_field(n: int, rng: np.random.Generator) -> jnp.ndarray:
    return jnp.asarray(rng.random((n, n)))


def bench_convolutions(
    epsilon: float = 1.0,
    sizes: Sequence[int] = BENCH_SIZES,
    reps: int = 10,
    direct_reps: int = 3,
) -> List[BenchRow]:
    """
    Time the spectral and direct convolutions on random fields.

    Parameters
    ----------
    epsilon :
        Kernel standard deviation.
    sizes :
        Grid sides to measure.
    reps :
        Timed repetitions of the spectral path.
    direct_reps :
        Timed repetitions of the direct path.

    Returns
    -------
    :
        Rows with ops ``spectral`` and ``direct``.
    """
    rng = np.random.default_rng(0)
    rows = []
    for n in sizes:
        k = kernel.build_gaussian_kernel(kernel.KernelSpec(epsilon, n, n))
        f = _random_field(n, rng)
        mean = time_call(lambda: kernel.convolve_spectral(k, f), reps)
        rows.append(BenchRow(n, "spectral", mean, reps))
        mean = time_call(
            lambda: kernel.convolve_direct(k, f, allow_large=True), direct_reps
        )
        rows.append(BenchRow(n, "direct", mean, direct_reps))
        logger.info("size %d done", n)
    return rows


def bench_steps(config: SimConfig, n_steps: int = 100, reps: int = 3) -> List[BenchRow]:
    """
    Per-step cost of the local and mixed steppers on the configured lattice.

    Parameters
    ----------
    config :
        Supplies the lattice, the model parameters and the kernel width.
    n_steps :
        Steps per timed call of :func:`grayscott.integrator.advance`.
    reps :
        Timed repetitions.

    Returns
    -------
    :
        Rows with ops ``step_local`` and ``step_mixed``; ``mean_ns`` is per step.
    """
    lattice, p = config.lattice, config.params
    epsilon = config.kernel.epsilon if config.kernel is not None else 1.0
    k = kernel.build_gaussian_kernel(
        kernel.KernelSpec(epsilon, lattice.n, lattice.n, lattice.h)
    )
    s = integrator.seed(config.seed, lattice)
    rows = []
    for variant in ("local", "mixed"):
        mean = time_call(
            lambda: integrator.advance(s, p, n_steps, variant, k).u, reps
        )
        rows.append(BenchRow(lattice.n, f"step_{variant}", mean / n_steps, reps))
    return rows


def run_benchmarks(config: SimConfig) -> List[BenchRow]:
    """All benchmark rows for a configuration."""
    eps = config.kernel.epsilon if config.kernel is not None else 1.0
    return bench_convolutions(eps) + bench_steps(config)


def write_bench_csv(rows: Iterable[BenchRow], sink: TextIO):
    """Write benchmark rows as ``size,op,mean_ns,reps``."""
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(BENCH_HEADER)
    for r in rows:
        writer.writerow([r.size, r.op, format(r.mean_ns, ".1f"), r.reps])


def direct_scaling(rows: Iterable[BenchRow], small: int, large: int) -> float:
    """Ratio of the direct-path cost at two sizes; ``(large / small)^4`` in theory."""
    cost = {r.size: r.mean_ns for r in rows if r.op == "direct"}
    return cost[large] / cost[small]
