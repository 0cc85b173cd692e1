"""Run driver and parameter sweeps.

A run seeds the initial condition, gates on the stability check, advances the
state between checkpoints with :func:`grayscott.integrator.advance`, audits it,
and writes into ``output_dir``:

- ``invariants.csv``, one row per report;
- ``snapshot_<step>.gsf`` at each snapshot step;
- ``u_<step>.pgm`` and ``v_<step>.pgm`` if images are requested.
"""

import copy
import csv
import itertools
import logging
import os
from typing import Dict, List, NamedTuple, Sequence

import numpy as np

from . import integrator, io, monitors
from .config import SWEEPABLE_KEYS, SimConfig
from .exceptions import DivergenceError, ParameterError

logger = logging.getLogger(__name__)

REPORT_FILE = "invariants.csv"
MANIFEST_FILE = "manifest.csv"
DIVERGENCE = "divergence"

# gray-level windows of the exported images
U_WINDOW = (0.0, 1.0)
V_WINDOW = (0.0, 0.5)


class RunResult(NamedTuple):
    """Outcome of a completed run.

    Parameters
    ----------
    state :
        Final state.
    reports :
        Every invariant report, in step order.
    """

    state: integrator.SimState
    reports: List[monitors.InvariantReport]

    @property
    def has_violations(self) -> bool:
        return any(r.has_violations for r in self.reports)


class SweepCell(NamedTuple):
    """One point of a parameter sweep and how its run ended."""

    index: int
    values: Dict[str, float]
    output_dir: str
    status: str
    final_step: int


def snapshot_path(output_dir, step: int) -> str:
    return os.path.join(output_dir, f"snapshot_{step:08d}.gsf")


def checkpoint_steps(n_steps: int, report_every: int, snapshot_every: int):
    """
    Steps at which a run reports and writes snapshots.

    Reports happen at step 0, every ``report_every`` steps and at the final
    step. Snapshots happen every ``snapshot_every`` steps starting at 0 and at
    the final step, or at the final step only when ``snapshot_every`` is 0.

    Returns
    -------
    report_steps, snapshot_steps :
        Sorted lists without duplicates.
    """
    report_steps = set(range(0, n_steps + 1, report_every)) | {n_steps}
    if snapshot_every > 0:
        snapshot_steps = set(range(0, n_steps + 1, snapshot_every)) | {n_steps}
    else:
        snapshot_steps = {n_steps}
    return sorted(report_steps), sorted(snapshot_steps)


def _write_outputs(s: integrator.SimState, config: SimConfig):
    io.write_snapshot(s, snapshot_path(config.output_dir, s.step), config.params.dt)
    if config.emit_images:
        io.export_image(
            s.u, os.path.join(config.output_dir, f"u_{s.step:08d}.pgm"), *U_WINDOW
        )
        io.export_image(
            s.v, os.path.join(config.output_dir, f"v_{s.step:08d}.pgm"), *V_WINDOW
        )


def run(config: SimConfig) -> RunResult:
    """
    Simulate a configuration and write its outputs.

    Parameters
    ----------
    config :
        The run configuration.

    Returns
    -------
    :
        The final state and every invariant report.

    Raises
    ------
    ParameterError
        If the configuration is invalid or the stability check fails without
        a waiver.
    DivergenceError
        If the trajectory diverges. The last good state has been written as a
        snapshot and a report carrying the ``divergence`` violation has been
        appended before the exception propagates.
    """
    config.validate()
    p, lattice, variant = config.params, config.lattice, config.variant
    k = config.build_kernel()
    s = integrator.seed(config.seed, lattice)
    bounds = monitors.compute_bounds(s.u, s.v, p, lattice)
    stability = integrator.stability_check(p, variant, k, s)
    integrator.warn_if_unstable(stability, config.waive_stability)

    n_steps = config.n_steps
    report_steps, snapshot_steps = checkpoint_steps(
        n_steps, config.report_every, config.snapshot_every
    )
    report_set, snapshot_set = set(report_steps), set(snapshot_steps)
    os.makedirs(config.output_dir, exist_ok=True)
    logger.info(
        "%s run on %dx%d for %d steps, output in %s",
        variant,
        lattice.n,
        lattice.n,
        n_steps,
        config.output_dir,
    )

    reports = []
    with open(os.path.join(config.output_dir, REPORT_FILE), "w", newline="") as sink:
        for target in sorted(report_set | snapshot_set):
            try:
                s = integrator.advance(s, p, target - s.step, variant, k)
            except DivergenceError as e:
                last_good = e.state
                _write_outputs(last_good, config)
                r = monitors.audit(last_good, bounds, p, lattice, variant, k)
                r = r._replace(violations=r.violations + [DIVERGENCE])
                monitors.write_report_row(r, sink)
                logger.error("divergence at step %d", e.step)
                raise
            if target in report_set:
                r = monitors.audit(s, bounds, p, lattice, variant, k)
                monitors.write_report_row(r, sink)
                reports.append(r)
                logger.info(
                    "step %d: sup_u=%.6g total_mass=%.10g",
                    r.step,
                    r.sup_u,
                    r.total_mass,
                )
            if target in snapshot_set:
                _write_outputs(s, config)
    return RunResult(s, reports)


def parse_param_range(text: str):
    """
    Parse a sweep range ``key=start:stop:count``.

    Parameters
    ----------
    text :
        For example ``"f=0.02:0.06:5"``.

    Returns
    -------
    key, values :
        The flat key and ``count`` evenly spaced values from ``start`` to
        ``stop`` inclusive.

    Raises
    ------
    ParameterError
        If the text is malformed, the key cannot be swept or ``count < 1``.
    """
    key, sep, spec = text.partition("=")
    key = key.strip()
    parts = spec.split(":")
    if not sep or len(parts) != 3:
        raise ParameterError(
            f"Sweep parameters have the form key=start:stop:count. Got {text!r}."
        )
    if key not in SWEEPABLE_KEYS:
        raise ParameterError(
            f"Cannot sweep {key!r}. Sweepable keys are {SWEEPABLE_KEYS}."
        )
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ParameterError(f"Invalid numbers in sweep range {text!r}.")
    if count < 1:
        raise ParameterError(f"Sweep count must be >= 1. Got {count}.")
    return key, [float(x) for x in np.linspace(start, stop, count)]


def sweep(config: SimConfig, ranges: Dict[str, Sequence[float]]) -> List[SweepCell]:
    """
    Run every point of the Cartesian product of parameter ranges.

    Cell ``i`` writes to ``<output_dir>/cell_<i>``; ``<output_dir>/manifest.csv``
    lists the parameter values, the final status and the last step reached by
    every cell. The status is ``clean``, ``violation``, ``divergence``, or
    ``rejected`` when the cell fails validation or the stability gate. A
    failing cell never stops the sweep.

    Parameters
    ----------
    config :
        Base configuration; it is not modified.
    ranges :
        Flat key to the values it takes.

    Returns
    -------
    :
        One record per cell, in manifest order.
    """
    keys = list(ranges)
    os.makedirs(config.output_dir, exist_ok=True)
    cells = []
    for index, combo in enumerate(itertools.product(*(ranges[k] for k in keys))):
        values = dict(zip(keys, combo))
        cell_dir = os.path.join(config.output_dir, f"cell_{index:03d}")
        cell_config = copy.deepcopy(config).update(**values)
        cell_config.output_dir = cell_dir
        try:
            result = run(cell_config)
            status = "violation" if result.has_violations else "clean"
            final_step = result.state.step
        except DivergenceError as e:
            status, final_step = DIVERGENCE, e.step
        except ParameterError as e:
            logger.warning("cell %d skipped: %s", index, e)
            status, final_step = "rejected", 0
        logger.info("cell %d %s: %s", index, values, status)
        cells.append(SweepCell(index, values, cell_dir, status, final_step))

    with open(os.path.join(config.output_dir, MANIFEST_FILE), "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["cell", *keys, "status", "final_step", "output_dir"])
        for c in cells:
            writer.writerow(
                [
                    c.index,
                    *(format(c.values[k], ".17g") for k in keys),
                    c.status,
                    c.final_step,
                    c.output_dir,
                ]
            )
    return cells
