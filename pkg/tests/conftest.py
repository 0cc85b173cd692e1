"""
Testing configurations for the grayscott library.

This module contains test fixtures required to set up and verify the functionality
of the modules of the grayscott library.

Note:
    Long acceptance runs carry the ``slow`` marker and only run with ``--runslow``.
"""

import jax.numpy as jnp
import numpy as np
import pytest

import grayscott as gs


def pytest_addoption(parser):
    parser.addoption(
        "--runslow", action="store_true", default=False, help="run slow tests"
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="need --runslow option to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(123)


@pytest.fixture
def published_params():
    """Published model parameters on a unit lattice."""
    return gs.kinetics.ModelParams(f=0.04, kappa=0.0636, d_u=1.0, d_v=0.5, dt=1.0)


@pytest.fixture
def small_lattice():
    return gs.grid.LatticeSpec.from_side(16, 16)


@pytest.fixture
def small_kernel():
    """Unit-mass Gaussian kernel with epsilon = 1 on a 16x16 grid."""
    return gs.kernel.build_gaussian_kernel(gs.kernel.KernelSpec(1.0, 16, 16))


@pytest.fixture
def random_state(rng):
    """Nonnegative 16x16 state with entries in [0, 1)."""
    return gs.integrator.state_from_arrays(rng.random((16, 16)), rng.random((16, 16)))


@pytest.fixture
def seeded_state(small_lattice):
    """16x16 state with a centered 4x4 block, no noise."""
    spec = gs.integrator.SeedSpec(mode="center-square", block_side=4)
    return gs.integrator.seed(spec, small_lattice)


@pytest.fixture
def equilibrium_state():
    return gs.integrator.SimState(
        jnp.ones((16, 16), dtype=jnp.float64), jnp.zeros((16, 16), dtype=jnp.float64)
    )


@pytest.fixture
def small_config(tmp_path):
    """Quick mixed run on a 16x16 grid writing into a temporary directory."""
    text = "\n".join(
        [
            "variant = mixed",
            "L = 16",
            "n = 16",
            "block_side = 4",
            "t_end = 20",
            "report_every = 5",
            "snapshot_every = 10",
            f"output_dir = {tmp_path / 'run'}",
        ]
    )
    return gs.config.parse_config(text)
