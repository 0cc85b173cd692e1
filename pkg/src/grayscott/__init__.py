#!/usr/bin/env python3
import jax

# float64 fields throughout
jax.config.update("jax_enable_x64", True)

__version__ = "0.1.0"

from . import (  # noqa: E402
    base_class,
    bench,
    check,
    config,
    exceptions,
    grid,
    integrator,
    io,
    kernel,
    kinetics,
    monitors,
    operators,
    simulation,
    validation,
)
