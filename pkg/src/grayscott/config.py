"""Run configuration and its flat ``key = value`` text format.

A configuration file holds one ``key = value`` pair per line. Everything after
a ``#`` is a comment and blank lines are ignored. Missing keys take the
defaults below, which reproduce the published experiment:

=================  ========================  =====================================
key                default                   meaning
=================  ========================  =====================================
variant            ``local``                 ``local``, ``mixed`` or ``reversed``
L                  ``200.0``                 domain side length
n                  ``200``                   grid points per coordinate
f                  ``0.04``                  feed rate
kappa              ``0.0636``                kill rate, ``> 0``
d_u                ``1.0``                   diffusivity of ``u``
d_v                ``0.5``                   diffusivity of ``v``
dt                 ``1.0``                   time step
epsilon            ``1.0``                   kernel standard deviation
seed_mode          ``center-square-noise``   initial condition recipe
block_side         ``20``                    side of the seeded block, in cells
u_in               ``0.5``                   ``u`` inside the block
v_in               ``0.25``                  ``v`` inside the block
noise_amplitude    ``0.02``                  block noise amplitude
rng_seed           ``0``                     block noise seed
t_end              ``100000.0``              final time
report_every       ``1000``                  steps between invariant reports
snapshot_every     ``0``                     steps between snapshots, 0 = final only
output_dir         ``output``                run directory
emit_images        ``false``                 also write PGM images of the snapshots
waive_stability    ``false``                 run even if the stability check fails
=================  ========================  =====================================
"""

import difflib
import logging
import os
from typing import Any, Callable, Dict, Optional, Tuple, Union

from . import grid, integrator, kernel, kinetics, validation
from .base_class import Base
from .exceptions import ConfigError, DimensionError, ParameterError

logger = logging.getLogger(__name__)

_TRUE = ("true", "yes", "on", "1")
_FALSE = ("false", "no", "off", "0")

DEFAULT_L = 200.0
DEFAULT_N = 200
DEFAULT_EPSILON = 1.0
DEFAULT_T_END = 100000.0
DEFAULT_REPORT_EVERY = 1000
DEFAULT_OUTPUT_DIR = "output"

# flat key -> nested ``set_params`` key of :class:`SimConfig`
NESTED_KEYS = {
    "f": "params__f",
    "kappa": "params__kappa",
    "d_u": "params__d_u",
    "d_v": "params__d_v",
    "dt": "params__dt",
    "epsilon": "kernel__epsilon",
    "seed_mode": "seed__mode",
    "block_side": "seed__block_side",
    "u_in": "seed__u_in",
    "v_in": "seed__v_in",
    "noise_amplitude": "seed__noise_amplitude",
    "rng_seed": "seed__rng_seed",
}

# keys a parameter sweep may vary
SWEEPABLE_KEYS = (
    "f",
    "kappa",
    "d_u",
    "d_v",
    "dt",
    "epsilon",
    "u_in",
    "v_in",
    "noise_amplitude",
    "t_end",
)


def _to_bool(text: str) -> bool:
    low = text.lower()
    if low in _TRUE:
        return True
    if low in _FALSE:
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _to_int(text: str) -> int:
    value = float(text)
    if not value.is_integer():
        raise ValueError(f"expected an integer, got {text!r}")
    return int(value)


def _to_str(text: str) -> str:
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "'\"":
        return text[1:-1]
    return text


def _choice(options: Tuple[str, ...]) -> Callable[[str], str]:
    def parse(text: str) -> str:
        text = _to_str(text)
        if text not in options:
            raise ValueError(f"expected one of {options}, got {text!r}")
        return text

    return parse


def _positive(strict: bool) -> Callable[[str, Any], None]:
    def check(key: str, value: Any):
        validation.check_positive(value, key, strict=strict)

    return check


def _at_least_one(key: str, value: int):
    if value < 1:
        raise ParameterError(f"`{key}` must be >= 1. Got {value}.")


def _no_check(key: str, value: Any):
    pass


# key -> (default, converter, range check)
KEYS: Dict[str, Tuple[Any, Callable[[str], Any], Callable[[str, Any], None]]] = {
    "variant": ("local", _choice(integrator.VARIANTS), _no_check),
    "L": (DEFAULT_L, float, _positive(True)),
    "n": (DEFAULT_N, _to_int, _at_least_one),
    "f": (kinetics.ModelParams().f, float, _positive(False)),
    "kappa": (kinetics.ModelParams().kappa, float, _positive(True)),
    "d_u": (kinetics.ModelParams().d_u, float, _positive(False)),
    "d_v": (kinetics.ModelParams().d_v, float, _positive(False)),
    "dt": (kinetics.ModelParams().dt, float, _positive(True)),
    "epsilon": (DEFAULT_EPSILON, float, _positive(True)),
    "seed_mode": (
        integrator.SeedSpec().mode,
        _choice(integrator.SEED_MODES),
        _no_check,
    ),
    "block_side": (integrator.SeedSpec().block_side, _to_int, _positive(False)),
    "u_in": (integrator.SeedSpec().u_in, float, _positive(False)),
    "v_in": (integrator.SeedSpec().v_in, float, _positive(False)),
    "noise_amplitude": (
        integrator.SeedSpec().noise_amplitude,
        float,
        _positive(False),
    ),
    "rng_seed": (integrator.SeedSpec().rng_seed, _to_int, _positive(False)),
    "t_end": (DEFAULT_T_END, float, _positive(False)),
    "report_every": (DEFAULT_REPORT_EVERY, _to_int, _at_least_one),
    "snapshot_every": (0, _to_int, _positive(False)),
    "output_dir": (DEFAULT_OUTPUT_DIR, _to_str, _no_check),
    "emit_images": (False, _to_bool, _no_check),
    "waive_stability": (False, _to_bool, _no_check),
}


class SimConfig(Base):
    """Complete description of a simulation run.

    Parameters
    ----------
    variant :
        ``"local"``, ``"mixed"`` or ``"reversed"``.
    lattice :
        The periodic lattice. Defaults to ``200`` points on ``[0, 200)^2``.
    params :
        Model parameters; ``params.h`` must equal ``lattice.h``. Defaults to the
        published experiment on ``lattice``.
    kernel :
        Kernel parameters; required by the nonlocal variants. A local run
        with a kernel also audits the conservation of Gamma.
    seed :
        Initial condition recipe.
    t_end :
        Final time; the run takes ``round(t_end / dt)`` steps.
    report_every :
        Steps between invariant reports.
    snapshot_every :
        Steps between snapshots; 0 writes the final state only.
    output_dir :
        Directory receiving snapshots, images and the invariant CSV.
    emit_images :
        Also write ``u`` and ``v`` as PGM images at each snapshot.
    waive_stability :
        Run even if the linear stability check fails.

    Examples
    --------
    >>> from grayscott.config import SimConfig
    >>> cfg = SimConfig(variant="mixed").set_params(params__f=0.03)
    >>> cfg.params.f
    0.03
    """

    def __init__(
        self,
        variant: integrator.ModelVariant = "local",
        lattice: Optional[grid.LatticeSpec] = None,
        params: Optional[kinetics.ModelParams] = None,
        kernel: Optional[kernel.KernelSpec] = None,
        seed: Optional[integrator.SeedSpec] = None,
        t_end: float = DEFAULT_T_END,
        report_every: int = DEFAULT_REPORT_EVERY,
        snapshot_every: int = 0,
        output_dir: Union[str, os.PathLike] = DEFAULT_OUTPUT_DIR,
        emit_images: bool = False,
        waive_stability: bool = False,
    ):
        self.variant = variant
        self.lattice = (
            lattice if lattice is not None else grid.LatticeSpec.from_side(DEFAULT_L, DEFAULT_N)
        )
        self.params = (
            params if params is not None else kinetics.ModelParams(h=self.lattice.h)
        )
        if kernel is None and variant != "local":
            kernel = _kernel_spec(DEFAULT_EPSILON, self.lattice)
        self.kernel = kernel
        self.seed = seed if seed is not None else integrator.SeedSpec()
        self.t_end = t_end
        self.report_every = report_every
        self.snapshot_every = snapshot_every
        self.output_dir = output_dir
        self.emit_images = emit_images
        self.waive_stability = waive_stability

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.get_params(deep=False).items())
        return f"{self.__class__.__name__}({args})"

    def __eq__(self, other):
        if not isinstance(other, SimConfig):
            return NotImplemented
        return self.get_params(deep=False) == other.get_params(deep=False)

    @property
    def n_steps(self) -> int:
        """Number of time steps of the run."""
        return int(round(self.t_end / self.params.dt))

    def validate(self):
        """
        Check the configuration as a whole.

        Raises
        ------
        ParameterError
            If a parameter is out of range or the components disagree.
        DimensionError
            If the lattice is invalid.
        """
        integrator.check_variant(self.variant, self.kernel)
        self.lattice.validate()
        self.params.validate()
        if self.params.h != self.lattice.h:
            raise ParameterError(
                f"Model spacing h={self.params.h} does not match the lattice spacing {self.lattice.h}."
            )
        if self.kernel is not None:
            validation.check_positive(self.kernel.epsilon, "epsilon")
            if (self.kernel.nx, self.kernel.ny) != self.lattice.shape:
                raise DimensionError(
                    f"Kernel grid {self.kernel.nx}x{self.kernel.ny} does not match "
                    f"the lattice {self.lattice.n}x{self.lattice.n}."
                )
            if self.kernel.h != self.lattice.h:
                raise ParameterError(
                    f"Kernel spacing h={self.kernel.h} does not match the lattice spacing {self.lattice.h}."
                )
        self.seed.validate(*self.lattice.shape)
        validation.check_positive(self.t_end, "t_end", strict=False)
        _at_least_one("report_every", self.report_every)
        validation.check_positive(self.snapshot_every, "snapshot_every", strict=False)

    def build_kernel(self) -> Optional[kernel.DiscreteKernel]:
        """Realize the kernel on the lattice, or return None if the run has none."""
        if self.kernel is None:
            return None
        return kernel.build_gaussian_kernel(self.kernel)

    def to_flat(self) -> Dict[str, Any]:
        """Flat ``key -> value`` view of the configuration, in file order."""
        flat = {
            "variant": self.variant,
            "L": self.lattice.L,
            "n": self.lattice.n,
            "f": self.params.f,
            "kappa": self.params.kappa,
            "d_u": self.params.d_u,
            "d_v": self.params.d_v,
            "dt": self.params.dt,
            "epsilon": None if self.kernel is None else self.kernel.epsilon,
            "seed_mode": self.seed.mode,
            "block_side": self.seed.block_side,
            "u_in": self.seed.u_in,
            "v_in": self.seed.v_in,
            "noise_amplitude": self.seed.noise_amplitude,
            "rng_seed": self.seed.rng_seed,
            "t_end": self.t_end,
            "report_every": self.report_every,
            "snapshot_every": self.snapshot_every,
            "output_dir": os.fspath(self.output_dir),
            "emit_images": self.emit_images,
            "waive_stability": self.waive_stability,
        }
        return {k: v for k, v in flat.items() if v is not None}

    def to_text(self) -> str:
        """Serialize to the ``key = value`` format read by :func:`parse_config`."""
        lines = []
        for key, value in self.to_flat().items():
            if isinstance(value, bool):
                value = "true" if value else "false"
            elif isinstance(value, float):
                value = repr(value)
            lines.append(f"{key} = {value}")
        return "\n".join(lines) + "\n"

    def update(self, **flat: Any) -> "SimConfig":
        """
        Set parameters by their flat file keys.

        Parameters
        ----------
        **flat :
            Flat keys such as ``f`` or ``epsilon``. The lattice cannot be
            changed this way.

        Returns
        -------
        :
            The updated instance.

        Raises
        ------
        ValueError
            If a key is unknown or addresses the lattice.
        """
        nested = {}
        for key, value in flat.items():
            if key in ("L", "n"):
                raise ValueError(f"The lattice cannot be updated in place (key {key!r}).")
            if key == "epsilon" and self.kernel is None:
                self.kernel = _kernel_spec(value, self.lattice)
                continue
            nested[NESTED_KEYS.get(key, key)] = value
        return self.set_params(**nested)


def _kernel_spec(epsilon: float, lattice: grid.LatticeSpec) -> kernel.KernelSpec:
    return kernel.KernelSpec(epsilon, lattice.n, lattice.n, lattice.h)


def _suggest(key: str) -> str:
    close = difflib.get_close_matches(key, list(KEYS), n=1)
    return f" Did you mean {close[0]!r}?" if close else ""


def parse_config(text: str) -> SimConfig:
    """
    Parse the flat ``key = value`` configuration format.

    Parameters
    ----------
    text :
        Configuration text.

    Returns
    -------
    :
        The validated configuration. Missing keys take the published defaults;
        the kernel is always realized, so local runs audit Gamma too.

    Raises
    ------
    ConfigError
        On a malformed line (with ``line``), an unknown key (with ``key`` and
        a suggestion), or an out-of-range value (with ``key``).

    Examples
    --------
    >>> from grayscott.config import parse_config
    >>> cfg = parse_config("variant = mixed  # nonlocal u")
    >>> cfg.variant, cfg.kernel.epsilon, cfg.params.kappa
    ('mixed', 1.0, 0.0636)
    """
    values: Dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key or not value or any(c.isspace() for c in key):
            raise ConfigError(
                f"Line {lineno}: expected `key = value`, got {raw.strip()!r}.",
                line=lineno,
            )
        if key not in KEYS:
            raise ConfigError(
                f"Line {lineno}: unknown key {key!r}.{_suggest(key)}",
                line=lineno,
                key=key,
            )
        if key in values:
            raise ConfigError(
                f"Line {lineno}: duplicate key {key!r}.", line=lineno, key=key
            )
        _, convert, check = KEYS[key]
        try:
            parsed = convert(value)
            check(key, parsed)
        except (ValueError, TypeError) as e:
            raise ConfigError(
                f"Line {lineno}: invalid value for {key!r}: {e}", line=lineno, key=key
            ) from e
        values[key] = parsed

    flat = {key: values.get(key, default) for key, (default, _, _) in KEYS.items()}
    config = _from_flat(flat)
    logger.debug("parsed configuration %r", config)
    return config


def _from_flat(flat: Dict[str, Any]) -> SimConfig:
    try:
        lattice = grid.LatticeSpec.from_side(flat["L"], flat["n"])
    except (ParameterError, DimensionError) as e:
        raise ConfigError(str(e), key="n") from e
    params = kinetics.ModelParams(
        f=flat["f"],
        kappa=flat["kappa"],
        d_u=flat["d_u"],
        d_v=flat["d_v"],
        dt=flat["dt"],
        h=lattice.h,
    )
    seed = integrator.SeedSpec(
        mode=flat["seed_mode"],
        block_side=flat["block_side"],
        u_in=flat["u_in"],
        v_in=flat["v_in"],
        noise_amplitude=flat["noise_amplitude"],
        rng_seed=flat["rng_seed"],
    )
    config = SimConfig(
        variant=flat["variant"],
        lattice=lattice,
        params=params,
        kernel=_kernel_spec(flat["epsilon"], lattice),
        seed=seed,
        t_end=flat["t_end"],
        report_every=flat["report_every"],
        snapshot_every=flat["snapshot_every"],
        output_dir=flat["output_dir"],
        emit_images=flat["emit_images"],
        waive_stability=flat["waive_stability"],
    )
    try:
        config.validate()
    except ParameterError as e:
        # the only cross-key check left is the seeded block against the grid
        raise ConfigError(str(e), key="block_side") from e
    return config


def load_config(path: Union[str, os.PathLike]) -> SimConfig:
    """Read and parse a configuration file."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
