"""Command line interface.

::

    grayscott run CONFIG [--output-dir DIR]
    grayscott check
    grayscott bench CONFIG [--out FILE]
    grayscott sweep CONFIG --param f=0.02:0.06:5 [--param kappa=...] [--output-dir DIR]

Exit codes: 0 clean, 1 check failure, 2 invariant violation, 3 divergence,
64 usage error.
"""

import argparse
import logging
import sys
from typing import Optional, Sequence

from . import __version__, _logging, bench, check, simulation
from .config import load_config
from .exceptions import ConfigError, DivergenceError, ParameterError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_VIOLATION = 2
EXIT_DIVERGENCE = 3
EXIT_USAGE = 64


class UsageError(Exception):
    """Raised instead of exiting when the command line cannot be parsed."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="grayscott",
        description="Gray-Scott reaction-diffusion with local and nonlocal diffusion.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="Increase log verbosity (-v progress, -vv debug).",
    )
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p_run = sub.add_parser("run", help="Simulate a configuration.")
    p_run.add_argument("config", help="Configuration file.")
    p_run.add_argument("--output-dir", help="Override the configured output directory.")

    sub.add_parser("check", help="Run the property and oracle suite on small grids.")

    p_bench = sub.add_parser("bench", help="Time the convolutions and the steppers.")
    p_bench.add_argument("config", help="Configuration file.")
    p_bench.add_argument("--out", help="CSV destination (default: standard output).")

    p_sweep = sub.add_parser("sweep", help="Run a grid of parameter values.")
    p_sweep.add_argument("config", help="Configuration file.")
    p_sweep.add_argument(
        "--param",
        action="append",
        required=True,
        metavar="KEY=START:STOP:COUNT",
        help="Swept parameter; repeat for a Cartesian product.",
    )
    p_sweep.add_argument("--output-dir", help="Override the configured output directory.")
    return parser


def _cmd_run(args) -> int:
    config = load_config(args.config)
    if args.output_dir:
        config.output_dir = args.output_dir
    try:
        result = simulation.run(config)
    except DivergenceError as e:
        print(f"divergence: {e}", file=sys.stderr)
        return EXIT_DIVERGENCE
    if result.has_violations:
        bad = [r for r in result.reports if r.has_violations]
        print(
            f"invariant violations in {len(bad)} report(s), first at step {bad[0].step}: "
            f"{';'.join(bad[0].violations)}",
            file=sys.stderr,
        )
        return EXIT_VIOLATION
    return EXIT_OK


def _cmd_check(args) -> int:
    results = check.run_checks()
    for r in results:
        status = "ok" if r.passed else "FAILED"
        print(f"{r.name:<22} {status:<7} error={r.error:.3g} tolerance={r.tolerance:.3g}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK_FAILED


def _cmd_bench(args) -> int:
    config = load_config(args.config)
    rows = bench.run_benchmarks(config)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            bench.write_bench_csv(rows, fh)
    else:
        bench.write_bench_csv(rows, sys.stdout)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    config = load_config(args.config)
    if args.output_dir:
        config.output_dir = args.output_dir
    ranges = {}
    for text in args.param:
        key, values = simulation.parse_param_range(text)
        if key in ranges:
            raise ParameterError(f"Parameter {key!r} is swept twice.")
        ranges[key] = values
    cells = simulation.sweep(config, ranges)
    statuses = {c.status for c in cells}
    if simulation.DIVERGENCE in statuses:
        return EXIT_DIVERGENCE
    if statuses - {"clean"}:
        return EXIT_VIOLATION
    return EXIT_OK


COMMANDS = {
    "run": _cmd_run,
    "check": _cmd_check,
    "bench": _cmd_bench,
    "sweep": _cmd_sweep,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Entry point of the ``grayscott`` command.

    Parameters
    ----------
    argv :
        Arguments without the program name; defaults to ``sys.argv[1:]``.

    Returns
    -------
    :
        The process exit code.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE
    _logging.configure(args.verbose)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, ParameterError, OSError) as e:
        print(f"grayscott {args.command}: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
