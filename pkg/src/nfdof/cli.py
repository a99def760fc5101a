"""Command-line entry point.

    nfdof run <config.json> [--out DIR] [--seed U64] [--threads N]
    nfdof validate <config.json>
    nfdof version

Exit codes: 0 success, 2 invalid config, 3 numerical failure, 4 I/O failure.
The NFDOF_OUT environment variable overrides the output directory when
--out is not given.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .errors import (ActiveSetChangeError, ConfigError, ConvergenceError,
                     EigenSolverError, SingularGeometryError)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

_NUMERICAL_ERRORS = (ConvergenceError, EigenSolverError, ActiveSetChangeError,
                     SingularGeometryError, FloatingPointError,
                     np.linalg.LinAlgError)


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nfdof",
                                     description="Near-field MIMO DoF experiment runner")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment config")
    run.add_argument("config", help="path to the experiment JSON document")
    run.add_argument("--out", default=None, help="output directory")
    run.add_argument("--seed", type=int, default=None, help="override the config seed")
    run.add_argument("--threads", type=int, default=1,
                     help="worker threads for grid evaluation (output-invariant)")

    val = sub.add_parser("validate", help="validate a config without running it")
    val.add_argument("config", help="path to the experiment JSON document")

    sub.add_parser("version", help="print the toolkit version")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "version":
        print(__version__)
        return EXIT_OK
    # imported lazily so `nfdof version` stays instant
    from .experiments import run_experiment, validate_config
    try:
        cfg = _load_config(args.config)
        if args.command == "validate":
            validate_config(cfg)
            print(f"{args.config}: valid {cfg['experiment']} experiment")
            return EXIT_OK
        tables = run_experiment(cfg, out_dir=args.out, seed=args.seed,
                                threads=args.threads)
        for table in tables:
            print(f"wrote {table.name}.csv ({len(table.rows)} rows)")
        return EXIT_OK
    except ConfigError as exc:
        print(f"error: invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _NUMERICAL_ERRORS as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
