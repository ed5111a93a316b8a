"""CLI entry point for czreach."""
import sys
import argparse
import logging
import os
from pathlib import Path

from .config import Config
from .errors import CzreachError
from . import cli


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Constrained-zonotope Pontryagin differences and robust controllable sets",
        prog="czreach",
    )
    parser.add_argument(
        "--verbose", "-v",
        action="store_true",
        help="Log at DEBUG level",
    )
    parser.add_argument(
        "--debug-full-dim",
        action="store_true",
        help="Check every RC set for full dimensionality (one extra LP per step)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pdiff", help="Pontryagin difference of two set files")
    p.add_argument("minuend", type=Path)
    p.add_argument("subtrahend", type=Path)
    p.add_argument("--mode", choices=cli.MODES, default="inner")
    p.add_argument("--out", type=Path, required=True, help="Result set JSON")

    p = sub.add_parser("rc", help="Robust controllable sets from a scenario config")
    p.add_argument("config", type=Path)
    p.add_argument("--out", type=Path, required=True, help="Output directory")
    p.add_argument("--directions", type=int, help="Boundary directions (default 100)")
    p.add_argument("--seed", type=int, help="Seed for the random model")

    p = sub.add_parser("bench-chain", help="Time the inner recursion on mass chains")
    p.add_argument("masses", help='e.g. "2..50" or "5,10"')
    p.add_argument("--horizon", "-T", type=int, default=20)
    p.add_argument("--out", type=Path, required=True, help="Output CSV")
    p.add_argument("--parallel", action="store_true", help="One process per chain size")

    p = sub.add_parser("oracle-compare", help="Area ratios against the exact planar RC set")
    p.add_argument("config", type=Path)
    p.add_argument("--out", type=Path, required=True, help="Output directory")
    p.add_argument("--directions", type=int)
    p.add_argument("--seed", type=int)
    return parser


def _run(args, config: Config) -> int:
    if args.command == "pdiff":
        return cli.cmd_pdiff(args.minuend, args.subtrahend, args.mode, args.out, config)
    if args.command == "rc":
        return cli.cmd_rc(args.config, args.out, args.directions, args.seed, config)
    if args.command == "bench-chain":
        return cli.cmd_bench_chain(cli.parse_mass_range(args.masses), args.horizon, args.out, args.parallel, config)
    return cli.cmd_oracle_compare(args.config, args.out, args.directions, args.seed, config)


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)

    # CLI args override env vars
    if args.verbose:
        os.environ["LOG_LEVEL"] = "DEBUG"
    if args.debug_full_dim:
        os.environ["CZREACH_DEBUG_FULL_DIM"] = "1"

    # Configure logging
    log_level = os.environ.get("LOG_LEVEL", "INFO").upper()
    logging.basicConfig(
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        level=getattr(logging, log_level, logging.INFO),
    )

    try:
        config = Config()
    except ValueError as e:
        print(f"Error: {e}", file=sys.stderr)
        return cli.EXIT_ERROR
    errors = config.validate()
    if errors:
        for e in errors:
            print(f"Error: {e}", file=sys.stderr)
        return cli.EXIT_ERROR

    try:
        return _run(args, config)
    except (CzreachError, OSError, ValueError) as e:
        logging.getLogger(__name__).debug("command failed", exc_info=True)
        print(f"Error: {e}", file=sys.stderr)
        return cli.EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
