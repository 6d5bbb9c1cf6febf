"""
spanforge command line.

Subcommands: compile, partition, run, profile, estimate, model, scan, demo.
Exit codes: 0 on success, 1 for bad input (queries, graphs, corpora,
configuration, usage), 2 when an internal invariant is violated.
Diagnostics go to stderr; data goes to files or stdout.
"""

import argparse
import sys
from typing import Any, Dict, List, Optional

from loguru import logger

from core.exceptions import InvariantViolation, UserInputError

from .commands import COMMAND_MODULES
from .config import load_run_config

EXIT_OK = 0
EXIT_USER_ERROR = 1
EXIT_INTERNAL_ERROR = 2

LOG_FORMAT = "<green>{time:HH:mm:ss.SSS}</green> | <level>{level: <8}</level> | {message}"


class _ArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with 1 like every other user error."""

    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USER_ERROR, f"{self.prog}: error: {message}\n")


def configure_logging(level: str = "INFO") -> None:
    logger.remove()
    logger.add(sys.stderr, level=level, format=LOG_FORMAT)


def _common_options() -> argparse.ArgumentParser:
    common = _ArgumentParser(add_help=False)
    group = common.add_argument_group("configuration")
    group.add_argument("--config", help="TOML settings file")
    group.add_argument("--log-level", help="DEBUG, INFO, WARNING, ERROR or CRITICAL")
    group.add_argument("--threads", type=int, help="Worker threads")
    group.add_argument("--caps", help="Accelerator capability preset or JSON file")
    group.add_argument("--byte-threshold", type=int, help="Package byte threshold")
    group.add_argument("--max-docs", "--max-docs-per-package", dest="max_docs_per_package", type=int,
                       help="Package document cap")
    group.add_argument("--flush-us", "--flush-timeout-us", dest="flush_timeout_us", type=float,
                       help="Package flush timeout in microseconds")
    group.add_argument("--lanes", type=int, help="Accelerator document lanes")
    group.add_argument("--clock", dest="clock_hz", type=float, help="Accelerator clock in Hz")
    group.add_argument("--peak-bw", dest="peak_bandwidth", type=float, help="Peak link bandwidth in bytes/sec")
    group.add_argument("--package-rate", type=float, help="Dispatchable packages per second")
    group.add_argument("--subgraph-node-cap", type=int, help="Maximum nodes per accelerated subgraph")
    return common


CONFIG_FLAGS = (
    "log_level",
    "threads",
    "caps",
    "byte_threshold",
    "max_docs_per_package",
    "flush_timeout_us",
    "lanes",
    "clock_hz",
    "peak_bandwidth",
    "package_rate",
    "subgraph_node_cap",
)


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="spanforge", description="Rule-based text analytics with offload planning.")
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    common = _common_options()
    for module in COMMAND_MODULES:
        module.register(subparsers, common)
    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    return {name: getattr(args, name, None) for name in CONFIG_FLAGS}


def main(argv: Optional[List[str]] = None) -> int:
    configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USER_ERROR

    try:
        config = load_run_config(args.config, _overrides(args))
        configure_logging(config.log_level)
        return args.func(args, config)
    except (UserInputError, OSError) as exc:
        logger.error(f"{args.command} failed: {exc}")
        return EXIT_USER_ERROR
    except InvariantViolation as exc:
        logger.error(f"{args.command} aborted, internal invariant violated: {exc}")
        return EXIT_INTERNAL_ERROR
    except Exception:
        logger.exception(f"{args.command} aborted by an unexpected error")
        return EXIT_INTERNAL_ERROR


def run() -> None:
    """Console-script entry point."""
    sys.exit(main())


if __name__ == "__main__":
    run()
