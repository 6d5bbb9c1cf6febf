"""Subcommand implementations; each module registers its parsers on the CLI."""

from . import build, demo, execute, report

COMMAND_MODULES = (build, execute, report, demo)

__all__ = ["COMMAND_MODULES"]
