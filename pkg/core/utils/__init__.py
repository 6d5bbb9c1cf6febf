"""Report formatting helpers."""

from .formatters import SCENARIO_HEADER, ReportFormatter

__all__ = ["ReportFormatter", "SCENARIO_HEADER"]
