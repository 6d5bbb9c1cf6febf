"""Formatters for reports: scenario tables, distributions, CSV rows and run summaries."""

import csv
import io
from typing import Any, Mapping, Optional, Sequence

from ..models.dispatch import DispatchStats
from ..models.plan import PartitionPlan
from ..models.profile import ScenarioRow

SCENARIO_HEADER = ["scenario", "rt_sw", "tp_sw", "tp_hw", "tp_est", "speedup", "accounting"]


class ReportFormatter:
    """Plain-text and CSV renderings of spanforge results."""

    @staticmethod
    def csv_text(header: Sequence[str], rows: Sequence[Mapping[str, Any]]) -> str:
        """CSV with a fixed column order; extra keys in ``rows`` are dropped."""
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=list(header), extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
        return buffer.getvalue()

    @staticmethod
    def scenario_csv(rows: Sequence[ScenarioRow], with_doc_size: bool = False) -> str:
        header = SCENARIO_HEADER + (["doc_size"] if with_doc_size else [])
        return ReportFormatter.csv_text(header, [row.to_dict() for row in rows])

    @staticmethod
    def scenario_table(rows: Sequence[ScenarioRow]) -> str:
        """Aligned table for the terminal, one line per scenario and size."""
        lines = [
            f"{'scenario':>8}  {'doc_size':>8}  {'rt_sw':>6}  {'tp_sw MB/s':>10}  "
            f"{'tp_hw MB/s':>10}  {'tp_est MB/s':>11}  {'speedup':>8}  accounting"
        ]
        for row in rows:
            line = (
                f"{row.scenario:>8}  {row.doc_size:>8}  {row.rt_sw:>6.3f}  {row.tp_sw / 1e6:>10.2f}  "
                f"{row.tp_hw / 1e6:>10.2f}  {row.tp_est / 1e6:>11.2f}  {row.speedup:>7.2f}x  "
                f"{row.accounting.value}"
            )
            if row.note:
                line += f" ({row.note})"
            lines.append(line)
        return "\n".join(lines)

    @staticmethod
    def distribution_table(distribution: Mapping[str, float], title: str = "kind") -> str:
        width = max([len(title)] + [len(k) for k in distribution])
        lines = [f"{title:<{width}}  fraction"]
        for kind, fraction in sorted(distribution.items(), key=lambda item: -item[1]):
            lines.append(f"{kind:<{width}}  {fraction:>8.3f}")
        return "\n".join(lines)

    @staticmethod
    def plan_summary(plan: PartitionPlan) -> str:
        label = f"scenario {plan.scenario}" if plan.scenario else "custom plan"
        lines = [f"{label}: {len(plan.subgraphs)} accelerated subgraph(s), "
                 f"{len(plan.offloaded_nodes())} node(s) offloaded"]
        for subgraph in plan.subgraphs:
            lines.append(
                f"  subgraph {subgraph.id} (call node {subgraph.call_node}): nodes {subgraph.node_ids}, "
                f"{len(subgraph.inputs)} input(s), {len(subgraph.outputs)} output(s)"
            )
        return "\n".join(lines)

    @staticmethod
    def dispatch_summary(stats: DispatchStats, clock_hz: Optional[float] = None) -> str:
        if not stats.packages:
            return "dispatch: no packages (software-only run)"
        reasons = ", ".join(f"{reason}={count}" for reason, count in sorted(stats.reasons.items()))
        summary = (
            f"dispatch: {stats.packages} package(s), {stats.entries} document call(s), "
            f"{stats.wakeups} wake-up(s), reasons [{reasons}], {stats.cycles} accelerator cycle(s)"
        )
        if clock_hz and stats.makespan_cycles:
            summary += f", simulated {stats.simulated_throughput(clock_hz) / 1e6:.2f} MB/s"
        return summary
