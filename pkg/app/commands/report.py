"""
Report commands - scenario speedup estimates and the accelerator throughput model.
"""

import argparse
import json

from core.accel.cost_model import model_scan
from core.exceptions import UserInputError
from core.models.profile import ProfileReport
from core.partitioner import scenario_plans
from core.profiling import speedup_report
from core.utils import ReportFormatter

from ..config import RunConfig
from ..dependencies import get_capabilities, get_cost_model, load_graph_or_query, load_plan, read_text
from .build import emit

MODEL_DOC_SIZES = [64, 128, 256, 512, 1024, 2048, 4096]


def load_profile(path: str) -> ProfileReport:
    try:
        data = json.loads(read_text(path, "profile"))
    except json.JSONDecodeError as exc:
        raise UserInputError(f"malformed profile {path}: {exc}")
    return ProfileReport.from_dict(data)


def _estimate_command(args: argparse.Namespace, config: RunConfig) -> int:
    if args.plans:
        plans = [load_plan(path) for path in args.plans]
    elif args.graph:
        graph = load_graph_or_query(args.graph)
        plans = scenario_plans(graph, get_capabilities(config), config.subgraph_node_cap)
    else:
        raise UserInputError("estimate needs a graph or --plans")
    profile = load_profile(args.profile)
    rows = speedup_report(profile, plans, get_cost_model(config), args.doc_sizes, config.max_docs_per_package)
    if args.output:
        emit(ReportFormatter.scenario_csv(rows, with_doc_size=len(args.doc_sizes) > 1), args.output)
    print(ReportFormatter.scenario_table(rows))
    return 0


def _model_command(args: argparse.Namespace, config: RunConfig) -> int:
    rows = model_scan(get_cost_model(config), args.doc_sizes, config.max_docs_per_package)
    emit(ReportFormatter.csv_text(["doc_size", "throughput", "fraction_of_peak"], rows), args.output)
    return 0


def register(subparsers: argparse._SubParsersAction, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser(
        "estimate", parents=[common], help="Estimate system throughput and speedup per offload scenario."
    )
    parser.add_argument("graph", nargs="?", help="Operator graph (.json) or rule program (.aql)")
    parser.add_argument("--profile", required=True, help="Profile JSON from a software-only run")
    parser.add_argument("--plans", nargs="+", metavar="PLAN",
                        help="Plan files to evaluate instead of the three derived scenarios")
    parser.add_argument("--doc-sizes", type=int, nargs="+", default=[2048], metavar="BYTES")
    parser.add_argument("--output", "-o", help="Also write the table as CSV")
    parser.set_defaults(func=_estimate_command)

    parser = subparsers.add_parser(
        "model", parents=[common], help="Accelerator throughput against document size."
    )
    parser.add_argument("--doc-sizes", type=int, nargs="+", default=MODEL_DOC_SIZES, metavar="BYTES")
    parser.add_argument("--output", "-o", help="CSV file (default: stdout)")
    parser.set_defaults(func=_model_command)
