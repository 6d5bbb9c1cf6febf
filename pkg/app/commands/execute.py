"""
Execution commands - run plans over a corpus, profile software runs and
scan thread counts.
"""

import argparse
import json
from pathlib import Path

from loguru import logger

from core.accel import trace_csv
from core.models.plan import PartitionPlan
from core.profiling import category_distribution, relative_distribution
from core.profiling.scan import throughput_scan
from core.runtime import load_corpus, run_corpus, view_counts, write_annotations_jsonl
from core.runtime.output import annotation_records
from core.runtime.runner import RunResult
from core.utils import ReportFormatter

from ..config import RunConfig
from ..dependencies import (
    get_accelerator_config,
    get_capabilities,
    get_dispatch_config,
    load_graph_or_query,
    load_plan,
    write_text,
)
from .build import emit


def execute_plan(plan: PartitionPlan, docs: str, config: RunConfig, base_dir: Path) -> RunResult:
    corpus = load_corpus(docs)
    return run_corpus(
        plan,
        corpus,
        get_dispatch_config(config),
        get_accelerator_config(config),
        get_capabilities(config),
        base_dir=base_dir,
    )


def write_results(result: RunResult, output: str = None) -> None:
    if output:
        count = write_annotations_jsonl(result.annotations, output)
        logger.info(f"Wrote {count} annotation(s) to {output}")
    else:
        emit("".join(json.dumps(r, ensure_ascii=False, sort_keys=True) + "\n"
                     for r in annotation_records(result.annotations)))
    for view, count in view_counts(result.annotations).items():
        logger.info(f"  {view}: {count}")
    for doc_id, reason in sorted(result.failures.items()):
        logger.warning(f"Document {doc_id} failed: {reason}")


def _run_command(args: argparse.Namespace, config: RunConfig) -> int:
    plan = load_plan(args.plan)
    result = execute_plan(plan, args.docs, config, Path(args.plan).parent)
    write_results(result, args.output)
    logger.info(ReportFormatter.dispatch_summary(result.stats, config.clock_hz))
    if args.trace:
        write_text(args.trace, trace_csv(result.stage_traces))
    if args.stats:
        stats = dict(result.stats.to_dict(), failures=dict(sorted(result.failures.items())))
        write_text(args.stats, json.dumps(stats, indent=2, sort_keys=True) + "\n")
    if args.profile_output:
        write_text(args.profile_output, json.dumps(result.profile.to_dict(), indent=2) + "\n")
    return 0


def _profile_command(args: argparse.Namespace, config: RunConfig) -> int:
    graph = load_graph_or_query(args.graph)
    result = execute_plan(PartitionPlan.software_only(graph), args.docs, config, Path(args.graph).parent)
    profile = result.profile
    text = json.dumps(profile.to_dict(), indent=2) + "\n"
    if args.annotations:
        write_results(result, args.annotations)
    if not args.output:
        emit(text)
    else:
        write_text(args.output, text)
        if profile.operator_s > 0:
            print(ReportFormatter.distribution_table(relative_distribution(profile)))
            print()
            print(ReportFormatter.distribution_table(category_distribution(profile), "category"))
    logger.info(f"Software throughput: {profile.throughput / 1e6:.3f} MB/s over {profile.docs} document(s)")
    return 0


def _scan_command(args: argparse.Namespace, config: RunConfig) -> int:
    graph = load_graph_or_query(args.graph)
    corpus = load_corpus(args.docs)
    rows = throughput_scan(
        PartitionPlan.software_only(graph),
        corpus,
        args.thread_counts,
        get_dispatch_config(config),
        base_dir=Path(args.graph).parent,
    )
    emit(ReportFormatter.csv_text(["threads", "bytes", "seconds", "throughput"], rows), args.output)
    return 0


def register(subparsers: argparse._SubParsersAction, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("run", parents=[common], help="Annotate a corpus under a partition plan.")
    parser.add_argument("plan", help="Plan file written by 'partition'")
    parser.add_argument("--docs", required=True, help="Corpus directory of .txt files or JSON Lines file")
    parser.add_argument("--output", "-o", help="Annotations JSON Lines file (default: stdout)")
    parser.add_argument("--stats", help="Write dispatch statistics and per-document failures as JSON")
    parser.add_argument("--profile", dest="profile_output", help="Write the run's profile as JSON")
    parser.add_argument("--trace", help="Write per-stage accelerator cycles and tuple counts as CSV")
    parser.set_defaults(func=_run_command)

    parser = subparsers.add_parser(
        "profile", parents=[common], help="Software-only run that records per-operator time."
    )
    parser.add_argument("graph", help="Operator graph (.json) or rule program (.aql)")
    parser.add_argument("--docs", required=True, help="Corpus directory of .txt files or JSON Lines file")
    parser.add_argument("--output", "-o", help="Profile JSON file (default: stdout)")
    parser.add_argument("--annotations", help="Also write the annotations as JSON Lines")
    parser.set_defaults(func=_profile_command)

    parser = subparsers.add_parser(
        "scan", parents=[common], help="Measure software throughput for several worker thread counts."
    )
    parser.add_argument("graph", help="Operator graph (.json) or rule program (.aql)")
    parser.add_argument("--docs", required=True, help="Corpus directory of .txt files or JSON Lines file")
    parser.add_argument("--thread-counts", type=int, nargs="+", default=[1, 2, 4], metavar="N")
    parser.add_argument("--output", "-o", help="CSV file (default: stdout)")
    parser.set_defaults(func=_scan_command)
