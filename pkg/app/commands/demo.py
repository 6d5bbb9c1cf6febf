"""
Demo command - end-to-end run of the bundled workloads.

For each workload: compile, profile a software-only run on a synthetic
corpus, derive the three offload scenarios, run each of them on the emulated
accelerator, check every run against the software output and print the
projected speedups.
"""

import argparse
import json
from pathlib import Path
from typing import List

from loguru import logger

from core.aog import serialize_aog, serialize_plan
from core.exceptions import InvariantViolation
from core.models.plan import PartitionPlan
from core.partitioner import scenario_plans
from core.profiling import category_distribution, speedup_report
from core.runtime import corpus_from_documents, run_corpus, write_annotations_jsonl
from core.runtime.output import annotation_records
from core.utils import ReportFormatter
from workloads import Workload, generate_corpus

from ..config import RunConfig
from ..dependencies import (
    get_accelerator_config,
    get_capabilities,
    get_cost_model,
    get_dispatch_config,
    get_workload_registry,
    write_text,
)


def run_workload(workload: Workload, args: argparse.Namespace, config: RunConfig) -> str:
    """Run one workload end to end and return its report block."""
    name = workload.get_workload_name()
    graph = workload.compile()
    corpus = corpus_from_documents(generate_corpus(args.docs, args.doc_size, args.seed))
    dispatch = get_dispatch_config(config)
    accel = get_accelerator_config(config)
    caps = get_capabilities(config)

    software = run_corpus(PartitionPlan.software_only(graph), corpus, dispatch, accel, caps)
    expected = list(annotation_records(software.annotations))
    plans = scenario_plans(graph, caps, config.subgraph_node_cap)
    for plan in plans:
        accelerated = run_corpus(plan, corpus, dispatch, accel, caps, profile=False)
        if list(annotation_records(accelerated.annotations)) != expected:
            raise InvariantViolation(
                f"workload {name}: scenario {plan.scenario} output differs from the software run"
            )
        if software.failures != accelerated.failures:
            raise InvariantViolation(f"workload {name}: failed documents differ on scenario {plan.scenario}")

    rows = speedup_report(software.profile, plans, get_cost_model(config), args.estimate_sizes,
                          config.max_docs_per_package)
    if args.out_dir:
        out = Path(args.out_dir) / name
        write_text(out / "graph.json", serialize_aog(graph))
        for plan in plans:
            write_text(out / f"plan-s{plan.scenario}.json", serialize_plan(plan))
        write_text(out / "profile.json", json.dumps(software.profile.to_dict(), indent=2) + "\n")
        write_text(out / "scenarios.csv", ReportFormatter.scenario_csv(rows, with_doc_size=True))
        write_annotations_jsonl(software.annotations, out / "annotations.jsonl")

    split = category_distribution(software.profile)
    lines = [
        f"== {name}: {workload.get_workload_description()} ==",
        f"documents: {args.docs} x {args.doc_size} B, software throughput "
        f"{software.profile.throughput / 1e6:.3f} MB/s, outputs match on every scenario",
        f"profile: extraction {split['extraction']:.1%}, relational {split['relational']:.1%}",
        ReportFormatter.dispatch_summary(accelerated.stats, config.clock_hz),
        ReportFormatter.scenario_table(rows),
    ]
    return "\n".join(lines)


def _demo_command(args: argparse.Namespace, config: RunConfig) -> int:
    registry = get_workload_registry()
    names: List[str] = args.workload or registry.list_workloads()
    workloads = [registry.get_workload(name) for name in names]
    for workload in workloads:
        logger.info(f"Demo workload {workload.get_workload_name()}")
        print(run_workload(workload, args, config))
        print()
    return 0


def register(subparsers: argparse._SubParsersAction, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser(
        "demo", parents=[common], help="Compile, profile, partition, run and estimate the bundled workloads."
    )
    parser.add_argument("--workload", nargs="+", metavar="NAME", help="Workloads to run (default: all)")
    parser.add_argument("--docs", type=int, default=200, help="Synthetic documents per workload")
    parser.add_argument("--doc-size", type=int, default=256, help="Synthetic document size in bytes")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--estimate-sizes", type=int, nargs="+", default=[256, 2048], metavar="BYTES",
                        help="Document sizes for the speedup projection")
    parser.add_argument("--out-dir", help="Write graphs, plans, profiles and tables per workload")
    parser.set_defaults(func=_demo_command)
