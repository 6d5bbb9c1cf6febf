"""
Build commands - compile rule programs and partition operator graphs.
"""

import argparse
import sys
from pathlib import Path

from loguru import logger

from core.aog import serialize_aog, serialize_plan
from core.aql import compile_aql
from core.partitioner import SCENARIOS, scenario_plan
from core.utils import ReportFormatter

from ..config import RunConfig
from ..dependencies import get_capabilities, load_graph_or_query, read_text, write_text


def emit(text: str, output: str = None) -> None:
    """Write a data product to ``output`` or to stdout."""
    if output:
        write_text(output, text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _compile_command(args: argparse.Namespace, config: RunConfig) -> int:
    query = Path(args.query)
    graph = compile_aql(read_text(query, "query"), query.parent)
    logger.info(f"Compiled {query.name}: {len(graph.nodes)} nodes, {len(graph.outputs)} output view(s)")
    emit(serialize_aog(graph), args.output)
    return 0


def _partition_command(args: argparse.Namespace, config: RunConfig) -> int:
    graph = load_graph_or_query(args.graph)
    plan = scenario_plan(graph, get_capabilities(config), args.scenario, config.subgraph_node_cap)
    for line in ReportFormatter.plan_summary(plan).splitlines():
        logger.info(line)
    emit(serialize_plan(plan), args.output)
    return 0


def register(subparsers: argparse._SubParsersAction, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser(
        "compile", parents=[common], help="Compile a rule program into an operator graph (AOG JSON)."
    )
    parser.add_argument("query", help="Rule program (.aql)")
    parser.add_argument("--output", "-o", help="Graph file to write (default: stdout)")
    parser.set_defaults(func=_compile_command)

    parser = subparsers.add_parser(
        "partition", parents=[common], help="Split a graph into a supergraph and accelerated subgraphs."
    )
    parser.add_argument("graph", help="Operator graph (.json) or rule program (.aql)")
    parser.add_argument("--scenario", type=int, choices=SCENARIOS, default=3,
                        help="1: extraction only, 2: single maximal subgraph, 3: all maximal subgraphs")
    parser.add_argument("--output", "-o", help="Plan file to write (default: stdout)")
    parser.set_defaults(func=_partition_command)
