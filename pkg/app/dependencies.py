"""
Factories that turn a RunConfig into engine objects.

Commands never build engine configuration themselves; they ask these
factories, so every subcommand interprets the settings the same way.
"""

from functools import lru_cache
from pathlib import Path
from typing import Union

from loguru import logger

from core.accel.cost_model import CostModel
from core.accel.pipeline import AcceleratorConfig
from core.aql import compile_aql
from core.aog import deserialize_aog, deserialize_plan, infer_schemas
from core.exceptions import UserInputError
from core.models.dispatch import DispatchConfig
from core.models.graph import OperatorGraph
from core.models.plan import PartitionPlan
from core.partitioner import CapabilitySet, load_capabilities
from workloads.workload_registry import WorkloadRegistry

from .config import RunConfig


def get_dispatch_config(config: RunConfig) -> DispatchConfig:
    return DispatchConfig(
        byte_threshold=config.byte_threshold,
        max_docs_per_package=config.max_docs_per_package,
        flush_timeout_s=config.flush_timeout_s,
        worker_threads=config.threads,
    )


def get_accelerator_config(config: RunConfig) -> AcceleratorConfig:
    return AcceleratorConfig(
        lanes=config.lanes,
        clock_hz=config.clock_hz,
        setup_cycles=config.setup_cycles,
        channel_capacity=config.channel_capacity,
        sorting_buffer_capacity=config.sorting_buffer_capacity,
        regex_state_budget=config.regex_state_budget,
    )


def get_cost_model(config: RunConfig) -> CostModel:
    return CostModel(
        peak_bandwidth=config.peak_bandwidth,
        package_rate=config.resolved_package_rate,
        lanes=config.lanes,
        clock_hz=config.clock_hz,
    )


def get_capabilities(config: RunConfig) -> CapabilitySet:
    return load_capabilities(config.caps, config.regex_state_budget)


@lru_cache()
def get_workload_registry() -> WorkloadRegistry:
    """Get the workload registry with auto-discovered workloads."""
    return WorkloadRegistry()


def read_text(path: Union[str, Path], what: str = "file") -> str:
    path = Path(path)
    try:
        return path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise UserInputError(f"{what} not found: {path}")
    except (OSError, UnicodeDecodeError) as exc:
        raise UserInputError(f"cannot read {what} {path}: {exc}")


def write_text(path: Union[str, Path], text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.info(f"Wrote {path}")
    return path


def load_graph(path: Union[str, Path]) -> OperatorGraph:
    """Read, validate and schema-annotate an operator graph file."""
    return infer_schemas(deserialize_aog(read_text(path, "graph")))


def load_plan(path: Union[str, Path]) -> PartitionPlan:
    return deserialize_plan(read_text(path, "plan"))


def load_graph_or_query(path: Union[str, Path]) -> OperatorGraph:
    """Operator graph from an AOG file, or compiled from a ``.aql`` rule file."""
    path = Path(path)
    if path.suffix.lower() == ".aql":
        return compile_aql(read_text(path, "query"), path.parent)
    return load_graph(path)
