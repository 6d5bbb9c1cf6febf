"""Emulated streaming accelerator: pipelines, sorting buffers and the cost model."""

from .channels import Channel
from .cost_model import CostModel, calibrate_package_rate, model_scan, model_throughput
from .pipeline import (
    AcceleratorConfig,
    DocumentTrace,
    Pipeline,
    StageTrace,
    StreamResult,
    build_pipeline,
    execute_stream,
    trace_csv,
)
from .sorting_buffer import SortingBuffer

__all__ = [
    "AcceleratorConfig",
    "Channel",
    "CostModel",
    "DocumentTrace",
    "Pipeline",
    "SortingBuffer",
    "StageTrace",
    "StreamResult",
    "build_pipeline",
    "calibrate_package_rate",
    "execute_stream",
    "model_scan",
    "model_throughput",
    "trace_csv",
]
