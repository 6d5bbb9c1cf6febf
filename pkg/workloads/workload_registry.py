"""
Workload Registry - Discovery and lookup of demo workloads.

Subpackages of ``workloads/`` register themselves by exposing a
``get_workload_instances()`` function returning Workload objects.
"""

import importlib
from pathlib import Path
from typing import Dict, List, Optional

from loguru import logger

from core.exceptions import UserInputError

from .base_workload import Workload, WorkloadCategory


class WorkloadRegistry:
    """Central registry for all demo workloads."""

    def __init__(self, auto_discover: bool = True):
        self._workloads: Dict[str, Workload] = {}
        if auto_discover:
            self._auto_discover_workloads()
        logger.debug(f"WorkloadRegistry initialized with {len(self._workloads)} workloads")

    def register_workload(self, workload: Workload) -> None:
        name = workload.get_workload_name()
        if name in self._workloads:
            logger.warning(f"Overriding existing workload: {name}")
        self._workloads[name] = workload

    def get_workload(self, name: str) -> Workload:
        workload = self._workloads.get(name) or self._workloads.get(name.upper())
        if workload is None:
            raise UserInputError(f"unknown workload {name!r}; available: {', '.join(self.list_workloads())}")
        return workload

    def list_workloads(self) -> List[str]:
        return sorted(self._workloads)

    def by_category(self, category: WorkloadCategory) -> List[Workload]:
        return [self._workloads[name] for name in self.list_workloads()
                if self._workloads[name].get_category() == category]

    def _auto_discover_workloads(self) -> None:
        workloads_path = Path(__file__).parent
        for item in sorted(workloads_path.iterdir()):
            if item.is_dir() and not item.name.startswith("__"):
                self._try_load_workload_module(item.name)

    def _try_load_workload_module(self, module_name: str) -> None:
        try:
            module = importlib.import_module(f"workloads.{module_name}")
        except ImportError as e:
            logger.warning(f"Could not load workload module {module_name}: {e}")
            return
        hook = getattr(module, "get_workload_instances", None)
        if hook is None:
            logger.debug(f"Workload module {module_name} has no get_workload_instances function")
            return
        for workload in hook():
            if isinstance(workload, Workload):
                self.register_workload(workload)
            else:
                logger.warning(f"get_workload_instances in {module_name} returned a non-Workload object")


_registry: Optional[WorkloadRegistry] = None


def get_registry() -> WorkloadRegistry:
    global _registry
    if _registry is None:
        _registry = WorkloadRegistry()
    return _registry
