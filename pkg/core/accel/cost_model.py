"""
Accelerator throughput model.

Small documents are limited by how many packages per second the host can
dispatch; large ones by the link bandwidth:

    throughput = min(peak_bandwidth, package_rate * docs_per_package * doc_size)
"""

from dataclasses import dataclass
from typing import Dict, List, Sequence

from ..exceptions import ConfigError, EstimatorError

PEAK_BANDWIDTH = 500e6
CALIBRATION_DOC_SIZE = 128
CALIBRATION_FACTOR = 10
DOCS_PER_PACKAGE = 8


def calibrate_package_rate(
    peak_bandwidth: float = PEAK_BANDWIDTH,
    docs_per_package: int = DOCS_PER_PACKAGE,
    doc_size: int = CALIBRATION_DOC_SIZE,
    slowdown: float = CALIBRATION_FACTOR,
) -> float:
    """Package rate at which ``doc_size`` documents reach peak / slowdown."""
    return (peak_bandwidth / slowdown) / (docs_per_package * doc_size)


@dataclass(frozen=True)
class CostModel:
    peak_bandwidth: float = PEAK_BANDWIDTH
    package_rate: float = calibrate_package_rate()
    lanes: int = 4
    bytes_per_cycle_per_lane: float = 1.0
    clock_hz: float = 250e6

    def __post_init__(self):
        for name in ("peak_bandwidth", "package_rate", "lanes", "bytes_per_cycle_per_lane", "clock_hz"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"cost model {name} must be positive, got {getattr(self, name)}")

    def to_dict(self) -> Dict[str, float]:
        return {
            "peak_bandwidth": self.peak_bandwidth,
            "package_rate": self.package_rate,
            "lanes": self.lanes,
            "bytes_per_cycle_per_lane": self.bytes_per_cycle_per_lane,
            "clock_hz": self.clock_hz,
        }


def model_throughput(cost: CostModel, doc_size: float, docs_per_package: int = DOCS_PER_PACKAGE) -> float:
    """Accelerator bytes/sec for documents of ``doc_size`` bytes."""
    if doc_size <= 0:
        raise EstimatorError(f"document size must be positive, got {doc_size}")
    if docs_per_package < 1:
        raise EstimatorError(f"docs per package must be positive, got {docs_per_package}")
    return min(cost.peak_bandwidth, cost.package_rate * docs_per_package * doc_size)


def model_scan(
    cost: CostModel,
    doc_sizes: Sequence[int],
    docs_per_package: int = DOCS_PER_PACKAGE,
) -> List[Dict[str, float]]:
    """Throughput against document size, one row per size."""
    rows = []
    for size in doc_sizes:
        throughput = model_throughput(cost, size, docs_per_package)
        rows.append({
            "doc_size": size,
            "throughput": throughput,
            "fraction_of_peak": throughput / cost.peak_bandwidth,
        })
    return rows
