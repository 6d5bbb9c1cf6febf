"""
Estimator - combined host/accelerator throughput and scenario speedups.

The estimate treats a query as a software part that still runs at the
measured rate and an offloaded part that runs at the accelerator rate:

    tp_est = 1 / (1/tp_hw + rt_sw/tp_sw)

Scenarios 1 and 2 are reported as pessimistic (host and accelerator work are
not overlapped); scenario 3 as optimistic (the extra subgraphs' communication
is not charged).
"""

from typing import List, Sequence

from loguru import logger

from ..accel.cost_model import DOCS_PER_PACKAGE, CostModel, model_throughput
from ..exceptions import EstimatorError
from ..models.plan import PartitionPlan
from ..models.profile import Accounting, EstimateInput, ProfileReport, ScenarioRow
from .profiler import software_residue


def estimate_throughput(estimate: EstimateInput) -> float:
    if estimate.rt_sw == 0:
        return estimate.tp_hw
    # Same closed form, kept in product form so round numbers stay exact.
    return (estimate.tp_sw * estimate.tp_hw) / (estimate.tp_sw + estimate.rt_sw * estimate.tp_hw)


def accounting_for(scenario: int) -> Accounting:
    return Accounting.OPTIMISTIC if scenario == 3 else Accounting.PESSIMISTIC


def speedup_report(
    profile: ProfileReport,
    plans: Sequence[PartitionPlan],
    cost: CostModel,
    doc_sizes: Sequence[int],
    docs_per_package: int = DOCS_PER_PACKAGE,
) -> List[ScenarioRow]:
    """One row per (plan, document size), in plan order then size order."""
    tp_sw = profile.throughput
    if tp_sw <= 0:
        raise EstimatorError("profile has no measured throughput")
    rows = []
    for index, plan in enumerate(plans, start=1):
        scenario = plan.scenario or index
        offloaded = plan.offloaded_nodes()
        rt_sw = software_residue(profile, offloaded)
        for size in doc_sizes:
            tp_hw = model_throughput(cost, size, docs_per_package)
            tp_est = estimate_throughput(EstimateInput(tp_sw, tp_hw, rt_sw))
            speedup = tp_est / tp_sw
            rows.append(ScenarioRow(
                scenario=scenario,
                doc_size=size,
                rt_sw=rt_sw,
                tp_sw=tp_sw,
                tp_hw=tp_hw,
                tp_est=tp_est,
                speedup=speedup,
                accounting=accounting_for(scenario),
                offloaded_nodes=len(offloaded),
                note="no benefit" if speedup <= 1.0 else None,
            ))
            logger.debug(f"Scenario {scenario} @ {size} B: rt_sw={rt_sw:.3f} speedup={speedup:.2f}x")
    return rows
