"""
Tests for profiling, the throughput estimator and scenario speedup tables.
"""

import random

import pytest

from core.accel import CostModel
from core.exceptions import EstimatorError, ProfileMismatchError, UserInputError
from core.models.annotations import Document
from core.models.plan import PartitionPlan
from core.models.profile import Accounting, EstimateInput, ProfileReport
from core.partitioner import scenario_plans
from core.profiling import (
    build_profile,
    category_distribution,
    estimate_throughput,
    relative_distribution,
    software_residue,
    speedup_report,
)
from core.profiling.scan import throughput_scan
from core.runtime import corpus_from_documents, run_corpus
from workloads import WorkloadRegistry, generate_corpus


def estimate(tp_sw, tp_hw, rt_sw):
    return estimate_throughput(EstimateInput(tp_sw, tp_hw, rt_sw))


@pytest.fixture
def caps_numbers_profile():
    """One second over 10 MB, with operator time spread over the five nodes."""
    return ProfileReport(
        total_s=1.0,
        bytes=10_000_000,
        threads=1,
        per_node={0: 0.0, 1: 0.4, 2: 0.3, 3: 0.2, 4: 0.1},
        per_kind={"DocSource": 0.0, "RegexExtract": 0.7, "Join": 0.2, "Project": 0.1},
    )


class TestEstimator:
    """Combined host/accelerator throughput."""

    def test_closed_form(self):
        """A quarter of the time left in software at 25 MB/s with a 100 MB/s accelerator."""
        assert estimate(25e6, 100e6, 0.25) == pytest.approx(50e6)

    def test_everything_offloaded(self):
        """Nothing left in software runs at the accelerator rate."""
        assert estimate(1e6, 500e6, 0.0) == 500e6

    @pytest.mark.parametrize("tp_sw, rt_sw, speedup", [(2e6, 0.03, 29.4), (10e6, 0.05, 14.3)])
    def test_speedups(self, tp_sw, rt_sw, speedup):
        """Small software residues give large speedups against a 500 MB/s accelerator."""
        assert estimate(tp_sw, 500e6, rt_sw) / tp_sw == pytest.approx(speedup, abs=0.05)

    def test_bounds_and_monotonicity(self):
        """Never above the accelerator rate nor the software-bound rate; falls as rt_SW grows."""
        rng = random.Random(3)
        for _ in range(200):
            tp_sw = rng.uniform(1e5, 1e9)
            tp_hw = rng.uniform(1e5, 1e9)
            low, high = sorted((rng.random(), rng.random()))
            est = estimate(tp_sw, tp_hw, low)
            assert est <= tp_hw * (1 + 1e-9)
            if low > 0:
                assert est <= tp_sw / low * (1 + 1e-9)
            assert estimate(tp_sw, tp_hw, high) <= est * (1 + 1e-9)

    @pytest.mark.parametrize("args", [(0.0, 1e6, 0.5), (1e6, -1.0, 0.5), (1e6, 1e6, 1.5), (1e6, 1e6, -0.1)])
    def test_invalid_input(self, args):
        """Throughputs are positive and the residue is a fraction."""
        with pytest.raises(EstimatorError):
            EstimateInput(*args)


class TestProfiler:
    """Per-operator time accounting."""

    def test_build_profile_merges_workers(self, caps_numbers_graph):
        """Worker timings add up per node and per kind; untimed nodes read zero."""
        report = build_profile(caps_numbers_graph, [{1: 0.1, 3: 0.2}, {1: 0.3}], total_s=2.0, bytes=100, threads=2)
        assert report.per_node == pytest.approx({0: 0.0, 1: 0.4, 2: 0.0, 3: 0.2, 4: 0.0})
        assert report.per_kind["RegexExtract"] == pytest.approx(0.4)
        assert report.per_kind["Join"] == pytest.approx(0.2)
        assert report.throughput == 50.0

    def test_relative_distribution(self):
        """Kind fractions sum to one."""
        report = ProfileReport(1.0, 1, 1, per_kind={
            "RegexExtract": 0.50, "Join": 0.32, "Select": 0.10, "Consolidate": 0.08,
        })
        distribution = relative_distribution(report)
        assert distribution == pytest.approx({"Consolidate": 0.08, "Join": 0.32, "RegexExtract": 0.50, "Select": 0.10})
        assert sum(distribution.values()) == pytest.approx(1.0)
        assert category_distribution(report) == pytest.approx({"extraction": 0.5, "relational": 0.5, "other": 0.0})

    def test_empty_profile(self):
        """No operator time means no distribution."""
        with pytest.raises(EstimatorError):
            relative_distribution(ProfileReport(0.0, 0, 1))

    def test_software_residue(self, caps_numbers_profile):
        """rt_SW is the share of operator time outside the offloaded nodes."""
        assert software_residue(caps_numbers_profile, {1, 2}) == pytest.approx(0.3)
        assert software_residue(caps_numbers_profile, set()) == pytest.approx(1.0)
        with pytest.raises(ProfileMismatchError):
            software_residue(caps_numbers_profile, {9})

    def test_profile_document(self, caps_numbers_profile):
        """Profiles survive their on-disk form; broken ones are user errors."""
        restored = ProfileReport.from_dict(caps_numbers_profile.to_dict())
        assert restored.per_node == caps_numbers_profile.per_node
        assert restored.throughput == caps_numbers_profile.throughput
        with pytest.raises(UserInputError):
            ProfileReport.from_dict({"total_s": -1, "bytes": 0, "threads": 1})


class TestSpeedupReport:
    """Scenario speedup tables."""

    def test_rows_per_plan_and_size(self, caps_numbers_graph, caps_numbers_profile, default_caps):
        """Offloading more of the graph never lowers the estimate."""
        plans = scenario_plans(caps_numbers_graph, default_caps)
        rows = speedup_report(caps_numbers_profile, plans, CostModel(), [128, 2048])
        assert [(row.scenario, row.doc_size) for row in rows] == [(1, 128), (1, 2048), (2, 128), (2, 2048),
                                                                  (3, 128), (3, 2048)]
        by_key = {(row.scenario, row.doc_size): row for row in rows}
        assert by_key[(1, 128)].rt_sw == pytest.approx(0.3)
        assert by_key[(3, 2048)].rt_sw == 0.0
        assert by_key[(3, 2048)].tp_est == pytest.approx(500e6)
        assert by_key[(3, 2048)].speedup == pytest.approx(50.0)
        for size in (128, 2048):
            assert by_key[(3, size)].speedup >= by_key[(1, size)].speedup
        assert by_key[(1, 128)].accounting == Accounting.PESSIMISTIC
        assert by_key[(3, 128)].accounting == Accounting.OPTIMISTIC

    def test_no_benefit(self, caps_numbers_graph, caps_numbers_profile, default_caps):
        """An accelerator slower than the host is flagged."""
        plans = scenario_plans(caps_numbers_graph, default_caps)
        rows = speedup_report(caps_numbers_profile, plans, CostModel(package_rate=1.0), [128])
        assert all(row.note == "no benefit" and row.no_benefit for row in rows)

    def test_software_plan_has_unit_speedup(self, caps_numbers_graph, caps_numbers_profile):
        """Nothing offloaded leaves the measured throughput unchanged."""
        rows = speedup_report(caps_numbers_profile, [PartitionPlan.software_only(caps_numbers_graph)],
                              CostModel(), [512])
        assert rows[0].rt_sw == 1.0
        assert rows[0].speedup < 1.0

    def test_profile_from_another_graph(self, caps_numbers_graph, default_caps):
        """Plans must offload nodes the profile knows about."""
        other = ProfileReport(1.0, 1000, 1, per_node={0: 1.0})
        with pytest.raises(ProfileMismatchError):
            speedup_report(other, scenario_plans(caps_numbers_graph, default_caps), CostModel(), [128])

    def test_unmeasured_profile(self, caps_numbers_graph, default_caps):
        """A profile without throughput cannot anchor an estimate."""
        empty = ProfileReport(0.0, 0, 1, per_node={n: 0.0 for n in caps_numbers_graph.node_ids})
        with pytest.raises(EstimatorError):
            speedup_report(empty, scenario_plans(caps_numbers_graph, default_caps), CostModel(), [128])


class TestThroughputScan:
    """Measured software throughput per thread count."""

    def test_rows_per_thread_count(self, caps_numbers_graph, documents):
        """Every row covers the whole corpus."""
        plan = PartitionPlan.software_only(caps_numbers_graph)
        rows = throughput_scan(plan, corpus_from_documents(documents), [1, 2])
        assert [row["threads"] for row in rows] == [1, 2]
        assert all(row["bytes"] == sum(doc.payload_bytes for doc in documents) for row in rows)
        assert all(row["throughput"] > 0 for row in rows)

    def test_empty_corpus(self, caps_numbers_graph):
        """No bytes means zero throughput rather than an error."""
        plan = PartitionPlan.software_only(caps_numbers_graph)
        rows = throughput_scan(plan, corpus_from_documents([Document("e", "")]), [1])
        assert rows[0]["bytes"] == 0
        assert rows[0]["throughput"] == 0.0


def measured_profile(name, doc_size, count):
    """Software-only profile of a bundled workload after a short warm-up run."""
    graph = WorkloadRegistry().get_workload(name).compile()
    corpus = corpus_from_documents(generate_corpus(count, doc_size, seed=0))
    plan = PartitionPlan.software_only(graph)
    run_corpus(plan, corpus[:2])
    return graph, run_corpus(plan, corpus).profile


class TestWorkloadProjections:
    """Projected speedups of the bundled workloads from measured profiles."""

    def test_extraction_heavy_all_subgraphs(self, default_caps):
        """With the large-amount view left on the host, offloading the rest gains 8x to 32x on large documents."""
        graph, profile = measured_profile("T4", 2048, 12)
        rows = speedup_report(profile, scenario_plans(graph, default_caps), CostModel(), [2048])
        scenario_3 = next(row for row in rows if row.scenario == 3)
        assert scenario_3.rt_sw <= 0.2
        assert 8.0 <= scenario_3.speedup <= 32.0
        assert scenario_3.speedup >= next(row for row in rows if row.scenario == 1).speedup

    def test_relational_heavy_extraction_only(self, default_caps):
        """Offloading only the dictionary barely helps the join-bound workload."""
        graph, profile = measured_profile("T5", 256, 40)
        rows = speedup_report(profile, scenario_plans(graph, default_caps), CostModel(), [256, 2048])
        assert all(row.speedup < 2.0 for row in rows if row.scenario == 1)
