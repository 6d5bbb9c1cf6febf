"""
Tests for the bundled demo workloads and the synthetic corpus generator.
"""

import pytest

from core.exceptions import ConfigError, UserInputError
from core.models.dispatch import DispatchConfig
from core.models.graph import EXTRACTION_KINDS
from core.models.plan import PartitionPlan
from core.partitioner import classify, load_capabilities, scenario_plans
from core.profiling import category_distribution
from core.runtime import corpus_from_documents, run_corpus
from workloads import WorkloadCategory, WorkloadRegistry, generate_corpus, generate_size_sweep


@pytest.fixture(scope="module")
def registry():
    return WorkloadRegistry()


class TestWorkloadRegistry:
    """Discovery and lookup."""

    def test_discovers_all_workloads(self, registry):
        """Both workload packages register themselves."""
        assert registry.list_workloads() == ["T1", "T2", "T3", "T4", "T5"]
        assert [w.get_workload_name() for w in registry.by_category(WorkloadCategory.RELATIONAL)] == ["T5"]

    def test_lookup(self, registry):
        """Names are matched case-insensitively; unknown names are user errors."""
        assert registry.get_workload("t3").get_workload_name() == "T3"
        with pytest.raises(UserInputError, match="unknown workload"):
            registry.get_workload("T9")

    def test_every_workload_compiles(self, registry):
        """Each rule program yields a graph with its output views."""
        outputs = {
            name: [ref.view for ref in registry.get_workload(name).compile().outputs]
            for name in registry.list_workloads()
        }
        assert outputs == {
            "T1": ["PersonPhone"],
            "T2": ["LongOrg"],
            "T3": ["ContactClean"],
            "T4": ["DatedDeal", "Quarter", "Figure", "LargeAmount"],
            "T5": ["Clause"],
        }

    def test_offloaded_runs_match_software(self, registry):
        """Every workload annotates the synthetic corpus identically under each scenario."""
        corpus = corpus_from_documents(generate_corpus(12, 384, seed=2))
        caps = load_capabilities("default")
        for name in registry.list_workloads():
            graph = registry.get_workload(name).compile()
            software = run_corpus(PartitionPlan.software_only(graph), corpus)
            for plan in scenario_plans(graph, caps):
                result = run_corpus(plan, corpus, DispatchConfig(worker_threads=2), caps=caps)
                assert result.failures == {}
                assert result.annotations == software.annotations

    def test_contact_workload_finds_matches(self, registry):
        """The generated text carries the entities the extraction workloads look for."""
        graph = registry.get_workload("T3").compile()
        result = run_corpus(PartitionPlan.software_only(graph), corpus_from_documents(generate_corpus(20, 512)))
        assert sum(len(views["ContactClean"]) for views in result.annotations.values()) > 0


class TestCorpusGenerator:
    """Seeded synthetic documents."""

    def test_deterministic(self):
        """The same seed gives the same corpus; another seed does not."""
        assert generate_corpus(5, 200, seed=7) == generate_corpus(5, 200, seed=7)
        assert generate_corpus(5, 200, seed=7) != generate_corpus(5, 200, seed=8)

    def test_exact_sizes(self):
        """Documents are ASCII and cut to the requested byte size."""
        docs = generate_corpus(10, 300)
        assert all(doc.payload_bytes == len(doc.text) == 300 for doc in docs)
        assert [doc.id for doc in docs][:2] == ["doc-0", "doc-1"]

    def test_size_range(self):
        """Sizes drawn from an inclusive range."""
        docs = generate_corpus(30, (100, 150), seed=1)
        assert all(100 <= len(doc.text) <= 150 for doc in docs)

    def test_size_sweep(self):
        """Documents per size with size-prefixed ids."""
        docs = generate_size_sweep(2, sizes=(128, 256))
        assert [doc.id for doc in docs] == ["s128-0", "s128-1", "s256-0", "s256-1"]
        assert [len(doc.text) for doc in docs] == [128, 128, 256, 256]

    @pytest.mark.parametrize("count, size", [(-1, 100), (3, 0), (3, (50, 10))])
    def test_invalid_arguments(self, count, size):
        """Negative counts and empty or inverted size ranges."""
        with pytest.raises(ConfigError):
            generate_corpus(count, size)


class TestProfileShapes:
    """Where the time goes for each workload on the default corpus."""

    @pytest.fixture(scope="class")
    def splits(self, registry):
        corpus = corpus_from_documents(generate_corpus(40, 256, seed=0))
        shares = {}
        for name in registry.list_workloads():
            graph = registry.get_workload(name).compile()
            run_corpus(PartitionPlan.software_only(graph), corpus[:2])
            profile = run_corpus(PartitionPlan.software_only(graph), corpus).profile
            shares[name] = category_distribution(profile)
        return shares

    @pytest.mark.parametrize("name", ["T1", "T2", "T3", "T4"])
    def test_extraction_dominates(self, splits, name):
        """Extraction-heavy workloads spend most operator time matching text."""
        assert splits[name]["extraction"] > 0.5

    def test_relational_dominates(self, splits):
        """The function word chains spend over four fifths of their time joining."""
        assert splits["T5"]["relational"] > 0.8

    def test_large_amounts_stay_on_host(self, registry, default_caps):
        """Only the large-amount view of T4 exceeds the accelerator's automaton budget."""
        graph = registry.get_workload("T4").compile()
        host = [
            graph.nodes[n].view for n, flag in classify(graph, default_caps).items()
            if not flag and graph.nodes[n].kind in EXTRACTION_KINDS
        ]
        assert host == ["LargeAmount"]
