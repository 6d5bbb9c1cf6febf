"""
Tests for the emulated accelerator: pipeline construction, streaming execution and the cost model.
"""

import random

import pytest

from core.accel import (
    AcceleratorConfig,
    CostModel,
    SortingBuffer,
    StageTrace,
    build_pipeline,
    calibrate_package_rate,
    execute_stream,
    model_scan,
    model_throughput,
    trace_csv,
)
from core.aql import compile_aql
from core.exceptions import ConfigError, EstimatorError, PipelineBuildError, SortingBufferOverflowError
from core.models.annotations import Document
from core.models.dispatch import PackageEntry, PackageReason, WorkPackage
from core.operators import GraphExecutor, execute_subgraph_software
from core.partitioner import SCENARIOS, rewrite, scenario_plan, scenario_plans


def package(subgraph, texts, inputs=(None,)):
    entries = [PackageEntry(i, Document(f"d{i}", text), 0.0, inputs) for i, text in enumerate(texts)]
    return WorkPackage(0, subgraph, entries, PackageReason.DRAIN)


def streamed_views(plan, pipelines, doc):
    """Evaluate the supergraph with every SubgraphCall streamed through its pipeline."""
    def handler(node, document, inputs):
        subgraph = node.params["subgraph"]
        work = WorkPackage(0, subgraph, [PackageEntry(0, document, 0.0, tuple(inputs))], PackageReason.DRAIN)
        result = execute_stream(pipelines[subgraph], work)
        assert not result.errors
        return result.results[0]
    return GraphExecutor(plan.supergraph).run(doc, call_handler=handler)


PATTERNS = ["[a-z]+", "[A-Z][a-z]*", "[0-9]+", "a+b*", "x[a-z]*y", "b"]


def random_program(rng):
    """Two or three extractions over one span column, then a few derived views that are all output."""
    lines, singles, outputs = [], [], []
    for index in range(rng.randint(2, 3)):
        lines.append(
            f"create view E{index} as extract regex /{rng.choice(PATTERNS)}/ on D.text as s from Document D;"
        )
        singles.append(f"E{index}")
    for index in range(rng.randint(1, 3)):
        name = f"V{index}"
        a, b = rng.choice(singles), rng.choice(singles)
        shape = rng.choice(["select", "union", "consolidate", "join"])
        if shape == "select":
            body = f"select * from {a} v where SpanLengthGreaterThan(v.s, {rng.randint(0, 3)})"
        elif shape == "union":
            body = f"(select * from {a} x) union all (select * from {b} y)"
        elif shape == "consolidate":
            body = f"consolidate {a}"
        else:
            body = f"select * from {a} x, {b} y where Follows(x.s, y.s, 0, {rng.randint(0, 12)})"
        lines.append(f"create view {name} as {body};")
        outputs.append(name)
        if shape == "join":
            if rng.random() < 0.5:
                lines.append(f"create view P{index} as select j.s_1 from {name} j;")
                outputs.append(f"P{index}")
        else:
            singles.append(name)
    lines.extend(f"output view {name};" for name in outputs)
    return "\n".join(lines)


def random_text(rng):
    return "".join(rng.choice("abxyz AB 0123") for _ in range(rng.randint(0, 60)))


class TestStreamingDiscipline:
    """Random rule programs streamed one document at a time."""

    def test_random_subgraphs(self, all_caps):
        """Single-pass reads, sorted ordered channels and reference results on 500 subgraph/document pairs."""
        rng = random.Random(2024)
        checked = 0
        while checked < 500:
            graph = compile_aql(random_program(rng))
            plan = scenario_plan(graph, all_caps, rng.choice(SCENARIOS))
            pipelines = {sg.id: build_pipeline(sg, caps=all_caps) for sg in plan.subgraphs}
            doc = Document("d", random_text(rng))

            def handler(node, document, inputs):
                nonlocal checked
                subgraph = node.params["subgraph"]
                work = WorkPackage(0, subgraph, [PackageEntry(0, document, 0.0, tuple(inputs))], PackageReason.DRAIN)
                result = execute_stream(pipelines[subgraph], work)
                assert not result.errors
                trace = result.documents[0]
                assert all(reads == len(document.text) for reads in trace.char_reads.values())
                assert trace.unordered_streams == []
                assert result.results[0] == execute_subgraph_software(plan.subgraph(subgraph), document, inputs)
                checked += 1
                return result.results[0]

            assert GraphExecutor(plan.supergraph).run(doc, call_handler=handler) == GraphExecutor(graph).run(doc)


class TestPipelineConstruction:
    """Stage layout and sorting-buffer placement."""

    def test_single_regex(self, single_regex_graph, default_caps):
        """One extraction stage and no buffering."""
        plan = scenario_plan(single_regex_graph, default_caps, 3)
        pipeline = build_pipeline(plan.subgraph(0), caps=default_caps)
        assert pipeline.extraction_stages == ["RegexExtract#1"]
        assert pipeline.sorting_buffers == 0

    def test_union_feeding_join_is_buffered(self, union_join_graph, default_caps):
        """The interleaved union stream is re-sorted before the join."""
        plan = scenario_plan(union_join_graph, default_caps, 3)
        pipeline = build_pipeline(plan.subgraph(0), caps=default_caps)
        assert pipeline.sorting_buffers == 1
        assert pipeline.buffered_stages() == ["Union#3"]
        assert len(pipeline.operator_stages) == 5

    def test_unsupported_operator(self, cities_graph, default_caps, all_caps):
        """Consolidation needs a capability set that offers it."""
        plan = rewrite(cities_graph, [{4}])
        with pytest.raises(PipelineBuildError):
            build_pipeline(plan.subgraph(0), caps=default_caps)
        assert build_pipeline(plan.subgraph(0), caps=all_caps).operator_stages

    def test_config_validation(self):
        """Sizes must be positive."""
        with pytest.raises(ConfigError):
            AcceleratorConfig(lanes=0)
        with pytest.raises(ConfigError):
            AcceleratorConfig(setup_cycles=-1)


class TestStreamExecution:
    """Running work packages through pipelines."""

    def test_matches_software(self, caps_numbers_graph, union_join_graph, cities_graph, documents, default_caps, all_caps):
        """Streamed results equal the reference evaluator for every scenario."""
        for graph in (caps_numbers_graph, union_join_graph, cities_graph):
            reference = GraphExecutor(graph)
            for caps in (default_caps, all_caps):
                for plan in scenario_plans(graph, caps):
                    pipelines = {sg.id: build_pipeline(sg, caps=caps) for sg in plan.subgraphs}
                    for doc in documents:
                        assert streamed_views(plan, pipelines, doc) == reference.run(doc)

    def test_empty_document_costs_setup(self, single_regex_graph, default_caps):
        """An empty document occupies its lane for the setup cycles only."""
        plan = scenario_plan(single_regex_graph, default_caps, 3)
        pipeline = build_pipeline(plan.subgraph(0), AcceleratorConfig(setup_cycles=64), default_caps)
        result = execute_stream(pipeline, package(0, [""]))
        assert result.lane_cycles[0] == 64
        assert result.cycles == 64
        assert len(result.results[0][0]) == 0

    def test_each_character_read_once(self, caps_numbers_graph, default_caps):
        """Every extraction stage reads the document exactly once."""
        plan = scenario_plan(caps_numbers_graph, default_caps, 3)
        pipeline = build_pipeline(plan.subgraph(0), caps=default_caps)
        text = "Alice 42 and Bob 7 went to Room 101."
        result = execute_stream(pipeline, package(0, [text]))
        assert result.documents[0].char_reads == {name: len(text) for name in pipeline.extraction_stages}

    def test_lanes_share_equal_work(self, single_regex_graph, default_caps):
        """Identical documents spread round-robin load every lane equally."""
        plan = scenario_plan(single_regex_graph, default_caps, 3)
        pipeline = build_pipeline(plan.subgraph(0), AcceleratorConfig(lanes=4), default_caps)
        result = execute_stream(pipeline, package(0, ["Hello World from Mars"] * 4))
        assert len(set(result.lane_cycles)) == 1
        assert result.makespan == result.lane_cycles[0]
        assert result.cycles == 4 * result.makespan
        assert [result.documents[t].lane for t in range(4)] == [0, 1, 2, 3]
        assert result.simulated_throughput(250e6) == pytest.approx(result.payload_bytes * 250e6 / result.makespan)

    def test_overflow_fails_only_its_document(self, out_of_order_graph, default_caps):
        """A sorting-buffer overflow is reported for the affected entry alone."""
        graph = out_of_order_graph
        plan = scenario_plan(graph, default_caps, 3)
        tight = build_pipeline(plan.subgraph(0), AcceleratorConfig(sorting_buffer_capacity=1), default_caps)
        result = execute_stream(tight, package(0, ["xaaaay z", "z"]))
        assert 0 in result.errors
        assert result.errors[0].stage == "sort#3"
        assert len(result.results[1][0]) == 0

        roomy = build_pipeline(plan.subgraph(0), caps=default_caps)
        result = execute_stream(roomy, package(0, ["xaaaay z"]))
        assert not result.errors
        assert result.results[0][0] == GraphExecutor(graph).run(Document("d0", "xaaaay z"))["J"]
        assert len(result.results[0][0]) == 5

    def test_empty_package_rejected(self, single_regex_graph, default_caps):
        """Packages carry at least one document."""
        plan = scenario_plan(single_regex_graph, default_caps, 3)
        pipeline = build_pipeline(plan.subgraph(0), caps=default_caps)
        with pytest.raises(ValueError):
            execute_stream(pipeline, WorkPackage(0, 0, [], PackageReason.DRAIN))


class TestSortingBuffer:
    """Bounded reorder window."""

    def test_release_and_overflow(self):
        """The smallest tuple leaves when capacity is exceeded; later smaller keys overflow."""
        buffer = SortingBuffer("sort#1", key=lambda row: row[0], capacity=2)
        assert buffer.push((3,)) == []
        assert buffer.push((1,)) == []
        assert buffer.push((2,)) == [(1,)]
        with pytest.raises(SortingBufferOverflowError):
            buffer.push((0,))

    def test_drain_releases_in_order(self):
        """End of stream flushes everything sorted."""
        buffer = SortingBuffer("sort#1", key=lambda row: row[0], capacity=8)
        for value in (5, 2, 9, 2):
            buffer.push((value,))
        assert buffer.drain() == [(2,), (2,), (5,), (9,)]
        assert len(buffer) == 0
        assert buffer.peak == 4


class TestCostModel:
    """Package-rate and bandwidth bound throughput."""

    def test_calibrated_rate(self):
        """128-byte documents reach a tenth of peak."""
        assert calibrate_package_rate() == pytest.approx(48828.125)
        assert CostModel().package_rate == pytest.approx(48828.125)

    @pytest.mark.parametrize("size, expected", [(128, 50e6), (256, 100e6), (2048, 500e6), (1 << 20, 500e6)])
    def test_throughput(self, size, expected):
        """Linear in document size until the bandwidth bound."""
        assert model_throughput(CostModel(), size) == pytest.approx(expected)

    def test_scan_is_monotonic_and_clamped(self):
        """Throughput never decreases with size and never exceeds peak."""
        rows = model_scan(CostModel(), [64, 128, 256, 512, 1024, 2048, 4096])
        throughputs = [row["throughput"] for row in rows]
        assert throughputs == sorted(throughputs)
        assert all(row["fraction_of_peak"] <= 1.0 for row in rows)
        assert rows[-1]["fraction_of_peak"] == pytest.approx(1.0)

    def test_invalid_inputs(self):
        """Sizes and rates must be positive."""
        with pytest.raises(EstimatorError):
            model_throughput(CostModel(), 0)
        with pytest.raises(ConfigError):
            CostModel(package_rate=0)

    def test_trace_csv(self):
        """Stage traces render as CSV with a header row."""
        text = trace_csv([StageTrace("Union#3", 10, 4, 4)])
        assert text == "stage,cycles,tuples_in,tuples_out\nUnion#3,10,4,4\n"
