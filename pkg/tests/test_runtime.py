"""
Tests for the runtime: packing rules, the dispatcher, corpus runs and corpus/annotation files.
"""

import json
import random
from collections import deque

import pytest

from core.accel import AcceleratorConfig, build_pipeline, execute_stream
from core.exceptions import CorpusNotFoundError, DispatchInvariantError
from core.models.annotations import Document
from core.models.dispatch import CompletionSignal, DispatchConfig, PackageEntry, PackageReason
from core.models.plan import PartitionPlan
from core.operators import GraphExecutor, regex_extract
from core.partitioner import scenario_plan, scenario_plans
from core.runtime import (
    CorpusItem,
    Dispatcher,
    TicketFailed,
    annotation_records,
    corpus_from_documents,
    load_corpus,
    pack,
    run_corpus,
    view_counts,
    write_annotations_jsonl,
    write_corpus_jsonl,
)

CAPS = "[A-Z][a-z]+"


def entries(sizes, submitted_at=0.0):
    return deque(PackageEntry(i, Document(f"d{i}", "x" * size), submitted_at) for i, size in enumerate(sizes))


@pytest.fixture
def dispatcher_factory(single_regex_graph, default_caps):
    """Dispatchers over the single-regex subgraph; stopped after the test."""
    plan = scenario_plan(single_regex_graph, default_caps, 3)
    pipelines = {0: build_pipeline(plan.subgraph(0), caps=default_caps)}
    started = []

    def make(**settings):
        dispatcher = Dispatcher(pipelines, DispatchConfig(**settings)).start()
        started.append(dispatcher)
        return dispatcher

    yield make
    for dispatcher in started:
        dispatcher.stop()


class TestPacking:
    """Package cutting rules."""

    def test_byte_threshold(self):
        """A package closes on the document that pushes it over the byte threshold."""
        pending = entries([300] * 5)
        cut, reason = pack(pending, DispatchConfig(byte_threshold=1000), now=0.0)
        assert reason == PackageReason.BYTES
        assert [e.ticket for e in cut] == [0, 1, 2, 3]
        assert len(pending) == 1

    def test_max_docs(self):
        """Small documents fill a package up to the document limit."""
        cut, reason = pack(entries([64] * 8), DispatchConfig(), now=0.0)
        assert reason == PackageReason.MAX_DOCS
        assert len(cut) == 8

    def test_large_document_alone(self):
        """A document above the threshold travels in its own package."""
        cut, reason = pack(entries([4096, 10]), DispatchConfig(), now=0.0)
        assert reason == PackageReason.BYTES
        assert len(cut) == 1

    def test_timeout(self):
        """Below every threshold the head waits for the flush timeout."""
        config = DispatchConfig(flush_timeout_s=0.001)
        pending = entries([10, 10])
        assert pack(pending, config, now=0.0005) is None
        cut, reason = pack(pending, config, now=0.002)
        assert reason == PackageReason.TIMEOUT
        assert len(cut) == 2
        assert not pending

    def test_drain(self):
        """Draining flushes whatever is pending."""
        cut, reason = pack(entries([10]), DispatchConfig(flush_timeout_s=60.0), now=0.0, draining=True)
        assert reason == PackageReason.DRAIN
        assert len(cut) == 1

    def test_empty_queue(self):
        """Nothing to pack."""
        assert pack(deque(), DispatchConfig(), now=1.0, draining=True) is None

    def test_order_preserved(self):
        """Entries leave in submission order across packages."""
        pending = entries([64] * 11)
        first, _ = pack(pending, DispatchConfig(), now=0.0)
        second, reason = pack(pending, DispatchConfig(), now=0.0, draining=True)
        assert [e.ticket for e in first + second] == list(range(11))
        assert reason == PackageReason.DRAIN


class TestDispatcher:
    """Submission, batching and wakeups."""

    def test_full_package_wakes_each_worker(self, dispatcher_factory):
        """Four submissions fill one package and every ticket gets its own result."""
        dispatcher = dispatcher_factory(max_docs_per_package=4, flush_timeout_s=60.0)
        docs = [Document(f"d{i}", f"Doc {i} by Ann") for i in range(4)]
        tickets = [dispatcher.submit(0, doc) for doc in docs]
        for ticket, doc in zip(tickets, docs):
            assert ticket.wait(timeout=10) == [regex_extract(doc, CAPS)]
        dispatcher.stop()
        assert dispatcher.stats.packages == 1
        assert dispatcher.stats.reasons["max_docs"] == 1
        assert dispatcher.stats.wakeups == 4

    def test_timeout_flush(self, dispatcher_factory):
        """A lone submission is flushed by the timeout."""
        dispatcher = dispatcher_factory(flush_timeout_s=0.001)
        doc = Document("d", "Hello There")
        assert dispatcher.submit(0, doc).wait(timeout=10) == [regex_extract(doc, CAPS)]
        dispatcher.stop()
        assert dispatcher.stats.reasons["timeout"] == 1

    def test_drain_flush(self, dispatcher_factory):
        """Draining sends pending entries without waiting for thresholds."""
        dispatcher = dispatcher_factory(flush_timeout_s=60.0)
        tickets = [dispatcher.submit(0, Document(f"d{i}", "Some Text")) for i in range(2)]
        dispatcher.drain()
        for ticket in tickets:
            assert len(ticket.wait(timeout=10)[0]) == 2
        dispatcher.stop()
        assert dispatcher.stats.reasons["drain"] == 1

    def test_duplicate_completion(self, dispatcher_factory):
        """A second completion signal for a finished package is an invariant violation."""
        dispatcher = dispatcher_factory()
        dispatcher.call(0, Document("d", "Once"))
        with pytest.raises(DispatchInvariantError, match="duplicate completion signal for package 0"):
            dispatcher.complete(CompletionSignal(0))

    def test_unknown_completion(self, dispatcher_factory):
        """Signals for packages never sent are rejected."""
        dispatcher = dispatcher_factory()
        with pytest.raises(DispatchInvariantError, match="unknown completion signal for package 99"):
            dispatcher.complete(CompletionSignal(99))

    def test_executor_crash_wakes_workers(self, single_regex_graph, default_caps, monkeypatch):
        """An unexpected error inside a pipeline fails the package's tickets instead of leaving them asleep."""
        def crash(pipeline, package):
            raise RuntimeError("stage blew up")

        monkeypatch.setattr("core.runtime.dispatch.execute_stream", crash)
        plan = scenario_plan(single_regex_graph, default_caps, 3)
        dispatcher = Dispatcher({0: build_pipeline(plan.subgraph(0), caps=default_caps)}, DispatchConfig()).start()
        tickets = [dispatcher.submit(0, Document(f"d{i}", "Abc")) for i in range(2)]
        dispatcher.drain()
        for ticket in tickets:
            with pytest.raises(TicketFailed, match="RuntimeError: stage blew up"):
                ticket.wait(timeout=10)
        with pytest.raises(DispatchInvariantError, match="stage blew up"):
            dispatcher.stop()
        assert dispatcher.stats.wakeups == 2

    def test_unknown_subgraph(self, dispatcher_factory):
        """Submissions name an existing subgraph."""
        dispatcher = dispatcher_factory()
        with pytest.raises(DispatchInvariantError):
            dispatcher.submit(7, Document("d", "x"))


class TestRunCorpus:
    """Multi-threaded corpus runs under partition plans."""

    def test_every_plan_matches_software(self, union_join_graph, cities_graph, documents, default_caps):
        """Annotations are identical for the software plan, every scenario and any thread count."""
        corpus = corpus_from_documents(documents)
        for graph in (union_join_graph, cities_graph):
            reference = GraphExecutor(graph)
            expected = {doc.id: reference.run(doc) for doc in documents}
            plans = [PartitionPlan.software_only(graph)] + scenario_plans(graph, default_caps)
            for plan in plans:
                for threads in (1, 4):
                    result = run_corpus(plan, corpus, DispatchConfig(worker_threads=threads), caps=default_caps)
                    assert result.failures == {}
                    assert result.annotations == expected

    def test_output_is_identical_across_runs(self, caps_numbers_graph, documents, default_caps, tmp_path):
        """The annotation file does not depend on scenario or thread count."""
        corpus = corpus_from_documents(documents)
        software = run_corpus(PartitionPlan.software_only(caps_numbers_graph), corpus)
        offloaded = run_corpus(
            scenario_plan(caps_numbers_graph, default_caps, 3), corpus, DispatchConfig(worker_threads=3),
            caps=default_caps,
        )
        write_annotations_jsonl(software.annotations, tmp_path / "a.jsonl")
        write_annotations_jsonl(offloaded.annotations, tmp_path / "b.jsonl")
        assert (tmp_path / "a.jsonl").read_bytes() == (tmp_path / "b.jsonl").read_bytes()

    def test_stats_and_profile(self, single_regex_graph, documents, default_caps):
        """Every document goes through the accelerator once and is counted in the profile."""
        corpus = corpus_from_documents(documents)
        result = run_corpus(scenario_plan(single_regex_graph, default_caps, 3), corpus, caps=default_caps)
        assert result.stats.entries == len(documents)
        assert result.stats.wakeups == len(documents)
        assert result.profile.docs == len(documents)
        assert result.profile.bytes == sum(doc.payload_bytes for doc in documents)
        assert result.stats.makespan_cycles > 0
        assert result.stats.simulated_throughput(250e6) > 0
        assert [trace.stage for trace in result.stage_traces] == ["RegexExtract#1"]

    def test_unreadable_item_reported(self, single_regex_graph, documents):
        """Failed corpus items are listed and the rest still runs."""
        corpus = corpus_from_documents(documents) + [CorpusItem("bad.txt", error="unreadable: invalid utf-8")]
        result = run_corpus(PartitionPlan.software_only(single_regex_graph), corpus)
        assert result.failures == {"bad.txt": "unreadable: invalid utf-8"}
        assert len(result.annotations) == len(documents)
        assert result.documents == len(documents) + 1

    def test_accelerator_error_isolated(self, out_of_order_graph, default_caps):
        """A document failing in a pipeline stage does not stop its package mates."""
        corpus = corpus_from_documents([Document("bad", "xaaaay z"), Document("good", "z xy z")])
        result = run_corpus(
            scenario_plan(out_of_order_graph, default_caps, 3),
            corpus,
            DispatchConfig(worker_threads=2, max_docs_per_package=2),
            accel=AcceleratorConfig(sorting_buffer_capacity=1),
            caps=default_caps,
        )
        assert list(result.failures) == ["bad"]
        assert "sort#3" in result.failures["bad"]
        assert result.annotations["good"]["J"].spans() == [(2, 4)]

    def test_executor_crash_ends_run(self, single_regex_graph, documents, default_caps, monkeypatch):
        """A crashing pipeline surfaces as an invariant violation once every worker is released."""
        def crash(pipeline, package):
            raise TypeError("bad tuple")

        monkeypatch.setattr("core.runtime.dispatch.execute_stream", crash)
        plan = scenario_plan(single_regex_graph, default_caps, 3)
        with pytest.raises(DispatchInvariantError, match="TypeError: bad tuple"):
            run_corpus(plan, corpus_from_documents(documents), DispatchConfig(worker_threads=3), caps=default_caps)


class TestDispatchUnderLoad:
    """Many worker threads sharing one accelerated subgraph."""

    def test_ten_thousand_documents(self, single_regex_graph, default_caps, monkeypatch):
        """Each document is woken once with its own result and every package stays within the packing limits."""
        rng = random.Random(17)
        words = ["Alpha", "beta", "Gamma", "delta", "Epsilon", "zeta", "42", "Eta", "theta"]
        docs = [
            Document(f"d{i:05d}", " ".join(rng.choice(words) for _ in range(rng.randint(0, 12))))
            for i in range(10_000)
        ]
        packages = []

        def recording_stream(pipeline, package):
            packages.append(package)
            return execute_stream(pipeline, package)

        monkeypatch.setattr("core.runtime.dispatch.execute_stream", recording_stream)
        config = DispatchConfig(byte_threshold=200, max_docs_per_package=8, worker_threads=16)
        plan = scenario_plan(single_regex_graph, default_caps, 3)
        result = run_corpus(plan, corpus_from_documents(docs), config, caps=default_caps, profile=False)

        assert result.failures == {}
        assert result.stats.entries == result.stats.wakeups == len(docs)
        assert result.stats.packages == len(packages)
        assert sorted(entry.ticket for package in packages for entry in package.entries) == list(range(len(docs)))
        for package in packages:
            sizes = [entry.document.payload_bytes for entry in package.entries]
            assert 1 <= len(sizes) <= config.max_docs_per_package
            assert sum(sizes[:-1]) <= config.byte_threshold
            if package.reason != PackageReason.BYTES:
                assert sum(sizes) <= config.byte_threshold
        reference = GraphExecutor(single_regex_graph)
        assert all(result.annotations[doc.id] == reference.run(doc) for doc in docs)


class TestCorpusFiles:
    """Corpus ingestion and annotation output."""

    def test_directory_with_unreadable_file(self, tmp_path):
        """Invalid UTF-8 yields a failed item in file-name order."""
        (tmp_path / "a.txt").write_text("Hello", encoding="utf-8")
        (tmp_path / "b.txt").write_bytes(b"\xff\xfe bad")
        (tmp_path / "ignored.md").write_text("not a document")
        items = load_corpus(tmp_path)
        assert [item.doc_id for item in items] == ["a.txt", "b.txt"]
        assert items[0].ok and items[0].document.text == "Hello"
        assert not items[1].ok
        assert items[1].error.startswith("unreadable")

    def test_jsonl_with_malformed_line(self, tmp_path):
        """Malformed records are reported by line number."""
        path = tmp_path / "corpus.jsonl"
        path.write_text('{"id": "x", "text": "Hi"}\n{"id": 1}\n\n{"id": "y", "text": ""}\n', encoding="utf-8")
        items = load_corpus(path)
        assert [item.doc_id for item in items] == ["x", "line:2", "y"]
        assert [item.ok for item in items] == [True, False, True]

    def test_missing_corpus(self, tmp_path):
        """A path that does not exist is a user error."""
        with pytest.raises(CorpusNotFoundError, match="corpus not found"):
            load_corpus(tmp_path / "missing")

    def test_written_corpus_loads_back(self, documents, tmp_path):
        """Generated corpora are plain JSON Lines."""
        path = write_corpus_jsonl(documents, tmp_path / "out" / "corpus.jsonl")
        loaded = load_corpus(path)
        assert [item.document for item in loaded] == documents

    def test_annotation_records(self, caps_numbers_graph):
        """Records are sorted by document then view and carry span offsets."""
        reference = GraphExecutor(caps_numbers_graph)
        annotations = {
            "z": reference.run(Document("z", "Bob 7")),
            "a": reference.run(Document("a", "nothing")),
            "m": reference.run(Document("m", "Ann 1 and Eve 2")),
        }
        records = list(annotation_records(annotations))
        assert [r["doc"] for r in records] == ["m", "m", "z"]
        assert records[0] == {"doc": "m", "view": "Named", "cols": {"name": {"begin": 0, "end": 3}}}
        assert view_counts(annotations) == {"Named": 3}

    def test_annotation_file(self, caps_numbers_graph, tmp_path):
        """One JSON object per line with sorted keys."""
        annotations = {"d": GraphExecutor(caps_numbers_graph).run(Document("d", "Bob 7"))}
        count = write_annotations_jsonl(annotations, tmp_path / "ann.jsonl")
        lines = (tmp_path / "ann.jsonl").read_text(encoding="utf-8").splitlines()
        assert count == len(lines) == 1
        assert lines[0] == '{"cols": {"name": {"begin": 0, "end": 3}}, "doc": "d", "view": "Named"}'
        assert json.loads(lines[0])["view"] == "Named"
