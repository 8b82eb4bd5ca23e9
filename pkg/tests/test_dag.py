"""Tests for task graph validation, layering, and readiness queries."""
from __future__ import annotations

import numpy as np
import pytest

from coda_fl import (
    CyclicDependency,
    TaskGraph,
    UnknownTask,
    ready_tasks,
    validate_and_layer,
)


def diamond() -> TaskGraph:
    return TaskGraph(
        ["a", "b", "c", "d"],
        [("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")],
    )


def random_dag(rng: np.random.Generator) -> TaskGraph:
    n = int(rng.integers(2, 9))
    ids = [f"t{v}" for v in range(n)]
    edges = [
        (ids[a], ids[b])
        for a in range(n)
        for b in range(a + 1, n)
        if rng.random() < 0.3
    ]
    return TaskGraph(ids, edges)


class TestTaskGraph:
    def test_duplicate_ids_rejected(self):
        with pytest.raises(ValueError):
            TaskGraph(["a", "a"], [])

    def test_unknown_edge_endpoint_rejected(self):
        with pytest.raises(UnknownTask):
            TaskGraph(["a", "b"], [("a", "z")])

    def test_self_loop_rejected(self):
        with pytest.raises(CyclicDependency):
            TaskGraph(["a"], [("a", "a")])

    def test_predecessors(self):
        graph = diamond()
        assert graph.predecessors("d") == ["b", "c"]
        assert graph.predecessors("a") == []


class TestLayering:
    def test_edgeless_graph_single_layer(self):
        graph = TaskGraph(["x", "y", "z"], [])
        layering = validate_and_layer(graph)
        assert layering.layers == [["x", "y", "z"]]

    def test_chain_gives_singleton_layers(self):
        graph = TaskGraph(["a", "b", "c"], [("a", "b"), ("b", "c")])
        layering = validate_and_layer(graph)
        assert layering.layers == [["a"], ["b"], ["c"]]

    def test_diamond_three_layers(self):
        layering = validate_and_layer(diamond())
        assert layering.layers == [["a"], ["b", "c"], ["d"]]
        assert layering.layer_index("c") == 1

    def test_cycle_reported_with_witness(self):
        graph = TaskGraph(["a", "b", "c"], [("a", "b"), ("b", "c"), ("c", "a")])
        with pytest.raises(CyclicDependency) as excinfo:
            validate_and_layer(graph)
        message = str(excinfo.value)
        assert "->" in message
        cycle = excinfo.value.cycle
        assert cycle[0] == cycle[-1]
        assert len(cycle) >= 3

    def test_longest_path_depth(self):
        # d depends on both a short and a long path; it lands after the long one
        graph = TaskGraph(
            ["a", "b", "c", "d"],
            [("a", "d"), ("a", "b"), ("b", "c"), ("c", "d")],
        )
        layering = validate_and_layer(graph)
        assert layering.layers == [["a"], ["b"], ["c"], ["d"]]

    def test_every_edge_respects_layer_order(self):
        rng = np.random.default_rng(47)
        for _ in range(50):
            graph = random_dag(rng)
            layering = validate_and_layer(graph)
            assert sorted(t for layer in layering.layers for t in layer) == sorted(
                graph.tasks
            )
            for src, dst in graph.edges:
                assert layering.layer_index(src) < layering.layer_index(dst)


class TestReadyTasks:
    def test_nothing_completed_frees_the_root(self):
        assert ready_tasks(diamond(), set()) == {"a"}

    def test_root_completed_frees_middle_layer(self):
        assert ready_tasks(diamond(), {"a"}) == {"b", "c"}

    def test_all_completed_frees_nothing(self):
        assert ready_tasks(diamond(), {"a", "b", "c", "d"}) == set()

    def test_unknown_completed_id_rejected(self):
        with pytest.raises(UnknownTask):
            ready_tasks(diamond(), {"nope"})

    def test_monotone_in_completed_set(self):
        rng = np.random.default_rng(53)
        for _ in range(30):
            graph = random_dag(rng)
            done: set[str] = set()
            ready_before = set(ready_tasks(graph, done))
            order = list(graph.tasks)
            rng.shuffle(order)
            for task in order:
                # completing tasks never revokes readiness of others
                done.add(task)
                ready_after = set(ready_tasks(graph, done))
                assert (ready_before - {task}) - ready_after == set()
                ready_before = ready_after
