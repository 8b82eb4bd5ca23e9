"""Task dependency graph: validation, layer partition, readiness queries.

Tasks form a DAG where an edge v -> q means task q may only start after
task v reached its accuracy target. Layers are the longest-path
partition: a task's layer is one past the deepest of its predecessors,
so every layer contains tasks that can run in parallel.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CyclicDependency, UnknownTask


@dataclass(frozen=True)
class TaskGraph:
    """Directed acyclic dependency graph over task ids."""

    tasks: list[str]
    edges: list[tuple[str, str]]

    def __post_init__(self) -> None:
        if len(set(self.tasks)) != len(self.tasks):
            raise ValueError("task ids must be unique")
        known = set(self.tasks)
        for src, dst in self.edges:
            if src not in known or dst not in known:
                raise UnknownTask(f"edge ({src}, {dst}) references an unknown task")
            if src == dst:
                raise CyclicDependency([src, src])

    @property
    def n_tasks(self) -> int:
        return len(self.tasks)

    def index_of(self, task: str) -> int:
        try:
            return self.tasks.index(task)
        except ValueError:
            raise UnknownTask(f"unknown task id {task!r}") from None

    def predecessors(self, task: str) -> list[str]:
        if task not in set(self.tasks):
            raise UnknownTask(f"unknown task id {task!r}")
        return [src for src, dst in self.edges if dst == task]

    def pred_indices(self) -> list[list[int]]:
        """Predecessor lists in task-index form, index-aligned with tasks."""
        idx = {t: k for k, t in enumerate(self.tasks)}
        preds: list[list[int]] = [[] for _ in self.tasks]
        for src, dst in self.edges:
            if idx[src] not in preds[idx[dst]]:
                preds[idx[dst]].append(idx[src])
        return preds


@dataclass(frozen=True)
class Layering:
    """Ordered layers S_1..S_L partitioning the task set."""

    layers: list[list[str]]
    _index: dict[str, int] = field(repr=False, compare=False, default_factory=dict)

    def __post_init__(self) -> None:
        index = {}
        for depth, layer in enumerate(self.layers):
            for task in layer:
                index[task] = depth
        object.__setattr__(self, "_index", index)

    @property
    def n_layers(self) -> int:
        return len(self.layers)

    def layer_index(self, task: str) -> int:
        if task not in self._index:
            raise UnknownTask(f"unknown task id {task!r}")
        return self._index[task]


def _witness_cycle(graph: TaskGraph, stuck: set[str]) -> list[str]:
    # every stuck node has a stuck predecessor; walking predecessors
    # must revisit a node, and that revisit closes a cycle
    preds = {
        t: [s for s, d in graph.edges if d == t and s in stuck] for t in stuck
    }
    node = next(iter(sorted(stuck)))
    trail = [node]
    seen = {node: 0}
    while True:
        node = sorted(preds[node])[0]
        if node in seen:
            # trail was walked along predecessors; reversing the loop
            # segment yields the cycle in edge direction
            forward = trail[seen[node] :][::-1]
            return forward + [forward[0]]
        seen[node] = len(trail)
        trail.append(node)


def validate_and_layer(graph: TaskGraph) -> Layering:
    """Longest-path layering of a task graph.

    layer(v) = 1 + max layer over predecessors, computed in topological
    order. Tasks inside a layer are ordered by id.

    Raises:
        CyclicDependency: with a witness cycle, if the graph has one.
    """
    preds = {t: set(graph.predecessors(t)) for t in graph.tasks}
    depth: dict[str, int] = {}
    remaining = set(graph.tasks)
    while remaining:
        ready = [t for t in remaining if preds[t] <= depth.keys()]
        if not ready:
            raise CyclicDependency(_witness_cycle(graph, remaining))
        for t in ready:
            depth[t] = 1 + max((depth[p] for p in preds[t]), default=0)
            remaining.discard(t)
    n_layers = max(depth.values(), default=0)
    layers = [
        sorted(t for t in graph.tasks if depth[t] == level)
        for level in range(1, n_layers + 1)
    ]
    return Layering(layers)


def ready_tasks(graph: TaskGraph, completed: set[str]) -> set[str]:
    """Tasks not yet completed whose predecessors are all completed."""
    known = set(graph.tasks)
    unknown = completed - known
    if unknown:
        raise UnknownTask(f"completed set references unknown tasks: {sorted(unknown)}")
    return {
        t
        for t in graph.tasks
        if t not in completed and set(graph.predecessors(t)) <= completed
    }
