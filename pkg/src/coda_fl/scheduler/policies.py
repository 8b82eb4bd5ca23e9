"""Deterministic scheduling policies: greedy list scheduling and exhaustive search.

Greedy is the fast event-driven baseline: whenever clusters are idle,
it commits the ready task and idle cluster whose finish time is
earliest. Exhaustive enumerates every task-to-cluster mapping together
with every per-cluster execution order under earliest-start semantics,
which covers all schedules that cannot be improved by shifting a task
earlier, so its best makespan is provably minimal. Its cost grows as
N^V times the product of per-cluster order counts; the limit guard
keeps it on small instances.
"""
from __future__ import annotations

import itertools

from ..dag import TaskGraph
from ..errors import InstanceTooLarge
from .matrix import ProcTimeMatrix
from .schedule import Schedule


def _to_schedule(
    matrix: ProcTimeMatrix,
    cluster_of: dict[int, int],
    start: dict[int, float],
    finish: dict[int, float],
) -> Schedule:
    ids = matrix.task_ids
    return Schedule(
        task_ids=list(ids),
        cluster_of={ids[v]: i for v, i in cluster_of.items()},
        start={ids[v]: t for v, t in start.items()},
        finish={ids[v]: t for v, t in finish.items()},
        makespan=max(finish.values()),
    )


def greedy_schedule(graph: TaskGraph, matrix: ProcTimeMatrix) -> Schedule:
    """Event-driven list scheduling.

    At every decision point, among ready tasks and idle feasible
    clusters, assigns the pair minimizing finish time, breaking ties by
    lower task index then lower cluster index; when nothing can be
    assigned, advances to the earliest running finish. Deterministic.
    """
    preds = graph.pred_indices()
    n_tasks = matrix.n_tasks
    ready = {v for v in range(n_tasks) if not preds[v]}
    completed: set[int] = set()
    running: dict[int, int] = {}
    cluster_of: dict[int, int] = {}
    start: dict[int, float] = {}
    finish: dict[int, float] = {}
    clock = 0.0

    while len(completed) < n_tasks:
        while True:
            candidates = [
                (clock + float(matrix.seconds[v, i]), v, i)
                for v in sorted(ready)
                for i in range(matrix.n_clusters)
                if i not in running and matrix.feasible(v, i)
            ]
            if not candidates:
                break
            end, v, i = min(candidates)
            ready.discard(v)
            running[i] = v
            cluster_of[v] = i
            start[v] = clock
            finish[v] = end
        clock = min(finish[v] for v in running.values())
        for i, v in list(running.items()):
            if finish[v] == clock:
                completed.add(v)
                del running[i]
        for v in range(n_tasks):
            if (
                v not in completed
                and v not in ready
                and v not in running.values()
                and all(p in completed for p in preds[v])
            ):
                ready.add(v)

    return _to_schedule(matrix, cluster_of, start, finish)


def _earliest_start_times(
    preds: list[list[int]],
    cluster_order: dict[int, list[int]],
    matrix: ProcTimeMatrix,
    mapping: tuple[int, ...],
) -> tuple[dict[int, float], dict[int, float]] | None:
    # combined precedence: graph edges plus the chain each cluster order imposes
    n_tasks = len(preds)
    combined: list[set[int]] = [set(p) for p in preds]
    for order in cluster_order.values():
        for earlier, later in zip(order, order[1:]):
            combined[later].add(earlier)

    start: dict[int, float] = {}
    finish: dict[int, float] = {}
    pending = set(range(n_tasks))
    while pending:
        ready = [v for v in pending if combined[v] <= finish.keys()]
        if not ready:
            return None  # cluster order contradicts the precedence graph
        for v in ready:
            start[v] = max((finish[p] for p in combined[v]), default=0.0)
            finish[v] = start[v] + float(matrix.seconds[v, mapping[v]])
            pending.discard(v)
    return start, finish


def exhaustive_schedule(
    graph: TaskGraph, matrix: ProcTimeMatrix, limit: int = 8
) -> Schedule:
    """Provably minimal-makespan schedule by full enumeration.

    Enumerates all feasible task-to-cluster mappings and, per mapping,
    all per-cluster execution orders; earliest-start semantics make the
    timing unique given both. Refuses instances with more than `limit`
    tasks or clusters.
    """
    n_tasks, n_clusters = matrix.n_tasks, matrix.n_clusters
    if n_tasks > limit or n_clusters > limit:
        raise InstanceTooLarge(
            f"exhaustive search limited to {limit} tasks/clusters, "
            f"got V={n_tasks}, N={n_clusters}"
        )
    preds = graph.pred_indices()
    feasible_clusters = [
        [i for i in range(n_clusters) if matrix.feasible(v, i)]
        for v in range(n_tasks)
    ]

    best: tuple[float, dict, dict, dict] | None = None
    for mapping in itertools.product(*feasible_clusters):
        grouped: dict[int, list[int]] = {}
        for v, i in enumerate(mapping):
            grouped.setdefault(i, []).append(v)
        clusters_used = sorted(grouped)
        for orders in itertools.product(
            *(itertools.permutations(grouped[i]) for i in clusters_used)
        ):
            cluster_order = {
                i: list(order) for i, order in zip(clusters_used, orders)
            }
            times = _earliest_start_times(preds, cluster_order, matrix, mapping)
            if times is None:
                continue
            start, finish = times
            makespan = max(finish.values())
            if best is None or makespan < best[0]:
                best = (makespan, dict(enumerate(mapping)), start, finish)

    assert best is not None  # matrix guarantees a feasible cluster per task
    _, cluster_of, start, finish = best
    return _to_schedule(matrix, cluster_of, start, finish)
