"""Schedule container, invariant validator, and reporting views.

A Schedule is the full outcome of one scheduling run: the task-cluster
mapping, start/finish seconds per task, and the makespan. The validator
re-checks every structural invariant from scratch so any policy's
output can be audited independently of how it was produced.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..dag import Layering, TaskGraph
from ..errors import InvalidSchedule
from .matrix import ProcTimeMatrix

TIME_TOL = 1e-9


@dataclass(frozen=True)
class Schedule:
    """Task-to-cluster mapping with start/finish times and makespan."""

    task_ids: list[str]
    cluster_of: dict[str, int]
    start: dict[str, float]
    finish: dict[str, float]
    makespan: float


def validate_schedule(
    schedule: Schedule, graph: TaskGraph, matrix: ProcTimeMatrix
) -> None:
    """Re-check every Schedule invariant; raise InvalidSchedule on any breach.

    Checks: every task scheduled on a feasible cluster, finish = start +
    matrix seconds, precedence edges respected, per-cluster intervals
    non-overlapping, and makespan equal to the latest finish.
    """
    if set(schedule.task_ids) != set(graph.tasks):
        raise InvalidSchedule("schedule does not cover exactly the graph's tasks")
    for mapping in (schedule.cluster_of, schedule.start, schedule.finish):
        if set(mapping) != set(graph.tasks):
            raise InvalidSchedule("schedule fields must cover every task")

    for task in graph.tasks:
        v = matrix.task_ids.index(task)
        i = schedule.cluster_of[task]
        if not 0 <= i < matrix.n_clusters:
            raise InvalidSchedule(f"task {task}: cluster {i} out of range")
        if not matrix.feasible(v, i):
            raise InvalidSchedule(f"task {task}: assigned infeasible cluster {i}")
        if schedule.start[task] < -TIME_TOL:
            raise InvalidSchedule(f"task {task}: negative start time")
        expected = schedule.start[task] + float(matrix.seconds[v, i])
        if abs(schedule.finish[task] - expected) > TIME_TOL:
            raise InvalidSchedule(
                f"task {task}: finish {schedule.finish[task]!r} != start + duration"
            )

    for src, dst in graph.edges:
        if schedule.start[dst] < schedule.finish[src] - TIME_TOL:
            raise InvalidSchedule(
                f"edge {src} -> {dst}: successor starts before predecessor finishes"
            )

    by_cluster: dict[int, list[tuple[float, float, str]]] = {}
    for task in graph.tasks:
        by_cluster.setdefault(schedule.cluster_of[task], []).append(
            (schedule.start[task], schedule.finish[task], task)
        )
    for i, intervals in by_cluster.items():
        intervals.sort()
        for (_, prev_end, prev), (next_start, _, nxt) in zip(intervals, intervals[1:]):
            if next_start < prev_end - TIME_TOL:
                raise InvalidSchedule(
                    f"cluster {i}: tasks {prev} and {nxt} overlap in time"
                )

    latest = max(schedule.finish.values())
    if abs(schedule.makespan - latest) > TIME_TOL:
        raise InvalidSchedule(
            f"makespan {schedule.makespan!r} != latest finish {latest!r}"
        )


def evaluate_schedule(schedule: Schedule, layering: Layering) -> dict:
    """Reporting view of a schedule: makespan, per-layer, and per-task times.

    The layer-sum view adds up each layer's longest task duration; it
    equals the makespan for layer-synchronous schedules, while
    event-driven schedules may finish earlier. Both numbers are
    reported. Raises InvalidSchedule if a schedule detected as
    layer-synchronous disagrees with its layer sum.
    """
    per_task = {
        task: {
            "cluster": schedule.cluster_of[task],
            "start_s": schedule.start[task],
            "finish_s": schedule.finish[task],
            "duration_s": schedule.finish[task] - schedule.start[task],
        }
        for task in schedule.task_ids
    }

    layer_times = [
        max(per_task[task]["duration_s"] for task in layer)
        for layer in layering.layers
    ]
    layer_sum = sum(layer_times)

    synchronous = True
    barrier = 0.0
    for layer in layering.layers:
        for task in layer:
            if abs(schedule.start[task] - barrier) > TIME_TOL:
                synchronous = False
        barrier = max(schedule.finish[task] for task in layer)
    if synchronous and abs(schedule.makespan - layer_sum) > 1e-6:
        raise InvalidSchedule(
            "layer-synchronous schedule whose makespan differs from its layer sum"
        )

    return {
        "makespan_s": schedule.makespan,
        "layer_times_s": layer_times,
        "layer_sum_s": layer_sum,
        "layer_synchronous": synchronous,
        "per_task": per_task,
    }


def schedule_to_json(schedule: Schedule, layering: Layering) -> dict:
    """Export schema: assignments list, makespan, per-layer times."""
    report = evaluate_schedule(schedule, layering)
    return {
        "assignments": [
            {
                "task": task,
                "cluster": schedule.cluster_of[task],
                "start_s": schedule.start[task],
                "finish_s": schedule.finish[task],
            }
            for task in schedule.task_ids
        ],
        "makespan_s": schedule.makespan,
        "layer_times_s": report["layer_times_s"],
    }
