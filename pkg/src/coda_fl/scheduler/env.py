"""Event-driven scheduling environment over a processing-time matrix.

States track per-task status, per-cluster busy horizons, and the clock.
Actions either assign a ready task to an idle feasible cluster or wait,
which advances the clock to the next completion. A task becomes ready
the moment its own predecessors complete (no layer barrier). The reward
of a step is the negated clock advance; the clock itself is accumulated
from those same increments, so the summed rewards of a completed
episode equal the negated final clock bit-for-bit.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ..dag import TaskGraph
from ..errors import InvalidAction
from .matrix import ProcTimeMatrix
from .schedule import Schedule


class TaskStatus(Enum):
    NOT_READY = 0
    READY = 1
    RUNNING = 2
    COMPLETED = 3


@dataclass(frozen=True)
class Action:
    """Either Assign(task, cluster) or Wait."""

    task: int | None = None
    cluster: int | None = None

    @classmethod
    def assign(cls, task: int, cluster: int) -> "Action":
        return cls(task, cluster)

    @classmethod
    def wait(cls) -> "Action":
        return cls(None, None)

    @property
    def is_wait(self) -> bool:
        return self.task is None


@dataclass
class ScheduleState:
    """Mutable state of one scheduling episode."""

    statuses: list[TaskStatus]
    clock: float = 0.0
    cluster_task: dict[int, int] = field(default_factory=dict)
    assigned_cluster: dict[int, int] = field(default_factory=dict)
    start: dict[int, float] = field(default_factory=dict)
    finish: dict[int, float] = field(default_factory=dict)

    @property
    def done(self) -> bool:
        return all(s is TaskStatus.COMPLETED for s in self.statuses)

    def cluster_idle(self, cluster: int) -> bool:
        return cluster not in self.cluster_task

    def cluster_busy_until(self, cluster: int) -> float:
        """Finish horizon of the cluster's running task; clock if idle."""
        task = self.cluster_task.get(cluster)
        return self.clock if task is None else self.finish[task]


def env_reset(graph: TaskGraph, matrix: ProcTimeMatrix) -> ScheduleState:
    """Initial state: clock 0, root tasks ready, everything else not ready."""
    statuses = [
        TaskStatus.READY if not p else TaskStatus.NOT_READY
        for p in graph.pred_indices()
    ]
    return ScheduleState(statuses=statuses)


def valid_actions(state: ScheduleState, matrix: ProcTimeMatrix) -> list[Action]:
    """All actions valid in this state; empty only when the episode is done.

    Assign actions pair each ready task with each idle feasible
    cluster; Wait is valid whenever something is running.
    """
    actions = [
        Action.assign(v, i)
        for v, status in enumerate(state.statuses)
        if status is TaskStatus.READY
        for i in range(matrix.n_clusters)
        if state.cluster_idle(i) and matrix.feasible(v, i)
    ]
    if state.cluster_task:
        actions.append(Action.wait())
    return actions


def env_step(
    state: ScheduleState, action: Action, matrix: ProcTimeMatrix, graph: TaskGraph
) -> tuple[ScheduleState, float, bool]:
    """Apply one action in place; return (state, reward, done).

    Assign starts a ready task on an idle feasible cluster at the
    current clock (reward 0). Wait advances the clock to the earliest
    running finish, completes every task finishing then, frees their
    clusters, and promotes tasks whose predecessors are now all
    completed (reward = negated clock advance).
    """
    if action.is_wait:
        if not state.cluster_task:
            raise InvalidAction("wait with no running task")
        next_finish = min(state.finish[v] for v in state.cluster_task.values())
        delta = next_finish - state.clock
        state.clock += delta
        for cluster, task in list(state.cluster_task.items()):
            if state.finish[task] == next_finish:
                state.statuses[task] = TaskStatus.COMPLETED
                del state.cluster_task[cluster]
        for v, preds in enumerate(graph.pred_indices()):
            if state.statuses[v] is TaskStatus.NOT_READY and all(
                state.statuses[p] is TaskStatus.COMPLETED for p in preds
            ):
                state.statuses[v] = TaskStatus.READY
        return state, -delta, state.done

    v, i = action.task, action.cluster
    if state.statuses[v] is not TaskStatus.READY:
        raise InvalidAction(f"task {v} is not ready")
    if not state.cluster_idle(i):
        raise InvalidAction(f"cluster {i} is busy")
    if not matrix.feasible(v, i):
        raise InvalidAction(f"task {v} cannot reach its target on cluster {i}")
    state.statuses[v] = TaskStatus.RUNNING
    state.cluster_task[i] = v
    state.assigned_cluster[v] = i
    state.start[v] = state.clock
    state.finish[v] = state.clock + float(matrix.seconds[v, i])
    return state, 0.0, False


def state_to_schedule(state: ScheduleState, matrix: ProcTimeMatrix) -> Schedule:
    """Schedule of a completed episode.

    The makespan is the episode's final clock, so it equals the negated
    sum of the episode's rewards bit-for-bit; it can sit within a few
    ulps of the largest stored finish time.
    """
    if not state.done:
        raise InvalidAction("episode is not finished")
    ids = matrix.task_ids
    return Schedule(
        task_ids=list(ids),
        cluster_of={ids[v]: c for v, c in state.assigned_cluster.items()},
        start={ids[v]: t for v, t in state.start.items()},
        finish={ids[v]: t for v, t in state.finish.items()},
        makespan=state.clock,
    )


def encode_state(state: ScheduleState, matrix: ProcTimeMatrix) -> np.ndarray:
    """Fixed-size, scale-free vector encoding for the policy network.

    One-hot task statuses, then per-cluster remaining busy time, then
    the processing-time rows of ready tasks; times are normalized by
    the largest finite matrix entry, infeasible entries encode as 0.
    """
    n_tasks, n_clusters = matrix.n_tasks, matrix.n_clusters
    scale = float(matrix.seconds[np.isfinite(matrix.seconds)].max())
    one_hot = np.zeros((n_tasks, 4))
    for v, status in enumerate(state.statuses):
        one_hot[v, status.value] = 1.0
    busy = np.array(
        [
            max(0.0, state.cluster_busy_until(i) - state.clock) / scale
            for i in range(n_clusters)
        ]
    )
    rows = np.zeros((n_tasks, n_clusters))
    for v, status in enumerate(state.statuses):
        if status is TaskStatus.READY:
            row = matrix.seconds[v] / scale
            rows[v] = np.where(np.isfinite(row), row, 0.0)
    return np.concatenate([one_hot.ravel(), busy, rows.ravel()])
