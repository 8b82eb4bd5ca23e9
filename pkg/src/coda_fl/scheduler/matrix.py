"""Processing-time matrix: estimated seconds for every task-cluster pair.

Each entry combines the two halves of the model: the rounds a task
needs on a cluster (driven by the cluster's internal data
heterogeneity through the convergence bound) and the cluster's
per-round straggler latency. A pair whose accuracy target sits below
the cluster's convergence floor is infeasible and masked rather than
penalized, so schedules can never violate an accuracy constraint.

The heterogeneity that feeds the bound for a task trained on cluster i
is measured within that cluster: each member's EMD to the cluster's own
mixture, weighted by data share. That is the reference the task
actually trains against; the scenario-global EMD of a cluster remains
available through the heterogeneity module for reporting.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..clustering import ClusterAssignment
from ..convergence import ConvergenceParams, TaskSpec, gamma_bound, rounds_required
from ..dag import TaskGraph
from ..errors import EmptyCluster, NoFeasibleCluster, UnreachableAccuracy
from ..heterogeneity import LabelDistribution, WeightedMember, emd, mixture
from ..latency import ChannelModel, DeviceSpec, WorkloadSpec, task_time


@dataclass(frozen=True)
class ProcTimeMatrix:
    """V x N estimated completion times, with infeasible pairs at +inf."""

    task_ids: list[str]
    seconds: np.ndarray
    rounds: np.ndarray

    def __post_init__(self) -> None:
        seconds = np.asarray(self.seconds, dtype=np.float64)
        rounds = np.asarray(self.rounds, dtype=np.int64)
        if seconds.ndim != 2 or seconds.shape[0] != len(self.task_ids):
            raise ValueError("seconds must be a V x N matrix aligned with task_ids")
        if rounds.shape != seconds.shape:
            raise ValueError("rounds must match the seconds shape")
        finite = np.isfinite(seconds)
        if (seconds[finite] <= 0).any():
            raise ValueError("feasible entries must be strictly positive")
        if not finite.any(axis=1).all():
            missing = [self.task_ids[v] for v in np.flatnonzero(~finite.any(axis=1))]
            raise NoFeasibleCluster(f"no feasible cluster for tasks: {missing}")
        object.__setattr__(self, "seconds", seconds)
        object.__setattr__(self, "rounds", rounds)

    @property
    def n_tasks(self) -> int:
        return self.seconds.shape[0]

    @property
    def n_clusters(self) -> int:
        return self.seconds.shape[1]

    def feasible(self, task: int, cluster: int) -> bool:
        return bool(np.isfinite(self.seconds[task, cluster]))


def cluster_gamma(
    members: np.ndarray,
    dists: list[LabelDistribution],
    data_weights: np.ndarray,
    l_div: float,
) -> float:
    """Heterogeneity term of one cluster: weighted member-to-mixture EMD.

    The reference distribution is the cluster's own data mixture, and
    the weights are the members' normalized data shares.
    """
    members = np.asarray(members, dtype=np.int64)
    if members.size == 0:
        raise EmptyCluster("gamma of an empty cluster")
    member_dists = [dists[u] for u in members]
    weights = np.asarray([data_weights[u] for u in members], dtype=np.float64)
    reference = mixture(
        [WeightedMember(d, float(w)) for d, w in zip(member_dists, weights)]
    )
    emds = [emd(d, reference) for d in member_dists]
    shares = weights / weights.sum()
    return gamma_bound(list(shares), emds, l_div)


def build_proc_time_matrix(
    graph: TaskGraph,
    tasks: list[TaskSpec],
    clusters: ClusterAssignment,
    devices: list[DeviceSpec],
    channel: ChannelModel,
    workload: WorkloadSpec,
    conv_params: ConvergenceParams,
    dists: list[LabelDistribution],
) -> ProcTimeMatrix:
    """Estimate seconds[v][i] = required rounds x per-round straggler time.

    Args:
        graph: task dependency graph; its task order fixes the rows.
        tasks: specs aligned with graph.tasks.
        clusters: client partition fixing the columns.
        devices: per-client device parameters.
        channel: shared uplink channel.
        workload: per-round workload; each task's model size overrides
            the workload's model_size_bits for its own row.
        conv_params: convergence calibration.
        dists: per-client label distributions.

    Raises:
        NoFeasibleCluster: if some task is infeasible on every cluster.
    """
    if [t.id for t in tasks] != list(graph.tasks):
        raise ValueError("tasks must align with graph.tasks")
    if len(devices) != clusters.n_clients or len(dists) != clusters.n_clients:
        raise ValueError("devices and dists must cover every client")

    data_weights = np.array([dev.dataset_bits for dev in devices], dtype=np.float64)
    n_tasks, n_clusters = len(tasks), clusters.n_clusters
    seconds = np.full((n_tasks, n_clusters), np.inf)
    rounds = np.zeros((n_tasks, n_clusters), dtype=np.int64)

    gammas = [
        cluster_gamma(clusters.members(i), dists, data_weights, conv_params.l_div)
        for i in range(n_clusters)
    ]
    member_devices = [
        [devices[u] for u in clusters.members(i)] for i in range(n_clusters)
    ]

    for v, task in enumerate(tasks):
        wl = replace(workload, model_size_bits=task.model_size_bits)
        for i in range(n_clusters):
            try:
                r = rounds_required(task, conv_params, gammas[i])
            except UnreachableAccuracy:
                continue
            rounds[v, i] = r
            seconds[v, i] = task_time(member_devices[i], channel, wl, r)

    return ProcTimeMatrix(list(graph.tasks), seconds, rounds)
