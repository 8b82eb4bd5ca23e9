"""Seedable simulator for clustered, dependency-aware federated learning.

The package models a federation of wireless clients with non-IID label
distributions, clusters them by distribution similarity, predicts the
communication rounds each learning task needs on each cluster, turns
rounds into wall-clock processing times, and schedules a DAG of tasks
onto the clusters to minimize total completion time.
"""
from __future__ import annotations

from .clustering import (
    ClusterAssignment,
    agglomerative_cluster,
    emd_balanced_cluster,
    kmeans_cluster,
    mean_intra_cluster_distance,
    random_cluster,
)
from .convergence import (
    ConvergenceParams,
    TaskSpec,
    expected_gap,
    gamma_bound,
    gap_target,
    learning_curve,
    noise_floor,
    rounds_order_bound,
    rounds_required,
)
from .dag import Layering, TaskGraph, ready_tasks, validate_and_layer
from .errors import (
    CodaFlError,
    ConfigError,
    CyclicDependency,
    DegenerateHistogram,
    DegenerateWeights,
    DimensionMismatch,
    EmptyCluster,
    InfeasibleTarget,
    InstanceTooLarge,
    InvalidAction,
    InvalidClusterCount,
    InvalidDistanceMatrix,
    InvalidSchedule,
    NoFeasibleCluster,
    UnknownTask,
    UnreachableAccuracy,
)
from .experiment import (
    CLUSTERERS,
    DEFAULT_CONFIG,
    POLICIES,
    RunResult,
    Scenario,
    cluster_clients,
    compare_baselines,
    generate_scenario,
    partition_data,
    run_pipeline,
)
from .heterogeneity import (
    LabelDistribution,
    LabelHistogram,
    WeightedMember,
    cluster_emd,
    emd,
    mixture,
    normalize,
    pairwise_distance_matrix,
    weighted_average_emd,
)
from .latency import (
    ChannelModel,
    DeviceSpec,
    WorkloadSpec,
    client_round_time,
    dbm_to_watts,
    task_time,
    transmission_rate,
)
from .scheduler import (
    Action,
    PolicyParams,
    PPOHyperparams,
    ProcTimeMatrix,
    Schedule,
    ScheduleState,
    TaskStatus,
    build_proc_time_matrix,
    encode_state,
    env_reset,
    env_step,
    evaluate_schedule,
    exhaustive_schedule,
    greedy_schedule,
    ppo_train,
    schedule_to_json,
    state_to_schedule,
    valid_actions,
    validate_schedule,
)

__version__ = "0.1.0"

__all__ = [
    "Action",
    "CLUSTERERS",
    "ChannelModel",
    "ClusterAssignment",
    "CodaFlError",
    "ConfigError",
    "ConvergenceParams",
    "CyclicDependency",
    "DEFAULT_CONFIG",
    "DegenerateHistogram",
    "DegenerateWeights",
    "DeviceSpec",
    "DimensionMismatch",
    "EmptyCluster",
    "InfeasibleTarget",
    "InstanceTooLarge",
    "InvalidAction",
    "InvalidClusterCount",
    "InvalidDistanceMatrix",
    "InvalidSchedule",
    "LabelDistribution",
    "LabelHistogram",
    "Layering",
    "NoFeasibleCluster",
    "POLICIES",
    "PPOHyperparams",
    "PolicyParams",
    "ProcTimeMatrix",
    "RunResult",
    "Scenario",
    "Schedule",
    "ScheduleState",
    "TaskGraph",
    "TaskSpec",
    "TaskStatus",
    "UnknownTask",
    "UnreachableAccuracy",
    "WeightedMember",
    "WorkloadSpec",
    "agglomerative_cluster",
    "build_proc_time_matrix",
    "client_round_time",
    "cluster_clients",
    "cluster_emd",
    "compare_baselines",
    "dbm_to_watts",
    "emd",
    "emd_balanced_cluster",
    "encode_state",
    "env_reset",
    "env_step",
    "evaluate_schedule",
    "exhaustive_schedule",
    "expected_gap",
    "gamma_bound",
    "gap_target",
    "generate_scenario",
    "greedy_schedule",
    "kmeans_cluster",
    "learning_curve",
    "mean_intra_cluster_distance",
    "mixture",
    "noise_floor",
    "normalize",
    "pairwise_distance_matrix",
    "partition_data",
    "ppo_train",
    "random_cluster",
    "ready_tasks",
    "rounds_order_bound",
    "rounds_required",
    "run_pipeline",
    "schedule_to_json",
    "state_to_schedule",
    "task_time",
    "transmission_rate",
    "valid_actions",
    "validate_schedule",
]
