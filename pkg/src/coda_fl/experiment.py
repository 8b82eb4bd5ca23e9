"""Scenario generation, the end-to-end pipeline, and baseline comparison.

A scenario bundles every sampled and fixed quantity of one experiment:
non-IID client data drawn from a Dirichlet partition, device hardware
draws, channel constants, the task DAG with accuracy targets, and the
convergence calibration. The pipeline runs partition -> cluster ->
processing-time matrix -> schedule -> evaluation, and the comparison
harness repeats it across seeds for each clustering method.
"""
from __future__ import annotations

import copy
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .clustering import (
    ClusterAssignment,
    agglomerative_cluster,
    emd_balanced_cluster,
    kmeans_cluster,
    mean_intra_cluster_distance,
    random_cluster,
)
from .convergence import ConvergenceParams, TaskSpec, learning_curve
from .dag import Layering, TaskGraph, validate_and_layer
from .errors import ConfigError
from .heterogeneity import (
    LabelDistribution,
    LabelHistogram,
    WeightedMember,
    cluster_emd,
    mixture,
    normalize,
    pairwise_distance_matrix,
    weighted_average_emd,
)
from .latency import ChannelModel, DeviceSpec, WorkloadSpec, dbm_to_watts
from .scheduler import (
    Schedule,
    build_proc_time_matrix,
    evaluate_schedule,
    exhaustive_schedule,
    greedy_schedule,
    ppo_train,
    validate_schedule,
)
from .scheduler.matrix import cluster_gamma

CLUSTERERS = ("coda", "eb", "kc", "rc")
POLICIES = ("greedy", "ppo", "exhaustive")

# seed stream offsets so every random consumer gets its own stream
_STREAM_PARTITION = 0
_STREAM_DEVICES = 1
_STREAM_RC = 2
_STREAM_KC = 3
_STREAM_PPO = 4
_N_STREAMS = 8


def _stream_seed(seed: int, stream: int) -> int:
    return seed * _N_STREAMS + stream


DEFAULT_CONFIG: dict = {
    "seed": 0,
    "client_count": 100,
    "cluster_count": None,  # None -> max(task count, ceil(U / 10))
    "class_count": 10,
    "dirichlet_alpha": 0.3,
    "samples_per_client": [300, 900],
    "bits_per_sample": 6272,  # one 28x28 8-bit image
    "cpu_freq_hz": [1.2e9, 2.5e9],
    "channel_gain_mean": 2.5e-7,
    "transmit_power_w": 0.2,
    "noise_dbm": -43.0,
    "bandwidth_hz": 2.0e7,
    "cycles_per_bit": 100.0,
    "local_steps": 5,
    "convergence": {
        "mu": 0.1,
        "eta": 0.1,
        "grad_bound": 0.02,
        "sigma_sq": 1.0,
        "l_div": 0.15,
        "l_smooth": 1.0,
    },
    "tasks": [
        {"id": "kmnist", "target_accuracy": 0.75},
        {"id": "mnist", "target_accuracy": 0.90},
        {"id": "fashion", "target_accuracy": 0.75},
        {"id": "qmnist", "target_accuracy": 0.85},
    ],
    "task_defaults": {
        "initial_loss": 2.3,
        "optimal_loss": 0.0,
        "model_size_bits": 5.0e5,
    },
    "edges": [
        ["kmnist", "mnist"],
        ["kmnist", "fashion"],
        ["mnist", "qmnist"],
        ["fashion", "qmnist"],
    ],
}


@dataclass(frozen=True)
class Scenario:
    """One fully resolved experiment instance, sampled clients included."""

    seed: int
    client_count: int
    cluster_count: int
    class_count: int
    dirichlet_alpha: float
    samples_per_client: tuple[int, int]
    bits_per_sample: int
    cpu_freq_hz: tuple[float, float]
    channel_gain_mean: float
    transmit_power_w: float
    noise_dbm: float
    bandwidth_hz: float
    cycles_per_bit: float
    conv: ConvergenceParams
    tasks: list[TaskSpec]
    edges: list[tuple[str, str]]
    histograms: list[LabelHistogram] = field(repr=False)
    devices: list[DeviceSpec] = field(repr=False)

    def __post_init__(self) -> None:
        if self.client_count < self.cluster_count:
            raise ConfigError("client_count must be at least cluster_count")

    @property
    def graph(self) -> TaskGraph:
        return TaskGraph([t.id for t in self.tasks], list(self.edges))

    @property
    def channel(self) -> ChannelModel:
        return ChannelModel(self.bandwidth_hz, dbm_to_watts(self.noise_dbm))

    @property
    def workload(self) -> WorkloadSpec:
        return WorkloadSpec(
            model_size_bits=self.tasks[0].model_size_bits,
            cycles_per_bit=self.cycles_per_bit,
            local_steps=self.conv.local_steps,
        )

    def distributions(self) -> list[LabelDistribution]:
        return [normalize(h) for h in self.histograms]


@dataclass(frozen=True)
class RunResult:
    """Outcome of one pipeline run."""

    clusterer: str
    policy: str
    seed: int
    schedule: Schedule
    makespan_s: float
    layer_times_s: list[float]
    layer_sum_s: float
    task_details: list[dict]
    curves: dict[str, list[tuple[int, float, float]]]
    cluster_sizes: list[int]
    avg_emd_to_global: float
    mean_intra_cluster_emd: float

    def to_dict(self) -> dict:
        return {
            "clusterer": self.clusterer,
            "policy": self.policy,
            "seed": self.seed,
            "makespan_s": self.makespan_s,
            "layer_times_s": self.layer_times_s,
            "layer_sum_s": self.layer_sum_s,
            "tasks": self.task_details,
            "curves": {
                task: [
                    {"round": r, "accuracy": acc, "time_s": t}
                    for r, acc, t in points
                ]
                for task, points in self.curves.items()
            },
            "cluster_sizes": self.cluster_sizes,
            "avg_emd_to_global": self.avg_emd_to_global,
            "mean_intra_cluster_emd": self.mean_intra_cluster_emd,
        }


def partition_data(
    client_count: int,
    class_count: int,
    alpha: float,
    samples_per_client_range: tuple[int, int],
    seed: int,
) -> list[LabelHistogram]:
    """Non-IID label histograms from a symmetric Dirichlet partition.

    Per client, label proportions are drawn from Dirichlet(alpha) and a
    sample count uniformly from the given range; proportions are turned
    into integer counts by largest-remainder rounding, so each client
    keeps exactly its drawn sample count. Large alpha approaches IID,
    small alpha is highly skewed.
    """
    lo, hi = samples_per_client_range
    if client_count < 1 or class_count < 1:
        raise ConfigError("client_count and class_count must be positive")
    if alpha <= 0:
        raise ConfigError("dirichlet alpha must be strictly positive")
    if lo < 1 or hi < lo:
        raise ConfigError("samples_per_client range must satisfy 1 <= lo <= hi")
    rng = np.random.default_rng(seed)
    proportions = rng.dirichlet(alpha * np.ones(class_count), size=client_count)
    totals = rng.integers(lo, hi + 1, size=client_count)
    histograms = []
    for u in range(client_count):
        raw = proportions[u] * totals[u]
        counts = np.floor(raw).astype(np.int64)
        shortfall = int(totals[u] - counts.sum())
        by_remainder = np.argsort(-(raw - counts), kind="stable")
        counts[by_remainder[:shortfall]] += 1
        histograms.append(LabelHistogram(counts))
    return histograms


def _merge_config(config: dict | None) -> dict:
    merged = copy.deepcopy(DEFAULT_CONFIG)
    for key, value in (config or {}).items():
        if key not in merged:
            raise ConfigError(f"unknown config key {key!r}")
        if isinstance(merged[key], dict) and isinstance(value, dict):
            for sub_key, sub_value in value.items():
                if sub_key not in merged[key]:
                    raise ConfigError(f"unknown config key {key}.{sub_key}")
                merged[key][sub_key] = sub_value
        else:
            merged[key] = value
    return merged


def generate_scenario(config: dict | None = None, seed: int | None = None) -> Scenario:
    """Resolve a config against the defaults and sample one scenario.

    Samples per-client CPU frequencies uniformly from the configured
    range and channel gains exponentially with the configured mean, and
    partitions data with the Dirichlet recipe. Reproducible: the same
    config and seed give a bit-identical scenario.

    Args:
        config: partial config mapping; unknown keys are rejected.
        seed: overrides the config seed when given.
    """
    cfg = _merge_config(config)
    if seed is not None:
        cfg["seed"] = seed
    try:
        base_seed = int(cfg["seed"])
        client_count = int(cfg["client_count"])
        class_count = int(cfg["class_count"])
        alpha = float(cfg["dirichlet_alpha"])
        lo, hi = (int(x) for x in cfg["samples_per_client"])
        bits_per_sample = int(cfg["bits_per_sample"])
        cpu_lo, cpu_hi = (float(x) for x in cfg["cpu_freq_hz"])
        gain_mean = float(cfg["channel_gain_mean"])
        power = float(cfg["transmit_power_w"])
        noise_dbm = float(cfg["noise_dbm"])
        bandwidth = float(cfg["bandwidth_hz"])
        cycles_per_bit = float(cfg["cycles_per_bit"])
        local_steps = int(cfg["local_steps"])
        task_defaults = cfg["task_defaults"]
        tasks = [
            TaskSpec(
                id=str(entry["id"]),
                target_accuracy=float(entry["target_accuracy"]),
                initial_loss=float(
                    entry.get("initial_loss", task_defaults["initial_loss"])
                ),
                optimal_loss=float(
                    entry.get("optimal_loss", task_defaults["optimal_loss"])
                ),
                model_size_bits=float(
                    entry.get("model_size_bits", task_defaults["model_size_bits"])
                ),
            )
            for entry in cfg["tasks"]
        ]
        edges = [(str(a), str(b)) for a, b in cfg["edges"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed scenario config: {exc}") from exc
    if not tasks:
        raise ConfigError("at least one task is required")
    if cpu_lo <= 0 or cpu_hi < cpu_lo:
        raise ConfigError("cpu_freq_hz must be a positive (low, high) range")
    if gain_mean <= 0 or power <= 0 or bandwidth <= 0 or cycles_per_bit <= 0:
        raise ConfigError("channel and workload parameters must be positive")
    if bits_per_sample < 1:
        raise ConfigError("bits_per_sample must be a positive integer")

    cluster_count = cfg["cluster_count"]
    if cluster_count is None:
        cluster_count = max(len(tasks), -(-client_count // 10))
    cluster_count = int(cluster_count)
    if not 1 <= cluster_count <= client_count:
        raise ConfigError("cluster_count must lie in 1..client_count")

    conv_cfg = cfg["convergence"]
    try:
        conv = ConvergenceParams(
            mu=float(conv_cfg["mu"]),
            eta=float(conv_cfg["eta"]),
            local_steps=local_steps,
            grad_bound=float(conv_cfg["grad_bound"]),
            sigma_sq=float(conv_cfg["sigma_sq"]),
            participants=client_count,
            l_div=float(conv_cfg["l_div"]),
            l_smooth=float(conv_cfg["l_smooth"]),
            initial_gap=max(t.initial_gap for t in tasks),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid convergence parameters: {exc}") from exc

    histograms = partition_data(
        client_count,
        class_count,
        alpha,
        (lo, hi),
        _stream_seed(base_seed, _STREAM_PARTITION),
    )
    rng = np.random.default_rng(_stream_seed(base_seed, _STREAM_DEVICES))
    freqs = rng.uniform(cpu_lo, cpu_hi, size=client_count)
    gains = rng.exponential(gain_mean, size=client_count)
    devices = [
        DeviceSpec(
            cpu_freq=float(freqs[u]),
            transmit_power=power,
            channel_gain=float(gains[u]),
            dataset_bits=float(histograms[u].total * bits_per_sample),
        )
        for u in range(client_count)
    ]

    graph = TaskGraph([t.id for t in tasks], edges)
    validate_and_layer(graph)  # reject cyclic task configs early

    return Scenario(
        seed=base_seed,
        client_count=client_count,
        cluster_count=cluster_count,
        class_count=class_count,
        dirichlet_alpha=alpha,
        samples_per_client=(lo, hi),
        bits_per_sample=bits_per_sample,
        cpu_freq_hz=(cpu_lo, cpu_hi),
        channel_gain_mean=gain_mean,
        transmit_power_w=power,
        noise_dbm=noise_dbm,
        bandwidth_hz=bandwidth,
        cycles_per_bit=cycles_per_bit,
        conv=conv,
        tasks=tasks,
        edges=edges,
        histograms=histograms,
        devices=devices,
    )


def cluster_clients(scenario: Scenario, method: str) -> ClusterAssignment:
    """Apply one of the four clustering methods to the scenario's clients."""
    dists = scenario.distributions()
    n = scenario.cluster_count
    if method == "coda":
        return agglomerative_cluster(pairwise_distance_matrix(dists), n)
    if method == "eb":
        weights = [float(h.total) for h in scenario.histograms]
        return emd_balanced_cluster(dists, n, weights)
    if method == "kc":
        return kmeans_cluster(dists, n, _stream_seed(scenario.seed, _STREAM_KC))
    if method == "rc":
        return random_cluster(
            scenario.client_count, n, _stream_seed(scenario.seed, _STREAM_RC)
        )
    raise ConfigError(f"unknown clustering method {method!r}")


def _heterogeneity_report(
    scenario: Scenario, assignment: ClusterAssignment, dists: list[LabelDistribution]
) -> tuple[float, float]:
    weights = np.array([float(h.total) for h in scenario.histograms])
    global_dist = mixture(
        [WeightedMember(d, w) for d, w in zip(dists, weights)]
    )
    cluster_sizes_bits = []
    emds = []
    for i in range(assignment.n_clusters):
        members = assignment.members(i)
        cluster_mix = mixture(
            [WeightedMember(dists[u], float(weights[u])) for u in members]
        )
        emds.append(cluster_emd(cluster_mix, global_dist))
        cluster_sizes_bits.append(float(weights[members].sum()))
    avg_emd = weighted_average_emd(emds, cluster_sizes_bits)
    intra = mean_intra_cluster_distance(pairwise_distance_matrix(dists), assignment)
    return avg_emd, intra


def run_pipeline(scenario: Scenario, clusterer: str, policy: str) -> RunResult:
    """Full pipeline: cluster, build the time matrix, schedule, evaluate.

    Learning curves are attached per task from the analytic convergence
    model, using the heterogeneity of the cluster each task was
    assigned to and the cluster's per-round straggler time.
    """
    if policy not in POLICIES:
        raise ConfigError(f"unknown policy {policy!r}")
    dists = scenario.distributions()
    assignment = cluster_clients(scenario, clusterer)
    graph = scenario.graph
    layering = validate_and_layer(graph)
    matrix = build_proc_time_matrix(
        graph,
        scenario.tasks,
        assignment,
        scenario.devices,
        scenario.channel,
        scenario.workload,
        scenario.conv,
        dists,
    )

    if policy == "greedy":
        schedule = greedy_schedule(graph, matrix)
    elif policy == "exhaustive":
        schedule = exhaustive_schedule(graph, matrix)
    else:
        _, schedule = ppo_train(
            graph, matrix, seed=_stream_seed(scenario.seed, _STREAM_PPO)
        )
    validate_schedule(schedule, graph, matrix)
    report = evaluate_schedule(schedule, layering)

    data_weights = np.array([dev.dataset_bits for dev in scenario.devices])
    task_details = []
    curves: dict[str, list[tuple[int, float, float]]] = {}
    for v, task in enumerate(scenario.tasks):
        i = schedule.cluster_of[task.id]
        rounds = int(matrix.rounds[v, i])
        per_round = float(matrix.seconds[v, i]) / rounds
        gamma = cluster_gamma(
            assignment.members(i), dists, data_weights, scenario.conv.l_div
        )
        start = schedule.start[task.id]
        curve = [
            (r, acc, start + r * per_round)
            for r, acc in learning_curve(task, scenario.conv, gamma, rounds)
        ]
        curves[task.id] = curve
        task_details.append(
            {
                "task": task.id,
                "cluster": i,
                "rounds": rounds,
                "start_s": start,
                "finish_s": schedule.finish[task.id],
                "duration_s": schedule.finish[task.id] - start,
            }
        )

    avg_emd, intra = _heterogeneity_report(scenario, assignment, dists)
    return RunResult(
        clusterer=clusterer,
        policy=policy,
        seed=scenario.seed,
        schedule=schedule,
        makespan_s=report["makespan_s"],
        layer_times_s=report["layer_times_s"],
        layer_sum_s=report["layer_sum_s"],
        task_details=task_details,
        curves=curves,
        cluster_sizes=[int(s) for s in assignment.sizes()],
        avg_emd_to_global=avg_emd,
        mean_intra_cluster_emd=intra,
    )


def _compare_worker(args: tuple[dict, str, str, int]) -> dict:
    config, method, policy, seed = args
    scenario = generate_scenario(config, seed=seed)
    result = run_pipeline(scenario, method, policy)
    return {
        "method": method,
        "seed": seed,
        "makespan_s": result.makespan_s,
        "layer_times_s": result.layer_times_s,
    }


def compare_baselines(
    config: dict | None,
    seeds: int,
    policy: str = "greedy",
    methods: tuple[str, ...] = CLUSTERERS,
    max_workers: int = 1,
) -> dict:
    """Run every clustering method across seeds; summarize makespans.

    Returns one row per method and seed plus a per-method summary with
    the mean makespan and a 95% normal-approximation confidence
    half-width. Rows are ordered by (method, seed) no matter how many
    workers computed them.
    """
    if seeds < 1:
        raise ConfigError("seeds must be >= 1")
    cfg = _merge_config(config)
    jobs = [(cfg, method, policy, seed) for method in methods for seed in range(seeds)]
    if max_workers > 1:
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            rows = list(pool.map(_compare_worker, jobs))
    else:
        rows = [_compare_worker(job) for job in jobs]
    rows.sort(key=lambda r: (methods.index(r["method"]), r["seed"]))

    summary = []
    for method in methods:
        spans = np.array([r["makespan_s"] for r in rows if r["method"] == method])
        layer_stack = np.array(
            [r["layer_times_s"] for r in rows if r["method"] == method]
        )
        half_width = (
            1.96 * float(spans.std(ddof=1)) / float(np.sqrt(len(spans)))
            if len(spans) > 1
            else 0.0
        )
        summary.append(
            {
                "method": method,
                "n_seeds": int(len(spans)),
                "mean_makespan_s": float(spans.mean()),
                "ci95_s": half_width,
                "mean_layer_times_s": [float(x) for x in layer_stack.mean(axis=0)],
            }
        )
    return {"methods": list(methods), "policy": policy, "rows": rows, "summary": summary}
