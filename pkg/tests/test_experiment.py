"""Tests for scenario generation, the pipeline, and baseline comparison."""
from __future__ import annotations

import numpy as np
import pytest

from coda_fl import (
    ConfigError,
    CyclicDependency,
    WeightedMember,
    cluster_clients,
    compare_baselines,
    emd,
    generate_scenario,
    mixture,
    normalize,
    partition_data,
    run_pipeline,
)

TINY = {"client_count": 30, "cluster_count": 3, "dirichlet_alpha": 1.0}


def client_emds_to_global(histograms) -> list[float]:
    dists = [normalize(h) for h in histograms]
    weights = [float(h.total) for h in histograms]
    global_dist = mixture(
        [WeightedMember(d, w) for d, w in zip(dists, weights)]
    )
    return [emd(d, global_dist) for d in dists]


class TestPartitionData:
    def test_fixed_seed_identical(self):
        a = partition_data(20, 10, 0.3, (300, 900), seed=5)
        b = partition_data(20, 10, 0.3, (300, 900), seed=5)
        assert all(
            np.array_equal(x.counts, y.counts) for x, y in zip(a, b)
        )

    def test_totals_within_range(self):
        histograms = partition_data(50, 10, 0.3, (300, 900), seed=1)
        assert len(histograms) == 50
        for h in histograms:
            assert 300 <= h.total <= 900

    def test_huge_alpha_approaches_iid(self):
        histograms = partition_data(40, 10, 1e6, (300, 900), seed=2)
        assert max(client_emds_to_global(histograms)) < 0.05

    def test_small_alpha_more_skewed_than_huge(self):
        skewed = partition_data(40, 10, 0.1, (300, 900), seed=3)
        near_iid = partition_data(40, 10, 1e6, (300, 900), seed=3)
        assert np.mean(client_emds_to_global(skewed)) > np.mean(
            client_emds_to_global(near_iid)
        )

    def test_bad_arguments_rejected(self):
        with pytest.raises(ConfigError):
            partition_data(10, 10, 0.0, (300, 900), seed=0)
        with pytest.raises(ConfigError):
            partition_data(10, 10, 0.3, (900, 300), seed=0)
        with pytest.raises(ConfigError):
            partition_data(0, 10, 0.3, (300, 900), seed=0)


class TestGenerateScenario:
    def test_defaults_match_reference_setup(self):
        s = generate_scenario(seed=0)
        assert s.client_count == 100
        assert s.cluster_count == 10
        assert [t.id for t in s.tasks] == ["kmnist", "mnist", "fashion", "qmnist"]
        assert [t.target_accuracy for t in s.tasks] == [0.75, 0.90, 0.75, 0.85]
        assert s.bandwidth_hz == 2e7
        assert s.transmit_power_w == 0.2
        assert s.noise_dbm == -43.0
        assert len(s.devices) == 100
        for dev in s.devices:
            assert 1.2e9 <= dev.cpu_freq <= 2.5e9

    def test_same_seed_bit_identical(self):
        a = generate_scenario(seed=9)
        b = generate_scenario(seed=9)
        assert [d.cpu_freq for d in a.devices] == [d.cpu_freq for d in b.devices]
        assert [d.channel_gain for d in a.devices] == [
            d.channel_gain for d in b.devices
        ]
        assert all(
            np.array_equal(x.counts, y.counts)
            for x, y in zip(a.histograms, b.histograms)
        )

    def test_seed_argument_overrides_config(self):
        a = generate_scenario({"seed": 1}, seed=2)
        b = generate_scenario({"seed": 2})
        assert [d.channel_gain for d in a.devices] == [
            d.channel_gain for d in b.devices
        ]

    def test_channel_gain_mean_monte_carlo(self):
        s = generate_scenario({"client_count": 100_000, "cluster_count": 10}, seed=4)
        gains = np.array([d.channel_gain for d in s.devices])
        assert abs(gains.mean() - 2.5e-7) / 2.5e-7 < 0.02

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError):
            generate_scenario({"clienst_count": 5})
        with pytest.raises(ConfigError):
            generate_scenario({"convergence": {"mu": 0.1, "bogus": 1.0}})

    def test_invalid_ranges_rejected(self):
        with pytest.raises(ConfigError):
            generate_scenario({"cpu_freq_hz": [2e9, 1e9]})
        with pytest.raises(ConfigError):
            generate_scenario({"client_count": 5, "cluster_count": 10})
        with pytest.raises(ConfigError):
            generate_scenario({"dirichlet_alpha": -1.0})

    def test_cyclic_task_graph_rejected(self):
        config = {
            "tasks": [
                {"id": "x", "target_accuracy": 0.5},
                {"id": "y", "target_accuracy": 0.5},
            ],
            "edges": [["x", "y"], ["y", "x"]],
        }
        with pytest.raises(CyclicDependency):
            generate_scenario(config)


class TestRunPipeline:
    def test_default_coda_greedy_smoke(self):
        s = generate_scenario(seed=0)
        result = run_pipeline(s, "coda", "greedy")
        assert result.makespan_s > 0
        assert len(result.layer_times_s) == 3
        assert abs(sum(result.layer_times_s) - result.layer_sum_s) < 1e-9
        assert sorted(d["task"] for d in result.task_details) == sorted(
            t.id for t in s.tasks
        )
        assert sum(result.cluster_sizes) == s.client_count

    def test_curves_span_assigned_rounds(self):
        s = generate_scenario(seed=1)
        result = run_pipeline(s, "coda", "greedy")
        details = {d["task"]: d for d in result.task_details}
        for task_id, points in result.curves.items():
            rounds = details[task_id]["rounds"]
            assert points[0][0] == 0
            assert points[-1][0] == rounds
            times = [t for _, _, t in points]
            assert times[0] == details[task_id]["start_s"]
            assert abs(times[-1] - details[task_id]["finish_s"]) < 1e-6
            accs = [acc for _, acc, _ in points]
            assert all(b >= a - 1e-12 for a, b in zip(accs, accs[1:]))

    def test_tiny_policy_gap_measured(self):
        s = generate_scenario(TINY, seed=2)
        greedy = run_pipeline(s, "coda", "greedy")
        optimal = run_pipeline(s, "coda", "exhaustive")
        assert optimal.makespan_s <= greedy.makespan_s + 1e-9

    def test_unknown_clusterer_or_policy_rejected(self):
        s = generate_scenario(TINY, seed=0)
        with pytest.raises(ConfigError):
            run_pipeline(s, "mystery", "greedy")
        with pytest.raises(ConfigError):
            run_pipeline(s, "coda", "mystery")

    def test_all_clusterers_produce_valid_runs(self):
        s = generate_scenario(TINY, seed=3)
        for method in ("coda", "eb", "kc", "rc"):
            result = run_pipeline(s, method, "greedy")
            assert result.clusterer == method
            assert result.makespan_s > 0
            assert cluster_clients(s, method).n_clusters == 3


class TestCompareBaselines:
    def test_structure_and_summary_math(self):
        comparison = compare_baselines(TINY, seeds=4)
        rows = comparison["rows"]
        assert len(rows) == 4 * 4
        methods = [s["method"] for s in comparison["summary"]]
        assert methods == ["coda", "eb", "kc", "rc"]
        for entry in comparison["summary"]:
            spans = np.array(
                [
                    r["makespan_s"]
                    for r in rows
                    if r["method"] == entry["method"]
                ]
            )
            assert entry["n_seeds"] == 4
            assert abs(entry["mean_makespan_s"] - spans.mean()) < 1e-12
            expected_ci = 1.96 * spans.std(ddof=1) / np.sqrt(len(spans))
            assert abs(entry["ci95_s"] - expected_ci) < 1e-12

    def test_rows_ordered_by_method_then_seed(self):
        comparison = compare_baselines(TINY, seeds=3)
        keys = [(r["method"], r["seed"]) for r in comparison["rows"]]
        assert keys == sorted(
            keys, key=lambda k: (["coda", "eb", "kc", "rc"].index(k[0]), k[1])
        )

    def test_parallel_equals_serial(self):
        serial = compare_baselines(TINY, seeds=3, max_workers=1)
        parallel = compare_baselines(TINY, seeds=3, max_workers=3)
        assert serial["rows"] == parallel["rows"]

    def test_bad_seed_count_rejected(self):
        with pytest.raises(ConfigError):
            compare_baselines(TINY, seeds=0)
