"""Tests for the four clustering methods and assignment utilities."""
from __future__ import annotations

import itertools

import numpy as np
import pytest

from coda_fl import (
    ClusterAssignment,
    InvalidClusterCount,
    InvalidDistanceMatrix,
    LabelDistribution,
    agglomerative_cluster,
    emd_balanced_cluster,
    kmeans_cluster,
    mean_intra_cluster_distance,
    pairwise_distance_matrix,
    random_cluster,
)


def partition_sets(assignment: ClusterAssignment) -> set[frozenset[int]]:
    return {
        frozenset(int(u) for u in assignment.members(i))
        for i in range(assignment.n_clusters)
    }


def line_matrix(points: list[float]) -> np.ndarray:
    arr = np.array(points)
    return np.abs(arr[:, None] - arr[None, :])


def all_two_partitions(n: int):
    # every split of range(n) into two nonempty groups, via membership masks
    for bits in range(1, 2 ** (n - 1)):
        group = frozenset(u for u in range(n) if (bits >> u) & 1)
        rest = frozenset(range(n)) - group
        if rest:
            yield group, rest


def intra_distance_of(groups, matrix: np.ndarray) -> float:
    total = 0.0
    pairs = 0
    for group in groups:
        for a, b in itertools.combinations(sorted(group), 2):
            total += matrix[a, b]
            pairs += 1
    return total / pairs if pairs else 0.0


class TestAgglomerative:
    def test_singletons_when_clusters_equal_clients(self):
        matrix = line_matrix([0.0, 1.0, 2.0, 4.0])
        assignment = agglomerative_cluster(matrix, 4)
        assert partition_sets(assignment) == {
            frozenset({0}),
            frozenset({1}),
            frozenset({2}),
            frozenset({3}),
        }

    def test_single_cluster_holds_everyone(self):
        matrix = line_matrix([0.0, 1.0, 2.0])
        assignment = agglomerative_cluster(matrix, 1)
        assert partition_sets(assignment) == {frozenset({0, 1, 2})}

    def test_recovers_identical_pairs(self):
        # two identical pairs: zero distance within, 2 across
        matrix = np.array(
            [
                [0.0, 0.0, 2.0, 2.0],
                [0.0, 0.0, 2.0, 2.0],
                [2.0, 2.0, 0.0, 0.0],
                [2.0, 2.0, 0.0, 0.0],
            ]
        )
        assignment = agglomerative_cluster(matrix, 2)
        groups = partition_sets(assignment)
        assert groups == {frozenset({0, 1}), frozenset({2, 3})}
        # exhaustive check: no 2-partition has lower mean intra-cluster distance
        best = min(intra_distance_of(p, matrix) for p in all_two_partitions(4))
        assert abs(intra_distance_of(groups, matrix) - best) < 1e-12

    def test_line_golden_two_and_three_clusters(self):
        matrix = line_matrix([0.0, 0.1, 0.2, 1.0, 1.1])
        two = agglomerative_cluster(matrix, 2)
        assert partition_sets(two) == {frozenset({0, 1, 2}), frozenset({3, 4})}
        three = agglomerative_cluster(matrix, 3)
        assert partition_sets(three) == {
            frozenset({0, 1}),
            frozenset({2}),
            frozenset({3, 4}),
        }

    def test_labels_canonical_by_smallest_member(self):
        matrix = line_matrix([0.0, 5.0, 0.1, 5.1])
        assignment = agglomerative_cluster(matrix, 2)
        # cluster containing client 0 must carry label 0
        assert assignment.labels[0] == 0
        assert assignment.labels[2] == 0
        assert assignment.labels[1] == 1

    def test_deterministic(self):
        rng = np.random.default_rng(3)
        points = rng.uniform(0.0, 2.0, size=20)
        matrix = line_matrix(list(points))
        a = agglomerative_cluster(matrix, 5)
        b = agglomerative_cluster(matrix, 5)
        assert np.array_equal(a.labels, b.labels)

    def test_asymmetric_matrix_rejected(self):
        matrix = np.array([[0.0, 1.0], [2.0, 0.0]])
        with pytest.raises(InvalidDistanceMatrix):
            agglomerative_cluster(matrix, 1)

    def test_nonzero_diagonal_rejected(self):
        matrix = np.array([[0.5, 1.0], [1.0, 0.0]])
        with pytest.raises(InvalidDistanceMatrix):
            agglomerative_cluster(matrix, 1)

    def test_bad_cluster_count_rejected(self):
        matrix = line_matrix([0.0, 1.0])
        with pytest.raises(InvalidClusterCount):
            agglomerative_cluster(matrix, 3)
        with pytest.raises(InvalidClusterCount):
            agglomerative_cluster(matrix, 0)


class TestEmdBalanced:
    def test_single_group(self):
        dists = [
            LabelDistribution(np.array([1.0, 0.0])),
            LabelDistribution(np.array([0.0, 1.0])),
        ]
        assignment = emd_balanced_cluster(dists, 1)
        assert partition_sets(assignment) == {frozenset({0, 1})}

    def test_sizes_balanced(self):
        rng = np.random.default_rng(5)
        dists = [
            LabelDistribution(rng.dirichlet(np.ones(4))) for _ in range(10)
        ]
        for n in (2, 3, 4):
            sizes = sorted(emd_balanced_cluster(dists, n).sizes())
            assert sizes[-1] - sizes[0] <= 1

    def test_round_robin_deal_by_distance(self):
        # two-class marginals placed so distances to the global mixture
        # are 0.1, 0.2, 0.3, 0.4 for clients 0..3
        firsts = [0.45, 0.6, 0.65, 0.3]
        dists = [LabelDistribution(np.array([p, 1.0 - p])) for p in firsts]
        assignment = emd_balanced_cluster(dists, 2)
        assert partition_sets(assignment) == {frozenset({0, 2}), frozenset({1, 3})}

    def test_weighted_reference_changes_global(self):
        dists = [
            LabelDistribution(np.array([1.0, 0.0])),
            LabelDistribution(np.array([0.0, 1.0])),
            LabelDistribution(np.array([0.5, 0.5])),
            LabelDistribution(np.array([0.6, 0.4])),
        ]
        equal = emd_balanced_cluster(dists, 2)
        skewed = emd_balanced_cluster(dists, 2, weights=[100.0, 1.0, 1.0, 1.0])
        assert equal.n_clusters == skewed.n_clusters == 2
        assert sorted(equal.sizes()) == sorted(skewed.sizes()) == [2, 2]


class TestKmeans:
    def test_singletons_when_clusters_equal_clients(self):
        dists = [
            LabelDistribution(np.array([1.0, 0.0])),
            LabelDistribution(np.array([0.0, 1.0])),
            LabelDistribution(np.array([0.5, 0.5])),
        ]
        assignment = kmeans_cluster(dists, 3, seed=0)
        assert partition_sets(assignment) == {
            frozenset({0}),
            frozenset({1}),
            frozenset({2}),
        }

    def test_recovers_separated_groups_and_matches_brute_force(self):
        # two tight groups of probability vectors, far apart
        left = [np.array([0.9, 0.1]), np.array([0.88, 0.12]), np.array([0.92, 0.08])]
        right = [np.array([0.1, 0.9]), np.array([0.12, 0.88]), np.array([0.08, 0.92])]
        vectors = left + right
        dists = [LabelDistribution(v) for v in vectors]
        assignment = kmeans_cluster(dists, 2, seed=1)
        assert partition_sets(assignment) == {frozenset({0, 1, 2}), frozenset({3, 4, 5})}

        def objective(groups) -> float:
            total = 0.0
            for group in groups:
                pts = np.array([vectors[u] for u in sorted(group)])
                center = pts.mean(axis=0)
                total += float(((pts - center) ** 2).sum())
            return total

        ours = objective(partition_sets(assignment))
        best = min(objective(p) for p in all_two_partitions(6))
        assert abs(ours - best) < 1e-12

    def test_identical_inputs_zero_objective(self):
        p = LabelDistribution(np.array([0.5, 0.5]))
        assignment = kmeans_cluster([p, p, p, p], 2, seed=2)
        assert assignment.n_clusters == 2
        assert all(size >= 1 for size in assignment.sizes())

    def test_no_empty_clusters_across_seeds(self):
        rng = np.random.default_rng(9)
        dists = [LabelDistribution(rng.dirichlet(np.ones(5))) for _ in range(15)]
        for seed in range(20):
            assignment = kmeans_cluster(dists, 4, seed=seed)
            assert all(size >= 1 for size in assignment.sizes())

    def test_deterministic_per_seed(self):
        rng = np.random.default_rng(21)
        dists = [LabelDistribution(rng.dirichlet(np.ones(6))) for _ in range(12)]
        a = kmeans_cluster(dists, 3, seed=7)
        b = kmeans_cluster(dists, 3, seed=7)
        assert np.array_equal(a.labels, b.labels)


class TestRandomCluster:
    def test_single_cluster(self):
        assignment = random_cluster(5, 1, seed=0)
        assert partition_sets(assignment) == {frozenset(range(5))}

    def test_same_seed_identical(self):
        a = random_cluster(30, 7, seed=42)
        b = random_cluster(30, 7, seed=42)
        assert np.array_equal(a.labels, b.labels)

    def test_sizes_balanced(self):
        assignment = random_cluster(23, 5, seed=3)
        sizes = sorted(assignment.sizes())
        assert sum(sizes) == 23
        assert sizes[-1] - sizes[0] <= 1


class TestMeanIntraClusterDistance:
    def test_hand_value(self):
        matrix = line_matrix([0.0, 1.0, 5.0, 6.0])
        labels = np.array([0, 0, 1, 1])
        assignment = ClusterAssignment(labels, 2)
        # pairs (0,1) and (2,3): distances 1 and 1 -> mean 1
        assert abs(mean_intra_cluster_distance(matrix, assignment) - 1.0) < 1e-12

    def test_all_singletons_is_zero(self):
        matrix = line_matrix([0.0, 1.0, 2.0])
        assignment = ClusterAssignment(np.array([0, 1, 2]), 3)
        assert mean_intra_cluster_distance(matrix, assignment) == 0.0
