"""Client clustering: agglomerative EMD clustering and three baselines.

The main clusterer merges clients bottom-up under average linkage on a
precomputed EMD matrix. The baselines mirror common comparison schemes:
EMD-balanced groups, k-means on the probability vectors, and seeded
random groups. All four return the same ClusterAssignment shape and are
deterministic given their inputs (and seed, where one applies).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidClusterCount, InvalidDistanceMatrix
from .heterogeneity import LabelDistribution, WeightedMember, emd, mixture

SYMMETRY_TOL = 1e-9


@dataclass(frozen=True)
class ClusterAssignment:
    """Disjoint partition of client ids 0..U-1 into N nonempty clusters."""

    labels: np.ndarray
    n_clusters: int

    def __post_init__(self) -> None:
        labels = np.asarray(self.labels, dtype=np.int64)
        if labels.ndim != 1 or labels.size == 0:
            raise InvalidClusterCount("labels must be a non-empty 1-D vector")
        if self.n_clusters < 1 or self.n_clusters > labels.size:
            raise InvalidClusterCount(
                f"n_clusters={self.n_clusters} outside 1..{labels.size}"
            )
        present = np.unique(labels)
        if present.min() < 0 or present.max() >= self.n_clusters:
            raise InvalidClusterCount("cluster index out of range")
        if present.size != self.n_clusters:
            raise InvalidClusterCount("every cluster must be nonempty")
        object.__setattr__(self, "labels", labels)

    @property
    def n_clients(self) -> int:
        return self.labels.size

    def members(self, cluster: int) -> np.ndarray:
        """Client ids belonging to one cluster, ascending."""
        return np.flatnonzero(self.labels == cluster)

    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_clusters)


def _check_cluster_count(n_clusters: int, n_clients: int) -> None:
    if n_clusters < 1 or n_clusters > n_clients:
        raise InvalidClusterCount(
            f"need 1 <= N <= U, got N={n_clusters}, U={n_clients}"
        )


def _relabel_by_smallest_member(groups: list[list[int]], n_clients: int) -> ClusterAssignment:
    # deterministic output labels: cluster 0 holds the smallest client id
    order = sorted(range(len(groups)), key=lambda g: min(groups[g]))
    labels = np.empty(n_clients, dtype=np.int64)
    for new_label, g in enumerate(order):
        labels[groups[g]] = new_label
    return ClusterAssignment(labels, len(groups))


def agglomerative_cluster(D: np.ndarray, n_clusters: int) -> ClusterAssignment:
    """Average-linkage agglomerative clustering on a distance matrix.

    Starts from singletons and repeatedly merges the pair of clusters
    with the smallest average inter-cluster distance until exactly
    n_clusters remain. The average linkage is maintained with the
    Lance-Williams update, which keeps each entry equal to the mean of
    all cross-pair distances. Ties are broken toward the lowest (i, j)
    slot pair, where a merged cluster keeps the smaller of its two slot
    indices; output clusters are relabeled so cluster ids follow the
    smallest member id.

    Args:
        D: symmetric U x U distance matrix with zero diagonal.
        n_clusters: target number of clusters, 1..U.

    Returns:
        A ClusterAssignment with exactly n_clusters nonempty clusters.
    """
    D = np.asarray(D, dtype=np.float64)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise InvalidDistanceMatrix(f"distance matrix must be square, got {D.shape}")
    if not np.allclose(D, D.T, atol=SYMMETRY_TOL):
        raise InvalidDistanceMatrix("distance matrix must be symmetric")
    if np.abs(np.diag(D)).max(initial=0.0) > SYMMETRY_TOL:
        raise InvalidDistanceMatrix("distance matrix must have a zero diagonal")
    n_clients = D.shape[0]
    _check_cluster_count(n_clusters, n_clients)

    work = D.copy()
    active = np.ones(n_clients, dtype=bool)
    size = np.ones(n_clients, dtype=np.int64)
    groups: list[list[int]] = [[u] for u in range(n_clients)]

    # upper triangle only; argmin scans row-major, so the first minimum
    # is the lexicographically lowest (i, j) pair among ties
    blocked = np.tril(np.ones_like(work, dtype=bool))
    for _ in range(n_clients - n_clusters):
        masked = np.where(blocked | ~active[:, None] | ~active[None, :], np.inf, work)
        i, j = np.unravel_index(np.argmin(masked), masked.shape)
        ni, nj = size[i], size[j]
        merged = (ni * work[i] + nj * work[j]) / (ni + nj)
        work[i, :] = merged
        work[:, i] = merged
        work[i, i] = 0.0
        size[i] = ni + nj
        groups[i] = groups[i] + groups[j]
        active[j] = False

    return _relabel_by_smallest_member(
        [groups[i] for i in np.flatnonzero(active)], n_clients
    )


def emd_balanced_cluster(
    dists: list[LabelDistribution],
    n_clusters: int,
    weights: list[float] | None = None,
) -> ClusterAssignment:
    """EMD-balanced grouping: sort by EMD to the global mixture, deal round-robin.

    Each group ends up spanning the whole EMD range while group sizes
    differ by at most one.

    Args:
        dists: per-client label distributions.
        n_clusters: number of groups.
        weights: optional per-client data sizes for the global mixture;
            equal weights when omitted.
    """
    n_clients = len(dists)
    _check_cluster_count(n_clusters, n_clients)
    if weights is None:
        weights = [1.0] * n_clients
    global_dist = mixture(
        [WeightedMember(d, w) for d, w in zip(dists, weights, strict=True)]
    )
    to_global = np.array([emd(d, global_dist) for d in dists])
    order = np.argsort(to_global, kind="stable")
    labels = np.empty(n_clients, dtype=np.int64)
    for rank, client in enumerate(order):
        labels[client] = rank % n_clusters
    return ClusterAssignment(labels, n_clusters)


def kmeans_cluster(
    dists: list[LabelDistribution], n_clusters: int, seed: int
) -> ClusterAssignment:
    """Lloyd's k-means on the probability vectors under squared Euclidean distance.

    Uses k-means++ style seeded initialization, runs at most 100
    iterations or until assignments are stable, and repairs any empty
    cluster by stealing the point farthest from the center of the
    largest cluster.
    """
    n_clients = len(dists)
    _check_cluster_count(n_clusters, n_clients)
    points = np.stack([d.probs for d in dists])
    rng = np.random.default_rng(seed)

    centers = [points[rng.integers(n_clients)]]
    for _ in range(n_clusters - 1):
        d2 = np.min([((points - c) ** 2).sum(axis=1) for c in centers], axis=0)
        if d2.sum() <= 0:
            centers.append(points[rng.integers(n_clients)])
        else:
            centers.append(points[rng.choice(n_clients, p=d2 / d2.sum())])
    centers = np.stack(centers)

    labels = np.full(n_clients, -1, dtype=np.int64)
    for _ in range(100):
        sq_dist = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_labels = sq_dist.argmin(axis=1)
        for i in range(n_clusters):
            if not (new_labels == i).any():
                largest = np.bincount(new_labels, minlength=n_clusters).argmax()
                candidates = np.flatnonzero(new_labels == largest)
                farthest = candidates[sq_dist[candidates, largest].argmax()]
                new_labels[farthest] = i
        if (new_labels == labels).all():
            break
        labels = new_labels
        for i in range(n_clusters):
            centers[i] = points[labels == i].mean(axis=0)
    return ClusterAssignment(labels, n_clusters)


def random_cluster(n_clients: int, n_clusters: int, seed: int) -> ClusterAssignment:
    """Seeded uniform shuffle chunked into clusters whose sizes differ by at most one."""
    _check_cluster_count(n_clusters, n_clients)
    perm = np.random.default_rng(seed).permutation(n_clients)
    labels = np.empty(n_clients, dtype=np.int64)
    base, extra = divmod(n_clients, n_clusters)
    start = 0
    for i in range(n_clusters):
        count = base + (1 if i < extra else 0)
        labels[perm[start : start + count]] = i
        start += count
    return ClusterAssignment(labels, n_clusters)


def mean_intra_cluster_distance(D: np.ndarray, assignment: ClusterAssignment) -> float:
    """Mean pairwise distance over all within-cluster client pairs.

    Singleton clusters contribute no pairs; returns 0.0 if no cluster
    has two members.
    """
    D = np.asarray(D, dtype=np.float64)
    total, pairs = 0.0, 0
    for i in range(assignment.n_clusters):
        m = assignment.members(i)
        if m.size > 1:
            sub = D[np.ix_(m, m)]
            total += float(sub[np.triu_indices(m.size, k=1)].sum())
            pairs += m.size * (m.size - 1) // 2
    return total / pairs if pairs else 0.0
