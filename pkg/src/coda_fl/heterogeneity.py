"""Label-distribution representations and heterogeneity metrics.

Heterogeneity of client data is measured as the L1 distance between
label marginal distributions. The same distance serves at three levels:
client vs. reference, cluster mixture vs. reference, and weighted
averages across clusters. The reference distribution is always an
explicit argument, so both a scenario-global reference and a
task-specific one (the mixture of the assigned cluster) are expressible
with the same operations.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateHistogram, DegenerateWeights, DimensionMismatch

SUM_TOL = 1e-9


@dataclass(frozen=True)
class LabelHistogram:
    """Per-class sample counts for one client."""

    counts: np.ndarray

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 1 or counts.size < 1:
            raise DimensionMismatch("histogram must be a non-empty 1-D vector")
        if (counts < 0).any():
            raise ValueError("histogram counts must be non-negative")
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class LabelDistribution:
    """Probability vector over class labels."""

    probs: np.ndarray

    def __post_init__(self) -> None:
        probs = np.asarray(self.probs, dtype=np.float64)
        if probs.ndim != 1 or probs.size < 1:
            raise DimensionMismatch("distribution must be a non-empty 1-D vector")
        if (probs < 0).any() or (probs > 1).any():
            raise ValueError("probabilities must lie in [0, 1]")
        if abs(float(probs.sum()) - 1.0) > SUM_TOL:
            raise ValueError(f"probabilities must sum to 1, got {probs.sum()!r}")
        object.__setattr__(self, "probs", probs)

    def __len__(self) -> int:
        return self.probs.size


@dataclass(frozen=True)
class WeightedMember:
    """A distribution paired with a non-negative weight.

    The weight is either a raw data size or an already-normalized
    coefficient; mixture and averaging renormalize internally either way.
    """

    distribution: LabelDistribution
    weight: float

    def __post_init__(self) -> None:
        if self.weight < 0:
            raise ValueError("weight must be non-negative")


def normalize(h: LabelHistogram) -> LabelDistribution:
    """Convert a label histogram into a label distribution.

    Args:
        h: per-class sample counts with at least one sample.

    Returns:
        The empirical label distribution counts / sum(counts),
        renormalized exactly so the entries sum to 1.
    """
    total = h.counts.sum()
    if total == 0:
        raise DegenerateHistogram("cannot normalize an all-zero histogram")
    probs = h.counts / total
    return LabelDistribution(probs / probs.sum())


def emd(p: LabelDistribution, q: LabelDistribution) -> float:
    """L1 distance between two label distributions.

    Symmetric, zero iff the vectors are equal, and at most 2 (attained
    exactly on disjoint supports).
    """
    if len(p) != len(q):
        raise DimensionMismatch(f"class counts differ: {len(p)} vs {len(q)}")
    return float(np.abs(p.probs - q.probs).sum())


def pairwise_distance_matrix(dists: list[LabelDistribution]) -> np.ndarray:
    """All-pairs EMD matrix for a list of distributions.

    Returns:
        Symmetric U x U float matrix with zero diagonal where entry
        [u, u'] is emd(dists[u], dists[u']).
    """
    if not dists:
        raise DimensionMismatch("need at least one distribution")
    size = len(dists[0])
    if any(len(d) != size for d in dists):
        raise DimensionMismatch("all distributions must share one class count")
    stacked = np.stack([d.probs for d in dists])
    return np.abs(stacked[:, None, :] - stacked[None, :, :]).sum(axis=2)


def mixture(members: list[WeightedMember]) -> LabelDistribution:
    """Weight-averaged distribution of a group of clients.

    Args:
        members: distributions with non-negative weights, total weight > 0.

    Returns:
        The mixture sum_m w_m p_m / sum_m w_m as a valid distribution.
    """
    if not members:
        raise DegenerateWeights("mixture of an empty member list")
    size = len(members[0].distribution)
    if any(len(m.distribution) != size for m in members):
        raise DimensionMismatch("all member distributions must share one class count")
    weights = np.array([m.weight for m in members], dtype=np.float64)
    total = weights.sum()
    if total <= 0:
        raise DegenerateWeights("total member weight must be positive")
    stacked = np.stack([m.distribution.probs for m in members])
    probs = (weights[:, None] * stacked).sum(axis=0) / total
    return LabelDistribution(probs / probs.sum())


def cluster_emd(cluster_dist: LabelDistribution, global_dist: LabelDistribution) -> float:
    """EMD between a cluster's mixture distribution and a reference.

    This is plain emd; it exists as a named operation because the
    cluster-level distance is the quantity the convergence model and the
    reporting aggregate over.
    """
    return emd(cluster_dist, global_dist)


def weighted_average_emd(cluster_emds: list[float], weights: list[float]) -> float:
    """Weighted mean of per-cluster EMDs.

    Weights are normalized internally, so data sizes, per-round data
    shares, and already-normalized coefficients all work unchanged.
    """
    if len(cluster_emds) != len(weights):
        raise DimensionMismatch(
            f"got {len(cluster_emds)} EMDs but {len(weights)} weights"
        )
    w = np.asarray(weights, dtype=np.float64)
    if (w < 0).any():
        raise ValueError("weights must be non-negative")
    total = w.sum()
    if total <= 0:
        raise DegenerateWeights("total weight must be positive")
    return float((w * np.asarray(cluster_emds, dtype=np.float64)).sum() / total)
