"""Typed errors raised across the package.

Every error the library raises on bad input or an infeasible request
derives from :class:`CodaFlError`, so callers can catch one base type.
``ConfigError`` is reserved for malformed scenario configuration and is
mapped to a distinct exit code by the CLI.
"""
from __future__ import annotations


class CodaFlError(Exception):
    """Base class for all library errors."""


class DegenerateHistogram(CodaFlError):
    """Label histogram has no samples, so no distribution exists."""


class DimensionMismatch(CodaFlError):
    """Distributions or matrices with incompatible shapes were combined."""


class DegenerateWeights(CodaFlError):
    """Weight vector sums to zero (or violates a required normalization)."""


class InvalidClusterCount(CodaFlError):
    """Requested cluster count is outside 1..U."""


class InvalidDistanceMatrix(CodaFlError):
    """Distance matrix is not square, symmetric, and zero-diagonal."""


class EmptyCluster(CodaFlError):
    """A cluster with no members was passed where one is required."""


class InfeasibleTarget(CodaFlError):
    """Accuracy threshold is unattainable even at the optimum."""


class UnreachableAccuracy(CodaFlError):
    """Convergence floor exceeds the gap tolerance for this cluster."""


class CyclicDependency(CodaFlError):
    """Task graph contains a directed cycle."""

    def __init__(self, cycle: list) -> None:
        super().__init__(f"dependency cycle: {' -> '.join(map(str, cycle))}")
        self.cycle = cycle


class UnknownTask(CodaFlError):
    """A task id was referenced that is not in the graph."""


class NoFeasibleCluster(CodaFlError):
    """Some task cannot reach its accuracy target on any cluster."""


class InvalidAction(CodaFlError):
    """Environment action is not valid in the current state."""


class InstanceTooLarge(CodaFlError):
    """Instance exceeds the exhaustive search size limit."""


class InvalidSchedule(CodaFlError):
    """Schedule violates precedence, exclusivity, or timing arithmetic."""


class ConfigError(CodaFlError):
    """Scenario configuration is malformed."""
