"""Analytic convergence model: gap recursion, rounds estimator, learning curve.

The model tracks the expected optimality gap of federated training on a
cluster. Per round the gap contracts by rho = 1 - mu*eta*E down to a
floor made of three parts: the data-heterogeneity term Gamma, sampling
noise sigma^2/U, and client drift (E-1)^2 G^2. Inverting the recursion
gives the number of rounds needed to push the gap below the tolerance
implied by a task's accuracy target, and the same recursion yields an
analytic accuracy-vs-round curve in place of real training.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateWeights, InfeasibleTarget, UnreachableAccuracy

WEIGHT_SUM_TOL = 1e-9


@dataclass(frozen=True)
class ConvergenceParams:
    """Calibration constants of the convergence model."""

    mu: float  # strong convexity
    eta: float  # learning rate
    local_steps: int  # E
    grad_bound: float  # G
    sigma_sq: float  # gradient variance bound
    participants: int  # U in the sigma^2 / U noise term (full client count)
    l_div: float  # L_d, divergence-to-loss constant
    l_smooth: float  # smoothness constant of the order bound
    initial_gap: float  # Delta_0 = F(w^0) - F(w*)

    def __post_init__(self) -> None:
        for name in (
            "mu",
            "eta",
            "local_steps",
            "grad_bound",
            "sigma_sq",
            "participants",
            "l_div",
            "l_smooth",
            "initial_gap",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.mu * self.eta * self.local_steps >= 1:
            raise ValueError("mu * eta * E must be < 1 so the gap contracts")

    @property
    def rho(self) -> float:
        return 1.0 - self.mu * self.eta * self.local_steps


@dataclass(frozen=True)
class TaskSpec:
    """One learning task: accuracy target and loss landmarks."""

    id: str
    target_accuracy: float  # tau in (0, 1)
    initial_loss: float  # F(w^0)
    optimal_loss: float  # F(w*)
    model_size_bits: float

    def __post_init__(self) -> None:
        if not 0 < self.target_accuracy < 1:
            raise ValueError("target_accuracy must lie strictly in (0, 1)")
        if self.initial_loss <= 0:
            raise ValueError("initial_loss must be strictly positive")
        if self.optimal_loss < 0 or self.optimal_loss >= self.initial_loss:
            raise ValueError("need 0 <= optimal_loss < initial_loss")
        if self.model_size_bits <= 0:
            raise ValueError("model_size_bits must be strictly positive")

    @property
    def initial_gap(self) -> float:
        return self.initial_loss - self.optimal_loss


def gap_target(task: TaskSpec) -> float:
    """Optimality-gap tolerance equivalent to the task's accuracy target.

    Accuracy r rounds in is 1 - F(w^r)/F(w^0); it reaches tau exactly
    when the gap F(w^r) - F(w*) shrinks to (1 - tau) F(w^0) - F(w*).
    """
    eps = (1.0 - task.target_accuracy) * task.initial_loss - task.optimal_loss
    if eps <= 0:
        raise InfeasibleTarget(
            f"task {task.id}: accuracy {task.target_accuracy} is unattainable "
            f"with optimal loss {task.optimal_loss}"
        )
    return eps


def gamma_bound(q_weights: list[float], cluster_emds: list[float], l_div: float) -> float:
    """Heterogeneity term Gamma bounded by L_d * sum_i q_i * Delta_i.

    Args:
        q_weights: normalized data weights, must sum to 1.
        cluster_emds: EMD of each weighted component to its reference.
        l_div: divergence-to-loss constant L_d.
    """
    q = np.asarray(q_weights, dtype=np.float64)
    d = np.asarray(cluster_emds, dtype=np.float64)
    if q.shape != d.shape:
        raise DegenerateWeights(f"got {q.size} weights but {d.size} EMDs")
    if abs(float(q.sum()) - 1.0) > WEIGHT_SUM_TOL:
        raise DegenerateWeights(f"weights must sum to 1, got {q.sum()!r}")
    return float(l_div * (q * d).sum())


def noise_floor(p: ConvergenceParams, gamma: float) -> float:
    """Asymptotic gap floor: Gamma + sigma^2/U + (E-1)^2 G^2."""
    drift = (p.local_steps - 1) ** 2 * p.grad_bound**2
    return gamma + p.sigma_sq / p.participants + drift


def expected_gap(r: int, p: ConvergenceParams, gamma: float) -> float:
    """Expected optimality gap after r rounds: rho^r Delta_0 + floor."""
    if r < 0:
        raise ValueError("round index must be >= 0")
    return p.rho**r * p.initial_gap + noise_floor(p, gamma)


def rounds_required(task: TaskSpec, p: ConvergenceParams, gamma: float) -> int:
    """Rounds needed to drive the task's gap below its tolerance.

    Solves rho^R Delta_0 <= eps - floor with the 1 - x <= exp(-x)
    relaxation, giving R = ceil(ln(Delta_0 / (eps - floor)) / (mu eta E))
    under the natural-log convention; Delta_0 is the task's own initial
    gap. Clamped to at least one round. The log of the ratio is taken as
    a difference of logs so a tolerance barely above the floor yields a
    large finite round count instead of overflowing.
    """
    eps = gap_target(task)
    floor = noise_floor(p, gamma)
    if eps <= floor:
        raise UnreachableAccuracy(
            f"task {task.id}: gap tolerance {eps:.6g} is at or below the "
            f"convergence floor {floor:.6g}"
        )
    delta0 = task.initial_gap
    raw = (math.log(delta0) - math.log(eps - floor)) / (p.mu * p.eta * p.local_steps)
    return max(1, math.ceil(raw))


def rounds_order_bound(
    p: ConvergenceParams,
    q_weights: list[float],
    cluster_emds: list[float],
    epsilon: float,
) -> float:
    """Order-level rounds bound, linear in the weighted average EMD.

    Evaluates, with unit constant,
    (E G^2 + sigma^2 sum_i q_i^2 + L_d L sum_i q_i Delta_i) / (mu eps)
    + (E-1)^2 G^2 / (mu eps).
    Used for monotonicity checks and reporting, never for scheduling.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be strictly positive")
    q = np.asarray(q_weights, dtype=np.float64)
    d = np.asarray(cluster_emds, dtype=np.float64)
    if q.shape != d.shape:
        raise DegenerateWeights(f"got {q.size} weights but {d.size} EMDs")
    g_sq = p.grad_bound**2
    bracket = (
        p.local_steps * g_sq
        + p.sigma_sq * float((q**2).sum())
        + p.l_div * p.l_smooth * float((q * d).sum())
    )
    drift = (p.local_steps - 1) ** 2 * g_sq
    return bracket / (p.mu * epsilon) + drift / (p.mu * epsilon)


def learning_curve(
    task: TaskSpec, p: ConvergenceParams, gamma: float, max_rounds: int
) -> list[tuple[int, float]]:
    """Analytic accuracy-by-round curve standing in for real training.

    accuracy_r = 1 - (F* + gap_r) / F(w^0) with gap_r following the
    expected-gap recursion on the task's own initial gap, clamped to
    [0, 1]. Non-decreasing in r.
    """
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    floor = noise_floor(p, gamma)
    curve = []
    for r in range(max_rounds + 1):
        gap = task.initial_gap * p.rho**r + floor
        accuracy = 1.0 - (task.optimal_loss + gap) / task.initial_loss
        curve.append((r, min(1.0, max(0.0, accuracy))))
    return curve
