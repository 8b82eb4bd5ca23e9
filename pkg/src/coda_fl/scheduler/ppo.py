"""Clipped-surrogate policy-gradient training for the scheduling environment.

A small two-layer network (shared tanh trunk, softmax policy head over
masked actions, scalar value head) is trained on-policy: episodes are
sampled in batches, advantages are discounted returns minus the value
baseline, and the policy improves through the clipped probability-ratio
surrogate. The best schedule seen across all episodes is tracked and
returned; the greedy schedule seeds it as episode zero, so the result
never falls behind the deterministic baseline. Fully deterministic per
seed.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..dag import TaskGraph
from .env import Action, encode_state, env_reset, env_step, state_to_schedule, valid_actions
from .matrix import ProcTimeMatrix
from .policies import greedy_schedule
from .schedule import Schedule


@dataclass(frozen=True)
class PPOHyperparams:
    episodes: int = 500
    batch_episodes: int = 16
    clip_ratio: float = 0.2
    discount: float = 0.99
    learning_rate: float = 3e-3
    hidden: int = 64
    epochs: int = 4
    entropy_coef: float = 0.01
    value_coef: float = 0.5

    def __post_init__(self) -> None:
        if self.episodes < 1 or self.batch_episodes < 1:
            raise ValueError("episode counts must be positive")
        if not 0 < self.clip_ratio < 1 or not 0 < self.discount <= 1:
            raise ValueError("clip_ratio in (0,1) and discount in (0,1] required")
        if self.learning_rate <= 0 or self.hidden < 1 or self.epochs < 1:
            raise ValueError("learning_rate, hidden, and epochs must be positive")
        if self.entropy_coef < 0 or self.value_coef < 0:
            raise ValueError("loss coefficients must be nonnegative")


@dataclass(frozen=True)
class PolicyParams:
    """Parameters of the policy/value network, keyed by layer name."""

    params: dict[str, np.ndarray]

    def __post_init__(self) -> None:
        for name, value in self.params.items():
            if not np.isfinite(value).all():
                raise ValueError(f"non-finite entries in parameter {name}")

    @property
    def vector(self) -> np.ndarray:
        """All parameters flattened into one real vector."""
        return np.concatenate([self.params[k].ravel() for k in sorted(self.params)])


def _init_params(dim_in: int, hidden: int, n_actions: int, rng) -> dict[str, np.ndarray]:
    return {
        "w1": rng.normal(0.0, 1.0 / np.sqrt(dim_in), size=(dim_in, hidden)),
        "b1": np.zeros(hidden),
        "wp": rng.normal(0.0, 0.01, size=(hidden, n_actions)),
        "bp": np.zeros(n_actions),
        "wv": rng.normal(0.0, 0.01, size=(hidden, 1)),
        "bv": np.zeros(1),
    }


def _forward(params: dict, x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    h = np.tanh(x @ params["w1"] + params["b1"])
    logits = h @ params["wp"] + params["bp"]
    values = (h @ params["wv"] + params["bv"])[..., 0]
    return h, logits, values


def _masked_log_softmax(logits: np.ndarray, masks: np.ndarray) -> np.ndarray:
    # rows are states; invalid actions get log-probability -inf (probability 0)
    z = np.where(masks, logits, -np.inf)
    z = z - z.max(axis=-1, keepdims=True)
    log_norm = np.log(np.exp(z).sum(axis=-1, keepdims=True))
    return z - log_norm


@dataclass
class _Adam:
    learning_rate: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)

    def update(self, params: dict, grads: dict) -> None:
        self.step += 1
        for key, grad in grads.items():
            self.m[key] = self.beta1 * self.m.get(key, 0.0) + (1 - self.beta1) * grad
            self.v[key] = self.beta2 * self.v.get(key, 0.0) + (1 - self.beta2) * grad**2
            m_hat = self.m[key] / (1 - self.beta1**self.step)
            v_hat = self.v[key] / (1 - self.beta2**self.step)
            params[key] = params[key] - self.learning_rate * m_hat / (np.sqrt(v_hat) + self.eps)


def _action_index(action: Action, n_clusters: int, n_actions: int) -> int:
    if action.is_wait:
        return n_actions - 1
    return action.task * n_clusters + action.cluster


def _index_action(index: int, n_clusters: int, n_actions: int) -> Action:
    if index == n_actions - 1:
        return Action.wait()
    return Action.assign(index // n_clusters, index % n_clusters)


def _rollout(params, graph, matrix, n_actions, rng):
    """Sample one episode; returns per-step arrays and the final schedule."""
    state = env_reset(graph, matrix)
    xs, acts, masks, logps, rewards = [], [], [], [], []
    done = state.done
    while not done:
        x = encode_state(state, matrix)
        mask = np.zeros(n_actions, dtype=bool)
        for action in valid_actions(state, matrix):
            mask[_action_index(action, matrix.n_clusters, n_actions)] = True
        _, logits, _ = _forward(params, x)
        logp = _masked_log_softmax(logits, mask)
        probs = np.exp(logp)
        probs = probs / probs.sum()
        a = int(rng.choice(n_actions, p=probs))
        _, reward, done = env_step(
            state, _index_action(a, matrix.n_clusters, n_actions), matrix, graph
        )
        xs.append(x)
        acts.append(a)
        masks.append(mask)
        logps.append(logp[a])
        rewards.append(reward)
    return xs, acts, masks, logps, rewards, state_to_schedule(state, matrix)


def _returns_to_go(rewards: list[float], discount: float) -> list[float]:
    out = [0.0] * len(rewards)
    acc = 0.0
    for t in range(len(rewards) - 1, -1, -1):
        acc = rewards[t] + discount * acc
        out[t] = acc
    return out


def _update(params, opt, batch, hp: PPOHyperparams) -> None:
    xs = np.stack(batch["xs"])
    acts = np.asarray(batch["acts"])
    masks = np.stack(batch["masks"])
    logp_old = np.asarray(batch["logps"])
    returns = np.asarray(batch["returns"])
    n = len(acts)

    _, _, values_old = _forward(params, xs)
    adv = returns - values_old
    adv = (adv - adv.mean()) / (adv.std() + 1e-8)

    for _ in range(hp.epochs):
        h, logits, values = _forward(params, xs)
        logp_all = _masked_log_softmax(logits, masks)
        probs = np.where(masks, np.exp(logp_all), 0.0)
        logp_taken = logp_all[np.arange(n), acts]
        ratio = np.exp(np.clip(logp_taken - logp_old, -30.0, 30.0))
        unclipped = ratio * adv
        clipped = np.clip(ratio, 1 - hp.clip_ratio, 1 + hp.clip_ratio) * adv

        # surrogate gradient flows only where the unclipped branch is active
        active = (unclipped <= clipped).astype(np.float64)
        coef = -(active * adv * ratio) / n
        one_hot = np.zeros_like(probs)
        one_hot[np.arange(n), acts] = 1.0
        d_logits = coef[:, None] * (one_hot - probs)

        safe_logp = np.where(masks, logp_all, 0.0)
        entropy = -(probs * safe_logp).sum(axis=1)
        d_logits += (hp.entropy_coef / n) * probs * (safe_logp + entropy[:, None])

        d_values = hp.value_coef * 2.0 * (values - returns) / n

        d_hidden = d_logits @ params["wp"].T + d_values[:, None] @ params["wv"].T
        d_pre = d_hidden * (1.0 - h**2)
        grads = {
            "wp": h.T @ d_logits,
            "bp": d_logits.sum(axis=0),
            "wv": h.T @ d_values[:, None],
            "bv": d_values.sum(axis=0, keepdims=True).reshape(1),
            "w1": xs.T @ d_pre,
            "b1": d_pre.sum(axis=0),
        }
        opt.update(params, grads)


def ppo_train(
    graph: TaskGraph,
    matrix: ProcTimeMatrix,
    hyperparams: PPOHyperparams | None = None,
    seed: int = 0,
) -> tuple[PolicyParams, Schedule]:
    """Train the scheduling policy; return its parameters and the best schedule.

    The greedy schedule is recorded as episode zero, so the returned
    best-seen schedule is never worse than greedy. The remaining
    episode budget is spent sampling the stochastic policy and updating
    it per batch with the clipped surrogate. Reproducible per seed.
    """
    hp = hyperparams or PPOHyperparams()
    rng = np.random.default_rng(seed)
    n_actions = matrix.n_tasks * matrix.n_clusters + 1
    dim_in = encode_state(env_reset(graph, matrix), matrix).size
    params = _init_params(dim_in, hp.hidden, n_actions, rng)
    opt = _Adam(hp.learning_rate)

    best = greedy_schedule(graph, matrix)  # warm start, episode 0
    batch = {k: [] for k in ("xs", "acts", "masks", "logps", "returns")}
    pending = 0
    for _ in range(hp.episodes - 1):
        xs, acts, masks, logps, rewards, schedule = _rollout(
            params, graph, matrix, n_actions, rng
        )
        if schedule.makespan < best.makespan:
            best = schedule
        batch["xs"] += xs
        batch["acts"] += acts
        batch["masks"] += masks
        batch["logps"] += logps
        batch["returns"] += _returns_to_go(rewards, hp.discount)
        pending += 1
        if pending == hp.batch_episodes:
            _update(params, opt, batch, hp)
            batch = {k: [] for k in batch}
            pending = 0
    if pending:
        _update(params, opt, batch, hp)

    return PolicyParams({k: v.copy() for k, v in params.items()}), best
