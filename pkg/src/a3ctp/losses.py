"""Scalar learning targets and losses for actor-critic training with the
terminal-prediction auxiliary head.

Covers n-step returns, advantages, policy entropy, terminal-prediction
targets/loss, the combined weighted objective, and the running-average
episode-length tracker that supplies the horizon for terminal-prediction
labels.
"""

from __future__ import annotations

import threading
from collections import deque
from dataclasses import dataclass

import numpy as np

EPISODE_LENGTH_WINDOW = 100  # most recent completed episodes averaged for N


@dataclass
class LossWeights:
    """Coefficients of the combined objective plus rollout hyperparameters.

    Defaults: value 0.5, policy 1.0, entropy 0.01, terminal-prediction 0.5,
    discount 0.99, rollout length 20.
    """

    lambda_v: float = 0.5
    lambda_pi: float = 1.0
    lambda_h: float = 0.01
    lambda_tp: float = 0.5
    gamma: float = 0.99
    t_max: int = 20

    def __post_init__(self):
        if min(self.lambda_v, self.lambda_pi, self.lambda_h, self.lambda_tp) < 0:
            raise ValueError("loss weights must be nonnegative")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must lie in [0, 1]")
        if self.t_max < 1:
            raise ValueError("t_max must be >= 1")


def n_step_returns(rewards, bootstrap_value: float, gamma: float,
                   terminal: bool) -> np.ndarray:
    """Discounted returns over a rollout, seeded from a bootstrap value.

    returns[k] = rewards[k] + gamma * returns[k+1], with returns beyond the
    rollout equal to the bootstrap. Terminal rollouts must bootstrap from 0
    (the value of a terminal state is zero).
    """
    rewards = np.asarray(rewards, dtype=np.float64)
    if rewards.size == 0:
        raise ValueError("rewards must be nonempty")
    if terminal and bootstrap_value != 0.0:
        raise ValueError("terminal rollouts bootstrap from 0")
    out = np.empty_like(rewards)
    acc = float(bootstrap_value)
    for k in range(rewards.size - 1, -1, -1):
        acc = rewards[k] + gamma * acc
        out[k] = acc
    return out


def advantages(returns, values) -> np.ndarray:
    """Elementwise returns minus critic estimates."""
    returns = np.asarray(returns, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if returns.shape != values.shape:
        raise ValueError("returns and values must have equal length")
    return returns - values


def entropy(policy) -> float:
    """Shannon entropy -sum(p ln p) of a probability vector, with
    0 ln 0 == 0."""
    p = np.asarray(policy, dtype=np.float64)
    if np.any(p < 0) or abs(float(p.sum()) - 1.0) > 1e-6:
        raise ValueError("policy is not a probability distribution")
    nz = p[p > 0.0]
    return float(-np.sum(nz * np.log(nz)))


def tp_targets(step_indices, horizon: float) -> np.ndarray:
    """Terminal-prediction targets y_i = i / N, clipped at 1.

    step_indices are absolute step counts within the episode (0 for the
    initial state); horizon N is the running-average episode length. Steps
    past the average map to 1.
    """
    if horizon is None or horizon <= 0:
        raise ValueError("horizon must be positive (no completed episodes yet?)")
    idx = np.asarray(step_indices, dtype=np.float64)
    return np.minimum(idx / float(horizon), 1.0)


def tp_loss(targets, predictions) -> float:
    """Mean squared error between targets and predicted terminal closeness."""
    t = np.asarray(targets, dtype=np.float64)
    p = np.asarray(predictions, dtype=np.float64)
    if t.shape != p.shape:
        raise ValueError("targets and predictions must have equal length")
    d = t - p
    return float(np.mean(d * d))


def combined_loss(policy_loss: float, value_loss: float, entropy_mean: float,
                  tp_loss_value: float, weights: LossWeights) -> float:
    """L = lv*Lv + lpi*Lpi - lh*H + ltp*Ltp.

    With lambda_tp == 0 the terminal-prediction term is skipped entirely so
    the result is bitwise identical to the plain actor-critic objective.
    """
    parts = (policy_loss, value_loss, entropy_mean, tp_loss_value)
    if not all(np.isfinite(parts)):
        raise FloatingPointError(f"non-finite loss component: {parts}")
    total = (weights.lambda_v * value_loss
             + weights.lambda_pi * policy_loss
             - weights.lambda_h * entropy_mean)
    if weights.lambda_tp != 0.0:
        total = total + weights.lambda_tp * tp_loss_value
    return float(total)


class TPLabeler:
    """Running average of recent episode lengths, shared across workers.

    Keeps a ring buffer of up to the last `window` completed episode lengths;
    `horizon` is their arithmetic mean (None until the first episode
    completes). Thread-safe: record and read take a short lock.
    """

    def __init__(self, window: int = EPISODE_LENGTH_WINDOW):
        if window < 1:
            raise ValueError("window must be >= 1")
        self.window = window
        self._lengths: deque[int] = deque(maxlen=window)
        self._lock = threading.Lock()

    def record_episode(self, length: int) -> None:
        if length < 1:
            raise ValueError("episode length must be >= 1")
        with self._lock:
            self._lengths.append(int(length))

    @property
    def horizon(self) -> float | None:
        with self._lock:
            if not self._lengths:
                return None
            return sum(self._lengths) / len(self._lengths)

    def __len__(self) -> int:
        with self._lock:
            return len(self._lengths)
