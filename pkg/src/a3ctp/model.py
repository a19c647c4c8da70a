"""Three-headed actor-critic network: a shared feedforward trunk feeding a
softmax policy head, a linear value head, and a sigmoid terminal-prediction
head.

Forward and backward passes are hand-written on top of the nn core. The
backward pass computes gradients of the combined rollout objective
(policy gradient with a constant advantage, squared value error, entropy
bonus, terminal-prediction MSE) in one sweep.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .losses import LossWeights
from .nn import LayerDef, NonFiniteError, ParamSet, backward_mlp, forward_mlp, init_layers


@dataclass
class ModelConfig:
    obs_dim: int
    n_actions: int
    hidden: tuple[int, ...] = (128, 128)
    activation: str = "tanh"

    def trunk_layers(self) -> list[LayerDef]:
        layers = []
        fan_in = self.obs_dim
        for i, width in enumerate(self.hidden):
            layers.append(LayerDef(f"trunk{i}", fan_in, width, self.activation))
            fan_in = width
        return layers

    @property
    def trunk_out(self) -> int:
        return self.hidden[-1] if self.hidden else self.obs_dim

    def head_layers(self) -> dict[str, LayerDef]:
        d = self.trunk_out
        return {
            "policy": LayerDef("policy", d, self.n_actions, "linear"),
            "value": LayerDef("value", d, 1, "linear"),
            "tp": LayerDef("tp", d, 1, "linear"),  # sigmoid applied in-head
        }


@dataclass
class ModelOutput:
    policy: np.ndarray       # probabilities over actions, sums to 1
    value: float             # critic estimate
    tp_prediction: float     # predicted closeness to terminal, in (0, 1)


@dataclass
class LossParts:
    policy_loss: float = 0.0
    value_loss: float = 0.0
    entropy: float = 0.0
    tp_loss: float = 0.0
    total: float = 0.0


def init_model(cfg: ModelConfig, rng: np.random.Generator) -> ParamSet:
    """Seeded init of trunk plus all three heads, in a fixed layer order."""
    layers = cfg.trunk_layers() + [cfg.head_layers()[k] for k in ("policy", "value", "tp")]
    return init_layers(layers, rng)


def _softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def _log_softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=-1, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=-1, keepdims=True))


def forward_batch(params: ParamSet, cfg: ModelConfig, obs: np.ndarray):
    """Batched forward through trunk and all heads.

    obs: (T, obs_dim). Returns (probs (T,A), values (T,), tp (T,), cache).
    """
    obs = np.atleast_2d(np.asarray(obs, dtype=np.float64))
    trunk_layers = cfg.trunk_layers()
    heads = cfg.head_layers()
    h, trunk_cache = forward_mlp(params, obs, trunk_layers)
    logits, pol_cache = forward_mlp(params, h, [heads["policy"]])
    v, val_cache = forward_mlp(params, h, [heads["value"]])
    u, tp_cache = forward_mlp(params, h, [heads["tp"]])
    probs = _softmax(logits)
    tp = 1.0 / (1.0 + np.exp(-u[:, 0]))
    if not (np.all(np.isfinite(probs)) and np.all(np.isfinite(v))):
        raise NonFiniteError("non-finite head outputs")
    cache = {
        "trunk": trunk_cache, "policy": pol_cache, "value": val_cache,
        "tp": tp_cache, "probs": probs, "logits": logits,
        "values": v[:, 0], "tp_pred": tp,
    }
    return probs, v[:, 0], tp, cache


def model_forward(params: ParamSet, cfg: ModelConfig, obs: np.ndarray) -> ModelOutput:
    """Single-observation forward pass."""
    probs, v, tp, _ = forward_batch(params, cfg, np.asarray(obs, dtype=np.float64)[None, :])
    return ModelOutput(policy=probs[0], value=float(v[0]), tp_prediction=float(tp[0]))


def backward_batch(params: ParamSet, cfg: ModelConfig, cache, actions,
                   advantages, returns, tp_targets, weights: LossWeights,
                   use_tp: bool = True):
    """Gradients of the combined rollout loss w.r.t. every parameter.

    Per-step terms, each averaged over the rollout of length T:
      policy:  -log pi(a_t) * A_t   (advantage treated as a constant)
      value:   (R_t - V_t)^2
      entropy: H(pi_t), entering the loss with a negative weight
      tp:      (y_t - y_t^p)^2
    When use_tp is false or lambda_tp == 0, the terminal-prediction head
    contributes nothing (not even zero-valued arrays are added), so the
    result is bitwise identical to a plain actor-critic backward.
    Returns (grads: ParamSet, parts: LossParts).
    """
    probs = cache["probs"]
    T, A = probs.shape
    actions = np.asarray(actions, dtype=np.intp)
    if np.any(actions < 0) or np.any(actions >= A):
        raise IndexError("action index out of range")
    adv = np.asarray(advantages, dtype=np.float64)
    ret = np.asarray(returns, dtype=np.float64)
    v = cache["values"]
    logp = _log_softmax(cache["logits"])
    onehot = np.zeros((T, A))
    onehot[np.arange(T), actions] = 1.0

    ent = -np.sum(probs * logp, axis=1)
    policy_loss = float(np.mean(-logp[np.arange(T), actions] * adv))
    value_loss = float(np.mean((ret - v) ** 2))
    ent_mean = float(np.mean(ent))

    # Policy-head logit gradient: policy term + entropy term.
    d_logits = weights.lambda_pi * adv[:, None] * (probs - onehot) / T
    d_logits += weights.lambda_h * probs * (logp + ent[:, None]) / T
    # Value-head gradient.
    d_v = weights.lambda_v * (-2.0 / T) * (ret - v)

    grads = params.zeros_like()
    d_h_pol, _ = backward_mlp(cache["policy"], d_logits, grads)
    d_h_val, _ = backward_mlp(cache["value"], d_v[:, None], grads)
    d_h = d_h_pol + d_h_val

    parts = LossParts(policy_loss=policy_loss, value_loss=value_loss, entropy=ent_mean)
    tp_enabled = use_tp and weights.lambda_tp != 0.0 and tp_targets is not None
    if tp_enabled:
        y = np.asarray(tp_targets, dtype=np.float64)
        p = cache["tp_pred"]
        parts.tp_loss = float(np.mean((y - p) ** 2))
        # d/du of (y - sigmoid(u))^2, averaged over the rollout.
        d_u = weights.lambda_tp * (-2.0 / T) * (y - p) * p * (1.0 - p)
        d_h_tp, _ = backward_mlp(cache["tp"], d_u[:, None], grads)
        d_h = d_h + d_h_tp
    else:
        # Head params exist but get zero gradient arrays (from zeros_like).
        parts.tp_loss = 0.0

    backward_mlp(cache["trunk"], d_h, grads)
    parts.total = (weights.lambda_v * value_loss
                   + weights.lambda_pi * policy_loss
                   - weights.lambda_h * ent_mean)
    if tp_enabled:
        parts.total += weights.lambda_tp * parts.tp_loss
    return grads, parts


def model_backward(params: ParamSet, cfg: ModelConfig, obs, actions,
                   advantages, returns, tp_targets, weights: LossWeights,
                   use_tp: bool = True):
    """Forward + backward over a batch of observations in one call."""
    _, _, _, cache = forward_batch(params, cfg, obs)
    return backward_batch(params, cfg, cache, actions, advantages, returns,
                          tp_targets, weights, use_tp=use_tp)


def rollout_loss(params: ParamSet, cfg: ModelConfig, obs, actions, advantages,
                 returns, tp_targets, weights: LossWeights, use_tp: bool = True) -> float:
    """Scalar combined loss, used by finite-difference gradient checks."""
    probs, v, tp, cache = forward_batch(params, cfg, obs)
    T = probs.shape[0]
    actions = np.asarray(actions, dtype=np.intp)
    logp = _log_softmax(cache["logits"])
    adv = np.asarray(advantages, dtype=np.float64)
    ret = np.asarray(returns, dtype=np.float64)
    policy_loss = float(np.mean(-logp[np.arange(T), actions] * adv))
    value_loss = float(np.mean((ret - v) ** 2))
    ent_mean = float(np.mean(-np.sum(probs * logp, axis=1)))
    total = (weights.lambda_v * value_loss + weights.lambda_pi * policy_loss
             - weights.lambda_h * ent_mean)
    if use_tp and weights.lambda_tp != 0.0 and tp_targets is not None:
        y = np.asarray(tp_targets, dtype=np.float64)
        total += weights.lambda_tp * float(np.mean((y - tp) ** 2))
    return float(total)
