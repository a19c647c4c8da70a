"""Asynchronous multi-worker training loop.

Each worker owns a private environment, a seeded rng, and a local copy of
the network parameters. It collects rollouts of up to t_max steps (never
crossing an episode boundary), computes gradients of the combined loss
locally, applies them to the shared global network under a single writer
lock, and refreshes its local copy from the updated global parameters.

Episode-length statistics feed one global TPLabeler so terminal-prediction
targets are computable at rollout time, before the episode finishes.
Completed-episode metrics flow to the caller through an ordered queue.
"""

from __future__ import annotations

import os
import queue
import threading
import time
from dataclasses import dataclass, field

import numpy as np

from .envs.base import Environment
from .losses import LossWeights, TPLabeler, advantages, n_step_returns, tp_targets
from .model import LossParts, ModelConfig, backward_batch, forward_batch, init_model
from .nn import AdamState, ParamSet, adam_step, clip_global_norm

DEFAULT_CLIP_NORM = 40.0


@dataclass
class Rollout:
    obs: np.ndarray           # (T, obs_dim)
    actions: np.ndarray       # (T,)
    rewards: np.ndarray       # (T,)
    values: np.ndarray        # (T,) critic estimates at collection time
    tp_preds: np.ndarray      # (T,)
    step_indices: np.ndarray  # (T,) absolute step index within the episode
    terminal: bool
    bootstrap_value: float    # 0 when terminal

    def __post_init__(self):
        if self.terminal and self.bootstrap_value != 0.0:
            raise ValueError("terminal rollouts must bootstrap from 0")
        if len(self.actions) < 1:
            raise ValueError("empty rollout")


@dataclass
class TrainConfig:
    model: ModelConfig
    weights: LossWeights = field(default_factory=LossWeights)
    n_workers: int = 8
    seed: int = 0
    episode_budget: int = 1000
    use_tp: bool = True
    clip_norm: float = DEFAULT_CLIP_NORM
    checkpoint_dir: str | None = None
    checkpoint_cadence: int = 0       # episodes between checkpoints; 0 = only final
    early_stop_reward: float | None = None  # stop once MA(window) reaches this
    early_stop_window: int = 100
    lr: float = 1e-4


@dataclass
class MetricsRow:
    """One completed episode, as streamed to the harness."""
    worker_id: int
    episode: int              # global completion index, 1-based
    length: int
    reward: float
    running_n: float          # TPLabeler horizon after recording, -1 before first
    policy_loss: float
    value_loss: float
    tp_loss: float
    entropy: float
    wall_time: float          # seconds since run start (not deterministic)


class GlobalStore:
    """Shared parameters, optimizer state, and run counters.

    Snapshot reads copy under the lock; updates are serialized through
    apply_and_sync. version increases by exactly one per applied update.
    """

    def __init__(self, params: ParamSet, optimizer: AdamState,
                 labeler: TPLabeler | None = None):
        self.params = params
        self.optimizer = optimizer
        self.labeler = labeler or TPLabeler()
        self.episode_count = 0
        self.update_count = 0
        self._recent_rewards: list[float] = []
        self._lock = threading.Lock()

    @property
    def version(self) -> int:
        return self.params.version

    def snapshot(self) -> ParamSet:
        with self._lock:
            return self.params.copy()

    def apply_and_sync(self, grads: ParamSet, clip_norm: float = DEFAULT_CLIP_NORM) -> ParamSet:
        """One clipped Adam step on the global params; returns a fresh local
        snapshot."""
        with self._lock:
            clip_global_norm(grads, clip_norm)
            adam_step(self.params, grads, self.optimizer)
            self.update_count += 1
            return self.params.copy()

    def finish_episode(self, reward: float, window: int) -> tuple[int, float | None]:
        """Record a completed episode; returns (global episode index,
        moving average over the last `window` episodes or None)."""
        with self._lock:
            self.episode_count += 1
            self._recent_rewards.append(reward)
            if len(self._recent_rewards) > window:
                self._recent_rewards.pop(0)
            ma = None
            if len(self._recent_rewards) == window:
                ma = sum(self._recent_rewards) / window
            return self.episode_count, ma


def collect_rollout(params: ParamSet, cfg: ModelConfig, env: Environment,
                    obs: np.ndarray, episode_step: int,
                    rng: np.random.Generator, t_max: int):
    """Interact for up to t_max steps under the softmax policy.

    Stops early at episode end. Returns (rollout, next_obs, done); next_obs
    is the first observation of the next episode segment (or the terminal
    observation when done).
    """
    obs_list, actions, rewards, values, tps, indices = [], [], [], [], [], []
    done = False
    for _ in range(t_max):
        probs, v, tp, _ = forward_batch(params, cfg, obs[None, :])
        u = rng.random()
        action = int(np.searchsorted(np.cumsum(probs[0]), u))
        action = min(action, probs.shape[1] - 1)
        next_obs, reward, done, _info = env.step(action, rng)
        obs_list.append(obs)
        actions.append(action)
        rewards.append(reward)
        values.append(float(v[0]))
        tps.append(float(tp[0]))
        indices.append(episode_step)
        episode_step += 1
        obs = next_obs
        if done:
            break
    if done:
        bootstrap = 0.0
    else:
        _, v, _, _ = forward_batch(params, cfg, obs[None, :])
        bootstrap = float(v[0])
    rollout = Rollout(
        obs=np.array(obs_list), actions=np.array(actions),
        rewards=np.array(rewards), values=np.array(values),
        tp_preds=np.array(tps), step_indices=np.array(indices),
        terminal=done, bootstrap_value=bootstrap,
    )
    return rollout, obs, done


def compute_update(rollout: Rollout, params: ParamSet, cfg: ModelConfig,
                   weights: LossWeights, horizon: float | None,
                   use_tp: bool = True, clip_norm: float = DEFAULT_CLIP_NORM):
    """Gradients of the combined loss over one rollout, norm-clipped.

    When no episode has completed yet (horizon is None) the
    terminal-prediction term is silently disabled for this update.
    Returns (grads, LossParts).
    """
    ret = n_step_returns(rollout.rewards, rollout.bootstrap_value,
                         weights.gamma, rollout.terminal)
    adv = advantages(ret, rollout.values)
    targets = None
    tp_on = use_tp and weights.lambda_tp != 0.0 and horizon is not None
    if tp_on:
        targets = tp_targets(rollout.step_indices, horizon)
    _, _, _, cache = forward_batch(params, cfg, rollout.obs)
    grads, parts = backward_batch(params, cfg, cache, rollout.actions, adv,
                                  ret, targets, weights, use_tp=tp_on)
    if not np.isfinite(parts.total):
        raise FloatingPointError("non-finite training loss")
    clip_global_norm(grads, clip_norm)
    return grads, parts


def train(cfg: TrainConfig, env_factory, metrics_queue: queue.Queue | None = None,
          store: GlobalStore | None = None) -> GlobalStore:
    """Run n_workers asynchronous workers until the episode budget (or an
    early-stop threshold) is exhausted.

    env_factory(worker_id) -> Environment, one private instance per worker.
    Completed-episode MetricsRow objects are pushed to metrics_queue in
    completion order; None is pushed once when training ends.
    Returns the GlobalStore with final parameters.
    """
    if cfg.checkpoint_dir is not None:
        os.makedirs(cfg.checkpoint_dir, exist_ok=True)
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.n_workers + 1)
    if store is None:
        init_rng = np.random.default_rng(seeds[0])
        params = init_model(cfg.model, init_rng)
        store = GlobalStore(params, AdamState.for_params(params, lr=cfg.lr))
    stop = threading.Event()
    start_time = time.monotonic()
    errors: list[BaseException] = []

    def worker(wid: int):
        try:
            _worker_loop(wid, cfg, env_factory(wid),
                         np.random.default_rng(seeds[wid + 1]),
                         store, stop, metrics_queue, start_time)
        except BaseException as exc:  # propagate after flushing
            errors.append(exc)
            stop.set()

    threads = [threading.Thread(target=worker, args=(w,), daemon=True)
               for w in range(cfg.n_workers)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    if cfg.checkpoint_dir is not None:
        store.snapshot().save(f"{cfg.checkpoint_dir}/final.ckpt")
    if metrics_queue is not None:
        metrics_queue.put(None)
    if errors:
        raise RuntimeError("worker failed") from errors[0]
    return store


def _worker_loop(wid: int, cfg: TrainConfig, env: Environment,
                 rng: np.random.Generator, store: GlobalStore,
                 stop: threading.Event, metrics_queue, start_time: float):
    if cfg.episode_budget <= 0:
        return
    local = store.snapshot()
    obs = env.reset(rng)
    episode_step = 0
    episode_reward = 0.0
    acc = LossParts()
    n_updates = 0
    while not stop.is_set():
        rollout, obs, done = collect_rollout(local, cfg.model, env, obs,
                                             episode_step, rng, cfg.weights.t_max)
        episode_step += len(rollout.actions)
        episode_reward += float(rollout.rewards.sum())
        grads, parts = compute_update(rollout, local, cfg.model, cfg.weights,
                                      store.labeler.horizon, use_tp=cfg.use_tp,
                                      clip_norm=cfg.clip_norm)
        local = store.apply_and_sync(grads, clip_norm=-1.0)  # already clipped
        acc.policy_loss += parts.policy_loss
        acc.value_loss += parts.value_loss
        acc.tp_loss += parts.tp_loss
        acc.entropy += parts.entropy
        n_updates += 1
        if done:
            store.labeler.record_episode(episode_step)
            ep_idx, ma = store.finish_episode(episode_reward, cfg.early_stop_window)
            if ep_idx <= cfg.episode_budget and metrics_queue is not None:
                horizon = store.labeler.horizon
                metrics_queue.put(MetricsRow(
                    worker_id=wid, episode=ep_idx, length=episode_step,
                    reward=episode_reward,
                    running_n=horizon if horizon is not None else -1.0,
                    policy_loss=acc.policy_loss / n_updates,
                    value_loss=acc.value_loss / n_updates,
                    tp_loss=acc.tp_loss / n_updates,
                    entropy=acc.entropy / n_updates,
                    wall_time=time.monotonic() - start_time,
                ))
            if (cfg.checkpoint_dir is not None and cfg.checkpoint_cadence > 0
                    and ep_idx % cfg.checkpoint_cadence == 0):
                store.snapshot().save(f"{cfg.checkpoint_dir}/ep{ep_idx:08d}.ckpt")
            if ep_idx >= cfg.episode_budget:
                stop.set()
            if (cfg.early_stop_reward is not None and ma is not None
                    and ma >= cfg.early_stop_reward):
                stop.set()
            if stop.is_set():
                return
            obs = env.reset(rng)
            episode_step = 0
            episode_reward = 0.0
            acc = LossParts()
            n_updates = 0
