"""Experiment orchestration: run configuration, metrics persistence,
multi-seed comparisons, loss-weight sweeps, moving averages, summaries,
and checkpoint evaluation.

A run directory is self-describing:
    config.txt      every config key (defaults echoed), key=value text
    metrics.csv     one row per completed episode, fixed column order
    timing.csv      wall-clock sidecar (episode, seconds); kept out of
                    metrics.csv so metrics are bit-reproducible
    checkpoints/    parameter checkpoints, final.ckpt always present
    replays/        evaluation episode replays (bomberman only)
"""

from __future__ import annotations

import csv
import os
import queue
import threading
from collections import deque
from dataclasses import dataclass, fields, replace

import numpy as np

from .envs import make_env
from .envs.minibomber.board import classify_outcome
from .envs.minibomber.env import MiniBomber
from .envs.minibomber.replay import save_replay
from .losses import LossWeights
from .model import ModelConfig, forward_batch
from .nn import ParamSet
from .trainer import TrainConfig, train

METRICS_COLUMNS = (
    "worker_id", "episode", "length", "reward", "running_n",
    "policy_loss", "value_loss", "tp_loss", "entropy", "moving_avg_reward",
)

ALGORITHMS = ("a3c", "a3c-tp")


@dataclass
class RunConfig:
    env: str = "gridgoal"
    env_size: int = 8
    env_max_steps: int = 0        # 0 = environment default
    algorithm: str = "a3c-tp"
    lambda_v: float = 0.5
    lambda_pi: float = 1.0
    lambda_h: float = 0.01
    lambda_tp: float = 0.5
    gamma: float = 0.99
    t_max: int = 20
    hidden: str = "128,128"
    workers: int = 8
    seed: int = 0
    episode_budget: int = 1000
    checkpoint_cadence: int = 0
    lr: float = 1e-4
    clip_norm: float = 40.0
    moving_window: int = 100
    early_stop_reward: float = float("nan")  # nan = disabled
    out_dir: str = "runs/run"

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}")

    def weights(self) -> LossWeights:
        return LossWeights(self.lambda_v, self.lambda_pi, self.lambda_h,
                           self.lambda_tp, self.gamma, self.t_max)

    def hidden_sizes(self) -> tuple[int, ...]:
        return tuple(int(x) for x in self.hidden.split(",") if x)

    def env_kwargs(self) -> dict:
        kw = {"size": self.env_size}
        if self.env_max_steps > 0:
            kw["max_steps"] = self.env_max_steps
        return kw

    def save(self, path) -> None:
        with open(path, "w") as f:
            for fld in fields(self):
                f.write(f"{fld.name}={getattr(self, fld.name)}\n")

    @classmethod
    def load(cls, path) -> "RunConfig":
        kwargs = {}
        types = {f.name: f.type for f in fields(cls)}
        with open(path) as f:
            for line in f:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                key, value = line.split("=", 1)
                t = types[key]
                if t == "int":
                    kwargs[key] = int(value)
                elif t == "float":
                    kwargs[key] = float(value)
                else:
                    kwargs[key] = value
        return cls(**kwargs)


def _format(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def run_experiment(config: RunConfig) -> str:
    """One training run; returns the run directory path."""
    run_dir = config.out_dir
    ckpt_dir = os.path.join(run_dir, "checkpoints")
    os.makedirs(ckpt_dir, exist_ok=True)
    config.save(os.path.join(run_dir, "config.txt"))

    probe = make_env(config.env, **config.env_kwargs())
    spec = probe.spec()
    model_cfg = ModelConfig(spec.obs_dim, spec.n_actions, config.hidden_sizes())
    early = None if np.isnan(config.early_stop_reward) else config.early_stop_reward
    tc = TrainConfig(
        model=model_cfg, weights=config.weights(), n_workers=config.workers,
        seed=config.seed, episode_budget=config.episode_budget,
        use_tp=(config.algorithm == "a3c-tp"), clip_norm=config.clip_norm,
        checkpoint_dir=ckpt_dir, checkpoint_cadence=config.checkpoint_cadence,
        early_stop_reward=early, early_stop_window=config.moving_window,
        lr=config.lr,
    )
    env_factory = lambda wid: make_env(config.env, **config.env_kwargs())

    q: queue.Queue = queue.Queue()
    failure: list[BaseException] = []

    def _run():
        try:
            train(tc, env_factory, metrics_queue=q)
        except BaseException as exc:
            failure.append(exc)
            q.put(None)

    t = threading.Thread(target=_run, daemon=True)
    t.start()
    window: deque[float] = deque(maxlen=config.moving_window)
    with open(os.path.join(run_dir, "metrics.csv"), "w", newline="") as mf, \
            open(os.path.join(run_dir, "timing.csv"), "w", newline="") as tf:
        mw = csv.writer(mf)
        tw = csv.writer(tf)
        mw.writerow(METRICS_COLUMNS)
        tw.writerow(("episode", "wall_time_s"))
        file_episode = 0
        while True:
            row = q.get()
            if row is None:
                break
            file_episode += 1
            window.append(row.reward)
            ma = sum(window) / len(window)
            mw.writerow([
                row.worker_id, file_episode, row.length, _format(row.reward),
                _format(row.running_n), _format(row.policy_loss),
                _format(row.value_loss), _format(row.tp_loss),
                _format(row.entropy), _format(ma),
            ])
            tw.writerow([file_episode, f"{row.wall_time:.3f}"])
    t.join()
    if failure:
        raise RuntimeError(f"training failed in {run_dir}") from failure[0]
    return run_dir


def sweep_lambda_tp(base: RunConfig, values, seeds) -> list[str]:
    """Grid of runs: one directory per (lambda_tp value, seed), sharing the
    base config. Duplicate values are a config error."""
    values = list(values)
    if not values:
        raise ValueError("sweep needs at least one value")
    if len(set(values)) != len(values):
        raise ValueError("duplicate lambda_tp values in sweep")
    run_dirs = []
    failures = []
    for v in values:
        for s in seeds:
            cfg = replace(base, lambda_tp=v, seed=s, algorithm="a3c-tp",
                          out_dir=os.path.join(base.out_dir,
                                               f"tp{v:g}_seed{s}"))
            try:
                run_dirs.append(run_experiment(cfg))
            except Exception as exc:
                failures.append((cfg.out_dir, exc))
    if failures:
        detail = "; ".join(f"{d}: {e}" for d, e in failures)
        raise RuntimeError(f"sweep had partial failures: {detail}")
    return run_dirs


def moving_average(series, window: int) -> np.ndarray:
    """Trailing mean over the last min(window, available) points."""
    if window < 1:
        raise ValueError("window must be >= 1")
    s = np.asarray(series, dtype=np.float64)
    if s.size == 0:
        raise ValueError("empty series")
    out = np.empty_like(s)
    csum = np.concatenate([[0.0], np.cumsum(s)])
    for i in range(s.size):
        lo = max(0, i + 1 - window)
        out[i] = (csum[i + 1] - csum[lo]) / (i + 1 - lo)
    return out


def read_metrics(run_dir: str) -> dict[str, np.ndarray]:
    with open(os.path.join(run_dir, "metrics.csv"), newline="") as f:
        rows = list(csv.DictReader(f))
    out = {}
    for col in METRICS_COLUMNS:
        vals = [r[col] for r in rows]
        if col in ("worker_id", "episode", "length"):
            out[col] = np.array([int(v) for v in vals], dtype=np.int64)
        else:
            out[col] = np.array([float(v) for v in vals])
    return out


@dataclass
class GroupSummary:
    env: str
    algorithm: str
    lambda_tp: float
    n_runs: int
    final_ma_mean: float
    final_ma_std: float          # population std
    episodes_to_threshold: list[int]
    threshold: float
    censored: list[bool]         # True where the threshold was never reached

    @property
    def mean_episodes_to_threshold(self) -> float:
        return float(np.mean(self.episodes_to_threshold))


def summarize(run_dirs, threshold: float) -> list[GroupSummary]:
    """Aggregate runs by (env, algorithm, lambda_tp) across seeds.

    Final moving-average reward is the last row's moving_avg_reward column.
    Episodes-to-threshold is the first episode whose full-window moving
    average crosses the threshold (partial windows at the start of a run
    are ignored so one lucky opening episode cannot count as a crossing);
    runs that never cross report their episode budget and a censored flag.
    Result order is deterministic and independent of the order run
    directories are supplied.
    """
    if not run_dirs:
        raise ValueError("need at least one run directory")
    groups: dict[tuple, list[str]] = {}
    for d in run_dirs:
        cfg = RunConfig.load(os.path.join(d, "config.txt"))
        lam = cfg.lambda_tp if cfg.algorithm == "a3c-tp" else 0.0
        groups.setdefault((cfg.env, cfg.algorithm, lam), []).append(d)
    summaries = []
    for (env, algo, lam), dirs in sorted(groups.items()):
        finals, etts, censored = [], [], []
        for d in sorted(dirs):
            cfg = RunConfig.load(os.path.join(d, "config.txt"))
            m = read_metrics(d)
            if m["episode"].size == 0:
                raise ValueError(f"run {d} has no completed episodes")
            ma = m["moving_avg_reward"]
            finals.append(float(ma[-1]))
            full = np.arange(ma.size) >= cfg.moving_window - 1
            crossed = np.nonzero(full & (ma >= threshold))[0]
            if crossed.size:
                etts.append(int(m["episode"][crossed[0]]))
                censored.append(False)
            else:
                etts.append(int(cfg.episode_budget))
                censored.append(True)
        finals = np.array(finals)
        summaries.append(GroupSummary(
            env=env, algorithm=algo, lambda_tp=lam, n_runs=len(dirs),
            final_ma_mean=float(finals.mean()),
            final_ma_std=float(np.sqrt(np.mean((finals - finals.mean()) ** 2))),
            episodes_to_threshold=etts, threshold=threshold, censored=censored,
        ))
    return summaries


def summary_table(summaries: list[GroupSummary]) -> str:
    lines = ["env,algorithm,lambda_tp,n_runs,final_ma_mean,final_ma_std,"
             "mean_episodes_to_threshold,censored"]
    for s in summaries:
        cens = "|".join("1" if c else "0" for c in s.censored)
        lines.append(f"{s.env},{s.algorithm},{s.lambda_tp:g},{s.n_runs},"
                     f"{s.final_ma_mean:.6f},{s.final_ma_std:.6f},"
                     f"{s.mean_episodes_to_threshold:.1f},{cens}")
    return "\n".join(lines) + "\n"


@dataclass
class EvalReport:
    episodes: int
    mean_reward: float
    mean_length: float
    outcome_counts: dict[str, int]  # result and cause tallies (bomberman)


def evaluate(checkpoint_path: str, env_name: str, episodes: int, seed: int,
             env_kwargs: dict | None = None, sample: bool = True,
             replay_dir: str | None = None) -> EvalReport:
    """Roll out a trained checkpoint; outcome attribution for bomberman,
    plain reward statistics otherwise."""
    env_kwargs = dict(env_kwargs or {})
    is_bomber = env_name.startswith("minibomber")
    if is_bomber and replay_dir is not None:
        env_kwargs["record_actions"] = True
    env = make_env(env_name, **env_kwargs)
    spec = env.spec()
    params = ParamSet.load(checkpoint_path)
    hidden = _infer_hidden(params)
    cfg = ModelConfig(spec.obs_dim, spec.n_actions, hidden)
    if params["trunk0.W"].shape[0] != spec.obs_dim:
        raise ValueError("checkpoint does not match environment observation size")
    rng = np.random.default_rng(seed)
    rewards, lengths = [], []
    counts: dict[str, int] = {}
    if replay_dir is not None:
        os.makedirs(replay_dir, exist_ok=True)
    for ep in range(episodes):
        obs = env.reset(rng)
        total, steps, done = 0.0, 0, False
        info = {}
        while not done:
            probs, _, _, _ = forward_batch(params, cfg, obs[None, :])
            if sample:
                u = rng.random()
                action = min(int(np.searchsorted(np.cumsum(probs[0]), u)),
                             spec.n_actions - 1)
            else:
                action = int(np.argmax(probs[0]))
            obs, r, done, info = env.step(action, rng)
            total += r
            steps += 1
        rewards.append(total)
        lengths.append(steps)
        if is_bomber:
            outcome = info["outcome"]
            counts[outcome.result] = counts.get(outcome.result, 0) + 1
            counts[outcome.cause] = counts.get(outcome.cause, 0) + 1
            if replay_dir is not None:
                rseed, actions = info["replay"]
                save_replay(os.path.join(replay_dir, f"ep{ep:05d}.replay"),
                            env.n, env.step_cap, rseed, actions)
    return EvalReport(
        episodes=episodes,
        mean_reward=float(np.mean(rewards)) if rewards else 0.0,
        mean_length=float(np.mean(lengths)) if lengths else 0.0,
        outcome_counts=counts,
    )


def _infer_hidden(params: ParamSet) -> tuple[int, ...]:
    hidden = []
    i = 0
    while f"trunk{i}.W" in params:
        hidden.append(params[f"trunk{i}.W"].shape[1])
        i += 1
    return tuple(hidden)
