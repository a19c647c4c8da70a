"""Train a small agent on the 8x8 goal-seeking gridworld, inspect the run
directory the harness writes, and evaluate the final checkpoint.

Takes about half a minute on a laptop.
"""

import os

import numpy as np

from a3ctp.harness import RunConfig, evaluate, read_metrics, run_experiment

cfg = RunConfig(
    env="gridgoal", env_size=8, algorithm="a3c-tp",
    workers=4, seed=0, episode_budget=5000,
    early_stop_reward=0.9,           # stop once MA(100) reaches 0.9
    out_dir="runs/demo-gridgoal",
)
run_dir = run_experiment(cfg)
print("run directory:", run_dir)
print("contents:", sorted(os.listdir(run_dir)))

m = read_metrics(run_dir)
episodes = m["episode"]
ma = m["moving_avg_reward"]
print(f"trained for {episodes.size} episodes")
for k in np.linspace(0, episodes.size - 1, 6, dtype=int):
    print(f"  episode {episodes[k]:5d}: moving-average reward {ma[k]:.3f}")

ckpt = os.path.join(run_dir, "checkpoints", "final.ckpt")
report = evaluate(ckpt, "gridgoal", episodes=100, seed=1,
                  env_kwargs={"size": 8}, sample=False)
print(f"greedy evaluation: mean reward {report.mean_reward:.2f}, "
      f"mean episode length {report.mean_length:.1f}")
