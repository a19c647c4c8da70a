"""Sweep the terminal-prediction loss weight over the four studied values,
three seeds each, and aggregate the runs into a summary table.

This is a scaled-down version of the sensitivity protocol; bump
episode_budget for a real comparison.
"""

from a3ctp.harness import RunConfig, summarize, summary_table, sweep_lambda_tp

base = RunConfig(
    env="gridgoal", env_size=8, workers=4,
    episode_budget=500, early_stop_reward=0.9,
    out_dir="runs/demo-sweep",
)
run_dirs = sweep_lambda_tp(base, values=[0.25, 0.5, 0.75, 1.0], seeds=[0, 1, 2])
print(f"{len(run_dirs)} runs completed:")
for d in run_dirs:
    print(" ", d)

summaries = summarize(run_dirs, threshold=0.9)
print()
print(summary_table(summaries))
for s in summaries:
    flag = " (censored)" if any(s.censored) else ""
    print(f"lambda_tp={s.lambda_tp:g}: mean episodes to MA>=0.9 "
          f"{s.mean_episodes_to_threshold:.0f}{flag}")
