"""Walk through the learning targets: n-step returns, advantages, entropy,
and the terminal-prediction labels derived from a running episode-length
average."""

import numpy as np

from a3ctp.losses import (
    LossWeights, TPLabeler, advantages, combined_loss, entropy,
    n_step_returns, tp_loss, tp_targets,
)

# a 4-step rollout that ends the episode (bootstrap value 0)
rewards = np.array([0.0, 0.0, 0.0, 1.0])
returns = n_step_returns(rewards, bootstrap_value=0.0, gamma=0.99, terminal=True)
print("discounted returns:", returns)

values = np.array([0.2, 0.3, 0.5, 0.8])
print("advantages:", advantages(returns, values))

print("entropy of uniform over 4 actions:", entropy(np.full(4, 0.25)))
print("entropy of a deterministic policy:", entropy(np.array([1.0, 0, 0, 0])))

# terminal-prediction targets: fraction of the typical episode elapsed
labeler = TPLabeler()
print("horizon before any episode:", labeler.horizon)
for length in (90, 100, 110):
    labeler.record_episode(length)
print("running mean length N:", labeler.horizon)

steps = np.array([0, 25, 50, 75, 100, 125])
y = tp_targets(steps, labeler.horizon)
print("targets at steps", steps.tolist(), "->", np.round(y, 3).tolist())
print("tp loss of a flat 0.5 prediction:", tp_loss(y, np.full_like(y, 0.5)))

w = LossWeights()  # value 0.5, policy 1.0, entropy 0.01, tp 0.5
total = combined_loss(policy_loss=0.8, value_loss=0.4, entropy_mean=1.2,
                      tp_loss_value=0.1, weights=w)
print("combined loss:", total)
