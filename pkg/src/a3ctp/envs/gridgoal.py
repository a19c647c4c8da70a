"""GridGoal: an n-by-n grid with a fixed start corner and goal corner.

Four move actions; moves into walls bounce. Reward is +1 on reaching the
goal (terminal) and 0 everywhere else, so episode reward is in {0, 1} and
the optimal episode length equals the Manhattan distance between start and
goal. Observations are a one-hot encoding of the agent cell.
"""

from __future__ import annotations

import numpy as np

from .base import Environment, EnvSpec

MOVES = ((-1, 0), (1, 0), (0, -1), (0, 1))  # up, down, left, right


class GridGoal(Environment):
    def __init__(self, n: int = 8, max_steps: int | None = None):
        self.n = n
        self.max_steps = max_steps if max_steps is not None else 4 * n * n
        self.start = (0, 0)
        self.goal = (n - 1, n - 1)
        self.pos = self.start
        self.steps = 0
        self.done = True

    def spec(self) -> EnvSpec:
        return EnvSpec("gridgoal", self.n * self.n, 4, self.max_steps)

    def _obs(self) -> np.ndarray:
        v = np.zeros(self.n * self.n)
        v[self.pos[0] * self.n + self.pos[1]] = 1.0
        return v

    def reset(self, rng: np.random.Generator) -> np.ndarray:
        self.pos = self.start
        self.steps = 0
        self.done = False
        return self._obs()

    def step(self, action: int, rng: np.random.Generator):
        if self.done:
            raise RuntimeError("step on terminated episode")
        if not 0 <= action < 4:
            raise IndexError(f"invalid action {action}")
        dr, dc = MOVES[action]
        r, c = self.pos[0] + dr, self.pos[1] + dc
        if 0 <= r < self.n and 0 <= c < self.n:
            self.pos = (r, c)
        self.steps += 1
        reward = 0.0
        if self.pos == self.goal:
            reward = 1.0
            self.done = True
        elif self.steps >= self.max_steps:
            self.done = True
        return self._obs(), reward, self.done, {}
