"""Uniform episodic-environment contract shared by all simulators.

An environment owns its mutable episode state and is single-threaded:
one instance per worker. All randomness flows through the injected numpy
Generator, so a fixed seed gives bit-identical episodes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class EnvSpec:
    name: str
    obs_dim: int
    n_actions: int
    max_steps: int

    def __post_init__(self):
        if self.n_actions < 2:
            raise ValueError("need at least 2 actions")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")


class Environment:
    """reset -> observe/act/reward/terminal loop.

    Subclasses implement spec(), reset(rng) -> obs and
    step(action, rng) -> (obs, reward, terminal, info).
    """

    def spec(self) -> EnvSpec:
        raise NotImplementedError

    def reset(self, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def step(self, action: int, rng: np.random.Generator):
        raise NotImplementedError
