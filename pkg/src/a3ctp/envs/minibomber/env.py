"""Episodic environment wrapper around the bomberman board: the learner
controls agent 0, the configured opponent controls agent 1.

Rewards are terminal-only: +1 for a win, -1 for a loss or a timeout tie.
The terminal info dict carries the classified outcome and, when replay
recording is on, the full action log.
"""

from __future__ import annotations

import numpy as np

from ..base import Environment, EnvSpec
from .board import (
    DEFAULT_STEP_CAP, N_ACTIONS, BomberBoard, classify_outcome, generate_board,
)
from .obs import encode_observation, obs_dim
from .opponents import rulebased_opponent, static_opponent

OPPONENTS = ("static", "rulebased")


class MiniBomber(Environment):
    def __init__(self, n: int = 8, opponent: str = "static",
                 step_cap: int = DEFAULT_STEP_CAP, record_actions: bool = False):
        if opponent not in OPPONENTS:
            raise ValueError(f"unknown opponent {opponent!r}")
        self.n = n
        self.opponent = opponent
        self.step_cap = step_cap
        self.record_actions = record_actions
        self.board: BomberBoard | None = None
        self.reset_seed: int | None = None
        self.action_log: list[tuple[int, int]] = []

    def spec(self) -> EnvSpec:
        return EnvSpec(f"minibomber-{self.opponent}", obs_dim(self.n),
                       N_ACTIONS, self.step_cap)

    def reset(self, rng: np.random.Generator) -> np.ndarray:
        # A fresh child seed per episode makes each board reconstructible
        # from (seed, action log) alone.
        self.reset_seed = int(rng.integers(0, 2 ** 63 - 1))
        self.board = self._board_from_seed(self.reset_seed)
        self.action_log = []
        return encode_observation(self.board, 0)

    def _board_from_seed(self, seed: int) -> BomberBoard:
        return generate_board(np.random.default_rng(seed), n=self.n,
                              step_cap=self.step_cap)

    def _opponent_action(self, rng: np.random.Generator) -> int:
        if self.opponent == "static":
            return static_opponent(self.board, 1)
        return rulebased_opponent(self.board, 1, rng)

    def step(self, action: int, rng: np.random.Generator):
        if self.board is None or self.board.done:
            raise RuntimeError("step on terminated episode")
        opp = self._opponent_action(rng)
        self.board.step((int(action), opp))
        if self.record_actions:
            self.action_log.append((int(action), opp))
        obs = encode_observation(self.board, 0)
        if self.board.done:
            outcome = classify_outcome(self.board)
            reward = self.board.terminal_reward()
            info = {"outcome": outcome}
            if self.record_actions:
                info["replay"] = (self.reset_seed, list(self.action_log))
            return obs, reward, True, info
        return obs, 0.0, False, {}
