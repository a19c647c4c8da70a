"""PoleBalance: classical cart-pole dynamics with explicit Euler updates.

Two actions push the cart left or right with a fixed force. Reward is +1
for every surviving step; the episode ends when the pole angle or cart
position leaves its bounds or the step cap is reached.
"""

from __future__ import annotations

import numpy as np

from .base import Environment, EnvSpec

GRAVITY = 9.8
CART_MASS = 1.0
POLE_MASS = 0.1
POLE_HALF_LENGTH = 0.5
FORCE = 10.0
TAU = 0.02  # Euler integration step, seconds
ANGLE_LIMIT = 12.0 * np.pi / 180.0
POSITION_LIMIT = 2.4


class PoleBalance(Environment):
    def __init__(self, max_steps: int = 200):
        self.max_steps = max_steps
        self.state = np.zeros(4)  # x, x_dot, theta, theta_dot
        self.steps = 0
        self.done = True

    def spec(self) -> EnvSpec:
        return EnvSpec("polebalance", 4, 2, self.max_steps)

    def reset(self, rng: np.random.Generator) -> np.ndarray:
        self.state = rng.uniform(-0.05, 0.05, size=4)
        self.steps = 0
        self.done = False
        return self.state.copy()

    def step(self, action: int, rng: np.random.Generator):
        if self.done:
            raise RuntimeError("step on terminated episode")
        if action not in (0, 1):
            raise IndexError(f"invalid action {action}")
        x, x_dot, theta, theta_dot = self.state
        force = FORCE if action == 1 else -FORCE
        total_mass = CART_MASS + POLE_MASS
        pole_ml = POLE_MASS * POLE_HALF_LENGTH
        cos_t, sin_t = np.cos(theta), np.sin(theta)
        temp = (force + pole_ml * theta_dot ** 2 * sin_t) / total_mass
        theta_acc = (GRAVITY * sin_t - cos_t * temp) / (
            POLE_HALF_LENGTH * (4.0 / 3.0 - POLE_MASS * cos_t ** 2 / total_mass))
        x_acc = temp - pole_ml * theta_acc * cos_t / total_mass
        self.state = np.array([
            x + TAU * x_dot,
            x_dot + TAU * x_acc,
            theta + TAU * theta_dot,
            theta_dot + TAU * theta_acc,
        ])
        self.steps += 1
        out_of_bounds = (abs(self.state[0]) > POSITION_LIMIT
                         or abs(self.state[2]) > ANGLE_LIMIT)
        self.done = out_of_bounds or self.steps >= self.max_steps
        return self.state.copy(), 1.0, self.done, {}
