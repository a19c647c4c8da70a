"""Replay files: an episode is fully determined by the board seed and the
two agents' action streams, so re-simulation is bit-exact.

File format (text):
    minibomber-replay v1
    n <board size>
    cap <step cap>
    seed <board seed>
    <learner action> <opponent action>     (one line per step)
    end
"""

from __future__ import annotations

import numpy as np

from .board import BomberBoard, generate_board


def save_replay(path, n: int, step_cap: int, seed: int,
                actions: list[tuple[int, int]]) -> None:
    lines = ["minibomber-replay v1", f"n {n}", f"cap {step_cap}", f"seed {seed}"]
    lines += [f"{a} {b}" for a, b in actions]
    lines.append("end")
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def load_replay(path) -> tuple[int, int, int, list[tuple[int, int]]]:
    with open(path) as f:
        lines = f.read().strip().splitlines()
    if lines[0] != "minibomber-replay v1":
        raise ValueError("not a replay file")
    n = int(lines[1].split()[1])
    cap = int(lines[2].split()[1])
    seed = int(lines[3].split()[1])
    actions = []
    for line in lines[4:]:
        if line == "end":
            break
        a, b = line.split()
        actions.append((int(a), int(b)))
    return n, cap, seed, actions


def replay_board(n: int, step_cap: int, seed: int,
                 actions: list[tuple[int, int]]) -> BomberBoard:
    """Re-simulate a recorded episode and return the final board."""
    board = generate_board(np.random.default_rng(seed), n=n, step_cap=step_cap)
    for pair in actions:
        board.step(pair)
    return board
