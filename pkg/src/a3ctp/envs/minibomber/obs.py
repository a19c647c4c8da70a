"""22-channel feature-map encoding of a bomberman board, from one agent's
perspective, flattened to a single float vector.

Channel layout (each channel is an n-by-n plane; see docs/formats.md):
   0  passage cells              (binary)
   1  rigid cells                (binary)
   2  wood cells                 (binary)
   3  visible extra-bomb power-ups   (binary)
   4  visible blast-radius power-ups (binary)
   5  visible kick power-ups         (binary)
   6  bomb presence              (binary)
   7  bomb blast radius / 10     (at bomb cells)
   8  bomb remaining life / 10   (at bomb cells)
   9  flame presence             (binary)
  10  flame remaining life / 2   (at flame cells)
  11  own position               (binary, exactly one cell when alive)
  12  opponent position          (binary)
  13  own ammo / 5               (constant plane)
  14  own blast radius / 10      (constant plane)
  15  own can-kick               (constant 0/1 plane)
  16  opponent ammo / 5          (constant plane)
  17  opponent blast radius / 10 (constant plane)
  18  opponent can-kick          (constant 0/1 plane)
  19  step fraction step/cap     (constant plane)
  20  all ones                   (bias plane)
  21  all zeros                  (bias plane)

Hidden power-ups (still under wood) and bomb slide directions are
deliberately not encoded.
"""

from __future__ import annotations

import numpy as np

from .board import PASSAGE, RIGID, WOOD, EXTRA_BOMB, BLAST_RADIUS, KICK, BomberBoard

N_CHANNELS = 22
AMMO_SCALE = 5.0
RADIUS_SCALE = 10.0
BOMB_LIFE_SCALE = 10.0
FLAME_LIFE_SCALE = 2.0


def encode_observation(board: BomberBoard, perspective: int = 0) -> np.ndarray:
    """Flattened (22 * n * n,) float64 feature stack."""
    n = board.n
    ch = np.zeros((N_CHANNELS, n, n))
    ch[0] = board.grid == PASSAGE
    ch[1] = board.grid == RIGID
    ch[2] = board.grid == WOOD
    ch[3] = board.visible_powerup == EXTRA_BOMB
    ch[4] = board.visible_powerup == BLAST_RADIUS
    ch[5] = board.visible_powerup == KICK
    for b in board.bombs:
        ch[6, b.row, b.col] = 1.0
        ch[7, b.row, b.col] = b.radius / RADIUS_SCALE
        ch[8, b.row, b.col] = b.timer / BOMB_LIFE_SCALE
    for f in board.flames:
        ch[9, f.row, f.col] = 1.0
        ch[10, f.row, f.col] = f.life / FLAME_LIFE_SCALE
    me = board.agents[perspective]
    foe = board.agents[1 - perspective]
    if me.alive:
        ch[11, me.row, me.col] = 1.0
    if foe.alive:
        ch[12, foe.row, foe.col] = 1.0
    ch[13] = me.ammo / AMMO_SCALE
    ch[14] = me.blast_radius / RADIUS_SCALE
    ch[15] = 1.0 if me.can_kick else 0.0
    ch[16] = foe.ammo / AMMO_SCALE
    ch[17] = foe.blast_radius / RADIUS_SCALE
    ch[18] = 1.0 if foe.can_kick else 0.0
    ch[19] = board.step_count / board.step_cap
    ch[20] = 1.0
    # ch[21] stays zero
    return ch.reshape(-1)


def obs_dim(n: int) -> int:
    return N_CHANNELS * n * n
