"""Scripted opponents for the bomberman board.

static_opponent always stays put. rulebased_opponent runs a fixed priority
list each step:
  1. move off any cell a live bomb's blast (or a lingering flame) will
     cover, onto a safe neighbor
  2. place a bomb when an enemy or wood sits inside the current blast
     radius and a safe retreat cell exists
  3. walk the Dijkstra-shortest path to the nearest visible power-up, else
     toward the nearest reachable wood or the enemy
  4. stay put
Candidate ties are broken by fixed action order (up, down, left, right),
then by the injected rng among equally good moves.
"""

from __future__ import annotations

import heapq

import numpy as np

from .board import (
    BOMB, DOWN, LEFT, MOVE_DELTAS, PASSAGE, RIGHT, STAY, UP, WOOD,
    BomberBoard,
)

ACTION_ORDER = (UP, DOWN, LEFT, RIGHT)


def static_opponent(board: BomberBoard, agent_id: int = 1) -> int:
    return STAY


def danger_map(board: BomberBoard) -> dict[tuple[int, int], int]:
    """Cell -> steps until that cell is covered by flames.

    0 means flames will be (or stay) on the cell next step. Chain
    detonations are not anticipated; each bomb is assessed at its own
    timer. Deliberately conservative: every cell inside any live bomb's
    blast cross counts as dangerous.
    """
    danger: dict[tuple[int, int], int] = {}
    for b in board.bombs:
        for cell in board.blast_cells(b.row, b.col, b.radius):
            danger[cell] = min(danger.get(cell, 10 ** 9), b.timer)
    for f in board.flames:
        if f.life >= 2:  # still burning after the next flame tick
            danger[(f.row, f.col)] = 0
    return danger


def _traversable(board: BomberBoard, r: int, c: int) -> bool:
    return (board.in_bounds(r, c) and board.grid[r, c] == PASSAGE
            and board.bomb_at(r, c) is None)


def dijkstra(board: BomberBoard, start: tuple[int, int],
             blocked: set[tuple[int, int]] | None = None) -> dict[tuple[int, int], int]:
    """Shortest path lengths from start over traversable cells (unit edge
    cost). `blocked` cells are not entered."""
    blocked = blocked or set()
    dist = {start: 0}
    heap = [(0, start)]
    while heap:
        d, (r, c) = heapq.heappop(heap)
        if d > dist.get((r, c), 10 ** 9):
            continue
        for dr, dc in MOVE_DELTAS.values():
            nr, nc = r + dr, c + dc
            if not _traversable(board, nr, nc) or (nr, nc) in blocked:
                continue
            nd = d + 1
            if nd < dist.get((nr, nc), 10 ** 9):
                dist[(nr, nc)] = nd
                heapq.heappush(heap, (nd, (nr, nc)))
    return dist


def _safe_neighbors(board: BomberBoard, agent_id: int,
                    danger: dict[tuple[int, int], int]) -> list[int]:
    me = board.agents[agent_id]
    out = []
    for action in ACTION_ORDER:
        dr, dc = MOVE_DELTAS[action]
        r, c = me.row + dr, me.col + dc
        if (_traversable(board, r, c) and (r, c) not in danger
                and board.agent_at(r, c, exclude=agent_id) is None
                and board.flame_at(r, c) is None):
            out.append(action)
    return out


def _escape_route(board: BomberBoard, agent_id: int,
                  danger: dict[tuple[int, int], int]) -> list[int]:
    """First moves of shortest paths to the nearest danger-free cell.

    BFS over traversable cells; cells whose flames arrive within the next
    step are never entered. Empty when no danger-free cell is reachable.
    """
    me = board.agents[agent_id]
    start = me.pos
    dist = {start: 0}
    parent_action: dict[tuple[int, int], list[int]] = {}
    frontier = [start]
    best_d = None
    goals = []
    while frontier:
        nxt = []
        for pos in frontier:
            d = dist[pos]
            if best_d is not None and d >= best_d:
                continue
            for action in ACTION_ORDER:
                dr, dc = MOVE_DELTAS[action]
                cell = (pos[0] + dr, pos[1] + dc)
                if not _traversable(board, cell[0], cell[1]):
                    continue
                if board.agent_at(cell[0], cell[1], exclude=agent_id) is not None:
                    continue
                if danger.get(cell, 10 ** 9) <= d + 1:  # flames beat us there
                    continue
                if board.flame_at(cell[0], cell[1]) is not None:
                    continue
                if cell not in dist:
                    dist[cell] = d + 1
                    first = action if pos == start else parent_action[pos][0]
                    parent_action[cell] = [first]
                    nxt.append(cell)
                elif dist[cell] == d + 1:
                    first = action if pos == start else parent_action[pos][0]
                    if first not in parent_action[cell]:
                        parent_action[cell].append(first)
                if cell not in danger and dist[cell] == d + 1:
                    if best_d is None or dist[cell] < best_d:
                        best_d = dist[cell]
                        goals = [cell]
                    elif dist[cell] == best_d and cell not in goals:
                        goals.append(cell)
        frontier = nxt
    moves: list[int] = []
    for g in goals:
        for a in parent_action.get(g, []):
            if a not in moves:
                moves.append(a)
    return moves


def _has_retreat_after_bombing(board: BomberBoard, agent_id: int,
                               danger: dict[tuple[int, int], int]) -> bool:
    """Would a bomb dropped here still leave a reachable safe cell?"""
    me = board.agents[agent_id]
    with_mine = dict(danger)
    for cell in board.blast_cells(me.row, me.col, me.blast_radius):
        with_mine[cell] = min(with_mine.get(cell, 10 ** 9), 10)
    return bool(_escape_route(board, agent_id, with_mine))


def _bomb_worth_placing(board: BomberBoard, agent_id: int) -> bool:
    me = board.agents[agent_id]
    if me.ammo <= 0 or board.bomb_at(me.row, me.col) is not None:
        return False
    for (r, c) in board.blast_cells(me.row, me.col, me.blast_radius):
        if board.grid[r, c] == WOOD:
            return True
        other = board.agent_at(r, c, exclude=agent_id)
        if other is not None:
            return True
    return False


def rulebased_opponent(board: BomberBoard, agent_id: int = 1,
                       rng: np.random.Generator | None = None) -> int:
    me = board.agents[agent_id]
    if not me.alive:
        return STAY
    rng = rng or np.random.default_rng(0)
    danger = danger_map(board)

    # (1) escape danger
    if me.pos in danger:
        route = _escape_route(board, agent_id, danger)
        if route:
            return int(rng.choice(route))
        # No path to safety: step toward the latest-detonating neighbor.
        best, best_t = STAY, danger[me.pos]
        for action in ACTION_ORDER:
            dr, dc = MOVE_DELTAS[action]
            r, c = me.row + dr, me.col + dc
            if (_traversable(board, r, c) and board.flame_at(r, c) is None
                    and board.agent_at(r, c, exclude=agent_id) is None
                    and danger.get((r, c), 10 ** 9) > best_t):
                best, best_t = action, danger.get((r, c), 10 ** 9)
        return best

    # (2) drop a bomb when something is in range and a retreat exists
    if _bomb_worth_placing(board, agent_id):
        if _has_retreat_after_bombing(board, agent_id, danger):
            return BOMB

    # (3) walk toward the nearest power-up, else wood/enemy
    dist = dijkstra(board, me.pos, blocked=set(danger))
    target = _nearest_target(board, agent_id, dist)
    if target is not None:
        goal_d = dist[target]
        candidates = []
        for action in ACTION_ORDER:
            dr, dc = MOVE_DELTAS[action]
            cell = (me.row + dr, me.col + dc)
            if cell in dist and dist[cell] == 1:
                d_back = dijkstra(board, cell, blocked=set(danger)).get(target, 10 ** 9)
                if d_back == goal_d - 1:
                    candidates.append(action)
        if candidates:
            return int(rng.choice(candidates))

    # (4) nothing to do
    return STAY


def _nearest_target(board: BomberBoard, agent_id: int,
                    dist: dict[tuple[int, int], int]) -> tuple[int, int] | None:
    """Nearest reachable visible power-up; failing that, nearest cell
    adjacent to wood or to the enemy."""
    powerups = [(d, cell) for cell, d in dist.items()
                if d > 0 and board.visible_powerup[cell] ]
    if powerups:
        return min(powerups)[1]
    approach = []
    foe = board.agents[1 - agent_id]
    for cell, d in dist.items():
        if d == 0:
            continue
        r, c = cell
        for dr, dc in MOVE_DELTAS.values():
            nr, nc = r + dr, c + dc
            if not board.in_bounds(nr, nc):
                continue
            if board.grid[nr, nc] == WOOD or (foe.alive and (nr, nc) == foe.pos):
                approach.append((d, cell))
                break
    if approach:
        return min(approach)[1]
    return None
