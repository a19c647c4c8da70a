"""Two-agent bomberman board: grid, bombs, flames, power-ups, and the full
per-step resolution order.

Board layout and dynamics:
  - n-by-n grid of {passage, rigid, wood}; default 8x8.
  - Bombs explode 10 steps after placement; flames last 2 steps; flames
    destroy wood (revealing a passage or a power-up) and kill agents.
  - A bomb standing in a flame detonates the same step (chain reactions run
    to a fixpoint).
  - Episode ends when an agent dies or at the step cap (default 800).

Per-step phase order (normative for this implementation; trace tests assert
against it):
  1. flame tick: lifetimes decrement, expired flames vanish
  2. bomb placement for agents choosing the bomb action
  3. movement resolution, including bomb kicks; same-cell and swap
     conflicts bounce both agents back
  4. kicked/moving bombs slide one cell until obstructed
  5. bomb tick (newly placed bombs skip this step's tick) and explosions,
     chained to a fixpoint; flames spawn with lifetime 2; wood burns and
     reveals its hidden power-up if any
  6. deaths: agents standing in any flame die; each death records the
     owner of the killing bomb
  7. power-up pickup
  8. step counter advances; terminal check

So a bomb placed during step t detonates during step t+10; its flames are
visible after steps t+10 and t+11 and gone after step t+12.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PASSAGE, RIGID, WOOD = 0, 1, 2
CELL_CHARS = {PASSAGE: ".", RIGID: "#", WOOD: "+"}
CHAR_CELLS = {v: k for k, v in CELL_CHARS.items()}

NO_POWERUP, EXTRA_BOMB, BLAST_RADIUS, KICK = 0, 1, 2, 3
POWERUP_NAMES = {EXTRA_BOMB: "extra-bomb", BLAST_RADIUS: "blast-radius", KICK: "kick"}

STAY, UP, DOWN, LEFT, RIGHT, BOMB = 0, 1, 2, 3, 4, 5
N_ACTIONS = 6
MOVE_DELTAS = {UP: (-1, 0), DOWN: (1, 0), LEFT: (0, -1), RIGHT: (0, 1)}

BOMB_TIMER = 10
FLAME_LIFETIME = 2
DEFAULT_STEP_CAP = 800
DEFAULT_AMMO = 1
DEFAULT_BLAST_RADIUS = 2

RESULT_WIN, RESULT_LOSS, RESULT_TIE = "win", "loss", "tie"
CAUSE_ENEMY_KILLED, CAUSE_OUR_SUICIDE = "enemy-killed-by-our-bomb", "our-suicide"
CAUSE_OPPONENT_SUICIDE, CAUSE_TIMEOUT = "opponent-suicide", "timeout"
CAUSE_KILLED_BY_ENEMY = "killed-by-enemy"


@dataclass
class Bomb:
    row: int
    col: int
    owner: int
    timer: int
    radius: int
    direction: tuple[int, int] | None = None  # set while sliding from a kick
    just_placed: bool = False


@dataclass
class Flame:
    row: int
    col: int
    life: int
    owners: set[int] = field(default_factory=set)


@dataclass
class AgentState:
    row: int
    col: int
    alive: bool = True
    ammo: int = DEFAULT_AMMO
    blast_radius: int = DEFAULT_BLAST_RADIUS
    can_kick: bool = False

    @property
    def pos(self) -> tuple[int, int]:
        return (self.row, self.col)


@dataclass
class EpisodeOutcome:
    result: str  # win / loss / tie, from the learner's (agent 0) view
    cause: str


class BomberBoard:
    """Full mutable board state for one episode."""

    def __init__(self, n: int = 8, step_cap: int = DEFAULT_STEP_CAP):
        self.n = n
        self.step_cap = step_cap
        self.grid = np.zeros((n, n), dtype=np.int8)
        self.hidden_powerup = np.zeros((n, n), dtype=np.int8)  # under wood
        self.visible_powerup = np.zeros((n, n), dtype=np.int8)
        self.bombs: list[Bomb] = []
        self.flames: list[Flame] = []
        self.agents = [AgentState(0, 0), AgentState(n - 1, n - 1)]
        self.step_count = 0
        self.done = False
        self.killers: list[int | None] = [None, None]  # bomb owner per death

    # -- helpers ----------------------------------------------------------

    def in_bounds(self, r: int, c: int) -> bool:
        return 0 <= r < self.n and 0 <= c < self.n

    def bomb_at(self, r: int, c: int) -> Bomb | None:
        for b in self.bombs:
            if b.row == r and b.col == c:
                return b
        return None

    def flame_at(self, r: int, c: int) -> Flame | None:
        for f in self.flames:
            if f.row == r and f.col == c:
                return f
        return None

    def agent_at(self, r: int, c: int, exclude: int | None = None) -> int | None:
        for i, a in enumerate(self.agents):
            if i != exclude and a.alive and a.row == r and a.col == c:
                return i
        return None

    def blast_cells(self, row: int, col: int, radius: int) -> list[tuple[int, int]]:
        """Cross of cells a bomb at (row, col) covers: rays stop before
        rigid walls and stop on (and include) the first wood cell."""
        cells = [(row, col)]
        for dr, dc in MOVE_DELTAS.values():
            for k in range(1, radius + 1):
                r, c = row + dr * k, col + dc * k
                if not self.in_bounds(r, c) or self.grid[r, c] == RIGID:
                    break
                cells.append((r, c))
                if self.grid[r, c] == WOOD:
                    break
        return cells

    # -- one simulation step ----------------------------------------------

    def step(self, actions: tuple[int, int]) -> None:
        """Advance the board one step given both agents' actions
        (index 0 is the learner)."""
        if self.done:
            raise RuntimeError("step on terminated episode")
        for a in actions:
            if not 0 <= a < N_ACTIONS:
                raise IndexError(f"invalid action {a}")

        # 1. flame tick
        for f in self.flames:
            f.life -= 1
        self.flames = [f for f in self.flames if f.life > 0]

        # 2. bomb placement
        for i, action in enumerate(actions):
            agent = self.agents[i]
            if (action == BOMB and agent.alive and agent.ammo > 0
                    and self.bomb_at(agent.row, agent.col) is None):
                self.bombs.append(Bomb(agent.row, agent.col, i, BOMB_TIMER,
                                       agent.blast_radius, just_placed=True))
                agent.ammo -= 1

        # 3. movement
        self._resolve_movement(actions)

        # 4. bombs kicked earlier keep sliding
        self._slide_bombs()

        # 5. tick + explosions
        flame_owner_map = self._tick_and_explode()

        # 6. deaths
        for i, agent in enumerate(self.agents):
            if agent.alive and self.flame_at(agent.row, agent.col) is not None:
                agent.alive = False
                self.killers[i] = self._pick_killer(i, flame_owner_map)

        # 7. power-up pickup
        for agent in self.agents:
            if agent.alive and self.visible_powerup[agent.row, agent.col]:
                kind = self.visible_powerup[agent.row, agent.col]
                if kind == EXTRA_BOMB:
                    agent.ammo += 1
                elif kind == BLAST_RADIUS:
                    agent.blast_radius += 1
                elif kind == KICK:
                    agent.can_kick = True
                self.visible_powerup[agent.row, agent.col] = NO_POWERUP

        # 8. bookkeeping
        for b in self.bombs:
            b.just_placed = False
        self.step_count += 1
        if (not all(a.alive for a in self.agents)) or self.step_count >= self.step_cap:
            self.done = True

    def _resolve_movement(self, actions: tuple[int, int]) -> None:
        origins = [a.pos for a in self.agents]
        targets = list(origins)
        kicks: list[tuple[int, Bomb, tuple[int, int]] | None] = [None, None]
        for i, action in enumerate(actions):
            agent = self.agents[i]
            if not agent.alive or action not in MOVE_DELTAS:
                continue
            dr, dc = MOVE_DELTAS[action]
            r, c = agent.row + dr, agent.col + dc
            if not self.in_bounds(r, c) or self.grid[r, c] != PASSAGE:
                continue
            bomb = self.bomb_at(r, c)
            if bomb is not None:
                # Kick: push the bomb one cell ahead if that cell is free.
                br, bc = r + dr, c + dc
                if (agent.can_kick and self.in_bounds(br, bc)
                        and self.grid[br, bc] == PASSAGE
                        and self.bomb_at(br, bc) is None
                        and self.agent_at(br, bc) is None):
                    kicks[i] = (i, bomb, (dr, dc))
                    targets[i] = (r, c)
                continue
            targets[i] = (r, c)
        # Conflicts between the two agents: same target, or position swap.
        if targets[0] == targets[1] and targets[0] != origins[0]:
            targets = list(origins)
            kicks = [None, None]
        elif targets[0] == origins[1] and targets[1] == origins[0]:
            targets = list(origins)
            kicks = [None, None]
        else:
            for i in (0, 1):
                other = 1 - i
                if (targets[i] == origins[other] and targets[other] == origins[other]
                        and self.agents[other].alive):
                    targets[i] = origins[i]
                    kicks[i] = None
        for i in (0, 1):
            if kicks[i] is not None:
                _, bomb, (dr, dc) = kicks[i]
                bomb.row += dr
                bomb.col += dc
                bomb.direction = (dr, dc)
                bomb.just_kicked = True
            self.agents[i].row, self.agents[i].col = targets[i]

    def _slide_bombs(self) -> None:
        for b in self.bombs:
            if b.direction is None:
                continue
            if getattr(b, "just_kicked", False):
                b.just_kicked = False  # already moved this step via the kick
                continue
            dr, dc = b.direction
            r, c = b.row + dr, b.col + dc
            if (self.in_bounds(r, c) and self.grid[r, c] == PASSAGE
                    and self.bomb_at(r, c) is None and self.agent_at(r, c) is None):
                b.row, b.col = r, c
            else:
                b.direction = None

    def _tick_and_explode(self) -> dict[tuple[int, int], set[int]]:
        """Decrement timers, detonate expired bombs plus any bomb caught in
        flames, chained to a fixpoint. Returns cell -> owners of bombs whose
        blast covered it this step."""
        for b in self.bombs:
            if not b.just_placed:
                b.timer -= 1
        exploding = [b for b in self.bombs if b.timer <= 0]
        flame_cells = {(f.row, f.col) for f in self.flames}
        # Chain closure: bombs on flame cells (old or new) explode too.
        changed = True
        new_flame_cells: dict[tuple[int, int], set[int]] = {}
        detonated: set[int] = {id(b) for b in exploding}
        queue = list(exploding)
        while queue or changed:
            changed = False
            while queue:
                b = queue.pop()
                for cell in self.blast_cells(b.row, b.col, b.radius):
                    new_flame_cells.setdefault(cell, set()).add(b.owner)
            for b in self.bombs:
                if id(b) in detonated:
                    continue
                if (b.row, b.col) in flame_cells or (b.row, b.col) in new_flame_cells:
                    detonated.add(id(b))
                    queue.append(b)
                    changed = True
        if detonated:
            # ammo returns to the owner when a bomb goes off
            for b in self.bombs:
                if id(b) in detonated:
                    self.agents[b.owner].ammo += 1
            self.bombs = [b for b in self.bombs if id(b) not in detonated]
        for (r, c), owners in new_flame_cells.items():
            # Flames wipe power-ups that were already visible, then burn wood
            # and reveal whatever was hidden under it.
            if self.grid[r, c] == WOOD:
                self.grid[r, c] = PASSAGE
                if self.hidden_powerup[r, c]:
                    self.visible_powerup[r, c] = self.hidden_powerup[r, c]
                    self.hidden_powerup[r, c] = NO_POWERUP
            elif self.visible_powerup[r, c]:
                self.visible_powerup[r, c] = NO_POWERUP
            existing = self.flame_at(r, c)
            if existing is not None:
                existing.life = FLAME_LIFETIME
                existing.owners |= owners
            else:
                self.flames.append(Flame(r, c, FLAME_LIFETIME, set(owners)))
        return new_flame_cells

    def _pick_killer(self, agent_id: int, flame_owner_map) -> int:
        """Owner of the bomb that killed agent_id; on simultaneous coverage
        by both owners' flames, the agent's own bomb wins the attribution
        (suicide takes precedence)."""
        pos = self.agents[agent_id].pos
        owners: set[int] = set(flame_owner_map.get(pos, set()))
        f = self.flame_at(*pos)
        if f is not None:
            owners |= f.owners
        if agent_id in owners:
            return agent_id
        if owners:
            return min(owners)
        return 1 - agent_id  # walked into an unattributed flame (cannot happen)

    # -- terminal bookkeeping ---------------------------------------------

    def terminal_reward(self) -> float:
        """Learner's terminal reward: +1 for a win, -1 for loss and tie."""
        outcome = classify_outcome(self)
        return 1.0 if outcome.result == RESULT_WIN else -1.0


def classify_outcome(board: BomberBoard) -> EpisodeOutcome:
    """Attribute the episode outcome from the learner's perspective using
    bomb ownership of each death."""
    if not board.done:
        raise RuntimeError("outcome of a non-terminal episode")
    us, them = board.agents
    if us.alive and them.alive:
        return EpisodeOutcome(RESULT_TIE, CAUSE_TIMEOUT)
    if not us.alive:
        # Simultaneous deaths resolve as a loss; our own bomb killing us is
        # a suicide regardless of what happened to the opponent.
        if board.killers[0] == 0:
            return EpisodeOutcome(RESULT_LOSS, CAUSE_OUR_SUICIDE)
        return EpisodeOutcome(RESULT_LOSS, CAUSE_KILLED_BY_ENEMY)
    if board.killers[1] == 1:
        return EpisodeOutcome(RESULT_WIN, CAUSE_OPPONENT_SUICIDE)
    return EpisodeOutcome(RESULT_WIN, CAUSE_ENEMY_KILLED)


# -- board generation -----------------------------------------------------

CORNERS = lambda n: [(0, 0), (0, n - 1), (n - 1, 0), (n - 1, n - 1)]


def generate_board(rng: np.random.Generator, n: int = 8,
                   rigid_density: float = 0.15, wood_density: float = 0.25,
                   powerup_prob: float = 0.5, step_cap: int = DEFAULT_STEP_CAP,
                   max_retries: int = 50) -> BomberBoard:
    """Random board with agents on two random distinct corners and a
    guaranteed non-rigid path between them.

    All four corners and their orthogonal neighbors stay clear so either
    corner pair is playable. If random generation fails connectivity
    max_retries times, an L-shaped corridor is carved between the agents.
    """
    corners = CORNERS(n)
    idx = rng.choice(4, size=2, replace=False)
    spawn = [corners[idx[0]], corners[idx[1]]]
    clear: set[tuple[int, int]] = set()
    for cr, cc in corners:
        clear.add((cr, cc))
        for dr, dc in MOVE_DELTAS.values():
            r, c = cr + dr, cc + dc
            if 0 <= r < n and 0 <= c < n:
                clear.add((r, c))

    board = None
    for attempt in range(max_retries + 1):
        b = BomberBoard(n, step_cap=step_cap)
        for r in range(n):
            for c in range(n):
                if (r, c) in clear:
                    continue
                u = rng.random()
                if u < rigid_density:
                    b.grid[r, c] = RIGID
                elif u < rigid_density + wood_density:
                    b.grid[r, c] = WOOD
        if _connected(b.grid, spawn[0], spawn[1]):
            board = b
            break
        if attempt == max_retries:
            _carve_corridor(b.grid, spawn[0], spawn[1])
            board = b
    for r in range(n):
        for c in range(n):
            if board.grid[r, c] == WOOD and rng.random() < powerup_prob:
                board.hidden_powerup[r, c] = rng.integers(EXTRA_BOMB, KICK + 1)
    board.agents = [AgentState(*spawn[0]), AgentState(*spawn[1])]
    return board


def _connected(grid: np.ndarray, a: tuple[int, int], b: tuple[int, int]) -> bool:
    """BFS over non-rigid cells."""
    n = grid.shape[0]
    seen = {a}
    stack = [a]
    while stack:
        r, c = stack.pop()
        if (r, c) == b:
            return True
        for dr, dc in MOVE_DELTAS.values():
            nr, nc = r + dr, c + dc
            if 0 <= nr < n and 0 <= nc < n and (nr, nc) not in seen and grid[nr, nc] != RIGID:
                seen.add((nr, nc))
                stack.append((nr, nc))
    return False


def _carve_corridor(grid: np.ndarray, a: tuple[int, int], b: tuple[int, int]) -> None:
    r, c = a
    while c != b[1]:
        c += 1 if b[1] > c else -1
        grid[r, c] = PASSAGE
    while r != b[0]:
        r += 1 if b[0] > r else -1
        grid[r, c] = PASSAGE


# -- text serialization ---------------------------------------------------


def board_to_text(board: BomberBoard) -> str:
    """Human-readable full state: one char per cell plus an entity list."""
    lines = [f"minibomber v1 n={board.n} step={board.step_count} cap={board.step_cap}"]
    for r in range(board.n):
        lines.append("".join(CELL_CHARS[int(board.grid[r, c])] for c in range(board.n)))
    for i, a in enumerate(board.agents):
        lines.append(f"agent {i} {a.row} {a.col} alive={int(a.alive)} "
                     f"ammo={a.ammo} radius={a.blast_radius} kick={int(a.can_kick)}")
    for b in sorted(board.bombs, key=lambda b: (b.row, b.col)):
        d = f"{b.direction[0]},{b.direction[1]}" if b.direction else "-"
        lines.append(f"bomb {b.row} {b.col} owner={b.owner} timer={b.timer} "
                     f"radius={b.radius} dir={d}")
    for f in sorted(board.flames, key=lambda f: (f.row, f.col)):
        owners = ",".join(str(o) for o in sorted(f.owners))
        lines.append(f"flame {f.row} {f.col} life={f.life} owners={owners}")
    for r in range(board.n):
        for c in range(board.n):
            if board.visible_powerup[r, c]:
                lines.append(f"powerup {r} {c} kind={int(board.visible_powerup[r, c])}")
    for r in range(board.n):
        for c in range(board.n):
            if board.hidden_powerup[r, c]:
                lines.append(f"hidden {r} {c} kind={int(board.hidden_powerup[r, c])}")
    lines.append("end")
    return "\n".join(lines) + "\n"


def board_from_text(text: str) -> BomberBoard:
    lines = text.strip().splitlines()
    head = dict(kv.split("=") for kv in lines[0].split()[2:])
    n = int(head["n"])
    board = BomberBoard(n, step_cap=int(head["cap"]))
    board.step_count = int(head["step"])
    for r in range(n):
        for c, ch in enumerate(lines[1 + r]):
            board.grid[r, c] = CHAR_CELLS[ch]
    board.agents = []
    for line in lines[1 + n:]:
        parts = line.split()
        if parts[0] == "agent":
            kv = dict(p.split("=") for p in parts[4:])
            a = AgentState(int(parts[2]), int(parts[3]), alive=bool(int(kv["alive"])),
                           ammo=int(kv["ammo"]), blast_radius=int(kv["radius"]),
                           can_kick=bool(int(kv["kick"])))
            board.agents.append(a)
        elif parts[0] == "bomb":
            kv = dict(p.split("=") for p in parts[3:])
            direction = None
            if kv["dir"] != "-":
                dr, dc = kv["dir"].split(",")
                direction = (int(dr), int(dc))
            board.bombs.append(Bomb(int(parts[1]), int(parts[2]), int(kv["owner"]),
                                    int(kv["timer"]), int(kv["radius"]), direction))
        elif parts[0] == "flame":
            kv = dict(p.split("=") for p in parts[3:])
            owners = {int(o) for o in kv["owners"].split(",") if o}
            board.flames.append(Flame(int(parts[1]), int(parts[2]), int(kv["life"]), owners))
        elif parts[0] == "powerup":
            kv = dict(p.split("=") for p in parts[3:])
            board.visible_powerup[int(parts[1]), int(parts[2])] = int(kv["kind"])
        elif parts[0] == "hidden":
            kv = dict(p.split("=") for p in parts[3:])
            board.hidden_powerup[int(parts[1]), int(parts[2])] = int(kv["kind"])
    if not all(a.alive for a in board.agents) or board.step_count >= board.step_cap:
        board.done = True
    return board
