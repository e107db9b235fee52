"""
A small Pacman game as a labelled MDP.

Pacman moves first; a ghost then chases Pacman along a shortest corridor path
with probability ``pg`` and otherwise moves to a uniformly chosen legal cell.
Pacman is caught when it shares a cell with a ghost, before or after the
ghosts move. Eating both food items wins the game. Caught and won states are
absorbing.

Labels: ``g`` when caught, ``f1``/``f2`` on the step a food item is eaten,
``n`` otherwise.
"""

from collections import deque
from dataclasses import dataclass
from itertools import product as cartesian
from pathlib import Path
from typing import Dict, FrozenSet, List, NamedTuple, Optional, Tuple

import numpy as np

from ..config import DATA_DIR, DEFAULT_GHOST_CHASE
from ..errors import FormatError, UnknownName
from .base import LabeledEnv

Cell = Tuple[int, int]

PACMAN_ACTIONS = ("up", "down", "left", "right")
STAY = "stay"
MOVES = {"up": (0, -1), "down": (0, 1), "left": (-1, 0), "right": (1, 0)}


class PacmanState(NamedTuple):
    pacman: Cell
    ghosts: Tuple[Cell, ...]
    eaten: Tuple[bool, bool]
    fresh: int


@dataclass(frozen=True)
class MazeSpec:
    width: int
    height: int
    walls: FrozenSet[Cell]
    start: Cell
    foods: Tuple[Cell, Cell]
    ghosts: Tuple[Cell, ...]
    pg: float = DEFAULT_GHOST_CHASE
    name: str = "maze"

    def is_free(self, cell: Cell) -> bool:
        x, y = cell
        return 0 <= x < self.width and 0 <= y < self.height and cell not in self.walls

    def corridor_cells(self) -> List[Cell]:
        return [(x, y) for y in range(self.height) for x in range(self.width) if (x, y) not in self.walls]


def load_maze(text: str) -> MazeSpec:
    """Whitespace separated tokens ``# . F1 F2 P G`` per row, plus ``key: value`` headers."""
    headers: Dict[str, Tuple[int, str]] = {}
    rows: List[Tuple[int, List[str]]] = []
    for line_no, raw in enumerate(text.splitlines(), 1):
        line = raw.split(";", 1)[0].strip()
        if not line:
            continue
        if ":" in line:
            key, _, value = line.partition(":")
            if key.strip() not in ("name", "pg"):
                raise FormatError(line_no, f"unknown key {key.strip()!r}")
            headers[key.strip()] = (line_no, value.strip())
            continue
        tokens = line.split()
        for token in tokens:
            if token not in ("#", ".", "F1", "F2", "P", "G"):
                raise FormatError(line_no, f"unknown maze token {token!r}")
        rows.append((line_no, tokens))

    if not rows:
        raise FormatError(0, "no maze rows")
    width = len(rows[0][1])
    walls, foods, ghosts, starts = set(), {}, [], []
    for y, (line_no, tokens) in enumerate(rows):
        if len(tokens) != width:
            raise FormatError(line_no, f"row has {len(tokens)} cells, expected {width}")
        for x, token in enumerate(tokens):
            if token == "#":
                walls.add((x, y))
            elif token in ("F1", "F2"):
                if token in foods:
                    raise FormatError(line_no, f"duplicate {token}")
                foods[token] = (x, y)
            elif token == "G":
                ghosts.append((x, y))
            elif token == "P":
                starts.append((x, y))

    last = rows[-1][0]
    if len(starts) != 1:
        raise FormatError(last, f"expected exactly one P, found {len(starts)}")
    if set(foods) != {"F1", "F2"}:
        raise FormatError(last, "the maze needs both F1 and F2")
    if not ghosts:
        raise FormatError(last, "the maze needs at least one G")

    pg = DEFAULT_GHOST_CHASE
    if "pg" in headers:
        try:
            pg = float(headers["pg"][1])
        except ValueError as err:
            raise FormatError(headers["pg"][0], f"bad pg {headers['pg'][1]!r}") from err
        if not 0.0 <= pg <= 1.0:
            raise FormatError(headers["pg"][0], f"pg {pg} outside [0, 1]")

    return MazeSpec(
        width=width,
        height=len(rows),
        walls=frozenset(walls),
        start=starts[0],
        foods=(foods["F1"], foods["F2"]),
        ghosts=tuple(ghosts),
        pg=pg,
        name=headers["name"][1] if "name" in headers else "maze",
    )


class PacmanGame(LabeledEnv):
    alphabet = ("f1", "f2", "g", "n")
    exclusive = (frozenset(alphabet),)

    def __init__(self, spec: MazeSpec):
        self.spec = spec
        self.name = spec.name
        self._distances: Dict[Cell, Dict[Cell, int]] = {}

    def reset(self) -> PacmanState:
        return PacmanState(self.spec.start, self.spec.ghosts, (False, False), 0)

    def is_caught(self, state: PacmanState) -> bool:
        return state.pacman in state.ghosts

    def is_won(self, state: PacmanState) -> bool:
        return all(state.eaten) and not self.is_caught(state)

    def is_terminal(self, state: PacmanState) -> bool:
        return self.is_caught(state) or all(state.eaten)

    def legal_moves(self, cell: Cell) -> Tuple[str, ...]:
        return tuple(
            a for a in PACMAN_ACTIONS if self.spec.is_free((cell[0] + MOVES[a][0], cell[1] + MOVES[a][1]))
        )

    def actions(self, state: PacmanState) -> Tuple[str, ...]:
        if self.is_terminal(state):
            return (STAY,)
        return self.legal_moves(state.pacman) or (STAY,)

    def labels(self, state: PacmanState) -> FrozenSet[str]:
        if self.is_caught(state):
            return frozenset({"g"})
        if state.fresh:
            return frozenset({f"f{state.fresh}"})
        return frozenset({"n"})

    def distances_to(self, target: Cell) -> Dict[Cell, int]:
        """Corridor distance from every cell to ``target``."""
        if target not in self._distances:
            dist = {target: 0}
            queue = deque([target])
            while queue:
                cell = queue.popleft()
                for dx, dy in MOVES.values():
                    nxt = (cell[0] + dx, cell[1] + dy)
                    if self.spec.is_free(nxt) and nxt not in dist:
                        dist[nxt] = dist[cell] + 1
                        queue.append(nxt)
            self._distances[target] = dist
        return self._distances[target]

    def chase_move(self, ghost: Cell, pacman: Cell) -> Cell:
        """First cell of a shortest path towards Pacman; ties go up, down, left, right."""
        dist = self.distances_to(pacman)
        best, best_dist = ghost, dist.get(ghost, np.inf)
        for action in self.legal_moves(ghost):
            nxt = (ghost[0] + MOVES[action][0], ghost[1] + MOVES[action][1])
            if dist.get(nxt, np.inf) < best_dist:
                best, best_dist = nxt, dist[nxt]
        return best

    def ghost_distribution(self, ghost: Cell, pacman: Cell) -> Dict[Cell, float]:
        moves = self.legal_moves(ghost)
        if not moves:
            return {ghost: 1.0}
        distribution = {self.chase_move(ghost, pacman): self.spec.pg}
        share = (1.0 - self.spec.pg) / len(moves)
        for action in moves:
            nxt = (ghost[0] + MOVES[action][0], ghost[1] + MOVES[action][1])
            distribution[nxt] = distribution.get(nxt, 0.0) + share
        return distribution

    def _pacman_phase(self, state: PacmanState, action: str) -> PacmanState:
        if self.is_terminal(state):
            return state._replace(fresh=0)
        if action == STAY:
            pacman = state.pacman
        else:
            pacman = (state.pacman[0] + MOVES[action][0], state.pacman[1] + MOVES[action][1])
        if pacman in state.ghosts:
            return PacmanState(pacman, state.ghosts, state.eaten, 0)
        eaten, fresh = list(state.eaten), 0
        for j, food in enumerate(self.spec.foods):
            if pacman == food and not eaten[j]:
                eaten[j] = True
                fresh = j + 1
        return PacmanState(pacman, state.ghosts, tuple(eaten), fresh)

    def _after_ghosts(self, moved: PacmanState, ghosts: Tuple[Cell, ...]) -> PacmanState:
        fresh = 0 if moved.pacman in ghosts else moved.fresh
        return PacmanState(moved.pacman, ghosts, moved.eaten, fresh)

    def transition_distribution(self, state: PacmanState, action: str) -> Dict[PacmanState, float]:
        moved = self._pacman_phase(state, action)
        if self.is_terminal(moved):
            return {moved: 1.0}
        per_ghost = [self.ghost_distribution(g, moved.pacman) for g in moved.ghosts]
        distribution: Dict[PacmanState, float] = {}
        for combo in cartesian(*(list(d.items()) for d in per_ghost)):
            ghosts = tuple(cell for cell, _ in combo)
            prob = float(np.prod([p for _, p in combo]))
            succ = self._after_ghosts(moved, ghosts)
            distribution[succ] = distribution.get(succ, 0.0) + prob
        return distribution

    def sample(self, state: PacmanState, action: str, rng: np.random.Generator) -> PacmanState:
        moved = self._pacman_phase(state, action)
        if self.is_terminal(moved):
            return moved
        ghosts = []
        for ghost in moved.ghosts:
            moves = self.legal_moves(ghost)
            if not moves:
                ghosts.append(ghost)
            elif rng.random() < self.spec.pg:
                ghosts.append(self.chase_move(ghost, moved.pacman))
            else:
                action = moves[rng.integers(len(moves))]
                ghosts.append((ghost[0] + MOVES[action][0], ghost[1] + MOVES[action][1]))
        return self._after_ghosts(moved, tuple(ghosts))

    def state_space_bound(self) -> int:
        corridors = len(self.spec.corridor_cells())
        return corridors ** (1 + len(self.spec.ghosts)) * 4 * 3


def pacman_fixture(name: str = "small", data_dir: Optional[Path] = None) -> PacmanGame:
    folder = Path(data_dir or DATA_DIR) / "pacman"
    path = folder / f"{name}.maze"
    if not path.exists():
        raise UnknownName(name, [p.stem for p in folder.glob("*.maze")])
    return PacmanGame(load_maze(path.read_text()))
