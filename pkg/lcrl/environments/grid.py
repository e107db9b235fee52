"""
Slippery grid worlds.

Coordinates are ``(x, y)`` with ``x`` growing to the right and ``y`` growing
downwards, so row 0 is the first grid line of a fixture file. An action moves
to the intended cell with probability ``slip`` and otherwise to a uniformly
chosen cell of the von Neumann neighbourhood (the four neighbours plus the
cell itself, cut at the boundary and at blocked cells). Moves into a wall or
off the grid leave the agent where it is.
"""

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, FrozenSet, List, Optional, Tuple

import numpy as np

from ..config import DATA_DIR, DEFAULT_SLIP
from ..errors import ConfigError, FormatError, UnknownName
from .base import LabeledEnv

Cell = Tuple[int, int]

GRID_ACTIONS = ("left", "right", "up", "down", "stay")
MOVES = {"left": (-1, 0), "right": (1, 0), "up": (0, -1), "down": (0, 1), "stay": (0, 0)}
LABEL_CHARS = frozenset("isuptABCn")
BLOCKED = "#"


@dataclass(frozen=True)
class GridSpec:
    width: int
    height: int
    cells: Tuple[str, ...]
    start: Cell
    slip: float = DEFAULT_SLIP
    absorbing: FrozenSet[str] = frozenset()
    action_overrides: Dict[Cell, Tuple[str, ...]] = field(default_factory=dict)
    name: str = "grid"

    def label_at(self, cell: Cell) -> str:
        x, y = cell
        return self.cells[y][x]

    def is_free(self, cell: Cell) -> bool:
        x, y = cell
        return 0 <= x < self.width and 0 <= y < self.height and self.cells[y][x] != BLOCKED

    def to_text(self) -> str:
        lines = [f"name: {self.name}", f"slip: {self.slip}"]
        if self.absorbing:
            lines.append(f"absorbing: {' '.join(sorted(self.absorbing))}")
        lines.append(f"start: {self.start[0]},{self.start[1]}")
        for (x, y), acts in sorted(self.action_overrides.items()):
            lines.append(f"actions: {x},{y} = {' '.join(acts)}")
        lines.extend(self.cells)
        return "\n".join(lines) + "\n"


class GridWorld(LabeledEnv):
    def __init__(self, spec: GridSpec):
        self.spec = spec
        self.name = spec.name
        chars = {c for row in spec.cells for c in row if c != BLOCKED}
        self.alphabet = tuple(sorted(chars))
        self._neighbourhoods: Dict[Cell, Tuple[Cell, ...]] = {}

    def reset(self) -> Cell:
        return self.spec.start

    def actions(self, state: Cell) -> Tuple[str, ...]:
        return self.spec.action_overrides.get(state, GRID_ACTIONS)

    def labels(self, state: Cell) -> FrozenSet[str]:
        return frozenset({self.spec.label_at(state)})

    def is_absorbing(self, state: Cell) -> bool:
        return self.spec.label_at(state) in self.spec.absorbing

    def intended(self, state: Cell, action: str) -> Cell:
        dx, dy = MOVES[action]
        target = (state[0] + dx, state[1] + dy)
        return target if self.spec.is_free(target) else state

    def neighbourhood(self, state: Cell) -> Tuple[Cell, ...]:
        if state not in self._neighbourhoods:
            x, y = state
            cells = [(x, y)] + [(x + dx, y + dy) for dx, dy in (MOVES[a] for a in ("left", "right", "up", "down"))]
            self._neighbourhoods[state] = tuple(c for c in cells if self.spec.is_free(c))
        return self._neighbourhoods[state]

    def transition_distribution(self, state: Cell, action: str) -> Dict[Cell, float]:
        if action == "stay" and self.is_absorbing(state):
            return {state: 1.0}
        cells = self.neighbourhood(state)
        share = (1.0 - self.spec.slip) / len(cells)
        distribution = {cell: share for cell in cells}
        target = self.intended(state, action)
        distribution[target] = distribution.get(target, 0.0) + self.spec.slip
        return distribution

    def sample(self, state: Cell, action: str, rng: np.random.Generator) -> Cell:
        if action == "stay" and self.is_absorbing(state):
            return state
        if rng.random() < self.spec.slip:
            return self.intended(state, action)
        cells = self.neighbourhood(state)
        return cells[rng.integers(len(cells))]

    def state_space_bound(self) -> int:
        return self.spec.width * self.spec.height


_HEADER_RE = re.compile(r"^(\w+)\s*:\s*(.*)$")
_CELL_RE = re.compile(r"^\s*(\d+)\s*,\s*(\d+)\s*$")


def _parse_cell(line_no: int, text: str) -> Cell:
    match = _CELL_RE.match(text)
    if not match:
        raise FormatError(line_no, f"expected 'x,y', got {text!r}")
    return int(match.group(1)), int(match.group(2))


def load_grid(text: str) -> GridSpec:
    """Parse a grid fixture: ``key: value`` headers followed by the grid rows."""
    headers: Dict[str, Tuple[int, str]] = {}
    overrides: Dict[Cell, Tuple[str, ...]] = {}
    rows: List[Tuple[int, str]] = []
    for line_no, raw in enumerate(text.splitlines(), 1):
        line = raw.split(";", 1)[0].rstrip()
        if not line.strip():
            continue
        match = _HEADER_RE.match(line.strip())
        if match:
            key, value = match.group(1), match.group(2).strip()
            if key == "actions":
                cell_text, _, names = value.partition("=")
                acts = tuple(names.split())
                for act in acts:
                    if act not in MOVES:
                        raise FormatError(line_no, f"unknown action {act!r}")
                if not acts:
                    raise FormatError(line_no, "empty action list")
                overrides[_parse_cell(line_no, cell_text)] = acts
            elif key in ("name", "slip", "absorbing", "start"):
                headers[key] = (line_no, value)
            else:
                raise FormatError(line_no, f"unknown key {key!r}")
            continue
        row = line.strip()
        for ch in row:
            if ch not in LABEL_CHARS and ch != BLOCKED:
                raise FormatError(line_no, f"unknown cell label {ch!r}")
        rows.append((line_no, row))

    if not rows:
        raise FormatError(0, "no grid rows")
    width = len(rows[0][1])
    for line_no, row in rows:
        if len(row) != width:
            raise FormatError(line_no, f"row has width {len(row)}, expected {width}")
    cells = tuple(row for _, row in rows)

    try:
        slip = float(headers["slip"][1]) if "slip" in headers else DEFAULT_SLIP
    except ValueError as err:
        raise FormatError(headers["slip"][0], f"bad slip {headers['slip'][1]!r}") from err
    if not 0.0 <= slip <= 1.0:
        raise FormatError(headers["slip"][0], f"slip {slip} outside [0, 1]")

    if "start" in headers:
        start = _parse_cell(*headers["start"])
    else:
        found = [(x, y) for y, row in enumerate(cells) for x, ch in enumerate(row) if ch == "i"]
        if not found:
            raise FormatError(rows[-1][0], "no start: line and no 'i' cell")
        start = found[0]

    spec = GridSpec(
        width=width,
        height=len(cells),
        cells=cells,
        start=start,
        slip=slip,
        absorbing=frozenset(headers["absorbing"][1].split()) if "absorbing" in headers else frozenset(),
        action_overrides=overrides,
        name=headers["name"][1] if "name" in headers else "grid",
    )
    if not spec.is_free(start):
        raise FormatError(headers.get("start", (0, ""))[0], f"start {start} is not a free cell")
    for cell in overrides:
        if not spec.is_free(cell):
            raise FormatError(0, f"action override for non-free cell {cell}")
    return spec


def render_layout(text: str, size: int) -> GridSpec:
    """Scale a rectangle layout to a ``size`` x ``size`` grid.

    Layout files list ``rect: label x0,y0 x1,y1`` in fractions of the grid
    side; a cell takes the label of the last rectangle containing its centre.
    """
    headers: Dict[str, Tuple[int, str]] = {}
    rects = []
    for line_no, raw in enumerate(text.splitlines(), 1):
        line = raw.split(";", 1)[0].strip()
        if not line:
            continue
        match = _HEADER_RE.match(line)
        if not match:
            raise FormatError(line_no, f"expected 'key: value', got {line!r}")
        key, value = match.group(1), match.group(2).strip()
        if key == "rect":
            parts = value.split()
            if len(parts) != 3 or parts[0] not in LABEL_CHARS | {BLOCKED}:
                raise FormatError(line_no, f"expected 'label x0,y0 x1,y1', got {value!r}")
            try:
                x0, y0 = (float(v) for v in parts[1].split(","))
                x1, y1 = (float(v) for v in parts[2].split(","))
            except ValueError as err:
                raise FormatError(line_no, f"bad rectangle {value!r}") from err
            rects.append((parts[0], x0, y0, x1, y1))
        else:
            headers[key] = (line_no, value)

    fill = headers.get("fill", (0, "n"))[1]
    grid = np.full((size, size), fill, dtype="<U1")
    centres = (np.arange(size) + 0.5) / size
    for label, x0, y0, x1, y1 in rects:
        rows = (centres >= y0) & (centres < y1)
        cols = (centres >= x0) & (centres < x1)
        grid[np.ix_(rows, cols)] = label

    fx, fy = (float(v) for v in headers["start"][1].split(","))
    start = (min(int(fx * size), size - 1), min(int(fy * size), size - 1))
    grid[start[1], start[0]] = "i"

    lines = [f"name: {headers.get('name', (0, 'layout'))[1]}_{size}"]
    for key in ("slip", "absorbing"):
        if key in headers:
            lines.append(f"{key}: {headers[key][1]}")
    lines.append(f"start: {start[0]},{start[1]}")
    lines.extend("".join(row) for row in grid)
    return load_grid("\n".join(lines))


def _fixture_text(relative: str, data_dir: Optional[Path] = None) -> str:
    return (Path(data_dir or DATA_DIR) / relative).read_text()


def region3_fixture(data_dir: Optional[Path] = None) -> GridWorld:
    """The 3x3 slippery region with a trap row and restricted actions."""
    return GridWorld(load_grid(_fixture_text("grids/region3.grid", data_dir)))


def five_by_five_fixture(data_dir: Optional[Path] = None) -> GridWorld:
    return GridWorld(load_grid(_fixture_text("grids/five_by_five.grid", data_dir)))


REGION_LAYOUTS = ("region1", "region2")


def region_fixture(name: str, size: int, data_dir: Optional[Path] = None) -> GridWorld:
    """One of the large slippery regions, scaled to ``size`` in [10, 40]."""
    if name not in REGION_LAYOUTS:
        raise UnknownName(name, REGION_LAYOUTS)
    if not 10 <= size <= 40:
        raise ConfigError("size", f"region size {size} outside [10, 40]")
    return GridWorld(render_layout(_fixture_text(f"grids/{name}.layout", data_dir), size))
