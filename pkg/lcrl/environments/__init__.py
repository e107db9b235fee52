from .base import LabeledEnv, sample_from
from .explicit import ExplicitMdp, TabularEnv, explicit_mdp, random_mdp
from .grid import (
    GRID_ACTIONS,
    GridSpec,
    GridWorld,
    five_by_five_fixture,
    load_grid,
    region3_fixture,
    region_fixture,
    render_layout,
)
from .pacman import MazeSpec, PacmanGame, PacmanState, load_maze, pacman_fixture

__all__ = [
    "LabeledEnv",
    "sample_from",
    "ExplicitMdp",
    "explicit_mdp",
    "TabularEnv",
    "random_mdp",
    "GRID_ACTIONS",
    "GridSpec",
    "GridWorld",
    "five_by_five_fixture",
    "load_grid",
    "region3_fixture",
    "region_fixture",
    "render_layout",
    "MazeSpec",
    "PacmanGame",
    "PacmanState",
    "load_maze",
    "pacman_fixture",
]
