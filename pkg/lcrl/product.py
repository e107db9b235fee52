"""
On-the-fly product of a labelled environment with an LDBA.

A product state pairs an environment state with an automaton state. Taking
an environment action moves the environment and then lets the automaton read
the label of the state just entered. An epsilon action ``Epsilon(q)`` moves
only the automaton. Product states whose automaton part is REJECT have the
single action IDLE, a self-loop.
"""

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Hashable, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from .automata import REJECT, Ldba, accepting_frontier
from .config import DEFAULT_GAMMA, DEFAULT_MU, DEFAULT_RP
from .environments.base import LabeledEnv
from .errors import ConfigError, InvalidAction

IDLE = "idle"


class ProductState(NamedTuple):
    env: Hashable
    aut: str

    def __str__(self) -> str:
        return f"({self.env}, {self.aut})"


@dataclass(frozen=True)
class Epsilon:
    """Epsilon action jumping the automaton to ``target``."""

    target: str

    def __str__(self) -> str:
        return f"eps:{self.target}"


Action = Union[str, Epsilon]


def parse_action(name: str) -> Action:
    if name.startswith("eps:"):
        return Epsilon(name[len("eps:"):])
    return name


@dataclass(frozen=True)
class RewardParams:
    r_p: float = DEFAULT_RP
    gamma: float = DEFAULT_GAMMA
    mu: float = DEFAULT_MU
    r_n: float = 0.0

    def __post_init__(self):
        if not self.r_p > 0:
            raise ConfigError("rp", f"must be positive, got {self.r_p}")
        if self.r_n != 0.0:
            raise ConfigError("rn", f"must be 0, got {self.r_n}")
        if not 0.0 <= self.gamma < 1.0:
            raise ConfigError("gamma", f"must lie in [0, 1), got {self.gamma}")
        if not 0.0 < self.mu <= 1.0:
            raise ConfigError("mu", f"must lie in (0, 1], got {self.mu}")


def initial_state(env: LabeledEnv, ldba: Ldba) -> ProductState:
    return ProductState(env.reset(), ldba.initial)


def initial_frontier(ldba: Ldba) -> FrozenSet[str]:
    return ldba.accepting_union


def available_actions(state: ProductState, env: LabeledEnv, ldba: Ldba) -> Tuple[Action, ...]:
    """Environment actions first, in the environment's order, then epsilon moves."""
    if state.aut == REJECT:
        return (IDLE,)
    return tuple(env.actions(state.env)) + tuple(Epsilon(q) for q in ldba.epsilon_successors(state.aut))


def product_step(
    state: ProductState,
    action: Action,
    env: LabeledEnv,
    ldba: Ldba,
    rng: np.random.Generator,
) -> ProductState:
    if state.aut == REJECT:
        if action != IDLE:
            raise InvalidAction(state, action)
        return state
    if isinstance(action, Epsilon):
        if action.target not in ldba.epsilon_successors(state.aut):
            raise InvalidAction(state, action)
        return ProductState(state.env, action.target)

    next_env = env.step(state.env, action, rng)
    next_aut = ldba.step(state.aut, ldba.project(env.labels(next_env)))
    return ProductState(next_env, next_aut)


def reward_and_update(
    next_state: ProductState,
    frontier: FrozenSet[str],
    params: RewardParams,
    ldba: Ldba,
    action: Optional[Action] = None,
) -> Tuple[float, FrozenSet[str]]:
    """Reward for entering ``next_state`` and the updated accepting frontier.

    The reward is ``r_p`` exactly when the automaton state is still in the
    frontier; the frontier then drops the visited acceptance sets. An
    epsilon move reads no label, so it earns ``r_n`` and leaves the frontier
    alone; the accepting state pays on the next environment step instead.
    """
    if isinstance(action, Epsilon):
        return params.r_n, frontier
    if next_state.aut == REJECT or next_state.aut not in frontier:
        return params.r_n, frontier
    return params.r_p, accepting_frontier(next_state.aut, frontier, ldba)


@dataclass
class Policy:
    """Memoryless policy; a tuple of several actions means uniform mixing."""

    choices: Dict[Hashable, Tuple[Action, ...]] = field(default_factory=dict)

    def choose(self, state: ProductState, available: Sequence[Action]) -> Tuple[Action, ...]:
        picked = self.choices.get(state)
        if state.aut == REJECT or not picked:
            return tuple(available[:1])
        for action in picked:
            if action not in available:
                raise InvalidAction(state, action)
        return picked

    def act(self, state: ProductState, available: Sequence[Action], rng: np.random.Generator) -> Action:
        picked = self.choose(state, available)
        if len(picked) == 1:
            return picked[0]
        return picked[rng.integers(len(picked))]

    def to_dict(self) -> Dict[str, List[str]]:
        return {str(state): [str(a) for a in acts] for state, acts in self.choices.items()}
