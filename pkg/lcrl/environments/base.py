"""
Common interface of labelled MDP simulators.

Environments are black boxes to the learner: it may reset, step with a seeded
numpy Generator and read labels. The exact transition law is exposed
separately through ``transition_distribution`` for the model-checking side.
"""

from abc import ABC, abstractmethod
from typing import Dict, FrozenSet, Hashable, List, Tuple

import numpy as np

from ..errors import InvalidAction, NotEnumerable, TooLarge

State = Hashable


class LabeledEnv(ABC):
    name: str = "env"
    alphabet: Tuple[str, ...] = ()
    exclusive: Tuple[FrozenSet[str], ...] = ()

    @abstractmethod
    def reset(self) -> State:
        """The initial state."""

    @abstractmethod
    def actions(self, state: State) -> Tuple[str, ...]:
        """Available actions, in the fixed order used for tie-breaking."""

    @abstractmethod
    def labels(self, state: State) -> FrozenSet[str]:
        """Atomic propositions true in ``state``."""

    @abstractmethod
    def transition_distribution(self, state: State, action: str) -> Dict[State, float]:
        """Exact successor law of ``action`` in ``state``."""

    @abstractmethod
    def sample(self, state: State, action: str, rng: np.random.Generator) -> State:
        """Draw one successor; must follow ``transition_distribution``."""

    def step(self, state: State, action: str, rng: np.random.Generator) -> State:
        if action not in self.actions(state):
            raise InvalidAction(state, action)
        return self.sample(state, action, rng)

    def state_space_bound(self) -> int:
        """Cheap upper bound on the number of reachable states."""
        raise NotEnumerable(f"{self.name} does not declare a finite state space")

    def reachable_states(self, limit: int) -> List[State]:
        """Breadth-first enumeration from the initial state, in discovery order."""
        start = self.reset()
        order = [start]
        seen = {start}
        cursor = 0
        while cursor < len(order):
            state = order[cursor]
            cursor += 1
            for action in self.actions(state):
                for succ in self.transition_distribution(state, action):
                    if succ not in seen:
                        seen.add(succ)
                        order.append(succ)
                        if len(order) > limit:
                            raise TooLarge(len(order), limit)
        return order

    def is_terminal(self, state: State) -> bool:
        return False


def sample_from(distribution: Dict[State, float], rng: np.random.Generator) -> State:
    """Draw from a finite distribution given as {outcome: probability}."""
    outcomes = list(distribution)
    probs = np.fromiter(distribution.values(), dtype=float, count=len(outcomes))
    return outcomes[rng.choice(len(outcomes), p=probs / probs.sum())]
