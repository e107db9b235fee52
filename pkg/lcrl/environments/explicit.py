"""
Exhaustive enumeration of a finite environment into a sparse MDP.

Rows of the transition matrix are state-action pairs; the pairs of state ``i``
occupy rows ``pair_offsets[i]`` to ``pair_offsets[i + 1] - 1`` in the order of
``env.actions``.
"""

from dataclasses import dataclass
from typing import Dict, FrozenSet, Hashable, List, Tuple

import numpy as np
from scipy import sparse

from ..config import MAX_ENUMERATED_STATES
from ..errors import ConfigError, TooLarge
from .base import LabeledEnv, sample_from


@dataclass
class ExplicitMdp:
    states: List[Hashable]
    index: Dict[Hashable, int]
    actions: List[Tuple[str, ...]]
    pair_offsets: np.ndarray
    matrix: sparse.csr_matrix
    labels: List[FrozenSet[str]]
    initial: int
    name: str = "mdp"

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def n_pairs(self) -> int:
        return int(self.pair_offsets[-1])

    def row(self, state: int, action: str) -> int:
        return int(self.pair_offsets[state]) + self.actions[state].index(action)

    def distribution(self, state: int, action: str) -> Dict[Hashable, float]:
        row = self.matrix.getrow(self.row(state, action))
        return {self.states[j]: float(p) for j, p in zip(row.indices, row.data)}


def explicit_mdp(env: LabeledEnv, limit: int = MAX_ENUMERATED_STATES) -> ExplicitMdp:
    """Enumerate every state reachable from ``env.reset()``.

    Raises NotEnumerable for environments without a finite state space and
    TooLarge when the estimated or enumerated size exceeds ``limit``, and
    ConfigError when a transition row does not sum to one.
    """
    bound = env.state_space_bound()
    if bound > limit:
        raise TooLarge(bound, limit)

    states = env.reachable_states(limit)
    index = {s: i for i, s in enumerate(states)}

    rows, cols, data = [], [], []
    actions: List[Tuple[str, ...]] = []
    offsets = [0]
    for s in states:
        acts = tuple(env.actions(s))
        actions.append(acts)
        for k, a in enumerate(acts):
            row = offsets[-1] + k
            for succ, prob in env.transition_distribution(s, a).items():
                if prob > 0.0:
                    rows.append(row)
                    cols.append(index[succ])
                    data.append(prob)
        offsets.append(offsets[-1] + len(acts))

    matrix = sparse.csr_matrix(
        (np.asarray(data, dtype=float), (np.asarray(rows), np.asarray(cols))),
        shape=(offsets[-1], len(states)),
    )
    sums = np.asarray(matrix.sum(axis=1)).ravel()
    bad = np.flatnonzero(~np.isclose(sums, 1.0))
    if bad.size:
        state = int(np.searchsorted(offsets, bad[0], side="right")) - 1
        action = actions[state][bad[0] - offsets[state]]
        raise ConfigError("transitions", f"{states[state]!r}/{action} sums to {sums[bad[0]]:.6g}, expected 1")

    return ExplicitMdp(
        states=states,
        index=index,
        actions=actions,
        pair_offsets=np.asarray(offsets, dtype=np.int64),
        matrix=matrix,
        labels=[frozenset(env.labels(s)) for s in states],
        initial=index[env.reset()],
        name=env.name,
    )


class TabularEnv(LabeledEnv):
    """An environment given by explicit tables, e.g. a randomly drawn test MDP."""

    def __init__(
        self,
        transitions: Dict[Hashable, Dict[str, Dict[Hashable, float]]],
        labels: Dict[Hashable, FrozenSet[str]],
        initial: Hashable,
        alphabet: Tuple[str, ...] = (),
        name: str = "tabular",
    ):
        self.transitions = transitions
        self._labels = labels
        self.initial = initial
        self.alphabet = tuple(alphabet)
        self.name = name

    def reset(self):
        return self.initial

    def actions(self, state) -> Tuple[str, ...]:
        return tuple(self.transitions[state])

    def labels(self, state) -> FrozenSet[str]:
        return self._labels[state]

    def transition_distribution(self, state, action: str) -> Dict[Hashable, float]:
        return dict(self.transitions[state][action])

    def sample(self, state, action: str, rng: np.random.Generator):
        return sample_from(self.transitions[state][action], rng)

    def state_space_bound(self) -> int:
        return len(self.transitions)


def random_mdp(
    n_states: int,
    n_actions: int,
    alphabet: Tuple[str, ...],
    seed=None,
    branching: int = 2,
    exclusive: bool = True,
) -> TabularEnv:
    """A random labelled MDP with integer states ``0..n_states-1``.

    Each action moves to ``branching`` distinct successors with Dirichlet
    weights. With ``exclusive`` every state carries at most one atom.
    """
    rng = np.random.default_rng(seed)
    names = [f"a{k}" for k in range(n_actions)]
    transitions: Dict[Hashable, Dict[str, Dict[Hashable, float]]] = {}
    labels: Dict[Hashable, FrozenSet[str]] = {}
    for s in range(n_states):
        transitions[s] = {}
        for a in names:
            succs = rng.choice(n_states, size=min(branching, n_states), replace=False)
            weights = rng.dirichlet(np.ones(len(succs)))
            transitions[s][a] = {int(t): float(w) for t, w in zip(succs, weights)}
        if exclusive:
            pick = rng.integers(len(alphabet) + 1)
            labels[s] = frozenset() if pick == len(alphabet) else frozenset({alphabet[pick]})
        else:
            labels[s] = frozenset(a for a in alphabet if rng.random() < 0.5)
    return TabularEnv(transitions, labels, 0, alphabet, name=f"random_{n_states}x{n_actions}")
