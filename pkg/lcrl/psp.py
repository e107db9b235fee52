"""
Probability of satisfying the property (PSP) from an estimated model.

Visit counts give the maximum-likelihood model P(s, a, s') = psi / Psi. PSP
starts at 0 on states whose automaton part is a sink (including REJECT) and
at 1 everywhere else, and is refined by value iteration, either one
Gauss-Seidel update per learning step or as a standalone fixpoint.

End components of the estimated model are handled explicitly: one that meets
every acceptance set has PSP 1, and the states of any other one share a single
value computed from the actions that can leave it. Without this the greatest
fixpoint of the plain Bellman operator would keep non-accepting cycles at 1.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple, Union

import numpy as np
from scipy import sparse

from .automata import REJECT, Ldba, find_sinks
from .config import MAX_SWEEPS, PSP_TOL
from .errors import NonConvergence
from .logger import get_step_logger
from .oracle import ExplicitProduct, end_components, meets_all
from .product import ProductState

Pair = Tuple[ProductState, int]


@dataclass
class _Group:
    members: Tuple[ProductState, ...]
    exits: Tuple[Pair, ...]


class PspTable:
    def __init__(self, ldba: Ldba, sinks: Optional[Iterable[str]] = None):
        self.ldba = ldba
        self.sinks: FrozenSet[str] = frozenset(find_sinks(ldba) if sinks is None else sinks) | {REJECT}
        self.values: Dict[ProductState, float] = {}
        self.accepting: Set[ProductState] = set()
        self.groups: Dict[ProductState, _Group] = {}
        self.dirty: Set[ProductState] = set()

    def pinned(self, state: ProductState) -> bool:
        return state.aut in self.sinks

    def __getitem__(self, state: ProductState) -> float:
        if self.pinned(state):
            return 0.0
        return self.values.get(state, 1.0)

    def __setitem__(self, state: ProductState, value: float) -> None:
        if self.pinned(state):
            return
        if self.values.get(state, 1.0) != value:
            self.dirty.add(state)
        self.values[state] = value

    def __len__(self) -> int:
        return len(self.values)

    def take_dirty(self) -> Set[ProductState]:
        changed, self.dirty = self.dirty, set()
        return changed

    def to_records(self) -> List[Dict]:
        return [
            {"env_state": _jsonable(s.env), "aut_state": s.aut, "value": float(v)}
            for s, v in sorted(self.values.items(), key=lambda item: str(item[0]))
        ]


def _jsonable(value):
    if isinstance(value, tuple):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.integer,)):
        return int(value)
    return value


def init_psp(ldba: Ldba, sinks: Optional[Iterable[str]] = None) -> PspTable:
    return PspTable(ldba, sinks)


class ModelEstimate:
    """Maximum-likelihood view over visit counts."""

    def __init__(self, counts):
        self.counts = counts

    def visited(self, state: ProductState, action: int) -> bool:
        return self.counts.total(state, action) > 1

    def n_actions(self, state: ProductState) -> int:
        return self.counts.n_actions.get(state, 0)

    def probabilities(self, state: ProductState, action: int) -> Dict[ProductState, float]:
        total = self.counts.total(state, action)
        return {succ: n / total for succ, n in self.counts.successors(state, action).items()}

    def states(self) -> List[ProductState]:
        seen = dict.fromkeys(self.counts.n_actions)
        for (state, action), row in self.counts.psi.items():
            seen.setdefault(state)
            for succ in row:
                seen.setdefault(succ)
        return list(seen)


@dataclass
class SparseModel:
    """Matrix form of an estimated or exact product model."""

    states: List[ProductState]
    index: Dict[ProductState, int]
    row_state: np.ndarray
    row_action: List
    matrix: sparse.csr_matrix
    optimistic: np.ndarray
    pinned: np.ndarray
    acceptance: List[np.ndarray] = field(default_factory=list)

    @property
    def n_states(self) -> int:
        return len(self.states)

    @classmethod
    def from_estimate(cls, estimate: ModelEstimate, ldba: Ldba, sinks: FrozenSet[str]) -> "SparseModel":
        states = estimate.states()
        index = {s: i for i, s in enumerate(states)}
        rows, cols, vals, row_state, row_action = [], [], [], [], []
        optimistic = np.zeros(len(states), dtype=bool)
        for s in states:
            n = estimate.n_actions(s)
            if n == 0:
                optimistic[index[s]] = True
            for a in range(n):
                if not estimate.visited(s, a):
                    optimistic[index[s]] = True
                    continue
                r = len(row_state)
                for succ, p in estimate.probabilities(s, a).items():
                    rows.append(r)
                    cols.append(index[succ])
                    vals.append(p)
                row_state.append(index[s])
                row_action.append(a)
        matrix = sparse.csr_matrix((vals, (rows, cols)), shape=(len(row_state), len(states)))
        pinned = np.array([s.aut in sinks for s in states], dtype=bool)
        acceptance = [np.array([s.aut in acc for s in states], dtype=bool) for acc in ldba.acceptance]
        return cls(states, index, np.asarray(row_state, dtype=np.int64), row_action, matrix,
                   optimistic & ~pinned, pinned, acceptance)

    @classmethod
    def from_product(cls, product: ExplicitProduct, sinks: FrozenSet[str]) -> "SparseModel":
        row_action = [
            product.actions[int(s)][r - int(product.pair_offsets[int(s)])]
            for r, s in enumerate(product.row_state)
        ]
        pinned = np.array([s.aut in sinks for s in product.states], dtype=bool)
        return cls(
            product.states,
            product.index,
            product.row_state,
            row_action,
            product.matrix,
            np.zeros(product.n_states, dtype=bool),
            pinned,
            product.acceptance,
        )


@dataclass
class Collapse:
    """End-component structure used by the PSP operator."""

    accepting: np.ndarray
    class_of: np.ndarray
    kept_rows: np.ndarray
    groups: List[Tuple[FrozenSet[int], FrozenSet[int]]] = field(default_factory=list)

    @classmethod
    def identity(cls, model: SparseModel) -> "Collapse":
        return cls(
            np.zeros(model.n_states, dtype=bool),
            np.arange(model.n_states),
            np.ones(model.matrix.shape[0], dtype=bool),
        )

    @classmethod
    def of(cls, model: SparseModel) -> "Collapse":
        collapse = cls.identity(model)
        for ec in end_components(model.n_states, model.row_state, model.matrix):
            members = sorted(ec.states)
            if meets_all(ec.states, model.acceptance):
                collapse.accepting[members] = True
            else:
                collapse.class_of[members] = members[0]
                collapse.kept_rows[sorted(ec.rows)] = False
                collapse.groups.append((ec.states, ec.rows))
        collapse.accepting &= ~model.pinned
        return collapse


def bellman_sweep(model: SparseModel, values: np.ndarray, collapse: Optional[Collapse] = None) -> np.ndarray:
    """One synchronous application of the PSP operator."""
    collapse = collapse or Collapse.identity(model)
    row_values = model.matrix @ values
    kept = np.flatnonzero(collapse.kept_rows)
    best = np.full(model.n_states, -np.inf)
    np.maximum.at(best, collapse.class_of[model.row_state[kept]], row_values[kept])
    optimistic = np.flatnonzero(model.optimistic)
    np.maximum.at(best, collapse.class_of[optimistic], values[optimistic])
    updated = best[collapse.class_of]
    updated[np.isneginf(updated)] = 0.0
    updated[collapse.accepting] = 1.0
    updated[model.pinned] = 0.0
    return updated


def psp_fixed_point(
    model: Union[SparseModel, ExplicitProduct, ModelEstimate],
    ldba: Optional[Ldba] = None,
    sinks: Optional[Iterable[str]] = None,
    tol: float = PSP_TOL,
    max_sweeps: int = MAX_SWEEPS,
) -> PspTable:
    """Iterate full sweeps from the initial PSP until the sup-norm change drops below ``tol``."""
    if ldba is None:
        ldba = model.ldba
    table = PspTable(ldba, sinks)
    if isinstance(model, ExplicitProduct):
        model = SparseModel.from_product(model, table.sinks)
    elif isinstance(model, ModelEstimate):
        model = SparseModel.from_estimate(model, ldba, table.sinks)

    collapse = Collapse.of(model)
    values = np.where(model.pinned, 0.0, 1.0)
    residual = np.inf
    for _ in range(max_sweeps):
        updated = bellman_sweep(model, values, collapse)
        residual = float(np.max(np.abs(updated - values))) if values.size else 0.0
        values = updated
        if residual < tol:
            for s, v in zip(model.states, values):
                table[s] = float(v)
            table.take_dirty()
            return table
    get_step_logger().log_step("PSP_NONCONVERGENCE", f"residual {residual:.3e} after {max_sweeps} sweeps", "ERROR")
    raise NonConvergence(max_sweeps, residual)


def refresh_collapse(psp: PspTable, estimate: ModelEstimate) -> None:
    """Recompute the end components of the current estimate for in-place updates."""
    model = SparseModel.from_estimate(estimate, psp.ldba, psp.sinks)
    collapse = Collapse.of(model)
    psp.accepting = {model.states[i] for i in np.flatnonzero(collapse.accepting)}
    psp.groups = {}
    for states, rows in collapse.groups:
        members = tuple(model.states[i] for i in sorted(states))
        internal = {(model.states[model.row_state[r]], model.row_action[r]) for r in rows}
        exits = tuple(
            (m, a) for m in members for a in range(estimate.n_actions(m)) if (m, a) not in internal
        )
        group = _Group(members, exits)
        for m in members:
            psp.groups[m] = group


def avi_update(psp: PspTable, estimate: ModelEstimate, state: ProductState) -> float:
    """Gauss-Seidel update of PSP at ``state`` using the freshest neighbour values."""
    if psp.pinned(state):
        return 0.0
    if state in psp.accepting:
        psp[state] = 1.0
        return 1.0

    group = psp.groups.get(state)
    pairs = group.exits if group else tuple((state, a) for a in range(estimate.n_actions(state)))
    current = psp[state]
    best = 0.0
    for member, action in pairs:
        if not estimate.visited(member, action):
            candidate = current
        else:
            candidate = sum(p * psp[succ] for succ, p in estimate.probabilities(member, action).items())
        best = max(best, candidate)

    for member in group.members if group else (state,):
        psp[member] = best
    return best


def save_psp(psp: PspTable, path: Union[str, Path]) -> None:
    with open(path, "w") as f:
        json.dump(psp.to_records(), f, indent=4)


def fully_explored(counts, min_visits: int = 1) -> List[ProductState]:
    """States at which every available action has been tried ``min_visits`` times."""
    return [
        state
        for state, n in counts.n_actions.items()
        if n > 0 and all(counts.total(state, a) - 1 >= min_visits for a in range(n))
    ]


def psp_error(psp: PspTable, oracle_value, counts, min_visits: int = 1) -> float:
    """Largest |PSP - exact value| over fully explored states.

    ``oracle_value`` maps a product state to its exact satisfaction
    probability, e.g. ``OracleReport.value_of``.
    """
    states = fully_explored(counts, min_visits)
    if not states:
        return 0.0
    return max(abs(psp[s] - oracle_value(s)) for s in states)
