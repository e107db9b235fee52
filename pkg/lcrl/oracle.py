"""
Exact satisfaction probabilities on the full product of an enumerable MDP and
an LDBA.

The maximal probability of satisfying the property equals the maximal
probability of reaching an accepting maximal end component (AMEC): an end
component that meets every acceptance set. AMECs are found by iterative SCC
refinement, reachability is solved by value iteration from zero, and the
resulting memoryless policy is checked on its induced Markov chain.
"""

from dataclasses import dataclass
from typing import Dict, FrozenSet, Hashable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from scipy import sparse
from scipy.sparse.linalg import spsolve

from .automata import REJECT, Ldba
from .config import MAX_PRODUCT_STATES, MAX_SWEEPS, ORACLE_TOL
from .environments.explicit import ExplicitMdp
from .errors import InvalidAction, NonConvergence, TooLarge
from .logger import get_step_logger
from .product import IDLE, Action, Epsilon, Policy, ProductState

REJECT_STATE = ProductState(None, REJECT)


@dataclass
class ExplicitProduct:
    states: List[ProductState]
    index: Dict[ProductState, int]
    actions: List[Tuple[Action, ...]]
    pair_offsets: np.ndarray
    row_state: np.ndarray
    matrix: sparse.csr_matrix
    initial: int
    acceptance: List[np.ndarray]
    ldba: Ldba
    name: str = "product"

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def product_states(self) -> int:
        """Number of (s, q) pairs, leaving out the shared rejecting state."""
        return len(self.states) - 1

    def row(self, state: int, action: Action) -> int:
        try:
            return int(self.pair_offsets[state]) + self.actions[state].index(action)
        except ValueError as err:
            raise InvalidAction(self.states[state], action) from err


@dataclass(frozen=True)
class EndComponent:
    states: FrozenSet[int]
    rows: FrozenSet[int]


@dataclass
class MecDecomposition:
    components: List[EndComponent]

    def __len__(self) -> int:
        return len(self.components)


@dataclass
class ChainReport:
    recurrent_classes: List[FrozenSet[int]]
    accepting_classes: List[FrozenSet[int]]
    transient: FrozenSet[int]
    probability: float
    closeness: int

    def to_dict(self) -> Dict:
        return {
            "recurrent_classes": [sorted(c) for c in self.recurrent_classes],
            "accepting_classes": [sorted(c) for c in self.accepting_classes],
            "transient": len(self.transient),
            "probability": self.probability,
            "closeness": self.closeness,
        }


def build_product(mdp: ExplicitMdp, ldba: Ldba, limit: int = MAX_PRODUCT_STATES) -> ExplicitProduct:
    """Cross every MDP state with every automaton state, plus one rejecting state."""
    size = mdp.n_states * len(ldba.states)
    if size > limit:
        raise TooLarge(size, limit, "product")

    aut_index = {q: k for k, q in enumerate(ldba.states)}
    n_aut = len(ldba.states)
    reject = size
    states = [ProductState(s, q) for s in mdp.states for q in ldba.states] + [REJECT_STATE]
    index = {p: i for i, p in enumerate(states)}

    letters = [ldba.project(labels) for labels in mdp.labels]
    next_aut = {
        (q, j): aut_index.get(ldba.step(q, letters[j]), -1)
        for q in ldba.states
        for j in range(mdp.n_states)
    }

    indptr, indices, data = mdp.matrix.indptr, mdp.matrix.indices, mdp.matrix.data
    rows, cols, vals, row_state, actions, offsets = [], [], [], [], [], [0]
    for i in range(mdp.n_states):
        for q in ldba.states:
            p = i * n_aut + aut_index[q]
            acts: List[Action] = list(mdp.actions[i])
            for k in range(len(mdp.actions[i])):
                env_row = int(mdp.pair_offsets[i]) + k
                row = offsets[-1] + k
                merged: Dict[int, float] = {}
                for j, prob in zip(indices[indptr[env_row]:indptr[env_row + 1]], data[indptr[env_row]:indptr[env_row + 1]]):
                    qk = next_aut[(q, int(j))]
                    target = reject if qk < 0 else int(j) * n_aut + qk
                    merged[target] = merged.get(target, 0.0) + float(prob)
                for target, prob in merged.items():
                    rows.append(row)
                    cols.append(target)
                    vals.append(prob)
                row_state.append(p)
            for target_q in ldba.epsilon_successors(q):
                acts.append(Epsilon(target_q))
                rows.append(offsets[-1] + len(acts) - 1)
                cols.append(i * n_aut + aut_index[target_q])
                vals.append(1.0)
                row_state.append(p)
            actions.append(tuple(acts))
            offsets.append(offsets[-1] + len(acts))

    actions.append((IDLE,))
    rows.append(offsets[-1])
    cols.append(reject)
    vals.append(1.0)
    row_state.append(reject)
    offsets.append(offsets[-1] + 1)

    matrix = sparse.csr_matrix((vals, (rows, cols)), shape=(offsets[-1], len(states)))
    acceptance = [
        np.array([s.aut in acc for s in states], dtype=bool) for acc in ldba.acceptance
    ]
    return ExplicitProduct(
        states=states,
        index=index,
        actions=actions,
        pair_offsets=np.asarray(offsets, dtype=np.int64),
        row_state=np.asarray(row_state, dtype=np.int64),
        matrix=matrix,
        initial=index[ProductState(mdp.states[mdp.initial], ldba.initial)],
        acceptance=acceptance,
        ldba=ldba,
        name=f"{mdp.name}x{ldba.name}",
    )


def end_components(
    n_states: int,
    row_state: np.ndarray,
    matrix: sparse.csr_matrix,
    rows: Optional[np.ndarray] = None,
) -> List[EndComponent]:
    """Maximal end components by iterative SCC refinement.

    Repeatedly split the graph into SCCs and drop every row that can leave the
    SCC of its state, until nothing changes.
    """
    alive = np.ones(matrix.shape[0], dtype=bool) if rows is None else rows.astype(bool).copy()
    indptr, indices = matrix.indptr, matrix.indices

    while True:
        graph = nx.DiGraph()
        graph.add_nodes_from(np.unique(row_state[alive]).tolist())
        for r in np.flatnonzero(alive):
            s = int(row_state[r])
            graph.add_edges_from((s, int(t)) for t in indices[indptr[r]:indptr[r + 1]])
        component = {}
        for cid, members in enumerate(nx.strongly_connected_components(graph)):
            for s in members:
                component[s] = cid

        changed = False
        for r in np.flatnonzero(alive):
            home = component[int(row_state[r])]
            if any(component[int(t)] != home for t in indices[indptr[r]:indptr[r + 1]]):
                alive[r] = False
                changed = True
        if not changed:
            break

    grouped: Dict[int, Tuple[set, set]] = {}
    for r in np.flatnonzero(alive):
        s = int(row_state[r])
        members, member_rows = grouped.setdefault(component[s], (set(), set()))
        members.add(s)
        member_rows.add(int(r))
    found = [EndComponent(frozenset(m), frozenset(r)) for m, r in grouped.values()]
    return sorted(found, key=lambda ec: min(ec.states))


def mec_decomposition(product: ExplicitProduct) -> MecDecomposition:
    return MecDecomposition(end_components(product.n_states, product.row_state, product.matrix))


def meets_all(states: FrozenSet[int], acceptance: Sequence[np.ndarray]) -> bool:
    members = np.fromiter(states, dtype=np.int64, count=len(states))
    return all(mask[members].any() for mask in acceptance)


def accepting_mecs(decomposition: MecDecomposition, product: ExplicitProduct) -> List[EndComponent]:
    return [ec for ec in decomposition.components if meets_all(ec.states, product.acceptance)]


def _best_per_state(product: ExplicitProduct, row_values: np.ndarray) -> np.ndarray:
    return np.maximum.reduceat(row_values, product.pair_offsets[:-1])


def max_reach_probability(
    product: ExplicitProduct,
    target: np.ndarray,
    tol: float = ORACLE_TOL,
    max_sweeps: int = MAX_SWEEPS,
) -> np.ndarray:
    """Maximal probability of reaching ``target`` (a boolean mask), iterated from zero."""
    values = target.astype(float)
    residual = np.inf
    for _ in range(max_sweeps):
        updated = _best_per_state(product, product.matrix @ values)
        updated[target] = 1.0
        residual = float(np.max(np.abs(updated - values)))
        values = updated
        if residual < tol:
            return values
    get_step_logger().log_step(
        "ORACLE_NONCONVERGENCE", f"reachability residual {residual:.3e} after {max_sweeps} sweeps", "ERROR"
    )
    raise NonConvergence(max_sweeps, residual)


def _attractor(
    product: ExplicitProduct,
    goal: np.ndarray,
    eligible_rows: np.ndarray,
    candidates: np.ndarray,
) -> Dict[int, int]:
    """Layered attractor: for each candidate state, the lowest eligible row
    that reaches an already ranked state with positive probability."""
    ranked = goal.copy()
    picked: Dict[int, int] = {}
    while True:
        hits = (product.matrix @ ranked.astype(float)) > 0
        rows = np.flatnonzero(eligible_rows & hits & candidates[product.row_state] & ~ranked[product.row_state])
        if rows.size == 0:
            return picked
        layer = []
        for r in rows:
            s = int(product.row_state[r])
            if s not in picked:
                picked[s] = int(r)
                layer.append(s)
        ranked[layer] = True


def _row_action(product: ExplicitProduct, row: int) -> Action:
    s = int(product.row_state[row])
    return product.actions[s][row - int(product.pair_offsets[s])]


def _cycling_rows(product: ExplicitProduct, ec: EndComponent) -> Optional[Dict[int, int]]:
    """One row per state of ``ec`` that walks shortest in-component paths
    through a target of each acceptance set in turn.

    Returns None when that memoryless choice leaves some bottom class of the
    component without an acceptance set; the caller then mixes instead.
    """
    indptr, indices = product.matrix.indptr, product.matrix.indices
    members = np.zeros(product.n_states, dtype=bool)
    members[list(ec.states)] = True
    ec_rows = np.zeros(product.matrix.shape[0], dtype=bool)
    ec_rows[list(ec.rows)] = True

    graph = nx.DiGraph()
    edge_row: Dict[Tuple[int, int], int] = {}
    for r in sorted(ec.rows):
        s = int(product.row_state[r])
        for t in indices[indptr[r]:indptr[r + 1]]:
            graph.add_edge(s, int(t))
            edge_row.setdefault((s, int(t)), r)

    targets = [int(np.flatnonzero(members & mask)[0]) for mask in product.acceptance]
    picked: Dict[int, int] = {}
    for here, there in zip(targets, targets[1:] + targets[:1]):
        path = nx.shortest_path(graph, here, there) if here != there else [here]
        for s, t in zip(path, path[1:]):
            picked.setdefault(s, edge_row[(s, t)])

    covered = np.zeros(product.n_states, dtype=bool)
    covered[list(picked)] = True
    if covered.any():
        picked.update(_attractor(product, covered, ec_rows, members & ~covered))
    for s in sorted(ec.states):
        picked.setdefault(int(s), min(r for r in ec.rows if product.row_state[r] == s))

    chain = nx.DiGraph()
    chain.add_nodes_from(picked)
    for s, r in picked.items():
        chain.add_edges_from((s, int(t)) for t in indices[indptr[r]:indptr[r + 1]])
    condensed = nx.condensation(chain)
    for c in condensed.nodes:
        if condensed.out_degree(c) == 0 and not meets_all(frozenset(condensed.nodes[c]["members"]), product.acceptance):
            return None
    return picked


def optimal_policy_from_values(
    product: ExplicitProduct,
    values: np.ndarray,
    amecs: Optional[List[EndComponent]] = None,
    slack: float = 1e-8,
) -> Policy:
    """Memoryless optimal policy for the AMEC reachability objective.

    Outside AMECs the policy takes value-optimal actions that make progress
    towards the AMECs; inside an AMEC it stays in the component. With one
    acceptance set it moves deterministically towards F_1. With several it
    cycles through them along shortest in-component paths, and mixes
    uniformly over the component's actions only when no such deterministic
    choice keeps every set recurrent.
    """
    if amecs is None:
        amecs = accepting_mecs(mec_decomposition(product), product)

    in_amec = np.zeros(product.n_states, dtype=bool)
    for ec in amecs:
        in_amec[list(ec.states)] = True

    row_values = product.matrix @ values
    optimal = row_values >= _best_per_state(product, row_values)[product.row_state] - slack
    candidates = (values > slack) & ~in_amec
    rows_by_state = _attractor(product, in_amec, optimal, candidates)

    for ec in amecs:
        ec_rows = np.zeros(product.matrix.shape[0], dtype=bool)
        ec_rows[list(ec.rows)] = True
        members = np.zeros(product.n_states, dtype=bool)
        members[list(ec.states)] = True
        if len(product.acceptance) == 1:
            goal = members & product.acceptance[0]
            rows_by_state.update(_attractor(product, goal, ec_rows, members & ~goal))
            for s in np.flatnonzero(goal):
                rows_by_state[int(s)] = min(r for r in ec.rows if product.row_state[r] == s)
        else:
            cycling = _cycling_rows(product, ec)
            if cycling is not None:
                rows_by_state.update(cycling)
                continue
            for s in ec.states:
                own = sorted(r for r in ec.rows if product.row_state[r] == s)
                rows_by_state[int(s)] = tuple(own)

    choices: Dict[Hashable, Tuple[Action, ...]] = {}
    for s in range(product.n_states):
        picked = rows_by_state.get(s, int(product.pair_offsets[s]))
        rows = picked if isinstance(picked, tuple) else (picked,)
        choices[product.states[s]] = tuple(_row_action(product, r) for r in rows)
    return Policy(choices)


def induced_chain(policy: Policy, product: ExplicitProduct) -> sparse.csr_matrix:
    rows, cols, vals = [], [], []
    for s, state in enumerate(product.states):
        picked = policy.choose(state, product.actions[s])
        for action in picked:
            rows.append(s)
            cols.append(product.row(s, action))
            vals.append(1.0 / len(picked))
    selector = sparse.csr_matrix((vals, (rows, cols)), shape=(product.n_states, product.matrix.shape[0]))
    return (selector @ product.matrix).tocsr()


def chain_analysis(policy: Policy, product: ExplicitProduct) -> ChainReport:
    """Recurrent classes reachable under ``policy`` and its satisfaction probability."""
    chain = induced_chain(policy, product)
    graph = nx.from_scipy_sparse_array(chain, create_using=nx.DiGraph)
    reachable = nx.descendants(graph, product.initial) | {product.initial}
    sub = graph.subgraph(reachable)
    condensed = nx.condensation(sub)
    recurrent = [
        frozenset(condensed.nodes[c]["members"]) for c in condensed.nodes if condensed.out_degree(c) == 0
    ]
    recurrent.sort(key=min)
    accepting = [c for c in recurrent if meets_all(c, product.acceptance)]
    closeness = max(
        (sum(bool(mask[list(c)].any()) for mask in product.acceptance) for c in recurrent), default=0
    )

    recurrent_states = frozenset().union(*recurrent) if recurrent else frozenset()
    accepting_states = frozenset().union(*accepting) if accepting else frozenset()
    transient = frozenset(reachable) - recurrent_states

    if product.initial in recurrent_states:
        probability = 1.0 if product.initial in accepting_states else 0.0
    elif not accepting_states:
        probability = 0.0
    else:
        order = sorted(transient)
        position = {s: k for k, s in enumerate(order)}
        inner = chain[order][:, order]
        hit = np.zeros(product.n_states, dtype=float)
        hit[list(accepting_states)] = 1.0
        rhs = chain[order] @ hit
        system = sparse.identity(len(order), format="csc") - inner.tocsc()
        solution = np.atleast_1d(spsolve(system, rhs))
        probability = float(solution[position[product.initial]])

    return ChainReport(
        recurrent_classes=recurrent,
        accepting_classes=accepting,
        transient=transient,
        probability=min(max(probability, 0.0), 1.0),
        closeness=closeness,
    )


def policy_values(policy: Policy, product: ExplicitProduct) -> np.ndarray:
    """Exact satisfaction probability of ``policy`` from every product state."""
    chain = induced_chain(policy, product)
    graph = nx.from_scipy_sparse_array(chain, create_using=nx.DiGraph)
    condensed = nx.condensation(graph)
    winning = np.zeros(product.n_states, dtype=bool)
    for c in condensed.nodes:
        members = frozenset(condensed.nodes[c]["members"])
        if condensed.out_degree(c) == 0 and meets_all(members, product.acceptance):
            winning[list(members)] = True

    backwards = graph.reverse(copy=False)
    hopeful = set()
    for s in np.flatnonzero(winning):
        if int(s) not in hopeful:
            hopeful |= nx.descendants(backwards, int(s)) | {int(s)}
    # open states are transient, so the system below is non-singular
    open_states = np.array(sorted(s for s in hopeful if not winning[s]), dtype=np.int64)

    values = winning.astype(float)
    if open_states.size:
        inner = chain[open_states][:, open_states]
        rhs = chain[open_states] @ values
        system = sparse.identity(open_states.size, format="csc") - inner.tocsc()
        values[open_states] = np.atleast_1d(spsolve(system, rhs))
    return np.clip(values, 0.0, 1.0)


@dataclass
class OracleReport:
    product: ExplicitProduct
    decomposition: MecDecomposition
    amecs: List[EndComponent]
    values: np.ndarray
    policy: Policy
    chain: ChainReport

    @property
    def value_at_initial(self) -> float:
        return float(self.values[self.product.initial])

    def value_of(self, state: ProductState) -> float:
        if state.aut == REJECT:
            return 0.0
        return float(self.values[self.product.index[state]])

    def to_dict(self) -> Dict:
        states = self.product.states
        return {
            "product": self.product.name,
            "product_states": self.product.product_states,
            "mec_count": len(self.decomposition),
            "amec_count": len(self.amecs),
            "amecs": [sorted(str(states[s]) for s in ec.states) for ec in self.amecs],
            "value_at_initial": self.value_at_initial,
            "values": {str(states[s]): float(v) for s, v in enumerate(self.values)},
            "policy": self.policy.to_dict(),
            "chain": self.chain.to_dict(),
        }


def solve(product: ExplicitProduct, tol: float = ORACLE_TOL, logger=None) -> OracleReport:
    """Run the whole pipeline: MECs, AMECs, reachability values, policy, chain check."""
    logger = logger or get_step_logger()
    decomposition = mec_decomposition(product)
    amecs = accepting_mecs(decomposition, product)
    logger.log_step(
        "ORACLE_MEC",
        f"{product.name}: {product.product_states} product states, {len(decomposition)} MECs, {len(amecs)} accepting",
    )

    target = np.zeros(product.n_states, dtype=bool)
    for ec in amecs:
        target[list(ec.states)] = True
    values = max_reach_probability(product, target, tol)
    policy = optimal_policy_from_values(product, values, amecs)
    # both are lower bounds on the optimum; the policy's are exact
    values = np.maximum(values, policy_values(policy, product))
    chain = chain_analysis(policy, product)
    logger.log_step(
        "ORACLE_VALUE",
        f"max satisfaction {values[product.initial]:.6f}, policy achieves {chain.probability:.6f}",
    )
    return OracleReport(product, decomposition, amecs, values, policy, chain)
