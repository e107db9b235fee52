"""
Limit-deterministic generalised Büchi automata (LDBA).

An automaton reads letters (sets of atoms) with a deterministic, partial
transition map. A missing transition leads to the implicit absorbing state
``REJECT``. The state set splits into an initial part Q_N and a deterministic
part Q_D; the only nondeterminism is an epsilon move from Q_N into Q_D, and
every acceptance set lives inside Q_D.
"""

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import graphviz
import networkx as nx

from .errors import (
    AcceptanceOutsideQD,
    EpsilonInAccepting,
    FormatError,
    LdbaValidationError,
    LtlSyntaxError,
    NotLimitDeterministic,
    UnknownAtom,
    UnknownName,
    UnsupportedFragment,
)
from .ltl import (
    Always,
    And,
    Eventually,
    Formula,
    Implies,
    Letter,
    LassoWord,
    Neg,
    Or,
    atoms,
    desugar,
    holds,
    is_propositional,
    parse,
    powerset,
    resugar,
    to_text,
)

REJECT = "__reject__"


@dataclass(frozen=True)
class Ldba:
    states: Tuple[str, ...]
    initial: str
    alphabet: Tuple[str, ...]
    delta: Dict[Tuple[str, Letter], str]
    eps: Dict[str, Tuple[str, ...]]
    acceptance: Tuple[FrozenSet[str], ...]
    part_n: FrozenSet[str]
    part_d: FrozenSet[str]
    exclusive: Tuple[FrozenSet[str], ...] = ()
    name: str = ""

    @classmethod
    def from_transitions(
        cls,
        states: Sequence[str],
        initial: str,
        alphabet: Iterable[str],
        transitions: Iterable[Tuple[str, Iterable[Letter], str]],
        acceptance: Sequence[Iterable[str]],
        part_n: Iterable[str] = (),
        part_d: Optional[Iterable[str]] = None,
        eps: Optional[Dict[str, Sequence[str]]] = None,
        exclusive: Sequence[Iterable[str]] = (),
        name: str = "",
    ) -> "Ldba":
        """Build an automaton from (source, letters, target) triples.

        Two different targets for the same source and letter raise
        NotLimitDeterministic.
        """
        delta: Dict[Tuple[str, Letter], str] = {}
        for src, letters, dst in transitions:
            for letter in letters:
                key = (src, frozenset(letter))
                if key in delta and delta[key] != dst:
                    raise NotLimitDeterministic(src, key[1])
                delta[key] = dst

        part_n = frozenset(part_n)
        part_d = frozenset(states) - part_n if part_d is None else frozenset(part_d)
        return cls(
            states=tuple(states),
            initial=initial,
            alphabet=tuple(sorted(set(alphabet))),
            delta=delta,
            eps={q: tuple(targets) for q, targets in (eps or {}).items() if targets},
            acceptance=tuple(frozenset(acc) for acc in acceptance),
            part_n=part_n,
            part_d=part_d,
            exclusive=tuple(frozenset(group) for group in exclusive),
            name=name,
        )

    @cached_property
    def letters(self) -> Tuple[Letter, ...]:
        """Admissible letters: at most one atom from each exclusive group."""
        return tuple(
            letter
            for letter in powerset(self.alphabet)
            if all(len(letter & group) <= 1 for group in self.exclusive)
        )

    @cached_property
    def accepting_union(self) -> FrozenSet[str]:
        union = frozenset()
        for acc in self.acceptance:
            union |= acc
        return union

    @property
    def f(self) -> int:
        return len(self.acceptance)

    def project(self, labels: Iterable[str]) -> Letter:
        """Restrict a set of environment labels to this automaton's alphabet."""
        return frozenset(labels) & frozenset(self.alphabet)

    def step(self, state: str, letter: Letter) -> str:
        if state == REJECT:
            return REJECT
        return self.delta.get((state, letter), REJECT)

    def epsilon_successors(self, state: str) -> Tuple[str, ...]:
        return self.eps.get(state, ())

    def acceptance_indices(self, state: str) -> Tuple[int, ...]:
        return tuple(j for j, acc in enumerate(self.acceptance) if state in acc)

    def to_dict(self) -> Dict:
        return {
            "name": self.name,
            "states": list(self.states),
            "initial": self.initial,
            "alphabet": list(self.alphabet),
            "acceptance": [sorted(acc) for acc in self.acceptance],
            "partN": sorted(self.part_n),
            "partD": sorted(self.part_d),
        }


@dataclass(frozen=True)
class PartitionReport:
    part_n: FrozenSet[str]
    part_d: FrozenSet[str]
    reachable_d: FrozenSet[str]
    f: int
    sinks: FrozenSet[str] = field(default_factory=frozenset)

    def to_dict(self) -> Dict:
        return {
            "partN": sorted(self.part_n),
            "partD": sorted(self.part_d),
            "reachable_partD": sorted(self.reachable_d),
            "f": self.f,
            "sinks": sorted(self.sinks),
        }


def validate_ldba(automaton: Ldba) -> PartitionReport:
    """Check the limit-deterministic structure and report the partition."""
    states = set(automaton.states)
    if REJECT in states:
        raise LdbaValidationError(f"{REJECT!r} is reserved for the implicit rejecting state")
    if automaton.initial not in states:
        raise LdbaValidationError(f"initial state {automaton.initial!r} is not a state")
    if automaton.part_n & automaton.part_d or (automaton.part_n | automaton.part_d) != states:
        raise LdbaValidationError("partN and partD must partition the states")
    if automaton.f < 1:
        raise LdbaValidationError("at least one acceptance set is required")

    for j, acc in enumerate(automaton.acceptance):
        for q in sorted(acc):
            if q not in automaton.part_d:
                raise AcceptanceOutsideQD(j, q)

    for (q, letter), target in automaton.delta.items():
        if target not in states:
            raise LdbaValidationError(f"transition from {q!r} targets unknown state {target!r}")
        if q in automaton.part_d and target not in automaton.part_d:
            raise NotLimitDeterministic(q, letter, "transition leaves the deterministic part")

    for q, targets in automaton.eps.items():
        if q in automaton.part_d:
            raise EpsilonInAccepting(q)
        for target in targets:
            if target not in states:
                raise LdbaValidationError(f"epsilon move from {q!r} targets unknown state {target!r}")

    graph = transition_graph(automaton)
    reachable = nx.descendants(graph, automaton.initial) | {automaton.initial}
    return PartitionReport(
        part_n=automaton.part_n,
        part_d=automaton.part_d,
        reachable_d=frozenset(q for q in reachable if q in automaton.part_d),
        f=automaton.f,
        sinks=find_sinks(automaton),
    )


def transition_graph(automaton: Ldba) -> nx.DiGraph:
    """States plus REJECT, with an edge for every admissible letter and every epsilon move."""
    graph = nx.DiGraph()
    graph.add_nodes_from(automaton.states)
    graph.add_edge(REJECT, REJECT)
    for q in automaton.states:
        for letter in automaton.letters:
            graph.add_edge(q, automaton.step(q, letter))
        for target in automaton.epsilon_successors(q):
            graph.add_edge(q, target)
    return graph


def find_sinks(automaton: Ldba) -> FrozenSet[str]:
    """Automaton states in closed components that miss some acceptance set.

    REJECT is always a sink and is left out of the result.
    """
    graph = transition_graph(automaton)
    condensed = nx.condensation(graph)
    sinks = set()
    for node in condensed.nodes:
        if condensed.out_degree(node) > 0:
            continue
        members = condensed.nodes[node]["members"]
        if REJECT in members:
            continue
        if not all(members & acc for acc in automaton.acceptance):
            sinks |= members
    return frozenset(sinks)


def accepting_frontier(state: str, frontier: FrozenSet[str], automaton: Ldba) -> FrozenSet[str]:
    """Update the set of acceptance states still to be visited in this round.

    Visiting F_j removes it from the frontier; once the frontier would become
    empty it is refilled with every set except the one just visited. With a
    single acceptance set the refill would be empty, so it is reset to F_1.
    """
    hit = [acc for acc in automaton.acceptance if state in acc]
    if not hit:
        return frontier
    visited = frozenset().union(*hit)
    updated = frontier - visited
    if not updated:
        updated = automaton.accepting_union - visited
    if not updated:
        updated = automaton.accepting_union
    return updated


def accepts_lasso(automaton: Ldba, word: LassoWord) -> bool:
    """Does some run on ``word`` visit every acceptance set infinitely often?"""
    graph = nx.DiGraph()
    start = (automaton.initial, 0)
    graph.add_node(start)
    stack = [start]
    while stack:
        node = stack.pop()
        q, i = node
        successors = [(target, i) for target in automaton.epsilon_successors(q)]
        target = automaton.step(q, word.letter(i))
        if target != REJECT:
            successors.append((target, word.successor(i)))
        for succ in successors:
            if succ not in graph:
                stack.append(succ)
            graph.add_edge(node, succ)

    for component in nx.strongly_connected_components(graph):
        if len(component) == 1:
            (only,) = component
            if not graph.has_edge(only, only):
                continue
        visited = {q for q, _ in component}
        if all(visited & acc for acc in automaton.acceptance):
            return True
    return False


# -- translation of a formula fragment -----------------------------------------

_DONE = frozenset({frozenset()})
_DEAD = frozenset()


def _minimise(dnf):
    return frozenset(c for c in dnf if not any(other < c for other in dnf))


def _dnf_or(a, b):
    return _minimise(a | b)


def _dnf_and(a, b):
    return _minimise(frozenset(x | y for x in a for y in b))


def _progress_goal(goal: Formula, letter: Letter):
    if is_propositional(goal):
        return _DONE if holds(goal, letter) else _DEAD
    if isinstance(goal, And):
        return _dnf_and(_progress_goal(goal.left, letter), _progress_goal(goal.right, letter))
    if isinstance(goal, Or):
        return _dnf_or(_progress_goal(goal.left, letter), _progress_goal(goal.right, letter))
    if isinstance(goal, Eventually):
        return _dnf_or(_progress_goal(goal.child, letter), frozenset({frozenset({goal})}))
    raise UnsupportedFragment(goal)


def _progress(dnf, letter: Letter):
    result = _DEAD
    for clause in dnf:
        acc = _DONE
        for goal in clause:
            acc = _dnf_and(acc, _progress_goal(goal, letter))
            if not acc:
                break
        result = _dnf_or(result, acc)
    return result


def _is_cosafe(formula: Formula) -> bool:
    if is_propositional(formula):
        return True
    if isinstance(formula, (And, Or)):
        return _is_cosafe(formula.left) and _is_cosafe(formula.right)
    if isinstance(formula, Eventually):
        return _is_cosafe(formula.child)
    return False


def _conjuncts(formula: Formula) -> List[Formula]:
    if isinstance(formula, And):
        return _conjuncts(formula.left) + _conjuncts(formula.right)
    return [formula]


def _conjoin(parts: List[Formula]) -> Formula:
    result = parts[0]
    for part in parts[1:]:
        result = And(result, part)
    return result


@dataclass
class _Fragment:
    reach: List[Formula] = field(default_factory=list)
    invariants: List[Formula] = field(default_factory=list)
    locks: List[Tuple[Formula, Formula]] = field(default_factory=list)
    recurring: List[Formula] = field(default_factory=list)
    persistent: List[Formula] = field(default_factory=list)


def _classify(formula: Formula) -> _Fragment:
    fragment = _Fragment()
    for part in _conjuncts(formula):
        if isinstance(part, Always):
            body = part.child
            if is_propositional(body):
                fragment.invariants.append(body)
            elif isinstance(body, Eventually) and is_propositional(body.child):
                fragment.recurring.append(body.child)
            elif (
                isinstance(body, Implies)
                and is_propositional(body.left)
                and isinstance(body.right, Always)
                and is_propositional(body.right.child)
            ):
                fragment.locks.append((body.left, body.right.child))
            elif isinstance(body, Or) and isinstance(body.right, Always) and is_propositional(body.left) and is_propositional(body.right.child):
                fragment.locks.append((Neg(body.left), body.right.child))
            elif isinstance(body, Or) and isinstance(body.left, Always) and is_propositional(body.right) and is_propositional(body.left.child):
                fragment.locks.append((Neg(body.right), body.left.child))
            else:
                raise UnsupportedFragment(part)
        elif isinstance(part, Eventually) and isinstance(part.child, Always) and is_propositional(part.child.child):
            fragment.persistent.append(part.child.child)
        elif _is_cosafe(part):
            fragment.reach.append(part)
        else:
            raise UnsupportedFragment(part)
    return fragment


def translate_fragment(formula: Formula, alphabet: Optional[Iterable[str]] = None, name: str = "") -> Ldba:
    """Build an LDBA for a conjunction of recognised patterns.

    Supported conjuncts: co-safety goals made of F, & and | over propositional
    formulas, invariants ``G b``, locks ``G(a -> G b)``, recurrence ``G F b``
    and persistence ``F G b`` (a, b propositional). Anything else raises
    UnsupportedFragment.
    """
    canonical = resugar(desugar(formula))
    fragment = _classify(canonical)
    alphabet = tuple(sorted(set(alphabet) if alphabet is not None else atoms(formula)))
    letters = powerset(alphabet)

    k = len(fragment.recurring)
    persistence = _conjoin(fragment.persistent) if fragment.persistent else None
    initial = (
        frozenset({frozenset(fragment.reach)}) if fragment.reach else _DONE,
        tuple(False for _ in fragment.locks),
        k,
        persistence is None,
    )

    def read(state, letter):
        reach, locks, counter, settled = state
        if not all(holds(b, letter) for b in fragment.invariants):
            return None
        new_locks = []
        for locked, (trigger, body) in zip(locks, fragment.locks):
            locked = locked or holds(trigger, letter)
            if locked and not holds(body, letter):
                return None
            new_locks.append(locked)
        if persistence is not None and settled and not holds(persistence, letter):
            return None
        reach = _progress(reach, letter)
        if not reach:
            return None
        position = 0 if counter == k else counter
        while position < k and holds(fragment.recurring[position], letter):
            position += 1
        return (reach, tuple(new_locks), position, settled)

    names: Dict[tuple, str] = {initial: "q0"}
    order = [initial]
    transitions = []
    eps: Dict[str, List[str]] = {}

    def visit(state):
        if state not in names:
            names[state] = f"q{len(names)}"
            order.append(state)
        return names[state]

    cursor = 0
    while cursor < len(order):
        state = order[cursor]
        cursor += 1
        src = names[state]
        for letter in letters:
            target = read(state, letter)
            if target is not None:
                transitions.append((src, [letter], visit(target)))
        if not state[3]:
            eps.setdefault(src, []).append(visit(state[:3] + (True,)))

    accepting = [
        names[s] for s in order if _DONE == s[0] and s[2] == k and s[3]
    ]
    part_n = [names[s] for s in order if not s[3]]
    return Ldba.from_transitions(
        states=[names[s] for s in order],
        initial="q0",
        alphabet=alphabet,
        transitions=transitions,
        acceptance=[accepting],
        part_n=part_n,
        eps=eps,
        name=name or to_text(formula),
    )


# -- text format -----------------------------------------------------------------

_HEADER_RE = re.compile(r"^(\w+)\s*:\s*(.*)$")
_TRANS_RE = re.compile(r"^(\S+)\s*--\s*(.+?)\s*-->\s*(\S+)$")
_EPS_RE = re.compile(r"^(\S+)\s*-->\s*(\S+)$")
_REQUIRED = ("alphabet", "states", "initial", "acc")


def load_automaton(text: str) -> Ldba:
    """Read the line-oriented automaton format.

    ``key: value`` lines give name, alphabet, exclusive (repeatable), states,
    initial, partN, partD and acc (one line per acceptance set).
    ``trans: src -- label --> dst`` lines carry propositional labels and
    ``eps: src --> dst`` lines the epsilon moves. ``#`` starts a comment.
    """
    fields: Dict[str, List[Tuple[int, str]]] = {}
    line_no = 0
    for line_no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        match = _HEADER_RE.match(line)
        if not match:
            raise FormatError(line_no, f"expected 'key: value', got {line!r}")
        fields.setdefault(match.group(1), []).append((line_no, match.group(2).strip()))

    known = {"name", "alphabet", "exclusive", "states", "initial", "partN", "partD", "acc", "trans", "eps"}
    for key, entries in fields.items():
        if key not in known:
            raise FormatError(entries[0][0], f"unknown key {key!r}")
    for key in _REQUIRED:
        if key not in fields:
            raise FormatError(line_no, f"missing {key}: line")

    def single(key, default=None):
        entries = fields.get(key)
        if not entries:
            return default
        if len(entries) > 1:
            raise FormatError(entries[1][0], f"duplicate {key}: line")
        return entries[0][1]

    alphabet = single("alphabet").split()
    states = single("states").split()
    known_states = set(states)

    def check_states(no, names):
        for q in names:
            if q not in known_states:
                raise FormatError(no, f"unknown state {q!r}")
        return names

    initial = single("initial")
    check_states(fields["initial"][0][0], [initial])
    exclusive = [entry.split() for _, entry in fields.get("exclusive", [])]
    for no, entry in fields.get("exclusive", []):
        for atom in entry.split():
            if atom not in alphabet:
                raise FormatError(no, f"exclusive atom {atom!r} is not in the alphabet")

    part_n = check_states(fields["partN"][0][0], single("partN", "").split()) if "partN" in fields else []
    part_d = check_states(fields["partD"][0][0], single("partD").split()) if "partD" in fields else None
    acceptance = [check_states(no, entry.split()) for no, entry in fields["acc"]]

    admissible = [
        letter for letter in powerset(alphabet) if all(len(letter & frozenset(g)) <= 1 for g in exclusive)
    ]

    transitions = []
    claimed: Dict[str, Dict[Letter, int]] = {}
    for no, entry in fields.get("trans", []):
        match = _TRANS_RE.match(entry)
        if not match:
            raise FormatError(no, f"expected 'src -- label --> dst', got {entry!r}")
        src, label_text, dst = match.groups()
        check_states(no, [src, dst])
        try:
            label = parse(label_text, alphabet)
        except (LtlSyntaxError, UnknownAtom) as err:
            raise FormatError(no, str(err)) from err
        if not is_propositional(label):
            raise FormatError(no, f"temporal operator in label {label_text!r}")
        letters = [letter for letter in admissible if holds(label, letter)]
        seen = claimed.setdefault(src, {})
        for letter in letters:
            if letter in seen:
                raise FormatError(no, f"label overlaps line {seen[letter]} on letter {sorted(letter)}")
            seen[letter] = no
        transitions.append((src, letters, dst))

    eps: Dict[str, List[str]] = {}
    for no, entry in fields.get("eps", []):
        match = _EPS_RE.match(entry)
        if not match:
            raise FormatError(no, f"expected 'src --> dst', got {entry!r}")
        src, dst = check_states(no, list(match.groups()))
        eps.setdefault(src, []).append(dst)

    return Ldba.from_transitions(
        states=states,
        initial=initial,
        alphabet=alphabet,
        transitions=transitions,
        acceptance=acceptance,
        part_n=part_n,
        part_d=part_d,
        eps=eps,
        exclusive=exclusive,
        name=single("name", ""),
    )


def letters_to_label(letters: Sequence[Letter], automaton: Ldba) -> str:
    """A propositional label that holds on exactly ``letters`` among the admissible ones."""
    if set(letters) == set(automaton.letters):
        return "true"
    terms = []
    for letter in letters:
        literals = [a if a in letter else f"!{a}" for a in automaton.alphabet]
        term = " & ".join(literals) if literals else "true"
        terms.append(f"({term})" if len(letters) > 1 and len(literals) > 1 else term)
    return " | ".join(terms)


def save_automaton(automaton: Ldba) -> str:
    lines = []
    if automaton.name:
        lines.append(f"name: {automaton.name}")
    lines.append(f"alphabet: {' '.join(automaton.alphabet)}")
    for group in automaton.exclusive:
        lines.append(f"exclusive: {' '.join(sorted(group))}")
    lines.append(f"states: {' '.join(automaton.states)}")
    lines.append(f"initial: {automaton.initial}")
    lines.append(f"partN: {' '.join(q for q in automaton.states if q in automaton.part_n)}".rstrip())
    lines.append(f"partD: {' '.join(q for q in automaton.states if q in automaton.part_d)}".rstrip())
    for acc in automaton.acceptance:
        lines.append(f"acc: {' '.join(q for q in automaton.states if q in acc)}".rstrip())
    for q in automaton.states:
        by_target: Dict[str, List[Letter]] = {}
        for letter in automaton.letters:
            target = automaton.delta.get((q, letter))
            if target is not None:
                by_target.setdefault(target, []).append(letter)
        for target, letters in by_target.items():
            lines.append(f"trans: {q} -- {letters_to_label(letters, automaton)} --> {target}")
    for q in automaton.states:
        for target in automaton.epsilon_successors(q):
            lines.append(f"eps: {q} --> {target}")
    return "\n".join(lines) + "\n"


def render_automaton(automaton: Ldba) -> graphviz.Digraph:
    """Graphviz drawing: accepting states doubly circled, epsilon moves dashed."""
    dot = graphviz.Digraph(name=automaton.name or "ldba")
    dot.attr(rankdir="LR")
    dot.node("__start__", shape="point")
    for q in automaton.states:
        indices = automaton.acceptance_indices(q)
        label = q if not indices else f"{q}\n{{{','.join(str(j + 1) for j in indices)}}}"
        dot.node(q, label=label, shape="doublecircle" if indices else "circle")
    dot.edge("__start__", automaton.initial)
    for q in automaton.states:
        by_target: Dict[str, List[Letter]] = {}
        for letter in automaton.letters:
            target = automaton.delta.get((q, letter))
            if target is not None:
                by_target.setdefault(target, []).append(letter)
        for target, letters in by_target.items():
            dot.edge(q, target, label=letters_to_label(letters, automaton))
        for target in automaton.epsilon_successors(q):
            dot.edge(q, target, label="ε", style="dashed")
    return dot


# -- hand-drawn automata ---------------------------------------------------------

@dataclass(frozen=True)
class BuiltinAutomaton:
    text: str
    formula: str
    description: str


BUILTIN_AUTOMATA: Dict[str, BuiltinAutomaton] = {
    "reach_stay_safe": BuiltinAutomaton(
        text="""
name: reach_stay_safe
alphabet: t u
exclusive: t u
states: q0 q1 q2
initial: q0
partN:
partD: q0 q1 q2
acc: q1
trans: q0 -- !u & !t --> q0
trans: q0 -- !u & t --> q1
trans: q0 -- u & !t --> q2
trans: q1 -- !u & t --> q1
trans: q2 -- true --> q2
""",
        formula="F t & G (t -> G t) & G (u -> G u)",
        description="reach t and stay there; touching u is a trap",
    ),
    "eventually_always_t": BuiltinAutomaton(
        text="""
name: eventually_always_t
alphabet: t
states: q0 q1
initial: q0
partN: q0
partD: q1
acc: q1
trans: q0 -- true --> q0
trans: q1 -- t --> q1
eps: q0 --> q1
""",
        formula="F G t",
        description="eventually always t",
    ),
    "sequenced_visits": BuiltinAutomaton(
        text="""
name: sequenced_visits
alphabet: p t u
exclusive: p t u
states: q0 q1 q2 q3
initial: q0
partN:
partD: q0 q1 q2 q3
acc: q2
trans: q0 -- !p & !t & !u --> q0
trans: q0 -- p --> q1
trans: q0 -- u --> q3
trans: q1 -- !t & !u --> q1
trans: q1 -- t --> q2
trans: q1 -- u --> q3
trans: q2 -- t --> q2
trans: q3 -- u --> q3
""",
        formula="(!t & !u) U (p & X ((!t & !u) U G t))",
        description="visit p, then reach t and stay; u is a trap",
    ),
    "pacman_foods": BuiltinAutomaton(
        text="""
name: pacman_foods
alphabet: f1 f2 g n
exclusive: f1 f2 g n
states: q0 q1 q2 q3 q4
initial: q0
partN:
partD: q0 q1 q2 q3 q4
acc: q3
trans: q0 -- n --> q0
trans: q0 -- f1 --> q1
trans: q0 -- f2 --> q2
trans: q0 -- g --> q4
trans: q1 -- n | f1 --> q1
trans: q1 -- f2 --> q3
trans: q1 -- g --> q4
trans: q2 -- n | f2 --> q2
trans: q2 -- f1 --> q3
trans: q2 -- g --> q4
trans: q3 -- true --> q3
trans: q4 -- true --> q4
""",
        formula="(n U (f1 & X ((n | f1) U f2))) | (n U (f2 & X ((n | f2) U f1)))",
        description="eat both foods before a ghost catches pacman",
    ),
    "patrol_ab_avoid_c": BuiltinAutomaton(
        text="""
name: patrol_ab_avoid_c
alphabet: A B C
exclusive: A B
states: q0 q1 q2
initial: q0
partN:
partD: q0 q1 q2
acc: q0
trans: q0 -- !B & !C --> q1
trans: q0 -- B & !A & !C --> q2
trans: q1 -- !B & !C --> q1
trans: q1 -- B & !A & !C --> q2
trans: q2 -- !A & !C --> q2
trans: q2 -- A & !C --> q0
""",
        formula="G F A & G F B & G !C",
        description="visit A and B infinitely often while never touching C",
    ),
}

# Reference names for the hand-drawn automata; the descriptive keys above stay valid.
BUILTIN_ALIASES: Dict[str, str] = {
    "fig3_reach_stay_safe": "reach_stay_safe",
    "fig4_fg_t": "eventually_always_t",
    "fig5_sequenced": "sequenced_visits",
    "fig6_pacman": "pacman_foods",
    "fig10_gfa_gfb_gnc": "patrol_ab_avoid_c",
}
BUILTIN_AUTOMATA.update({alias: BUILTIN_AUTOMATA[name] for alias, name in BUILTIN_ALIASES.items()})


def builtin_automaton(name: str) -> Ldba:
    if name not in BUILTIN_AUTOMATA:
        raise UnknownName(name, BUILTIN_AUTOMATA)
    automaton = load_automaton(BUILTIN_AUTOMATA[name].text)
    validate_ldba(automaton)
    return automaton


def builtin_formula(name: str) -> Formula:
    """The reference formula a builtin automaton is cross-checked against."""
    if name not in BUILTIN_AUTOMATA:
        raise UnknownName(name, BUILTIN_AUTOMATA)
    return parse(BUILTIN_AUTOMATA[name].formula)
