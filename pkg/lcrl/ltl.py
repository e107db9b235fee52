"""
LTL formulas over a finite alphabet of atomic propositions.

The abstract syntax keeps the sugared operators produced by the parser
(``|``, ``->``, ``F``, ``G``, ``false``) next to the core ones; ``desugar``
rewrites a formula into the core kinds True, Atom, And, Neg, Next, Until.
Formulas are evaluated on lasso words, i.e. ultimately periodic words
``prefix . cycle^omega`` whose letters are sets of atoms.
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from lark import Lark, Transformer, v_args
from lark.exceptions import UnexpectedInput

from .errors import InvalidLength, LtlSyntaxError, UnknownAtom, UnsupportedFragment

Letter = FrozenSet[str]


class Formula:
    """Base class of all formula nodes; subclasses are frozen dataclasses."""

    def __str__(self) -> str:
        return to_text(self)

    def children(self) -> Tuple["Formula", ...]:
        return ()


@dataclass(frozen=True)
class TrueConst(Formula):
    pass


@dataclass(frozen=True)
class FalseConst(Formula):
    pass


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class Neg(Formula):
    child: Formula

    def children(self):
        return (self.child,)


@dataclass(frozen=True)
class Next(Formula):
    child: Formula

    def children(self):
        return (self.child,)


@dataclass(frozen=True)
class Eventually(Formula):
    child: Formula

    def children(self):
        return (self.child,)


@dataclass(frozen=True)
class Always(Formula):
    child: Formula

    def children(self):
        return (self.child,)


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


CORE_KINDS = (TrueConst, Atom, And, Neg, Next, Until)
TEMPORAL_KINDS = (Next, Until, Eventually, Always)


@dataclass(frozen=True)
class LassoWord:
    """The infinite word ``prefix . cycle . cycle . ...``."""

    prefix: Tuple[Letter, ...]
    cycle: Tuple[Letter, ...]

    def __post_init__(self):
        if len(self.cycle) == 0:
            raise InvalidLength("a lasso word needs a non-empty cycle")
        object.__setattr__(self, "prefix", tuple(frozenset(a) for a in self.prefix))
        object.__setattr__(self, "cycle", tuple(frozenset(a) for a in self.cycle))

    def __len__(self) -> int:
        return len(self.prefix) + len(self.cycle)

    def letter(self, position: int) -> Letter:
        if position < len(self.prefix):
            return self.prefix[position]
        return self.cycle[position - len(self.prefix)]

    def successor(self, position: int) -> int:
        nxt = position + 1
        return nxt if nxt < len(self) else len(self.prefix)

    def suffix(self) -> "LassoWord":
        """The word read from the second letter on."""
        if self.prefix:
            return LassoWord(self.prefix[1:], self.cycle)
        return LassoWord((), self.cycle[1:] + self.cycle[:1])

    def to_dict(self) -> Dict[str, List[List[str]]]:
        return {
            "prefix": [sorted(a) for a in self.prefix],
            "cycle": [sorted(a) for a in self.cycle],
        }


GRAMMAR = r"""
?start: implication

?implication: disjunction
    | disjunction "->" implication      -> implies

?disjunction: conjunction
    | disjunction "|" conjunction       -> or_

?conjunction: until
    | conjunction "&" until             -> and_

?until: unary
    | unary "U" until                   -> until

?unary: primary
    | "!" unary                         -> neg
    | "X" unary                         -> next_
    | "F" unary                         -> eventually
    | "G" unary                         -> always

?primary: "true"                        -> true
    | "false"                           -> false
    | NAME                              -> atom
    | "(" implication ")"

NAME: /(?!(?:X|F|G|U|true|false)\b)[A-Za-z_][A-Za-z0-9_]*/

%import common.WS
%ignore WS
"""


@v_args(inline=True)
class _AstBuilder(Transformer):
    def true(self):
        return TrueConst()

    def false(self):
        return FalseConst()

    def atom(self, name):
        return Atom(str(name))

    def neg(self, child):
        return Neg(child)

    def next_(self, child):
        return Next(child)

    def eventually(self, child):
        return Eventually(child)

    def always(self, child):
        return Always(child)

    def and_(self, left, right):
        return And(left, right)

    def or_(self, left, right):
        return Or(left, right)

    def implies(self, left, right):
        return Implies(left, right)

    def until(self, left, right):
        return Until(left, right)


_PARSER = Lark(GRAMMAR, parser="lalr", transformer=_AstBuilder())


def parse(text: str, alphabet: Optional[Iterable[str]] = None) -> Formula:
    """Parse ``text`` into a formula.

    Precedence from tightest: the unary operators ``! X F G``, then ``U``
    (right associative), ``&``, ``|`` and finally ``->`` (right associative).
    When ``alphabet`` is given every atom must belong to it.
    """
    try:
        formula = _PARSER.parse(text)
    except UnexpectedInput as err:
        expected = getattr(err, "expected", None) or getattr(err, "allowed", None) or ()
        raise LtlSyntaxError(text, getattr(err, "pos_in_stream", None), expected) from err

    if alphabet is not None:
        allowed = set(alphabet)
        for name in sorted(atoms(formula)):
            if name not in allowed:
                raise UnknownAtom(name, allowed)
    return formula


def to_text(formula: Formula) -> str:
    """Render a formula so that ``parse(to_text(f)) == f``."""
    if isinstance(formula, TrueConst):
        return "true"
    if isinstance(formula, FalseConst):
        return "false"
    if isinstance(formula, Atom):
        return formula.name
    if isinstance(formula, Neg):
        return f"!{to_text(formula.child)}"
    unary = {Next: "X", Eventually: "F", Always: "G"}
    if type(formula) in unary:
        return f"{unary[type(formula)]} {to_text(formula.child)}"
    binary = {And: "&", Or: "|", Implies: "->", Until: "U"}
    if type(formula) in binary:
        return f"({to_text(formula.left)} {binary[type(formula)]} {to_text(formula.right)})"
    raise TypeError(f"not a formula: {formula!r}")


def atoms(formula: Formula) -> FrozenSet[str]:
    if isinstance(formula, Atom):
        return frozenset({formula.name})
    found = set()
    for child in formula.children():
        found |= atoms(child)
    return frozenset(found)


def is_propositional(formula: Formula) -> bool:
    if isinstance(formula, TEMPORAL_KINDS):
        return False
    return all(is_propositional(child) for child in formula.children())


def holds(formula: Formula, letter: Iterable[str]) -> bool:
    """Truth value of a propositional formula on a single letter."""
    letter = letter if isinstance(letter, frozenset) else frozenset(letter)
    if isinstance(formula, TrueConst):
        return True
    if isinstance(formula, FalseConst):
        return False
    if isinstance(formula, Atom):
        return formula.name in letter
    if isinstance(formula, Neg):
        return not holds(formula.child, letter)
    if isinstance(formula, And):
        return holds(formula.left, letter) and holds(formula.right, letter)
    if isinstance(formula, Or):
        return holds(formula.left, letter) or holds(formula.right, letter)
    if isinstance(formula, Implies):
        return (not holds(formula.left, letter)) or holds(formula.right, letter)
    raise UnsupportedFragment(formula, "temporal operator in a letter label")


@lru_cache(maxsize=None)
def desugar(formula: Formula) -> Formula:
    """Rewrite into the core kinds True, Atom, And, Neg, Next, Until."""
    if isinstance(formula, (TrueConst, Atom)):
        return formula
    if isinstance(formula, FalseConst):
        return Neg(TrueConst())
    if isinstance(formula, Neg):
        return Neg(desugar(formula.child))
    if isinstance(formula, Next):
        return Next(desugar(formula.child))
    if isinstance(formula, And):
        return And(desugar(formula.left), desugar(formula.right))
    if isinstance(formula, Until):
        return Until(desugar(formula.left), desugar(formula.right))
    if isinstance(formula, Or):
        return Neg(And(Neg(desugar(formula.left)), Neg(desugar(formula.right))))
    if isinstance(formula, Implies):
        return Neg(And(desugar(formula.left), Neg(desugar(formula.right))))
    if isinstance(formula, Eventually):
        return Until(TrueConst(), desugar(formula.child))
    if isinstance(formula, Always):
        return Neg(Until(TrueConst(), Neg(desugar(formula.child))))
    raise TypeError(f"not a formula: {formula!r}")


def resugar(formula: Formula) -> Formula:
    """Recover F, G, |, -> and false from their core encodings, bottom-up."""
    if isinstance(formula, (TrueConst, FalseConst, Atom)):
        return formula
    if isinstance(formula, (Next, Eventually, Always)):
        return type(formula)(resugar(formula.child))
    if isinstance(formula, (And, Or, Implies)):
        return type(formula)(resugar(formula.left), resugar(formula.right))
    if isinstance(formula, Until):
        left, right = resugar(formula.left), resugar(formula.right)
        if isinstance(left, TrueConst):
            return Eventually(right)
        return Until(left, right)

    child = resugar(formula.child)
    if isinstance(child, TrueConst):
        return FalseConst()
    if isinstance(child, Eventually):
        inner = child.child
        if isinstance(inner, Neg):
            return Always(inner.child)
        if isinstance(inner, FalseConst):
            return Always(TrueConst())
    if isinstance(child, And):
        if isinstance(child.left, Neg) and isinstance(child.right, Neg):
            return Or(child.left.child, child.right.child)
        if isinstance(child.right, Neg):
            return Implies(child.left, child.right.child)
    return Neg(child)


def eval_lasso(formula: Formula, word: LassoWord) -> bool:
    """Decide ``word, 0 |= formula``."""
    return bool(_truth_table(formula, word, {})[0])


def _truth_table(formula: Formula, word: LassoWord, memo: dict) -> np.ndarray:
    if formula in memo:
        return memo[formula]

    n = len(word)
    succ = np.array([word.successor(i) for i in range(n)])

    if isinstance(formula, TrueConst):
        table = np.ones(n, dtype=bool)
    elif isinstance(formula, FalseConst):
        table = np.zeros(n, dtype=bool)
    elif isinstance(formula, Atom):
        table = np.array([formula.name in word.letter(i) for i in range(n)], dtype=bool)
    elif isinstance(formula, Neg):
        table = ~_truth_table(formula.child, word, memo)
    elif isinstance(formula, Next):
        table = _truth_table(formula.child, word, memo)[succ]
    elif isinstance(formula, And):
        table = _truth_table(formula.left, word, memo) & _truth_table(formula.right, word, memo)
    elif isinstance(formula, Or):
        table = _truth_table(formula.left, word, memo) | _truth_table(formula.right, word, memo)
    elif isinstance(formula, Implies):
        table = ~_truth_table(formula.left, word, memo) | _truth_table(formula.right, word, memo)
    elif isinstance(formula, (Until, Eventually)):
        if isinstance(formula, Until):
            left = _truth_table(formula.left, word, memo)
            right = _truth_table(formula.right, word, memo)
        else:
            left = np.ones(n, dtype=bool)
            right = _truth_table(formula.child, word, memo)
        # least fixpoint, iterated from all-false
        table = np.zeros(n, dtype=bool)
        while True:
            updated = right | (left & table[succ])
            if np.array_equal(updated, table):
                break
            table = updated
    elif isinstance(formula, Always):
        child = _truth_table(formula.child, word, memo)
        # greatest fixpoint, iterated from all-true
        table = np.ones(n, dtype=bool)
        while True:
            updated = child & table[succ]
            if np.array_equal(updated, table):
                break
            table = updated
    else:
        raise TypeError(f"not a formula: {formula!r}")

    memo[formula] = table
    return table


def powerset(alphabet: Iterable[str]) -> Tuple[Letter, ...]:
    """All letters over ``alphabet``, ordered by size then lexicographically."""
    names = sorted(set(alphabet))
    return tuple(
        frozenset(combo) for size in range(len(names) + 1) for combo in combinations(names, size)
    )


def random_lasso(
    alphabet: Iterable[str],
    prefix_len: int,
    cycle_len: int,
    seed: Union[int, np.random.Generator, None] = None,
    letters: Optional[Sequence[Letter]] = None,
) -> LassoWord:
    """Draw a lasso word with letters uniform over ``letters`` (default: all of 2^alphabet)."""
    if cycle_len < 1 or prefix_len < 0:
        raise InvalidLength(f"prefix_len={prefix_len}, cycle_len={cycle_len}")
    rng = np.random.default_rng(seed)
    pool = tuple(letters) if letters is not None else powerset(alphabet)
    draws = rng.integers(len(pool), size=prefix_len + cycle_len)
    chosen = [pool[i] for i in draws]
    return LassoWord(tuple(chosen[:prefix_len]), tuple(chosen[prefix_len:]))


def random_formula(
    alphabet: Sequence[str],
    depth: int,
    seed: Union[int, np.random.Generator, None] = None,
) -> Formula:
    """Random formula over every operator kind, used for round-trip and soundness sweeps."""
    rng = np.random.default_rng(seed)
    names = sorted(alphabet)

    def grow(level: int) -> Formula:
        if level == 0 or rng.random() < 0.2:
            pick = rng.integers(len(names) + 2)
            if pick == len(names):
                return TrueConst()
            if pick == len(names) + 1:
                return FalseConst()
            return Atom(names[pick])
        kind = rng.integers(8)
        if kind < 4:
            return (Neg, Next, Eventually, Always)[kind](grow(level - 1))
        return (And, Or, Implies, Until)[kind - 4](grow(level - 1), grow(level - 1))

    return grow(depth)
