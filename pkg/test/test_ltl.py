import numpy as np
import pytest

from lcrl.errors import InvalidLength, LtlSyntaxError, UnknownAtom, UnsupportedFragment
from lcrl.ltl import (
    Always,
    And,
    Atom,
    Eventually,
    Implies,
    LassoWord,
    Neg,
    Next,
    Or,
    TrueConst,
    Until,
    atoms,
    desugar,
    eval_lasso,
    holds,
    is_propositional,
    parse,
    powerset,
    random_formula,
    random_lasso,
    resugar,
    to_text,
)

a, b, c = Atom("a"), Atom("b"), Atom("c")


def word(prefix, cycle):
    return LassoWord(tuple(frozenset(x) for x in prefix), tuple(frozenset(x) for x in cycle))


class TestParse:
    def test_conjunction_binds_tighter_than_disjunction(self):
        assert parse("a | b & c") == Or(a, And(b, c))

    def test_until_is_right_associative(self):
        assert parse("a U b U c") == Until(a, Until(b, c))

    def test_implication_is_right_associative_and_loosest(self):
        assert parse("a -> b -> c | a") == Implies(a, Implies(b, Or(c, a)))

    def test_unary_operators_stack(self):
        assert parse("G F a") == Always(Eventually(a))
        assert parse("!X a") == Neg(Next(a))

    def test_unary_binds_tighter_than_until(self):
        assert parse("F a U b") == Until(Eventually(a), b)

    def test_atoms_may_contain_digits(self):
        assert parse("f1 & X f2") == And(Atom("f1"), Next(Atom("f2")))

    def test_syntax_error_reports_position(self):
        with pytest.raises(LtlSyntaxError) as err:
            parse("a & ")
        assert err.value.text == "a & "

    def test_unbalanced_parenthesis(self):
        with pytest.raises(LtlSyntaxError):
            parse("(a | b")

    def test_unknown_atom(self):
        with pytest.raises(UnknownAtom) as err:
            parse("F t & G !u", alphabet=["t"])
        assert err.value.name == "u"

    def test_to_text_reparses(self):
        for seed in range(40):
            formula = random_formula(["a", "b"], depth=4, seed=seed)
            assert parse(to_text(formula)) == formula

    def test_to_text_parenthesises_binary_nodes(self):
        assert to_text(parse("a & b | c")) == "((a & b) | c)"


class TestHelpers:
    def test_atoms(self):
        assert atoms(parse("G (a -> F b) & true")) == frozenset({"a", "b"})

    def test_is_propositional(self):
        assert is_propositional(parse("a & !b | c"))
        assert not is_propositional(parse("a & X b"))

    def test_holds(self):
        assert holds(parse("a & !b"), {"a"})
        assert not holds(parse("a -> b"), {"a"})

    def test_holds_rejects_temporal(self):
        with pytest.raises(UnsupportedFragment):
            holds(parse("F a"), {"a"})

    def test_powerset_order(self):
        assert powerset(["b", "a"]) == (
            frozenset(),
            frozenset({"a"}),
            frozenset({"b"}),
            frozenset({"a", "b"}),
        )

    def test_desugar_uses_core_kinds_only(self):
        core = desugar(parse("G (a -> F b) | false"))

        def kinds(f):
            yield type(f)
            for child in f.children():
                yield from kinds(child)

        assert set(kinds(core)) <= {TrueConst, Atom, And, Neg, Next, Until}

    def test_resugar_recovers_common_shapes(self):
        for text in ("F G t", "G F a & G F b & G !c", "G (t -> G t)", "a | b"):
            formula = parse(text)
            assert resugar(desugar(formula)) == formula


class TestLasso:
    def test_empty_cycle_is_rejected(self):
        with pytest.raises(InvalidLength):
            LassoWord((frozenset(),), ())

    def test_positions_wrap_into_the_cycle(self):
        w = word([{"a"}], [{"b"}, set()])
        assert w.letter(0) == {"a"}
        assert [w.successor(i) for i in range(3)] == [1, 2, 1]

    def test_suffix(self):
        w = word([], [{"a"}, {"b"}])
        assert w.suffix() == word([], [{"b"}, {"a"}])

    @pytest.mark.parametrize(
        "text, prefix, cycle, expected",
        [
            ("G F a", [], [{"a"}, set()], True),
            ("F G a", [], [{"a"}, set()], False),
            ("F G a", [set(), set()], [{"a"}], True),
            ("a U b", [{"a"}, {"a"}], [{"b"}], True),
            ("a U b", [{"a"}, set()], [{"b"}], False),
            ("X a", [set(), {"a"}], [set()], True),
            ("G (a -> X b)", [], [{"a"}, {"b"}], True),
            ("G (a -> X b)", [], [{"a"}, {"a"}, {"b"}], False),
        ],
    )
    def test_eval(self, text, prefix, cycle, expected):
        assert eval_lasso(parse(text), word(prefix, cycle)) is expected

    def test_next_agrees_with_suffix(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            formula = random_formula(["a", "b"], depth=3, seed=rng)
            w = random_lasso(["a", "b"], 2, 3, seed=rng)
            assert eval_lasso(Next(formula), w) == eval_lasso(formula, w.suffix())

    def test_desugaring_preserves_meaning(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            formula = random_formula(["a", "b"], depth=4, seed=rng)
            w = random_lasso(["a", "b"], 3, 3, seed=rng)
            assert eval_lasso(formula, w) == eval_lasso(desugar(formula), w)

    def test_random_lasso_respects_letter_pool(self):
        pool = [frozenset({"a"}), frozenset()]
        w = random_lasso(["a", "b"], 5, 5, seed=0, letters=pool)
        assert all(w.letter(i) in pool for i in range(len(w)))
