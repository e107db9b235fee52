import networkx as nx
import numpy as np
import pytest

from lcrl.automata import (
    BUILTIN_ALIASES,
    BUILTIN_AUTOMATA,
    REJECT,
    Ldba,
    accepting_frontier,
    accepts_lasso,
    builtin_automaton,
    builtin_formula,
    find_sinks,
    load_automaton,
    render_automaton,
    save_automaton,
    transition_graph,
    translate_fragment,
    validate_ldba,
)
from lcrl.errors import (
    AcceptanceOutsideQD,
    EpsilonInAccepting,
    FormatError,
    NotLimitDeterministic,
    UnknownName,
    UnsupportedFragment,
)
from lcrl.ltl import LassoWord, eval_lasso, parse, random_lasso

TRANSLATED = ("F G t", "G F A & G F B & G !C", "F t & G (t -> G t) & G (u -> G u)", "F (a & F b)", "G !u & F G t")


def cross_validate(automaton: Ldba, formula, n_words: int, seed: int) -> None:
    rng = np.random.default_rng(seed)
    for _ in range(n_words):
        word = random_lasso(
            automaton.alphabet, int(rng.integers(0, 4)), int(rng.integers(1, 4)), seed=rng, letters=automaton.letters
        )
        assert accepts_lasso(automaton, word) == eval_lasso(formula, word), word.to_dict()


class TestBuiltin:
    @pytest.mark.parametrize("name", sorted(BUILTIN_AUTOMATA))
    def test_validates(self, name):
        report = validate_ldba(builtin_automaton(name))
        assert report.f >= 1

    @pytest.mark.parametrize(
        "name, n_states, accepting",
        [
            ("fig3_reach_stay_safe", 3, [{"q1"}]),
            ("fig4_fg_t", 2, [{"q1"}]),
            ("fig5_sequenced", 4, [{"q2"}]),
            ("fig6_pacman", 5, [{"q3"}]),
            ("fig10_gfa_gfb_gnc", 3, [{"q0"}]),
        ],
    )
    def test_reference_names(self, name, n_states, accepting):
        automaton = builtin_automaton(name)
        assert len(automaton.states) == n_states
        assert [set(acc) for acc in automaton.acceptance] == accepting

    @pytest.mark.parametrize("alias, name", sorted(BUILTIN_ALIASES.items()))
    def test_reference_name_matches_descriptive_name(self, alias, name):
        assert builtin_automaton(alias).delta == builtin_automaton(name).delta
        assert builtin_formula(alias) == builtin_formula(name)

    def test_unknown_name(self):
        with pytest.raises(UnknownName):
            builtin_automaton("no_such_automaton")

    def test_patrol_has_three_states(self, patrol):
        assert len(patrol.states) == 3

    def test_fg_t_partition(self, fg_t):
        assert fg_t.part_n == {"q0"}
        assert fg_t.part_d == {"q1"}
        assert fg_t.epsilon_successors("q0") == ("q1",)

    def test_exclusive_letters(self, reach_stay_safe):
        assert frozenset({"t", "u"}) not in reach_stay_safe.letters
        assert len(reach_stay_safe.letters) == 3

    def test_missing_transition_rejects(self, fg_t):
        assert fg_t.step("q1", frozenset()) == REJECT
        assert fg_t.step(REJECT, frozenset({"t"})) == REJECT

    @pytest.mark.parametrize("name", sorted(BUILTIN_AUTOMATA))
    def test_agrees_with_reference_formula(self, name):
        cross_validate(builtin_automaton(name), builtin_formula(name), 1000, seed=7)


class TestSinks:
    def test_reach_stay_safe_trap(self, reach_stay_safe):
        assert find_sinks(reach_stay_safe) == {"q2"}

    def test_fg_t_has_no_named_sink(self, fg_t):
        assert find_sinks(fg_t) == frozenset()

    def test_pacman_caught_state(self):
        assert find_sinks(builtin_automaton("fig6_pacman")) == {"q4"}

    @pytest.mark.parametrize("name", sorted(BUILTIN_AUTOMATA))
    def test_no_acceptance_reachable_from_sinks(self, name):
        automaton = builtin_automaton(name)
        graph = transition_graph(automaton)
        for q in find_sinks(automaton):
            reachable = nx.descendants(graph, q) | {q}
            assert not all(reachable & acc for acc in automaton.acceptance)


class TestFrontier:
    def test_single_set_resets_to_itself(self, fg_t):
        frontier = fg_t.accepting_union
        for _ in range(3):
            frontier = accepting_frontier("q1", frontier, fg_t)
            assert frontier == {"q1"}

    def test_non_accepting_state_keeps_frontier(self, fg_t):
        assert accepting_frontier("q0", frozenset({"q1"}), fg_t) == {"q1"}

    def test_two_sets_alternate(self, gf_a_gf_b):
        frontier = gf_a_gf_b.accepting_union
        frontier = accepting_frontier("qa", frontier, gf_a_gf_b)
        assert frontier == {"qb"}
        assert accepting_frontier("qa", frontier, gf_a_gf_b) == {"qb"}
        frontier = accepting_frontier("qb", frontier, gf_a_gf_b)
        assert frontier == {"qa"}

    def test_never_empty(self, gf_a_gf_b):
        rng = np.random.default_rng(0)
        frontier = gf_a_gf_b.accepting_union
        for _ in range(200):
            frontier = accepting_frontier(str(rng.choice(gf_a_gf_b.states)), frontier, gf_a_gf_b)
            assert frontier


class TestAcceptsLasso:
    def test_fg_t(self, fg_t):
        t, empty = frozenset({"t"}), frozenset()
        assert accepts_lasso(fg_t, LassoWord((empty, empty), (t,)))
        assert not accepts_lasso(fg_t, LassoWord((), (t, empty)))

    def test_generalised_needs_every_set(self, gf_a_gf_b):
        a, b = frozenset({"a"}), frozenset({"b"})
        assert accepts_lasso(gf_a_gf_b, LassoWord((), (a, b)))
        assert not accepts_lasso(gf_a_gf_b, LassoWord((b,), (a,)))


class TestTranslate:
    def test_fg_t_shape(self):
        automaton = translate_fragment(parse("F G t"))
        validate_ldba(automaton)
        assert len(automaton.states) == 2
        assert len(automaton.part_n) == 1
        assert sum(len(v) for v in automaton.eps.values()) == 1

    def test_recurrence_with_safety_has_three_states(self):
        automaton = translate_fragment(parse("G F A & G F B & G !C"))
        assert len(automaton.states) == 3

    def test_unsupported(self):
        with pytest.raises(UnsupportedFragment):
            translate_fragment(parse("t U (X u)"))

    @pytest.mark.parametrize("text", TRANSLATED)
    def test_agrees_with_formula(self, text):
        formula = parse(text)
        automaton = translate_fragment(formula)
        validate_ldba(automaton)
        cross_validate(automaton, formula, 1000, seed=13)


class TestFileFormat:
    def test_save_then_load_keeps_the_language(self, reach_stay_safe):
        again = load_automaton(save_automaton(reach_stay_safe))
        assert again.delta == reach_stay_safe.delta
        assert again.acceptance == reach_stay_safe.acceptance
        assert again.exclusive == reach_stay_safe.exclusive

    def test_overlapping_labels(self):
        text = """
alphabet: a
states: q0 q1
initial: q0
acc: q1
trans: q0 -- a --> q0
trans: q0 -- true --> q1
"""
        with pytest.raises(FormatError):
            load_automaton(text)

    def test_unknown_key_reports_line(self):
        with pytest.raises(FormatError) as err:
            load_automaton("alphabet: a\ncolour: red\n")
        assert err.value.line_no == 2

    def test_acceptance_outside_deterministic_part(self):
        text = """
alphabet: a
states: q0 q1
initial: q0
partN: q0
partD: q1
acc: q0
trans: q0 -- true --> q0
eps: q0 --> q1
"""
        with pytest.raises(AcceptanceOutsideQD):
            validate_ldba(load_automaton(text))

    def test_epsilon_out_of_deterministic_part(self):
        text = """
alphabet: a
states: q0 q1
initial: q0
partN:
partD: q0 q1
acc: q1
trans: q0 -- true --> q1
eps: q1 --> q0
"""
        with pytest.raises(EpsilonInAccepting):
            validate_ldba(load_automaton(text))

    def test_leaving_deterministic_part(self):
        automaton = Ldba.from_transitions(
            states=["q0", "q1"],
            initial="q0",
            alphabet=["a"],
            transitions=[("q1", [frozenset({"a"})], "q0")],
            acceptance=[["q1"]],
            part_n=["q0"],
            eps={"q0": ["q1"]},
        )
        with pytest.raises(NotLimitDeterministic):
            validate_ldba(automaton)

    def test_conflicting_targets(self):
        with pytest.raises(NotLimitDeterministic):
            Ldba.from_transitions(
                states=["q0", "q1"],
                initial="q0",
                alphabet=["a"],
                transitions=[("q0", [frozenset()], "q0"), ("q0", [frozenset()], "q1")],
                acceptance=[["q1"]],
            )

    def test_render(self, fg_t):
        source = render_automaton(fg_t).source
        assert "doublecircle" in source
        assert "dashed" in source
