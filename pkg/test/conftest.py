import pytest

from lcrl.automata import Ldba, builtin_automaton, load_automaton
from lcrl.config import DATA_DIR
from lcrl.environments import TabularEnv, five_by_five_fixture, region3_fixture


@pytest.fixture
def region3():
    return region3_fixture()


@pytest.fixture
def five_by_five():
    return five_by_five_fixture()


@pytest.fixture
def fg_t():
    return builtin_automaton("fig4_fg_t")


@pytest.fixture
def reach_stay_safe():
    return builtin_automaton("fig3_reach_stay_safe")


@pytest.fixture
def patrol():
    return builtin_automaton("fig10_gfa_gfb_gnc")


@pytest.fixture
def gf_a_gf_b() -> Ldba:
    return load_automaton((DATA_DIR / "automata" / "gf_a_gf_b.ldba").read_text())


def reach_automaton() -> Ldba:
    """F t over {t}: q0 waits, q1 accepts forever."""
    return load_automaton(
        """
name: reach_t
alphabet: t
states: q0 q1
initial: q0
partN:
partD: q0 q1
acc: q1
trans: q0 -- !t --> q0
trans: q0 -- t --> q1
trans: q1 -- true --> q1
"""
    )


@pytest.fixture
def reach_t() -> Ldba:
    return reach_automaton()


def chain_env(p_goal: float = 0.85) -> TabularEnv:
    """start --go--> goal (p_goal) or trap; goal and trap absorb."""
    return TabularEnv(
        transitions={
            "start": {"go": {"goal": p_goal, "trap": 1.0 - p_goal}, "wait": {"start": 1.0}},
            "goal": {"stay": {"goal": 1.0}},
            "trap": {"stay": {"trap": 1.0}},
        },
        labels={"start": frozenset(), "goal": frozenset({"t"}), "trap": frozenset()},
        initial="start",
        alphabet=("t",),
        name="chain",
    )


@pytest.fixture
def chain():
    return chain_env()
