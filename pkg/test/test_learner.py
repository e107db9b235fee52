import numpy as np
import pytest
from scipy import stats

from lcrl.errors import ConfigError
from lcrl.learner import (
    CountTables,
    EpisodeRecord,
    ExplorationSchedule,
    LearnParams,
    QTable,
    RunLog,
    evaluate_policy,
    evaluate_win_rate,
    greedy_policy,
    q_update,
    record_transition,
    select_action,
    train,
    train_baseline,
)
from lcrl.product import Policy, ProductState

from conftest import chain_env

START = ProductState("start", "q0")
GOAL = ProductState("goal", "q1")
TRAP = ProductState("trap", "q0")


def record(change: float, episode: int = 0) -> EpisodeRecord:
    return EpisodeRecord(episode, 1, 0.0, "threshold", -1, 1.0, 0.0, change)


class TestUpdates:
    def test_q_update_from_zero(self):
        q = QTable()
        q.row("s", ("a", "b"))
        assert q_update(q, "s", 0, 1.0, "unseen", mu=0.9, gamma=0.9) == pytest.approx(0.9)
        assert q.get("s", 0) == pytest.approx(0.9)
        assert q.get("s", 1) == 0.0

    def test_q_update_bootstraps_on_next_state(self):
        q = QTable()
        q.row("s", ("a",))
        q.row("t", ("a", "b"))[:] = [0.2, 0.5]
        q_update(q, "s", 0, 1.0, "t", mu=0.9, gamma=0.9)
        assert q.get("s", 0) == pytest.approx(0.9 * (1.0 + 0.9 * 0.5))

    def test_greedy_ties_go_to_the_first_action(self):
        q = QTable()
        rng = np.random.default_rng(0)
        assert select_action(q, "s", ("a", "b", "c"), 0.0, rng) == 0
        q.values["s"][:] = [0.0, 2.0, 2.0]
        assert select_action(q, "s", ("a", "b", "c"), 0.0, rng) == 1

    def test_full_exploration_is_uniform(self):
        q = QTable()
        rng = np.random.default_rng(5)
        q.row("s", ("a", "b", "c", "d"))[:] = [5.0, 0.0, 0.0, 0.0]
        draws = [select_action(q, "s", ("a", "b", "c", "d"), 1.0, rng) for _ in range(4000)]
        observed = np.bincount(draws, minlength=4)
        assert stats.chisquare(observed).pvalue > 1e-3

    def test_schedule_decays_with_episodes(self):
        schedule = ExplorationSchedule(1.0, 10.0)
        assert schedule(0) == 1.0
        assert schedule(10) == pytest.approx(0.5)

    def test_greedy_policy(self):
        q = QTable()
        q.row(START, ("go", "wait"))[:] = [1.0, 3.0]
        q.row(GOAL, ("stay",))
        assert greedy_policy(q).choices == {START: ("wait",), GOAL: ("stay",)}


class TestCounts:
    def test_first_visit_counts_twice(self):
        counts = record_transition(CountTables(), START, 0, GOAL)
        assert counts.total(START, 0) == 2
        assert counts.successors(START, 0) == {GOAL: 2}

    def test_new_successor_on_second_visit(self):
        counts = CountTables()
        record_transition(counts, START, 0, GOAL)
        record_transition(counts, START, 0, TRAP)
        assert counts.total(START, 0) == 3
        assert counts.successors(START, 0) == {GOAL: 2, TRAP: 1}

    def test_unvisited_pair(self):
        counts = CountTables()
        assert counts.total(START, 1) == 1
        assert counts.successors(START, 1) == {}

    def test_version_tracks_support_changes(self):
        counts = CountTables()
        counts.register(START, 2)
        counts.register(START, 2)
        assert counts.version == 1
        counts.record_transition(START, 0, GOAL)
        counts.record_transition(START, 0, GOAL)
        assert counts.version == 2
        counts.record_transition(START, 0, TRAP)
        assert counts.version == 3


class TestParams:
    @pytest.mark.parametrize(
        "kwargs, field",
        [
            ({"mu": 1.5}, "mu"),
            ({"gamma": 1.0}, "gamma"),
            ({"r_p": -1.0}, "rp"),
            ({"episodes": -1}, "episodes"),
            ({"it_threshold": 0}, "it_threshold"),
            ({"epsilon0": 2.0}, "epsilon0"),
            ({"tau": 0.0}, "tau"),
        ],
    )
    def test_invalid(self, kwargs, field):
        with pytest.raises(ConfigError) as err:
            LearnParams(**kwargs)
        assert err.value.field == field

    def test_decay_defaults_to_a_tenth_of_the_episodes(self):
        assert LearnParams(episodes=200).decay == 20.0
        assert LearnParams(episodes=3).decay == 1.0
        assert LearnParams(tau=7.0).decay == 7.0


class TestRunLog:
    def test_all_zero_changes_are_not_convergence(self):
        log = RunLog([record(0.0, k) for k in range(5)])
        assert not log.converged(window=3, tol=1e-4)

    def test_quiet_window_after_learning(self):
        log = RunLog([record(0.5, 0)] + [record(0.0, k) for k in range(1, 4)])
        assert log.converged(window=3, tol=1e-4)
        assert not log.converged(window=4, tol=1e-4)


class TestTrain:
    def test_estimated_satisfaction_probability(self, chain, reach_t):
        params = LearnParams(episodes=400, it_threshold=5, tau=1e9, early_stop=False)
        result = train(chain, reach_t, params, seed=3)
        assert result.psp[START] == pytest.approx(0.85, abs=0.08)
        assert result.psp[GOAL] == 1.0
        assert result.psp[TRAP] == 0.0

    def test_q_values_stay_bounded(self, chain, reach_t):
        params = LearnParams(episodes=100, it_threshold=20, early_stop=False)
        low, high = train(chain, reach_t, params, seed=0).q_table.bounds()
        assert low >= 0.0
        assert high <= params.r_p / (1.0 - params.gamma) + 1e-9

    def test_same_seed_same_run(self, region3, fg_t):
        params = LearnParams(episodes=15, it_threshold=50)
        first = train(region3, fg_t, params, seed=11)
        second = train(region3, fg_t, params, seed=11)
        assert [r.reward for r in first.run_log] == [r.reward for r in second.run_log]
        assert first.q_table.values.keys() == second.q_table.values.keys()
        for state, row in first.q_table.values.items():
            assert np.array_equal(row, second.q_table.values[state])

    def test_deterministic_goal_is_learned(self, reach_t):
        env = chain_env(1.0)
        result = train(env, reach_t, LearnParams(episodes=100, it_threshold=10), seed=0)
        assert greedy_policy(result.q_table).choices[START] == ("go",)

    def test_early_stop(self, reach_t):
        params = LearnParams(mu=1.0, episodes=500, it_threshold=5, convergence_window=10, early_stop=True)
        result = train(chain_env(1.0), reach_t, params, seed=0)
        assert result.run_log.converged_at is not None
        assert len(result.run_log) == result.run_log.converged_at + 1 < 500

    def test_callback_sees_every_episode(self, chain, reach_t):
        seen = []
        params = LearnParams(episodes=12, it_threshold=5, early_stop=False)
        train(chain, reach_t, params, seed=0, on_episode=lambda rec, psp, counts: seen.append(rec.episode))
        assert seen == list(range(12))

    def test_unsatisfiable(self, reach_t):
        env = chain_env(0.0)
        params = LearnParams(episodes=50, it_threshold=5, early_stop=False)
        result = train(env, reach_t, params, seed=1)
        assert result.q_table.bounds() == (0.0, 0.0)
        assert result.psp[START] == 0.0

    @pytest.mark.parametrize("seed", range(3))
    def test_region3_heads_for_the_target(self, region3, fg_t, seed):
        params = LearnParams(mu=0.9, gamma=0.9, episodes=20, it_threshold=1000, early_stop=False)
        result = train(region3, fg_t, params, seed=seed)
        assert greedy_policy(result.q_table).choices[ProductState((0, 2), "q0")] == ("right",)
        assert any(r.terminal == "threshold" for r in result.run_log)
        assert result.q_table.bounds()[1] > 0.0

    def test_sink_ends_the_episode(self, region3, reach_stay_safe):
        params = LearnParams(episodes=30, it_threshold=200, early_stop=False)
        log = train(region3, reach_stay_safe, params, seed=2).run_log
        sunk = [r for r in log if r.terminal == "sink"]
        assert sunk
        assert all(r.iterations < 200 for r in sunk)


class TestEvaluate:
    def test_satisfaction_estimate(self, chain, reach_t):
        policy = Policy({START: ("go",)})
        result = evaluate_policy(policy, chain, reach_t, n_runs=2000, horizon=20, seed=0)
        assert result.probability == pytest.approx(0.85, abs=0.04)
        assert result.mean_steps == 1.0
        assert result.win_rate is None

    def test_waiting_never_satisfies(self, chain, reach_t):
        policy = Policy({START: ("wait",)})
        assert evaluate_policy(policy, chain, reach_t, n_runs=50, horizon=20, seed=0).satisfied == 0

    def test_needs_runs(self, chain, reach_t):
        with pytest.raises(ConfigError) as err:
            evaluate_policy(Policy(), chain, reach_t, n_runs=0)
        assert err.value.field == "n_eval"


class TestBaseline:
    def test_reward_only_on_the_goal(self):
        env = chain_env(1.0)
        result = train_baseline(env, lambda s: s == "goal", LearnParams(episodes=50, it_threshold=10), seed=0)
        policy = greedy_policy(result.q_table)
        assert policy.choices["start"] == ("go",)
        assert evaluate_win_rate(policy, env, lambda s: s == "goal", n_runs=20, horizon=5, seed=0) == 1.0
