import numpy as np
import pytest
from scipy import stats

from lcrl.environments import (
    GRID_ACTIONS,
    GridWorld,
    PacmanState,
    TabularEnv,
    explicit_mdp,
    load_grid,
    load_maze,
    pacman_fixture,
    random_mdp,
    region_fixture,
)
from lcrl.errors import ConfigError, FormatError, InvalidAction, TooLarge, UnknownName


class TestGrid:
    def test_region3_layout(self, region3):
        assert region3.reset() == (0, 2)
        assert region3.labels((2, 1)) == {"t"}
        assert region3.labels((1, 0)) == {"u"}
        assert region3.actions((0, 2)) == ("right", "up")
        assert region3.actions((1, 1)) == ("right", "up")
        assert region3.actions((2, 1)) == ("stay",)

    def test_slip_to_intended_neighbour(self, region3):
        distribution = region3.transition_distribution((1, 1), "up")
        assert distribution[(1, 0)] == pytest.approx(0.88)
        assert distribution[(1, 1)] == pytest.approx(0.03)
        assert sum(distribution.values()) == pytest.approx(1.0)

    def test_boundary_move_stays(self, region3):
        distribution = region3.transition_distribution((2, 2), "right")
        # neighbourhood of a corner: itself, left and up
        assert distribution[(2, 2)] == pytest.approx(0.85 + 0.05)
        assert set(distribution) == {(2, 2), (1, 2), (2, 1)}

    def test_absorbing_stay(self, region3):
        assert region3.transition_distribution((2, 1), "stay") == {(2, 1): 1.0}
        assert region3.transition_distribution((0, 0), "stay") == {(0, 0): 1.0}

    def test_invalid_action(self, region3):
        with pytest.raises(InvalidAction):
            region3.step((0, 2), "left", np.random.default_rng(0))

    def test_sampling_follows_distribution(self, region3):
        rng = np.random.default_rng(42)
        draws = [region3.sample((1, 1), "up", rng) for _ in range(10_000)]
        distribution = region3.transition_distribution((1, 1), "up")
        cells = sorted(distribution)
        observed = np.array([sum(d == c for d in draws) for c in cells])
        expected = np.array([distribution[c] for c in cells]) * len(draws)
        assert stats.chisquare(observed, expected).pvalue > 1e-3

    def test_rows_must_have_equal_width(self):
        with pytest.raises(FormatError) as err:
            load_grid("start: 0,0\nnnn\nnn\n")
        assert err.value.line_no == 3

    def test_unknown_cell_label(self):
        with pytest.raises(FormatError):
            load_grid("start: 0,0\nnzn\n")

    def test_start_from_marker(self):
        spec = load_grid("nnn\nnin\n")
        assert spec.start == (1, 1)
        assert GridWorld(spec).actions((0, 0)) == GRID_ACTIONS

    def test_text_round_trip(self, region3):
        again = load_grid(region3.spec.to_text())
        assert again == region3.spec

    @pytest.mark.parametrize("name", ["region1", "region2"])
    def test_region_scales(self, name):
        env = region_fixture(name, 20)
        assert env.spec.width == env.spec.height == 20
        assert "t" in env.alphabet and "u" in env.alphabet

    def test_region_size_bounds(self):
        with pytest.raises(ConfigError) as err:
            region_fixture("region1", 8)
        assert err.value.field == "size"

    def test_unknown_region(self):
        with pytest.raises(UnknownName):
            region_fixture("region9", 10)


class TestPacman:
    @pytest.fixture
    def game(self):
        return pacman_fixture("small")

    def test_start(self, game):
        state = game.reset()
        assert state.pacman == (4, 1)
        assert state.ghosts == ((4, 3),)
        assert game.labels(state) == {"n"}

    def test_eating_labels_the_step(self, game):
        state = PacmanState((2, 1), ((4, 3),), (False, False), 0)
        after = game.transition_distribution(state, "left")
        assert all(s.pacman == (1, 1) and s.eaten == (True, False) for s in after)
        assert all(game.labels(s) == {"f1"} for s in after if not game.is_caught(s))

    def test_caught_is_absorbing(self, game):
        state = PacmanState((3, 3), ((3, 3),), (False, False), 0)
        assert game.labels(state) == {"g"}
        assert game.actions(state) == ("stay",)
        assert game.transition_distribution(state, "stay") == {state: 1.0}

    def test_ghost_chases(self, game):
        distribution = game.ghost_distribution((4, 3), (3, 1))
        assert distribution[(3, 3)] == pytest.approx(0.9 + 0.05)
        assert distribution[(5, 3)] == pytest.approx(0.05)

    def test_distribution_sums_to_one(self, game):
        state = game.reset()
        for action in game.actions(state):
            assert sum(game.transition_distribution(state, action).values()) == pytest.approx(1.0)

    def test_small_maze_enumerates(self, game):
        mdp = explicit_mdp(game)
        assert mdp.n_states > 1
        assert np.allclose(mdp.matrix.sum(axis=1), 1.0)

    def test_large_maze_is_too_large(self):
        with pytest.raises(TooLarge):
            explicit_mdp(pacman_fixture("large"))

    def test_missing_maze(self):
        with pytest.raises(UnknownName):
            pacman_fixture("huge")

    def test_maze_needs_both_foods(self):
        with pytest.raises(FormatError):
            load_maze("# # # #\n# P F1 #\n# G . #\n# # # #\n")


class TestExplicit:
    def test_region3(self, region3):
        mdp = explicit_mdp(region3)
        assert mdp.n_states == 9
        assert mdp.states[mdp.initial] == (0, 2)
        row = mdp.distribution(mdp.index[(1, 1)], "up")
        assert row[(1, 0)] == pytest.approx(0.88)

    def test_limit(self, region3):
        with pytest.raises(TooLarge):
            explicit_mdp(region3, limit=4)

    def test_rows_must_sum_to_one(self):
        env = TabularEnv(
            transitions={"s": {"stay": {"s": 1.0}, "leak": {"s": 0.5, "t": 0.3}}, "t": {"stay": {"t": 1.0}}},
            labels={"s": frozenset(), "t": frozenset()},
            initial="s",
        )
        with pytest.raises(ConfigError) as err:
            explicit_mdp(env)
        assert err.value.field == "transitions"
        assert "leak" in str(err.value)

    def test_random_mdp_is_stochastic(self):
        env = random_mdp(6, 2, ("a", "b"), seed=1)
        mdp = explicit_mdp(env)
        assert np.allclose(mdp.matrix.sum(axis=1), 1.0)
        assert all(len(env.labels(s)) <= 1 for s in env.transitions)

    def test_random_mdp_is_reproducible(self):
        assert random_mdp(5, 2, ("a",), seed=3).transitions == random_mdp(5, 2, ("a",), seed=3).transitions

    def test_grid_world_bound(self, region3):
        assert isinstance(region3, GridWorld)
        assert region3.state_space_bound() == 9
