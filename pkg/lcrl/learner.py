"""
Logically-constrained Q-learning over the on-the-fly product.

Each episode starts at the initial product state with the accepting frontier
reset to every accepting state. A step selects an action epsilon-greedily,
moves the product, records the transition counts, pays ``r_p`` when the
frontier is hit, applies the Q-learning update and refreshes the PSP estimate
of the state just left. An episode ends when the automaton falls into a sink
or after ``it_threshold`` iterations.
"""

import time
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, Hashable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .automata import REJECT, Ldba, find_sinks
from .config import (
    CONVERGENCE_TOL,
    CONVERGENCE_WINDOW,
    DEFAULT_EPISODES,
    DEFAULT_EPSILON0,
    DEFAULT_GAMMA,
    DEFAULT_IT_THRESHOLD,
    DEFAULT_MU,
    DEFAULT_RP,
    EVAL_HORIZON,
    EVAL_RUNS,
)
from .environments.base import LabeledEnv
from .errors import ConfigError
from .logger import get_step_logger
from .product import (
    Action,
    Policy,
    RewardParams,
    available_actions,
    initial_frontier,
    initial_state,
    product_step,
    reward_and_update,
)
from .psp import ModelEstimate, PspTable, avi_update, refresh_collapse


@dataclass(frozen=True)
class LearnParams:
    mu: float = DEFAULT_MU
    gamma: float = DEFAULT_GAMMA
    r_p: float = DEFAULT_RP
    episodes: int = DEFAULT_EPISODES
    it_threshold: int = DEFAULT_IT_THRESHOLD
    epsilon0: float = DEFAULT_EPSILON0
    tau: Optional[float] = None
    convergence_window: int = CONVERGENCE_WINDOW
    convergence_tol: float = CONVERGENCE_TOL
    early_stop: bool = False

    def __post_init__(self):
        if not 0.0 < self.mu <= 1.0:
            raise ConfigError("mu", f"must lie in (0, 1], got {self.mu}")
        if not 0.0 <= self.gamma < 1.0:
            raise ConfigError("gamma", f"must lie in [0, 1), got {self.gamma}")
        if not self.r_p > 0:
            raise ConfigError("rp", f"must be positive, got {self.r_p}")
        if self.episodes < 0:
            raise ConfigError("episodes", f"must be non-negative, got {self.episodes}")
        if self.it_threshold < 1:
            raise ConfigError("it_threshold", f"must be at least 1, got {self.it_threshold}")
        if not 0.0 <= self.epsilon0 <= 1.0:
            raise ConfigError("epsilon0", f"must lie in [0, 1], got {self.epsilon0}")
        if self.tau is not None and not self.tau > 0:
            raise ConfigError("tau", f"must be positive, got {self.tau}")
        if self.convergence_window < 1:
            raise ConfigError("convergence_window", f"must be at least 1, got {self.convergence_window}")

    @property
    def decay(self) -> float:
        if self.tau is not None:
            return self.tau
        return max(self.episodes / 10.0, 1.0)

    def reward_params(self) -> RewardParams:
        return RewardParams(r_p=self.r_p, gamma=self.gamma, mu=self.mu)


class ExplorationSchedule:
    """Diminishing exploration rate eps(t) = eps0 / (1 + t / tau) over episodes."""

    def __init__(self, epsilon0: float, tau: float):
        self.epsilon0 = epsilon0
        self.tau = tau

    def __call__(self, t: int) -> float:
        return self.epsilon0 / (1.0 + t / self.tau)


class QTable:
    """Action values per product state, in the order of the state's available actions."""

    def __init__(self):
        self.values: Dict[Hashable, np.ndarray] = {}
        self.actions: Dict[Hashable, Tuple[Action, ...]] = {}

    def row(self, state: Hashable, actions: Sequence[Action]) -> np.ndarray:
        if state not in self.values:
            self.values[state] = np.zeros(len(actions))
            self.actions[state] = tuple(actions)
        return self.values[state]

    def get(self, state: Hashable, action: int) -> float:
        row = self.values.get(state)
        return 0.0 if row is None else float(row[action])

    def max_value(self, state: Hashable) -> float:
        row = self.values.get(state)
        return 0.0 if row is None or row.size == 0 else float(row.max())

    def __len__(self) -> int:
        return len(self.values)

    def bounds(self) -> Tuple[float, float]:
        if not self.values:
            return 0.0, 0.0
        stacked = np.concatenate(list(self.values.values()))
        return float(stacked.min()), float(stacked.max())

    def summary(self) -> Dict:
        low, high = self.bounds()
        return {
            "states": len(self.values),
            "pairs": int(sum(row.size for row in self.values.values())),
            "min": low,
            "max": high,
            "mean": float(np.mean(np.concatenate(list(self.values.values())))) if self.values else 0.0,
        }


class CountTables:
    """Visit counts: ``Psi`` per (state, action) starting at 1, ``psi`` per successor starting at 0.

    ``version`` increases whenever the support of the estimated model changes.
    """

    def __init__(self):
        self.Psi: Dict[Tuple[Hashable, int], int] = defaultdict(lambda: 1)
        self.psi: Dict[Tuple[Hashable, int], Dict[Hashable, int]] = defaultdict(dict)
        self.n_actions: Dict[Hashable, int] = {}
        self.version = 0

    def register(self, state: Hashable, n_actions: int) -> None:
        if state not in self.n_actions:
            self.n_actions[state] = n_actions
            self.version += 1

    def total(self, state: Hashable, action: int) -> int:
        return self.Psi.get((state, action), 1)

    def successors(self, state: Hashable, action: int) -> Dict[Hashable, int]:
        return self.psi.get((state, action), {})

    def record_transition(self, state: Hashable, action: int, next_state: Hashable) -> None:
        key = (state, action)
        self.Psi[key] += 1
        row = self.psi[key]
        if next_state not in row:
            self.version += 1
        if self.Psi[key] == 2:
            row[next_state] = 2
        else:
            row[next_state] = row.get(next_state, 0) + 1


def record_transition(counts: CountTables, state: Hashable, action: int, next_state: Hashable) -> CountTables:
    counts.record_transition(state, action, next_state)
    return counts


def select_action(q: QTable, state: Hashable, actions: Sequence[Action], epsilon: float, rng: np.random.Generator) -> int:
    """Index of the chosen action; greedy ties go to the lowest index."""
    row = q.row(state, actions)
    if rng.random() < epsilon:
        return int(rng.integers(len(actions)))
    return int(np.argmax(row))


def q_update(
    q: QTable,
    state: Hashable,
    action: int,
    reward: float,
    next_state: Hashable,
    mu: float,
    gamma: float,
) -> float:
    """One Q-learning update; returns the absolute change of Q(state, action)."""
    row = q.values[state]
    old = row[action]
    row[action] = old + mu * (reward + gamma * q.max_value(next_state) - old)
    return abs(float(row[action] - old))


@dataclass
class EpisodeRecord:
    episode: int
    iterations: int
    reward: float
    terminal: str
    steps: int
    psp0: float
    wall_time: float
    max_q_change: float

    def to_dict(self) -> Dict:
        return asdict(self)


@dataclass
class RunLog:
    records: List[EpisodeRecord] = field(default_factory=list)
    converged_at: Optional[int] = None

    def append(self, record: EpisodeRecord) -> None:
        self.records.append(record)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def converged(self, window: int, tol: float) -> bool:
        if len(self.records) < window or not any(r.max_q_change > 0 for r in self.records):
            return False
        return all(r.max_q_change < tol for r in self.records[-window:])

    def rewards(self) -> np.ndarray:
        return np.array([r.reward for r in self.records])


class TrainingResult(NamedTuple):
    q_table: QTable
    psp: PspTable
    counts: CountTables
    run_log: RunLog


EpisodeCallback = Callable[[EpisodeRecord, PspTable, CountTables], None]


def train(
    env: LabeledEnv,
    ldba: Ldba,
    params: LearnParams,
    seed=None,
    logger=None,
    on_episode: Optional[EpisodeCallback] = None,
) -> TrainingResult:
    logger = logger or get_step_logger()
    rng = np.random.default_rng(seed)
    sinks = find_sinks(ldba) | {REJECT}
    reward_params = params.reward_params()
    schedule = ExplorationSchedule(params.epsilon0, params.decay)

    q = QTable()
    counts = CountTables()
    psp = PspTable(ldba, sinks)
    estimate = ModelEstimate(counts)
    run_log = RunLog()
    start = initial_state(env, ldba)
    collapsed_version = -1

    logger.log_step(
        "TRAIN_START",
        f"env={env.name} automaton={ldba.name} episodes={params.episodes} "
        f"it_threshold={params.it_threshold} mu={params.mu} gamma={params.gamma} seed={seed}",
    )
    for episode in range(params.episodes):
        started = time.perf_counter()
        if counts.version != collapsed_version:
            refresh_collapse(psp, estimate)
            collapsed_version = counts.version

        epsilon = schedule(episode)
        state, frontier = start, initial_frontier(ldba)
        total_reward, first_hit, max_change = 0.0, -1, 0.0
        terminal, iterations = "threshold", params.it_threshold
        for it in range(params.it_threshold):
            if state.aut in sinks:
                terminal, iterations = "sink", it
                break
            actions = available_actions(state, env, ldba)
            counts.register(state, len(actions))
            a = select_action(q, state, actions, epsilon, rng)
            next_state = product_step(state, actions[a], env, ldba, rng)
            counts.record_transition(state, a, next_state)
            reward, frontier = reward_and_update(next_state, frontier, reward_params, ldba, actions[a])
            max_change = max(max_change, q_update(q, state, a, reward, next_state, params.mu, params.gamma))
            avi_update(psp, estimate, state)
            if reward > 0 and first_hit < 0:
                first_hit = it + 1
            total_reward += reward
            state = next_state

        record = EpisodeRecord(
            episode=episode,
            iterations=iterations,
            reward=total_reward,
            terminal=terminal,
            steps=first_hit,
            psp0=psp[start],
            wall_time=time.perf_counter() - started,
            max_q_change=max_change,
        )
        run_log.append(record)
        logger.log_episode(record)
        if on_episode is not None:
            on_episode(record, psp, counts)
        if params.early_stop and run_log.converged(params.convergence_window, params.convergence_tol):
            run_log.converged_at = episode
            logger.log_step("CONVERGED", f"Q stable for {params.convergence_window} episodes at episode {episode}")
            break

    logger.log_step("TRAIN_END", f"{len(run_log)} episodes, {len(q)} states visited, PSP(s0)={psp[start]:.4f}")
    return TrainingResult(q, psp, counts, run_log)


def greedy_policy(q: QTable) -> Policy:
    return Policy({s: (q.actions[s][int(np.argmax(row))],) for s, row in q.values.items() if row.size})


@dataclass
class SatisfactionStats:
    runs: int
    satisfied: int
    mean_steps: Optional[float] = None
    wins: Optional[int] = None

    @property
    def probability(self) -> float:
        return self.satisfied / self.runs

    @property
    def stderr(self) -> float:
        p = self.probability
        return float(np.sqrt(p * (1.0 - p) / self.runs))

    @property
    def win_rate(self) -> Optional[float]:
        return None if self.wins is None else self.wins / self.runs

    def to_dict(self) -> Dict:
        return {
            "runs": self.runs,
            "satisfied": self.satisfied,
            "probability": self.probability,
            "stderr": self.stderr,
            "mean_steps": self.mean_steps,
            "win_rate": self.win_rate,
        }


def evaluate_policy(
    policy: Policy,
    env: LabeledEnv,
    ldba: Ldba,
    n_runs: int = EVAL_RUNS,
    horizon: int = EVAL_HORIZON,
    seed=None,
) -> SatisfactionStats:
    """Monte-Carlo estimate of the satisfaction probability.

    A run counts as satisfying when, after ``horizon`` steps, it is outside
    every sink and has visited every acceptance set during the second half
    of the run.
    """
    if n_runs < 1:
        raise ConfigError("n_eval", f"must be at least 1, got {n_runs}")
    rng = np.random.default_rng(seed)
    sinks = find_sinks(ldba) | {REJECT}
    window_start = horizon // 2
    is_won = getattr(env, "is_won", None)

    satisfied, wins, steps = 0, 0, []
    for _ in range(n_runs):
        state = initial_state(env, ldba)
        seen_late = [False] * ldba.f
        seen_ever = [False] * ldba.f
        reached_at = None
        for t in range(horizon):
            if state.aut in sinks:
                break
            actions = available_actions(state, env, ldba)
            state = product_step(state, policy.act(state, actions, rng), env, ldba, rng)
            for j in ldba.acceptance_indices(state.aut):
                seen_ever[j] = True
                if t + 1 > window_start:
                    seen_late[j] = True
            if reached_at is None and all(seen_ever):
                reached_at = t + 1
        if state.aut not in sinks and all(seen_late):
            satisfied += 1
        if reached_at is not None:
            steps.append(reached_at)
        if is_won is not None and is_won(state.env):
            wins += 1

    return SatisfactionStats(
        runs=n_runs,
        satisfied=satisfied,
        mean_steps=float(np.mean(steps)) if steps else None,
        wins=wins if is_won is not None else None,
    )


class BaselineResult(NamedTuple):
    q_table: QTable
    run_log: RunLog


def train_baseline(
    env: LabeledEnv,
    is_goal: Callable[[Hashable], bool],
    params: LearnParams,
    seed=None,
    logger=None,
) -> BaselineResult:
    """Plain Q-learning on environment states, rewarded only on entering a goal state."""
    logger = logger or get_step_logger()
    rng = np.random.default_rng(seed)
    schedule = ExplorationSchedule(params.epsilon0, params.decay)
    q = QTable()
    run_log = RunLog()
    start = env.reset()

    logger.log_step("BASELINE_START", f"env={env.name} episodes={params.episodes} seed={seed}")
    for episode in range(params.episodes):
        started = time.perf_counter()
        epsilon = schedule(episode)
        state = start
        total_reward, first_hit, max_change = 0.0, -1, 0.0
        terminal, iterations = "threshold", params.it_threshold
        for it in range(params.it_threshold):
            if env.is_terminal(state):
                terminal, iterations = "sink", it
                break
            actions = env.actions(state)
            a = select_action(q, state, actions, epsilon, rng)
            next_state = env.step(state, actions[a], rng)
            reward = params.r_p if is_goal(next_state) and not is_goal(state) else 0.0
            max_change = max(max_change, q_update(q, state, a, reward, next_state, params.mu, params.gamma))
            if reward > 0 and first_hit < 0:
                first_hit = it + 1
            total_reward += reward
            state = next_state

        run_log.append(
            EpisodeRecord(episode, iterations, total_reward, terminal, first_hit, 0.0,
                          time.perf_counter() - started, max_change)
        )
        if params.early_stop and run_log.converged(params.convergence_window, params.convergence_tol):
            run_log.converged_at = episode
            break

    logger.log_step("BASELINE_END", f"{len(run_log)} episodes, {len(q)} states visited")
    return BaselineResult(q, run_log)


def evaluate_win_rate(
    policy: Policy,
    env: LabeledEnv,
    is_goal: Callable[[Hashable], bool],
    n_runs: int = EVAL_RUNS,
    horizon: int = EVAL_HORIZON,
    seed=None,
) -> float:
    """Fraction of runs that reach a goal state within ``horizon`` steps."""
    rng = np.random.default_rng(seed)
    wins = 0
    for _ in range(n_runs):
        state = env.reset()
        for _ in range(horizon):
            if is_goal(state) or env.is_terminal(state):
                break
            actions = env.actions(state)
            picked = policy.choices.get(state) or actions[:1]
            state = env.step(state, picked[0], rng)
        wins += bool(is_goal(state))
    return wins / n_runs

