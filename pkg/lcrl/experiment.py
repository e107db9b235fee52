"""
Experiment pipelines behind the command line: configuration, fixture and
property resolution, and the train / oracle / compare / psp / automaton
commands with their CSV and JSON artifacts.
"""

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .automata import (
    BUILTIN_AUTOMATA,
    Ldba,
    builtin_automaton,
    load_automaton,
    render_automaton,
    save_automaton,
    translate_fragment,
    validate_ldba,
)
from .config import (
    CSV_VERSION_LINE,
    DEFAULT_EPISODES,
    DEFAULT_EPSILON0,
    DEFAULT_GAMMA,
    DEFAULT_IT_THRESHOLD,
    DEFAULT_MU,
    DEFAULT_RP,
    EVAL_HORIZON,
    EVAL_RUNS,
    MAX_ENUMERATED_STATES,
)
from .environments import (
    GridWorld,
    LabeledEnv,
    PacmanGame,
    explicit_mdp,
    five_by_five_fixture,
    load_grid,
    load_maze,
    pacman_fixture,
    region3_fixture,
    region_fixture,
    render_layout,
)
from .errors import ConfigError, MismatchedFixture, UnknownName
from .learner import (
    EpisodeRecord,
    LearnParams,
    TrainingResult,
    evaluate_policy,
    evaluate_win_rate,
    greedy_policy,
    train,
    train_baseline,
)
from .logger import get_step_logger
from .ltl import parse
from .oracle import ExplicitProduct, build_product, chain_analysis, solve
from .product import Policy, initial_state, parse_action
from .psp import ModelEstimate, PspTable, psp_fixed_point, save_psp

FIXTURES = ("region3", "five_by_five", "region1", "region2", "pacman", "pacman_large")

RUNLOG_COLUMNS = ("episode", "iterations", "reward", "terminal", "steps", "psp0")
PROPERTY_KEYS = frozenset({"ltl", "automaton", "automaton_file"})


@dataclass
class ExperimentConfig:
    fixture: Optional[str] = "region3"
    fixture_file: Optional[str] = None
    size: Optional[int] = None
    ltl: Optional[str] = None
    automaton: Optional[str] = None
    automaton_file: Optional[str] = None
    mu: float = DEFAULT_MU
    gamma: float = DEFAULT_GAMMA
    rp: float = DEFAULT_RP
    episodes: int = DEFAULT_EPISODES
    it_threshold: int = DEFAULT_IT_THRESHOLD
    epsilon0: float = DEFAULT_EPSILON0
    tau: Optional[float] = None
    early_stop: bool = False
    seeds: Tuple[int, ...] = (0,)
    out: str = "runs"
    n_eval: int = EVAL_RUNS
    horizon: int = EVAL_HORIZON
    baseline: bool = False

    def validate(self) -> "ExperimentConfig":
        sources = [s for s in (self.ltl, self.automaton, self.automaton_file) if s]
        if len(sources) != 1:
            raise ConfigError("property", "give exactly one of ltl, automaton, automaton_file")
        if not self.fixture and not self.fixture_file:
            raise ConfigError("fixture", "give a fixture name or a fixture_file")
        if not self.seeds:
            raise ConfigError("seeds", "at least one seed is required")
        if self.n_eval < 1:
            raise ConfigError("n_eval", f"must be at least 1, got {self.n_eval}")
        if self.horizon < 1:
            raise ConfigError("horizon", f"must be at least 1, got {self.horizon}")
        self.learn_params()
        return self

    def learn_params(self) -> LearnParams:
        return LearnParams(
            mu=self.mu,
            gamma=self.gamma,
            r_p=self.rp,
            episodes=self.episodes,
            it_threshold=self.it_threshold,
            epsilon0=self.epsilon0,
            tau=self.tau,
            early_stop=self.early_stop,
        )

    def identity(self) -> Dict:
        """What a run was about; compare refuses to mix different identities."""
        return {
            "fixture": self.fixture_file or self.fixture,
            "size": self.size,
            "property": self.ltl or self.automaton or self.automaton_file,
        }


_BOOL_WORDS = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}


def _coerce(name: str, raw: str):
    kinds = {f.name: f for f in fields(ExperimentConfig)}
    if name not in kinds:
        raise ConfigError(name, "unknown configuration key")
    try:
        if name in ("mu", "gamma", "rp", "epsilon0", "tau"):
            return float(raw)
        if name in ("size", "episodes", "it_threshold", "n_eval", "horizon"):
            return int(raw)
        if name == "seeds":
            return tuple(int(s) for s in raw.replace(",", " ").split())
        if name in ("early_stop", "baseline"):
            return _BOOL_WORDS[raw.lower()]
    except (ValueError, KeyError) as err:
        raise ConfigError(name, f"cannot read {raw!r}") from err
    return raw


def parse_config_text(text: str) -> Dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for line_no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("config", f"line {line_no}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        values[key.strip()] = _coerce(key.strip(), value.strip())
    return values


def load_config(path: Optional[Union[str, Path]] = None, overrides: Optional[Dict] = None) -> ExperimentConfig:
    """Defaults, then the config file, then non-None overrides."""
    values = {}
    if path is not None:
        values.update(parse_config_text(Path(path).read_text()))
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    if PROPERTY_KEYS & overrides.keys():
        for key in PROPERTY_KEYS:
            values.pop(key, None)
    values.update(overrides)
    return ExperimentConfig(**values).validate()


def _load_fixture(config: ExperimentConfig) -> LabeledEnv:
    if config.fixture_file:
        path = Path(config.fixture_file)
        text = path.read_text()
        if path.suffix == ".maze":
            return PacmanGame(load_maze(text))
        if path.suffix == ".layout":
            if config.size is None:
                raise ConfigError("size", "layout fixtures need a size")
            return GridWorld(render_layout(text, config.size))
        return GridWorld(load_grid(text))

    name = config.fixture
    if name == "region3":
        return region3_fixture()
    if name == "five_by_five":
        return five_by_five_fixture()
    if name in ("region1", "region2"):
        return region_fixture(name, config.size if config.size is not None else 10)
    if name == "pacman":
        return pacman_fixture("small")
    if name == "pacman_large":
        return pacman_fixture("large")
    raise UnknownName(name, FIXTURES)


def _load_property(config: ExperimentConfig, env: Optional[LabeledEnv]) -> Ldba:
    if config.automaton:
        return builtin_automaton(config.automaton)
    if config.automaton_file:
        automaton = load_automaton(Path(config.automaton_file).read_text())
    else:
        alphabet = getattr(env, "alphabet", None)
        automaton = translate_fragment(parse(config.ltl, alphabet), alphabet, name=config.ltl)
    validate_ldba(automaton)
    return automaton


def resolve_fixture(config: ExperimentConfig) -> LabeledEnv:
    env = _load_fixture(config)
    get_step_logger().log_step("FIXTURE", f"{env.name}: alphabet {', '.join(env.alphabet)}")
    return env


def resolve_property(config: ExperimentConfig, env: Optional[LabeledEnv] = None) -> Ldba:
    automaton = _load_property(config, env)
    get_step_logger().log_step(
        "AUTOMATON", f"{automaton.name or 'unnamed'}: {len(automaton.states)} states, {automaton.f} acceptance sets"
    )
    return automaton


def write_runlog(records: Sequence[EpisodeRecord], path: Path) -> None:
    with open(path, "w", newline="") as f:
        f.write(CSV_VERSION_LINE + "\n")
        writer = csv.writer(f)
        writer.writerow(RUNLOG_COLUMNS)
        for r in records:
            writer.writerow([r.episode, r.iterations, repr(float(r.reward)), r.terminal, r.steps, repr(float(r.psp0))])


def read_csv(path: Path) -> List[Dict[str, str]]:
    with open(path, newline="") as f:
        lines = [line for line in f if not line.startswith("#")]
    return list(csv.DictReader(lines))


def _write_json(payload, path: Path) -> None:
    with open(path, "w") as f:
        json.dump(payload, f, indent=4)


class _PspHistory:
    """Collects the PSP values that changed during each episode."""

    def __init__(self):
        self.rows: List[Tuple[int, str, float]] = []

    def __call__(self, record: EpisodeRecord, psp: PspTable, counts=None) -> None:
        for state in sorted(psp.take_dirty(), key=str):
            self.rows.append((record.episode, str(state), psp[state]))

    def write(self, path: Path) -> None:
        with open(path, "w", newline="") as f:
            f.write(CSV_VERSION_LINE + "\n")
            writer = csv.writer(f)
            writer.writerow(("episode", "state", "value"))
            for episode, state, value in self.rows:
                writer.writerow([episode, state, repr(float(value))])


def run_seed(config: ExperimentConfig, seed: int) -> Path:
    """Train one seed and write its artifacts under ``out/seed_<n>``."""
    logger = get_step_logger()
    env = resolve_fixture(config)
    ldba = resolve_property(config, env)
    params = config.learn_params()
    out = Path(config.out) / f"seed_{seed}"
    out.mkdir(parents=True, exist_ok=True)

    history = _PspHistory()
    result: TrainingResult = train(env, ldba, params, seed=seed, logger=logger, on_episode=history)
    policy = greedy_policy(result.q_table)

    write_runlog(result.run_log.records, out / "runlog.csv")
    history.write(out / "psp_history.csv")
    _write_json(policy.to_dict(), out / "policy.json")
    save_psp(result.psp, out / "psp.json")
    summary = result.q_table.summary()
    summary["bound"] = params.r_p / (1.0 - params.gamma)
    _write_json(summary, out / "q_summary.json")

    stats = evaluate_policy(policy, env, ldba, config.n_eval, config.horizon, seed=seed)
    evaluation = {"lcrl": stats.to_dict()}
    if config.baseline and isinstance(env, PacmanGame):
        baseline = train_baseline(env, env.is_won, params, seed=seed, logger=logger)
        evaluation["baseline_win_rate"] = evaluate_win_rate(
            greedy_policy(baseline.q_table), env, env.is_won, config.n_eval, config.horizon, seed=seed
        )
    _write_json(evaluation, out / "evaluation.json")

    _write_json(
        {
            "identity": config.identity(),
            "config": asdict(config),
            "seed": seed,
            "params": asdict(params),
            "episodes_run": len(result.run_log),
            "converged_at": result.run_log.converged_at,
        },
        out / "run_meta.json",
    )
    logger.log_step("ARTIFACTS", f"seed {seed} written to {out}")
    return out


def cmd_train(config: ExperimentConfig) -> List[Path]:
    seeds = list(config.seeds)
    if len(seeds) == 1:
        return [run_seed(config, seeds[0])]
    with ProcessPoolExecutor() as pool:
        return list(pool.map(run_seed, [config] * len(seeds), seeds))


def _oracle_product(config: ExperimentConfig) -> ExplicitProduct:
    env = resolve_fixture(config)
    ldba = resolve_property(config, env)
    return build_product(explicit_mdp(env, MAX_ENUMERATED_STATES), ldba)


def cmd_oracle(config: ExperimentConfig) -> Dict:
    logger = get_step_logger()
    report = solve(_oracle_product(config), logger=logger)
    payload = report.to_dict()
    payload["identity"] = config.identity()
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(payload, out / "oracle.json")
    return payload


def _load_policy(path: Path, product: ExplicitProduct) -> Policy:
    by_name = {str(s): s for s in product.states}
    raw = json.loads(path.read_text())
    return Policy({by_name[k]: tuple(parse_action(a) for a in acts) for k, acts in raw.items() if k in by_name})


def cmd_compare(train_dir: Union[str, Path], oracle_path: Union[str, Path], out: Optional[Union[str, Path]] = None) -> Dict:
    """Per-episode max PSP error against the oracle plus the greedy policy's exact probability."""
    train_dir, oracle_path = Path(train_dir), Path(oracle_path)
    meta = json.loads((train_dir / "run_meta.json").read_text())
    oracle = json.loads(oracle_path.read_text())
    if meta["identity"] != oracle.get("identity"):
        raise MismatchedFixture(f"training ran {meta['identity']}, oracle solved {oracle.get('identity')}")

    exact = oracle["values"]
    current: Dict[str, float] = {}
    series = []
    by_episode: Dict[int, List[Tuple[str, float]]] = {}
    for row in read_csv(train_dir / "psp_history.csv"):
        by_episode.setdefault(int(row["episode"]), []).append((row["state"], float(row["value"])))
    for episode in range(meta["episodes_run"]):
        for state, value in by_episode.get(episode, ()):
            current[state] = value
        errors = [abs(v - exact[s]) for s, v in current.items() if s in exact]
        series.append({"episode": episode, "max_error": max(errors) if errors else 0.0})

    identity = meta["identity"]
    product = _oracle_product(ExperimentConfig(**meta["config"]))
    chain = chain_analysis(_load_policy(train_dir / "policy.json", product), product)

    result = {
        "identity": identity,
        "oracle_value": oracle["value_at_initial"],
        "policy_probability": chain.probability,
        "policy_gap": oracle["value_at_initial"] - chain.probability,
        "final_max_error": series[-1]["max_error"] if series else None,
        "series": series,
    }
    out = Path(out) if out is not None else train_dir
    out.mkdir(parents=True, exist_ok=True)
    _write_json(result, out / "compare.json")
    with open(out / "compare.csv", "w", newline="") as f:
        f.write(CSV_VERSION_LINE + "\n")
        writer = csv.writer(f)
        writer.writerow(("episode", "max_error"))
        for point in series:
            writer.writerow([point["episode"], repr(float(point["max_error"]))])
    return result


def cmd_psp(config: ExperimentConfig) -> Dict:
    """Train the first seed, then export the interleaved PSP and the fixpoint on the learned model."""
    logger = get_step_logger()
    env = resolve_fixture(config)
    ldba = resolve_property(config, env)
    seed = config.seeds[0]
    result = train(env, ldba, config.learn_params(), seed=seed, logger=logger)
    fixed = psp_fixed_point(ModelEstimate(result.counts), ldba, sinks=result.psp.sinks)

    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    save_psp(result.psp, out / "psp.json")
    save_psp(fixed, out / "psp_fixed.json")
    start = initial_state(env, ldba)
    payload = {
        "identity": config.identity(),
        "seed": seed,
        "interleaved_initial": result.psp[start],
        "fixed_point_initial": fixed[start],
        "states": len(fixed),
    }
    _write_json(payload, out / "psp_summary.json")
    logger.log_step("PSP", f"PSP(s0) interleaved {payload['interleaved_initial']:.4f}, fixpoint {payload['fixed_point_initial']:.4f}")
    return payload


def _automaton_source(source: str) -> Ldba:
    if source in BUILTIN_AUTOMATA:
        return builtin_automaton(source)
    path = Path(source)
    if path.suffix == ".ldba" or path.exists():
        return load_automaton(path.read_text())
    return translate_fragment(parse(source), name=source)


def cmd_automaton(action: str, source: str, dot: Optional[Union[str, Path]] = None) -> Dict:
    """``check`` validates an automaton; ``translate`` turns a formula into the file format."""
    automaton = _automaton_source(source)
    report = validate_ldba(automaton)
    payload = {"automaton": automaton.name, "states": len(automaton.states), "report": report.to_dict()}
    if action == "translate":
        payload["text"] = save_automaton(automaton)
    elif action != "check":
        raise UnknownName(action, ("check", "translate"))
    if dot is not None:
        Path(dot).write_text(render_automaton(automaton).source)
    return payload
