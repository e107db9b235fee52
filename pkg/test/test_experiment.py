import json

import pytest

import main
from lcrl.config import DATA_DIR
from lcrl.errors import ConfigError
from lcrl.experiment import (
    ExperimentConfig,
    cmd_automaton,
    load_config,
    parse_config_text,
    read_csv,
    resolve_property,
)
from lcrl.learner import LearnParams

REGION3_CFG = str(DATA_DIR / "configs" / "region3.cfg")
QUICK = ["--episodes", "8", "--it-threshold", "40", "--n-eval", "20", "--horizon", "20"]


def cli(tmp_path, *args) -> int:
    return main.run(["--log-dir", str(tmp_path / "logs"), *args])


class TestConfig:
    def test_parse(self):
        values = parse_config_text("mu = 0.5   # learning rate\n\nseeds = 1, 2\nearly_stop = no\n")
        assert values == {"mu": 0.5, "seeds": (1, 2), "early_stop": False}

    def test_unknown_key(self):
        with pytest.raises(ConfigError) as err:
            parse_config_text("colour = red")
        assert err.value.field == "colour"

    def test_malformed_line(self):
        with pytest.raises(ConfigError) as err:
            parse_config_text("episodes 20")
        assert err.value.field == "config"

    def test_bad_value(self):
        with pytest.raises(ConfigError) as err:
            parse_config_text("episodes = many")
        assert err.value.field == "episodes"

    def test_override_replaces_the_property(self):
        config = load_config(REGION3_CFG, {"ltl": "F G t", "episodes": 5, "mu": None})
        assert config.automaton is None
        assert config.ltl == "F G t"
        assert config.episodes == 5
        assert config.mu == 0.9

    def test_exactly_one_property(self):
        with pytest.raises(ConfigError) as err:
            ExperimentConfig(ltl="F G t", automaton="fig4_fg_t").validate()
        assert err.value.field == "property"
        with pytest.raises(ConfigError):
            ExperimentConfig().validate()

    def test_learning_parameters_are_checked(self):
        with pytest.raises(ConfigError) as err:
            ExperimentConfig(automaton="fig4_fg_t", mu=1.5).validate()
        assert err.value.field == "mu"

    def test_early_stop_is_opt_in(self):
        assert ExperimentConfig().early_stop is False
        assert LearnParams().early_stop is False
        args = main.build_parser().parse_args(["train", "--config", REGION3_CFG])
        assert main.overrides_from(args)["early_stop"] is None
        args = main.build_parser().parse_args(["train", "--config", REGION3_CFG, "--early-stop"])
        assert load_config(REGION3_CFG, main.overrides_from(args)).early_stop is True

    def test_formula_is_read_over_the_fixture_alphabet(self, region3):
        automaton = resolve_property(ExperimentConfig(ltl="F G t"), region3)
        assert set(automaton.alphabet) == set(region3.alphabet)
        assert automaton.f == 1


class TestCommands:
    def test_train_writes_artifacts(self, tmp_path):
        out = tmp_path / "train"
        assert cli(tmp_path, "train", "--config", REGION3_CFG, "--out", str(out), *QUICK) == 0
        seed_dir = out / "seed_0"
        for name in ("runlog.csv", "psp_history.csv", "policy.json", "psp.json", "q_summary.json",
                     "evaluation.json", "run_meta.json"):
            assert (seed_dir / name).exists(), name
        rows = read_csv(seed_dir / "runlog.csv")
        assert [int(r["episode"]) for r in rows] == list(range(8))
        summary = json.loads((seed_dir / "q_summary.json").read_text())
        assert summary["max"] <= summary["bound"]

    def test_same_seed_same_bytes(self, tmp_path):
        for name in ("a", "b"):
            assert cli(tmp_path, "train", "--config", REGION3_CFG, "--seed", "4", "--out", str(tmp_path / name), *QUICK) == 0
        for artifact in ("runlog.csv", "psp_history.csv", "policy.json"):
            first = (tmp_path / "a" / "seed_4" / artifact).read_bytes()
            assert first == (tmp_path / "b" / "seed_4" / artifact).read_bytes()

    def test_compare_against_oracle(self, tmp_path):
        assert cli(tmp_path, "train", "--config", REGION3_CFG, "--out", str(tmp_path / "train"), *QUICK) == 0
        assert cli(tmp_path, "oracle", "--config", REGION3_CFG, "--out", str(tmp_path / "oracle")) == 0
        oracle = json.loads((tmp_path / "oracle" / "oracle.json").read_text())
        assert oracle["product_states"] <= 27

        seed_dir = tmp_path / "train" / "seed_0"
        assert cli(tmp_path, "compare", str(seed_dir), str(tmp_path / "oracle" / "oracle.json")) == 0
        result = json.loads((seed_dir / "compare.json").read_text())
        assert len(result["series"]) == json.loads((seed_dir / "run_meta.json").read_text())["episodes_run"]
        assert result["policy_gap"] >= -1e-9
        assert all(0.0 <= point["max_error"] <= 1.0 for point in result["series"])
        assert (seed_dir / "compare.csv").exists()

    def test_psp_export(self, tmp_path):
        out = tmp_path / "psp"
        assert cli(tmp_path, "psp", "--config", REGION3_CFG, "--out", str(out), *QUICK) == 0
        summary = json.loads((out / "psp_summary.json").read_text())
        assert 0.0 <= summary["fixed_point_initial"] <= 1.0
        assert (out / "psp_fixed.json").exists()


class TestExitCodes:
    def test_bad_learning_rate(self, tmp_path):
        assert cli(tmp_path, "train", "--config", REGION3_CFG, "--mu", "1.5", "--out", str(tmp_path / "x")) == main.EXIT_CONFIG

    def test_oracle_refuses_the_large_maze(self, tmp_path):
        code = cli(tmp_path, "oracle", "--fixture", "pacman_large", "--automaton", "fig6_pacman", "--out", str(tmp_path))
        assert code == main.EXIT_TOO_LARGE

    def test_mismatched_oracle(self, tmp_path):
        assert cli(tmp_path, "train", "--config", REGION3_CFG, "--out", str(tmp_path / "train"), *QUICK) == 0
        assert cli(
            tmp_path, "oracle", "--fixture", "five_by_five", "--automaton", "fig10_gfa_gfb_gnc",
            "--out", str(tmp_path / "oracle"),
        ) == 0
        code = cli(tmp_path, "compare", str(tmp_path / "train" / "seed_0"), str(tmp_path / "oracle" / "oracle.json"))
        assert code == main.EXIT_MISMATCH

    def test_unknown_fixture(self, tmp_path):
        code = cli(tmp_path, "oracle", "--fixture", "maze9", "--automaton", "fig4_fg_t", "--out", str(tmp_path))
        assert code == main.EXIT_RUNTIME

    def test_missing_config_file(self, tmp_path):
        assert cli(tmp_path, "train", "--config", str(tmp_path / "nope.cfg")) == main.EXIT_RUNTIME


class TestAutomatonCommand:
    def test_check_builtin(self, tmp_path, capsys):
        assert cli(tmp_path, "automaton", "check", "fig4_fg_t") == 0
        report = json.loads(capsys.readouterr().out)
        assert report["f"] == 1
        assert report["partN"] == ["q0"]

    def test_translate_formula(self, tmp_path, capsys):
        dot = tmp_path / "fg_t.dot"
        assert cli(tmp_path, "automaton", "translate", "F G t", "--dot", str(dot)) == 0
        assert "eps:" in capsys.readouterr().out
        assert "digraph" in dot.read_text()

    def test_check_file(self):
        payload = cmd_automaton("check", str(DATA_DIR / "automata" / "gf_a_gf_b.ldba"))
        assert payload["report"]["f"] == 2

    def test_invalid_automaton_file(self, tmp_path):
        bad = tmp_path / "bad.ldba"
        bad.write_text("alphabet: a\nstates: q0\ninitial: q0\npartN: q0\npartD:\nacc: q0\ntrans: q0 -- true --> q0\n")
        assert cli(tmp_path, "automaton", "check", str(bad)) == main.EXIT_RUNTIME
