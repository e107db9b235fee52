import argparse
import json
import sys

from lcrl.config import LOG_DIR, LOG_LEVEL
from lcrl.errors import ConfigError, LcrlError, MismatchedFixture, TooLarge
from lcrl.experiment import cmd_automaton, cmd_compare, cmd_oracle, cmd_psp, cmd_train, load_config
from lcrl.logger import StepLogger

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3
EXIT_TOO_LARGE = 4
EXIT_MISMATCH = 5


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Logically-constrained Q-learning experiments")
    parser.add_argument("--log-file", type=str, help="Custom log file name (e.g., my_log.log)")
    parser.add_argument("--log-dir", type=str, default=LOG_DIR, help="Directory to store log files")
    parser.add_argument("--log-level", type=str, default=LOG_LEVEL, help="DEBUG shows one line per episode")
    commands = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("train", "train LCRL and write per-seed artifacts"),
        ("oracle", "solve the explicit product exactly"),
        ("psp", "train, then export interleaved and fixpoint PSP"),
    ):
        sub = commands.add_parser(name, help=help_text)
        sub.add_argument("--config", type=str, help="flat key = value config file")
        sub.add_argument("--fixture", type=str)
        sub.add_argument("--fixture-file", type=str)
        sub.add_argument("--size", type=int)
        sub.add_argument("--ltl", type=str)
        sub.add_argument("--automaton", type=str)
        sub.add_argument("--automaton-file", type=str)
        sub.add_argument("--seed", type=int)
        sub.add_argument("--episodes", type=int)
        sub.add_argument("--it-threshold", type=int)
        sub.add_argument("--gamma", type=float)
        sub.add_argument("--mu", type=float)
        sub.add_argument("--rp", type=float)
        sub.add_argument("--epsilon0", type=float)
        sub.add_argument(
            "--early-stop",
            action="store_true",
            default=None,
            help="stop once Q has been stable for 30 episodes; runlog.csv then has fewer rows than --episodes",
        )
        sub.add_argument("--n-eval", type=int, help="Monte-Carlo runs when evaluating the greedy policy")
        sub.add_argument("--horizon", type=int)
        sub.add_argument("--out", type=str)

    compare = commands.add_parser("compare", help="PSP error series and policy gap against the oracle")
    compare.add_argument("train_dir", type=str, help="a seed directory written by train")
    compare.add_argument("oracle", type=str, help="oracle.json written by oracle")
    compare.add_argument("--out", type=str)

    automaton = commands.add_parser("automaton", help="check or translate an automaton")
    automaton.add_argument("action", choices=("check", "translate"))
    automaton.add_argument("source", type=str, help="builtin name, .ldba file or LTL formula")
    automaton.add_argument("--dot", type=str, help="write a graphviz rendering here")
    return parser


def overrides_from(args) -> dict:
    return {
        "fixture": args.fixture,
        "fixture_file": args.fixture_file,
        "size": args.size,
        "ltl": args.ltl,
        "automaton": args.automaton,
        "automaton_file": args.automaton_file,
        "seeds": (args.seed,) if args.seed is not None else None,
        "episodes": args.episodes,
        "it_threshold": args.it_threshold,
        "gamma": args.gamma,
        "mu": args.mu,
        "rp": args.rp,
        "epsilon0": args.epsilon0,
        "early_stop": args.early_stop,
        "n_eval": args.n_eval,
        "horizon": args.horizon,
        "out": args.out,
    }


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    step_logger = StepLogger(log_dir=args.log_dir, log_file=args.log_file, level=args.log_level)
    step_logger.log_step("MAIN_START", f"command {args.command}")

    try:
        if args.command == "compare":
            result = cmd_compare(args.train_dir, args.oracle, args.out)
            step_logger.log_step(
                "COMPARE",
                f"final max error {result['final_max_error']}, policy gap {result['policy_gap']:.6f}",
            )
        elif args.command == "automaton":
            result = cmd_automaton(args.action, args.source, args.dot)
            if args.action == "translate":
                print(result["text"], end="")
            else:
                print(json.dumps(result["report"], indent=4))
        else:
            config = load_config(args.config, overrides_from(args))
            if args.command == "train":
                for path in cmd_train(config):
                    step_logger.log_step("TRAIN", f"artifacts in {path}")
            elif args.command == "oracle":
                report = cmd_oracle(config)
                step_logger.log_step("ORACLE", f"value at initial state {report['value_at_initial']:.6f}")
            else:
                cmd_psp(config)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except TooLarge as err:
        print(f"too large: {err}", file=sys.stderr)
        return EXIT_TOO_LARGE
    except MismatchedFixture as err:
        print(f"mismatch: {err}", file=sys.stderr)
        return EXIT_MISMATCH
    except (LcrlError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_RUNTIME

    step_logger.log_step("MAIN_END", "Main execution completed")
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
