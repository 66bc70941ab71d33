"""The `simulate` command: run experiments, run the pipeline, list experiments.

Exit codes: 0 success, 2 validation error (bad config, unknown experiment),
1 runtime failure.  All configuration flows through flags and the config
file; no environment variables.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from .. import __version__
from ..errors import ConfigError, UsageError, VtmsimError
from .config import ScenarioConfig, load_config
from .experiments import EXPERIMENT_NAMES, run_experiment
from .pipeline import run_pipeline


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simulate",
        description="Deterministic desk-scale simulator of reputation-gated "
        "coalition formation and bandwidth trading for vehicle-twin migration.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment and write its CSV")
    run.add_argument("experiment", help="experiment name (see `simulate list`)")
    run.add_argument("--config", type=Path, help="scenario config file")
    run.add_argument("--seed", type=int, help="override the config seed")
    run.add_argument("--out", type=Path, help="output directory (default: config out_dir)")

    pipe = sub.add_parser("pipeline", help="run the end-to-end migration round")
    pipe.add_argument("--config", type=Path, help="scenario config file")
    pipe.add_argument("--seed", type=int, help="override the config seed")
    pipe.add_argument("--out", type=Path, help="also write pipeline.csv here")

    sub.add_parser("list", help="list experiment names")
    return parser


def _load(args) -> ScenarioConfig:
    config = load_config(args.config) if args.config else ScenarioConfig()
    if args.seed is not None:
        config = dataclasses.replace(config, seed=args.seed)
    return config


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "list":
            for name in EXPERIMENT_NAMES:
                print(name)
            return 0
        if args.command == "run":
            if args.experiment not in EXPERIMENT_NAMES:
                raise ConfigError(
                    f"unknown experiment '{args.experiment}'; "
                    f"choose from {', '.join(EXPERIMENT_NAMES)}"
                )
            config = _load(args)
            result = run_experiment(args.experiment, config)
            out_dir = args.out if args.out else Path(config.out_dir)
            for path in result.write(out_dir):
                print(path)
            return 0
        if args.command == "pipeline":
            config = _load(args)
            result = run_pipeline(config)
            print(f"status: {result.status}")
            for step, detail in result.audit:
                print(f"  {step}: {detail}")
            if result.outcome is not None:
                print(f"price: {result.outcome.price!r}")
                print(f"total_demand: {result.outcome.total_demand()!r}")
                print(f"leader_utility: {result.outcome.leader_utility!r}")
            if args.out:
                out = Path(args.out)
                out.mkdir(parents=True, exist_ok=True)
                target = out / "pipeline.csv"
                target.write_bytes(result.audit_csv(config.seed, __version__).encode("utf-8"))
                print(target)
            return 0
        parser.error(f"unknown command {args.command}")
        return 2
    except (ConfigError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except VtmsimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
