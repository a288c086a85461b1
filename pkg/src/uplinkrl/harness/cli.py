"""Command-line entry points: run experiments, compare arms, design rewards.

Exit codes: 0 success, 2 configuration or usage problems, 3 backend or
design failures at runtime.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from ..errors import BackendError, ConfigError, DesignError, UplinkError, UsageError
from ..llm import AuditLog
from ..roles import design_reward, generate_probe_samples
from .config import load_config
from .runner import build_backend, build_env, run_experiment
from .summary import compare_dirs, comparison_csv


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uplinkrl",
        description="Train RL agents on the UAV and SAGIN worlds, with "
        "optional model-driven reward design and hyperparameter guidance.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="train one experiment arm across its seeds")
    run.add_argument("--config", required=True, help="experiment JSON file")
    run.add_argument("--seeds", help="comma-separated override, e.g. 0,1,2")
    run.add_argument("--backend", choices=["mock", "http"], help="override backend kind")
    run.add_argument("--out", help="override output directory")

    cmp_ = sub.add_parser("compare", help="final-window comparison of two arms")
    cmp_.add_argument("--a", required=True, help="run directory of arm A")
    cmp_.add_argument("--b", required=True, help="run directory of arm B")
    cmp_.add_argument("--window", type=int, help="final window size in episodes")
    cmp_.add_argument("--metric", default="return", help="row field to compare")
    cmp_.add_argument(
        "--lower-is-better",
        action="store_true",
        help="count wins for the smaller value (e.g. energy)",
    )
    cmp_.add_argument("--csv", help="also write the per-seed table to this path")

    design = sub.add_parser(
        "design-reward", help="run the reward-designer pipeline without training"
    )
    design.add_argument("--config", required=True, help="experiment JSON file")
    design.add_argument("--out", help="directory for the candidate ledger")
    return parser


def _cmd_run(args) -> int:
    config = load_config(args.config)
    updates = {}
    if args.seeds:
        updates["seeds"] = tuple(int(s) for s in args.seeds.split(","))
    if args.backend:
        updates["backend"] = {**config.backend, "kind": args.backend}
    if args.out:
        updates["out_dir"] = args.out
    if updates:
        config = dataclasses.replace(config, **updates)
    results = run_experiment(config)
    for result in results:
        print(
            f"seed {result.seed}: return {result.summary['final_return_mean']:.4f} "
            f"over the last {result.summary['final_window']} episodes -> {result.out_dir}"
        )
    return 0


def _cmd_compare(args) -> int:
    report = compare_dirs(
        args.a,
        args.b,
        args.metric,
        args.window,
        higher_is_better=not args.lower_is_better,
    )
    print(json.dumps(report, indent=2, sort_keys=True))
    if args.csv:
        Path(args.csv).write_text(comparison_csv(report))
        print(f"csv written to {args.csv}", file=sys.stderr)
    return 0


def _cmd_design(args) -> int:
    config = load_config(args.config)
    if config.env != "uav":
        raise ConfigError("reward design is defined for the uav env")
    out = Path(args.out or config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    env = build_env(config)
    backend = build_backend(config)
    audit = AuditLog(out / "audit.jsonl")
    probes = generate_probe_samples(env.feature_ranges(), 64)
    outcome = design_reward(
        backend,
        env.spec.feature_names,
        probes,
        task_description=config.task_description,
        constraints=config.design_constraints,
        audit=audit,
        ledger_path=out / "design_ledger.jsonl",
    )
    print(f"selected candidate {outcome.selected.index}: {outcome.selected.source}")
    print(f"lipschitz estimate {outcome.selected.lipschitz:.6f}")
    print(f"ledger at {out / 'design_ledger.jsonl'}")
    return 0


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "compare":
            return _cmd_compare(args)
        return _cmd_design(args)
    except (ConfigError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (BackendError, DesignError) as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return 3
    except UplinkError as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
