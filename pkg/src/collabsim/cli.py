"""Command-line entry point: ``collabsim {run,grid,replay,validate,report,generate}``.

Exit codes: 0 clean completion (whatever the task outcome), 2 configuration or
scenario errors, 3 I/O or corrupt-log errors, 4 replay drift.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from collabsim import __version__
from collabsim.harness.grid import GridConfig, format_table, run_grid
from collabsim.harness.logs import DriftDetected, LogCorrupt
from collabsim.harness.replay import replay
from collabsim.harness.report import write_report
from collabsim.harness.runner import EpisodeConfig, EpisodeResult, run_episode
from collabsim.policy.base import ChatBackendConfig, PolicyConfig
from collabsim.world.generate import LAYOUT_NAMES, OBJECT_COUNTS, TASK_NAMES, instance_path, write_instances
from collabsim.world.scenario import load_scenario
from collabsim.world.state import ScenarioInvalid

EXIT_CONFIG, EXIT_IO, EXIT_DRIFT = 2, 3, 4

RESULT_FIELDS = ("scenario", "task", "success", "ps", "ts", "as", "parse_failures", "log")


def _policy_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("policy")
    g.add_argument("--backend", choices=("oracle", "chat"), default="oracle")
    g.add_argument("--endpoint", default=ChatBackendConfig.endpoint, help="chat-completions base URL")
    g.add_argument("--model", default=ChatBackendConfig.model_name)
    g.add_argument("--temperature", type=float, default=ChatBackendConfig.temperature)
    g.add_argument("--timeout", type=float, default=ChatBackendConfig.timeout)
    g.add_argument("--max-retries", type=int, default=ChatBackendConfig.max_retries)
    g.add_argument("--api-key-env", default=ChatBackendConfig.api_key_env,
                   help="environment variable holding the API key")
    a = p.add_argument_group("ablations")
    a.add_argument("--no-feedback", action="store_true", help="drop feedback from prompts")
    a.add_argument("--no-history", action="store_true", help="keep only the latest memory entries")
    a.add_argument("--no-mobile-robot", action="store_true", help="run without the mobile robot")
    p.add_argument("--horizon", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)


def _policy_config(args: argparse.Namespace) -> PolicyConfig:
    chat = None
    if args.backend == "chat":
        chat = ChatBackendConfig(
            endpoint=args.endpoint,
            model_name=args.model,
            temperature=args.temperature,
            timeout=args.timeout,
            max_retries=args.max_retries,
            api_key_env=args.api_key_env,
        )
    return PolicyConfig(args.backend, chat, args.no_feedback, args.no_history)


def _result_row(res: EpisodeResult) -> str:
    vals = (res.scenario_name, res.task_kind, int(res.success), f"{res.partial_success:.4f}",
            res.temporal_steps, res.action_steps, res.parse_failures, res.log_path or "")
    return "\t".join(map(str, vals))


def cmd_run(args: argparse.Namespace) -> int:
    if args.scenario:
        path = Path(args.scenario)
    elif args.task and args.layout and args.objects:
        path = instance_path(args.layout, args.task, args.objects)
    else:
        print("run: give --scenario, or --layout, --task and --objects", file=sys.stderr)
        return EXIT_CONFIG
    log_path = Path(args.out) / f"{path.stem}.jsonl" if args.out else None
    config = EpisodeConfig(
        scenario_path=str(path.resolve()),
        horizon=args.horizon,
        seed=args.seed,
        policy=_policy_config(args),
        ablation_no_mobile_robot=args.no_mobile_robot,
        verbose=args.verbose,
    )
    res = run_episode(config, log_path=log_path).result
    print("\t".join(RESULT_FIELDS))
    print(_result_row(res))
    return 0


def cmd_grid(args: argparse.Namespace) -> int:
    cfg = GridConfig(
        tasks=tuple(args.tasks),
        layouts=tuple(args.layouts),
        object_counts=tuple(args.objects),
        horizon=args.horizon,
        seed=args.seed,
        policy=_policy_config(args),
        ablation_no_mobile_robot=args.no_mobile_robot,
        out_dir=args.out,
        workers=args.workers,
    )
    grid = run_grid(cfg)
    print("\t".join(RESULT_FIELDS + ("error",)))
    for ep in grid.episodes:
        if ep.result is not None:
            print(_result_row(ep.result) + "\t")
        else:
            print("\t".join([Path(ep.scenario_path).stem, ep.task, "", "", "", "", "", "", ep.error or ""]))
    print()
    print(format_table(grid.per_task, args.label))
    return 0


def cmd_replay(args: argparse.Namespace) -> int:
    try:
        res = replay(args.log)
    except DriftDetected as exc:
        print(f"drift detected at step {exc.step}", file=sys.stderr)
        print(f"  logged:   {exc.expected}", file=sys.stderr)
        print(f"  replayed: {exc.got}", file=sys.stderr)
        return EXIT_DRIFT
    print("\t".join(RESULT_FIELDS))
    print(_result_row(res))
    print("replay: no drift", file=sys.stderr)
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    bad = 0
    for p in args.paths:
        try:
            scenario = load_scenario(p)
        except ScenarioInvalid as exc:
            bad += 1
            print(f"INVALID\t{p}\t{exc}")
            continue
        print(f"OK\t{p}\t{scenario.content_hash[:16]}")
    return EXIT_CONFIG if bad else 0


def cmd_report(args: argparse.Namespace) -> int:
    outputs = write_report(args.logs, args.out)
    print(outputs["summary"].read_text(), end="")
    for kind, path in outputs.items():
        print(f"wrote {kind}: {path}", file=sys.stderr)
    return 0


def cmd_generate(args: argparse.Namespace) -> int:
    for path in write_instances(args.out, seed=args.seed):
        print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="collabsim", description="Heterogeneous multi-robot collaboration simulator")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--log-level", default="WARNING", help="python logging level")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a single episode")
    p.add_argument("--scenario", help="scenario JSON file")
    p.add_argument("--layout", choices=LAYOUT_NAMES)
    p.add_argument("--task", choices=TASK_NAMES)
    p.add_argument("--objects", type=int, choices=OBJECT_COUNTS)
    p.add_argument("--out", help="directory for the episode log")
    p.add_argument("--verbose", action="store_true", help="log prompts and model transcripts")
    _policy_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("grid", help="run the layout x object-count grid per task")
    p.add_argument("--tasks", nargs="+", choices=TASK_NAMES, default=list(TASK_NAMES))
    p.add_argument("--layouts", nargs="+", choices=LAYOUT_NAMES, default=list(LAYOUT_NAMES))
    p.add_argument("--objects", nargs="+", type=int, default=list(OBJECT_COUNTS))
    p.add_argument("--out", help="directory for episode logs")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--label", default="oracle", help="row label in the summary table")
    _policy_flags(p)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("replay", help="re-execute a log and check for engine drift")
    p.add_argument("log")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("validate", help="lint scenario files")
    p.add_argument("paths", nargs="+")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("report", help="aggregate logs into CSV tables and a figure")
    p.add_argument("logs", nargs="+", help="log files or directories")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("generate", help="regenerate the shipped scenario instances")
    p.add_argument("--out", help="output directory (default: the packaged instance set)")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, LogCorrupt) as exc:  # LogCorrupt is a ValueError, so it goes first
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ScenarioInvalid, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
