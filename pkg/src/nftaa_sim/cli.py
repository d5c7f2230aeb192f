"""Command-line driver.

    nftaa-sim run FILE... [--seed N] [--digest] [--events OUT] [--jobs N]
    nftaa-sim diff FILE... [--seed N] [--verbose]
    nftaa-sim queue --pending N [--missed-prob P] [--simulate] [--seed N] [--trace]

Exit codes: 0 all verdicts passed, 1 any verdict failed, 2 parse error.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .runner import run_differential, run_scenario
from .scenario import ScenarioParseError, parse_scenario
from .staking import QueueConfig, estimate_drain_time, simulate_drain


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nftaa-sim",
                                     description="Deterministic NFT-as-account ledger simulator")
    commands = parser.add_subparsers(dest="command", required=True)

    run_cmd = commands.add_parser("run", help="replay scenario files")
    run_cmd.add_argument("files", nargs="+", type=Path)
    run_cmd.add_argument("--seed", type=int, default=None,
                         help="override the script's seed")
    run_cmd.add_argument("--digest", action="store_true",
                         help="print only the final state digest per file")
    run_cmd.add_argument("--events", type=Path, default=None,
                         help="write the event log here (a directory when "
                              "multiple files are given)")
    run_cmd.add_argument("--jobs", type=int, default=1,
                         help="run scenario files in parallel")

    diff_cmd = commands.add_parser("diff", help="run a scenario under both account styles")
    diff_cmd.add_argument("files", nargs="+", type=Path)
    diff_cmd.add_argument("--seed", type=int, default=None)
    diff_cmd.add_argument("--verbose", action="store_true",
                          help="also print both per-lane reports")

    queue_cmd = commands.add_parser("queue", help="withdrawal queue drain report")
    queue_cmd.add_argument("--pending", type=int, required=True)
    queue_cmd.add_argument("--missed-prob", type=float, default=0.0)
    queue_cmd.add_argument("--simulate", action="store_true",
                           help="run the queue to exhaustion instead of the closed form")
    queue_cmd.add_argument("--seed", type=int, default=0)
    queue_cmd.add_argument("--no-trace", action="store_true",
                           help="with --simulate, print only the summary line")
    return parser


def _run_one(path: Path, seed: int | None, want_digest: bool,
             events_target: Path | None, multiple: bool) -> tuple[str, int]:
    try:
        script = parse_scenario(path.read_text())
    except ScenarioParseError as failure:
        return (f"parse_error file={path} line={failure.line} "
                f"col={failure.column} {failure.message}\n", 2)
    report = run_scenario(script, name=path.stem, seed=seed)
    if events_target is not None:
        out = events_target / f"{path.stem}.events" if multiple else events_target
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text("".join(e.render() + "\n" for e in report.events))
    text = f"{path.stem} {report.final_digest}\n" if want_digest else report.to_text()
    return text, report.exit_code


def _cmd_run(args) -> int:
    multiple = len(args.files) > 1
    if args.events is not None and multiple:
        args.events.mkdir(parents=True, exist_ok=True)
    jobs = [(path, args.seed, args.digest, args.events, multiple)
            for path in args.files]
    if args.jobs > 1 and multiple:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_run_one_star, jobs))
    else:
        results = [_run_one(*job) for job in jobs]
    worst = 0
    for text, code in results:
        sys.stdout.write(text)
        worst = max(worst, code)
    return worst


def _run_one_star(job):
    return _run_one(*job)


def _cmd_diff(args) -> int:
    worst = 0
    for path in args.files:
        try:
            script = parse_scenario(path.read_text())
        except ScenarioParseError as failure:
            sys.stdout.write(f"parse_error file={path} line={failure.line} "
                             f"col={failure.column} {failure.message}\n")
            worst = max(worst, 2)
            continue
        result = run_differential(script, name=path.stem, seed=args.seed)
        sys.stdout.write(result.to_text())
        if args.verbose:
            sys.stdout.write(result.nftaa.to_text())
            sys.stdout.write(result.tba.to_text())
        worst = max(worst, result.exit_code)
    return worst


def _cmd_queue(args) -> int:
    config = QueueConfig(missed_slot_probability=args.missed_prob,
                         rng_seed=args.seed)
    header = (f"mode={'simulate' if args.simulate else 'closed'} "
              f"pending={args.pending} per_block_cap={config.per_block_cap} "
              f"blocks_per_day={config.blocks_per_day} "
              f"missed_prob={config.missed_slot_probability:.3f}")
    print(header)
    if args.simulate:
        trace = simulate_drain(args.pending, config)
        if not args.no_trace:
            sys.stdout.write("".join(f"{line}\n" for line in trace.trace_lines()))
        print(trace.summary_line())
    else:
        print(estimate_drain_time(args.pending, config).summary_line())
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "diff":
        return _cmd_diff(args)
    return _cmd_queue(args)


if __name__ == "__main__":
    sys.exit(main())
