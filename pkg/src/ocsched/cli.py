"""Command-line harness: scenario files in, schedules and reports out.

Subcommands:
  solve       solve one scenario file, print a summary, optionally write
              the schedule bundle
  sweep       run a grid of (algorithm x nodes x size x mode) points and
              write one CSV row per point in deterministic grid order
  export-lp   write the scenario's MILP in LP format
  simulate    replay a schedule bundle and report violations

Exit codes: 0 success, 2 infeasible (domain outcome), 1 input error.
Reporting units are microseconds and decimal megabytes throughout.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from .baselines import ideal_cct, one_shot_schedule, strawman_schedule
from .bundle import export_schedule_bundle, parse_bundle
from .collectives import ALGORITHMS, CollectiveSpec, generate_steps
from .errors import Infeasible, ParseError, SchedulingError
from .lpfile import export_lp
from .milp import build_model
from .model import Scenario, Schedule, StepPlan
from .scenario_io import MODES, load_scenario
from .simulate import simulate
from .solver import branch_and_bound, brute_force_oracle, heuristic_schedule

__all__ = ["main", "CSV_HEADER"]

CSV_HEADER = "scenario,algorithm,nodes,ocs,size_mb,mode,cct_us,reconfigs,status,wall_s"

_US = 1e6


def _run_mode(
    scenario: Scenario,
    steps: list[StepPlan],
    mode: str,
    time_budget: float,
) -> tuple[Scenario, Schedule | None, float, int, str]:
    """Produce (effective scenario, schedule, cct seconds, reconfigs, status).

    The one-shot baseline preinstalls its static partition by definition, so
    it runs against a free-init view of the scenario even when the scenario
    pins initial configs for the optimizing modes.
    """
    if mode == "oneshot":
        free = dataclasses.replace(scenario, initial_configs=None)
        sched = one_shot_schedule(free, steps)
        return free, sched, sched.cct, sched.reconfig_count, "ok"
    if mode == "strawman":
        sched = strawman_schedule(scenario, steps)
        return scenario, sched, sched.cct, sched.reconfig_count, "ok"
    if mode == "ideal":
        return scenario, None, ideal_cct(scenario, steps), 0, "ok"
    if mode == "swot-heuristic":
        sched = heuristic_schedule(scenario, steps)
        return scenario, sched, sched.cct, sched.reconfig_count, "heuristic"
    if mode == "swot-exact":
        report = branch_and_bound(scenario, steps, time_budget=time_budget)
        sched = report.schedule
        return scenario, sched, report.cct, sched.reconfig_count, report.status
    if mode == "oracle":
        report = brute_force_oracle(scenario, steps)
        sched = report.schedule
        return scenario, sched, report.cct, sched.reconfig_count, report.status
    raise ParseError(f"unknown mode {mode!r}")


def _infeasible_text(exc: Infeasible) -> str:
    return f"{exc.configs} configs > {exc.ocs_count} OCSes"


def cmd_solve(args) -> int:
    sf = load_scenario(args.scenario)
    mode = args.mode or sf.mode
    budget = args.time_budget if args.time_budget is not None else sf.time_budget
    steps, _ = generate_steps(
        CollectiveSpec(sf.algorithm, sf.scenario.nodes, sf.size)
    )
    try:
        scenario, sched, cct, reconfigs, status = _run_mode(
            sf.scenario, steps, mode, budget
        )
    except Infeasible as exc:
        print(f"Infeasible: {_infeasible_text(exc)}")
        return 2
    print(
        f"cct_us={cct * _US:.3f} reconfig_count={reconfigs} "
        f"mode={mode} status={status}"
    )
    if args.out:
        if sched is None:
            print(
                f"mode {mode} produces a bound, not a schedule; "
                "nothing to export",
                file=sys.stderr,
            )
            return 1
        text = export_schedule_bundle(
            scenario, steps, sched,
            algorithm=sf.algorithm, size_mb=sf.size_mb,
        )
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    return 0


def _sweep_worker(task) -> list[str]:
    index, algo, p, size_mb, mode, ocs, bw_gbps, t_us, sync_us, budget = task
    label = f"{algo}-p{p}-{size_mb:g}MB"
    base = [label, algo, str(p), str(ocs), f"{size_mb:g}", mode]
    start = time.monotonic()
    try:
        scenario = Scenario(
            nodes=p, ocs_count=ocs, bandwidth=bw_gbps * 1e9,
            t_recfg=t_us / 1e6, sync_latency=sync_us / 1e6,
        )
        steps, _ = generate_steps(CollectiveSpec(algo, p, size_mb * 1e6))
        _, _, cct, reconfigs, status = _run_mode(scenario, steps, mode, budget)
        row = base + [f"{cct * _US:.6f}", str(reconfigs), status]
    except Infeasible as exc:
        row = base + ["", "", f"infeasible: {_infeasible_text(exc)}"]
    except SchedulingError as exc:
        row = base + ["", "", f"error: {exc}"]
    row.append(f"{time.monotonic() - start:.3f}")
    return row


def _split_list(raw: str, kind, flag: str) -> list:
    out = []
    for part in raw.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            out.append(kind(part))
        except ValueError:
            raise ParseError(f"{flag}: cannot parse {part!r}") from None
    return out


def cmd_sweep(args) -> int:
    algorithms = _split_list(args.algorithms, str, "--algorithms")
    for algo in algorithms:
        if algo not in ALGORITHMS:
            raise ParseError(
                f"--algorithms: unknown algorithm {algo!r}, expected "
                f"one of {', '.join(ALGORITHMS)}"
            )
    sizes = _split_list(args.sizes_mb, float, "--sizes-mb")
    nodes = _split_list(args.nodes, int, "--nodes")
    modes = _split_list(args.modes, str, "--modes")
    for mode in modes:
        if mode not in MODES:
            raise ParseError(
                f"--modes: unknown mode {mode!r}, expected one of "
                f"{', '.join(MODES)}"
            )

    tasks = []
    for algo in algorithms:
        for p in nodes:
            for size in sizes:
                for mode in modes:
                    tasks.append((
                        len(tasks), algo, p, size, mode, args.ocs,
                        args.bandwidth_gbps, args.t_recfg_us,
                        args.sync_latency_us, args.time_budget,
                    ))
    if not tasks:
        print("sweep grid is empty", file=sys.stderr)
        return 1

    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_sweep_worker, tasks))
    else:
        rows = [_sweep_worker(task) for task in tasks]

    with open(args.out, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(CSV_HEADER.split(","))
        writer.writerows(rows)

    successful = sum(1 for row in rows if row[6] != "")
    print(f"wrote {len(rows)} rows ({successful} solved) to {args.out}")
    return 0 if successful else 1


def cmd_export_lp(args) -> int:
    sf = load_scenario(args.scenario)
    steps, _ = generate_steps(
        CollectiveSpec(sf.algorithm, sf.scenario.nodes, sf.size)
    )
    text = export_lp(build_model(sf.scenario, steps))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_simulate(args) -> int:
    try:
        with open(args.bundle, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ParseError(f"cannot read bundle {args.bundle}: {exc}") from None
    scenario, steps, schedule, _ = parse_bundle(text)
    report = simulate(scenario, steps, schedule)
    for violation in report.violations:
        print(f"violation: {violation}")
    for warning in report.warnings:
        print(f"warning: {warning}")
    if report.ok:
        print(
            f"valid cct_us={report.cct * _US:.3f} "
            f"reconfig_count={schedule.reconfig_count}"
        )
        return 0
    print(f"invalid: {len(report.violations)} violations")
    return 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ocsched",
        description=(
            "Schedule collective-communication steps over reconfigurable "
            "optical circuit switches."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve one scenario file")
    solve.add_argument("scenario", help="path to a scenario file")
    solve.add_argument("--mode", choices=MODES,
                       help="override the scenario file's solve mode")
    solve.add_argument("--out", help="write the schedule bundle here")
    solve.add_argument("--time-budget", type=float,
                       help="search budget in seconds (swot-exact)")
    solve.set_defaults(func=cmd_solve)

    sweep = sub.add_parser("sweep", help="run an experiment grid to CSV")
    sweep.add_argument("--algorithms", required=True,
                       help="comma-separated collective algorithms")
    sweep.add_argument("--sizes-mb", required=True,
                       help="comma-separated per-node sizes in MB")
    sweep.add_argument("--nodes", required=True,
                       help="comma-separated node counts")
    sweep.add_argument("--modes", required=True,
                       help="comma-separated solve modes")
    sweep.add_argument("--ocs", type=int, default=4)
    sweep.add_argument("--bandwidth-gbps", type=float, default=200.0)
    sweep.add_argument("--t-recfg-us", type=float, default=200.0)
    sweep.add_argument("--sync-latency-us", type=float, default=0.0)
    sweep.add_argument("--time-budget", type=float, default=90.0,
                       help="per-point search budget in seconds")
    sweep.add_argument("--jobs", type=int, default=1,
                       help="parallel grid points")
    sweep.add_argument("--out", required=True, help="CSV output path")
    sweep.set_defaults(func=cmd_sweep)

    explp = sub.add_parser("export-lp", help="export the scenario's MILP")
    explp.add_argument("scenario", help="path to a scenario file")
    explp.add_argument("--out", help="LP file path (default stdout)")
    explp.set_defaults(func=cmd_export_lp)

    sim = sub.add_parser("simulate", help="replay and validate a bundle")
    sim.add_argument("bundle", help="path to a schedule bundle")
    sim.set_defaults(func=cmd_simulate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Infeasible as exc:
        print(f"Infeasible: {_infeasible_text(exc)}")
        return 2
    except SchedulingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
