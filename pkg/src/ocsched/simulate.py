"""Discrete-event replay of a Schedule, independent of how it was produced.

The simulator walks each OCS through its reconfiguration and transmission
events in step order and re-derives the physics from the Scenario alone:
ports serve one activity at a time, a transmission needs the port to hold
the step's config, durations follow volume / bandwidth and T_recfg, steps
are separated by the sync barrier, and per-step volumes must add up to the
collective's demand.  Anything a scheduler claims but the replay cannot
reproduce becomes a violation.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DimensionMismatch, EmptySteps
from .model import Scenario, Schedule, StepPlan

__all__ = ["SimReport", "simulate", "config_trace"]

_TIME_TOL = 1e-9  # seconds; event times live around 1e-4
_VOL_REL = 1e-12


@dataclass(frozen=True)
class SimReport:
    """Outcome of a replay: empty violations means the schedule is honest."""

    ok: bool
    cct: float
    violations: tuple[str, ...]
    warnings: tuple[str, ...]

    def __bool__(self) -> bool:
        return self.ok


def _before(a: float, b: float, tol: float) -> bool:
    """True when a is strictly before b beyond tolerance."""
    return a < b - (tol + 1e-12 * max(abs(a), abs(b)))


def simulate(
    scenario: Scenario,
    steps: list[StepPlan],
    schedule: Schedule,
    *,
    tol: float = _TIME_TOL,
) -> SimReport:
    if not steps:
        raise EmptySteps("nothing to replay")
    if schedule.steps != len(steps):
        raise DimensionMismatch(
            f"schedule covers {schedule.steps} steps, plan has {len(steps)}"
        )
    if schedule.ocs_count != scenario.ocs_count:
        raise DimensionMismatch(
            f"schedule spans {schedule.ocs_count} OCSes, "
            f"scenario has {scenario.ocs_count}"
        )

    k = scenario.ocs_count
    bad: list[str] = []
    warn: list[str] = []

    if (
        scenario.initial_configs is not None
        and schedule.init_configs != tuple(scenario.initial_configs)
    ):
        bad.append(
            f"schedule assumes initial configs {schedule.init_configs}, "
            f"scenario pins {tuple(scenario.initial_configs)}"
        )

    # Per-pair arithmetic: durations and volume legality.
    for i, step in enumerate(steps):
        sent = 0.0
        for j in range(k):
            d = schedule.volume[i][j]
            u = schedule.used[i][j]
            r = schedule.reconf[i][j]
            ts, te = schedule.t_start[i][j], schedule.t_end[i][j]
            rs, re = schedule.t_recfg_s[i][j], schedule.t_recfg_e[i][j]
            tag = f"step {step.index} ocs {j + 1}"
            if d < 0:
                bad.append(f"{tag}: negative volume {d}")
                continue
            sent += d
            if not u and d > _VOL_REL * step.volume:
                bad.append(f"{tag}: carries {d:.0f} B without being assigned")
            if u and d == 0:
                warn.append(f"{tag}: assigned but transmits nothing")
            if u:
                want = scenario.transmit_seconds(d)
                if abs((te - ts) - want) > tol + 1e-12 * want:
                    bad.append(
                        f"{tag}: transmission lasts {te - ts:.3e}s, "
                        f"volume needs {want:.3e}s"
                    )
                if _before(ts, 0.0, tol):
                    bad.append(f"{tag}: transmission starts before t=0")
            want_r = scenario.t_recfg if r else 0.0
            if abs((re - rs) - want_r) > tol:
                bad.append(
                    f"{tag}: reconfiguration lasts {re - rs:.3e}s, "
                    f"expected {want_r:.3e}s"
                )
            if r and _before(rs, 0.0, tol):
                bad.append(f"{tag}: reconfiguration starts before t=0")
        if abs(sent - step.volume) > 1e-6 + _VOL_REL * step.volume:
            bad.append(
                f"step {step.index}: OCSes carry {sent:.6f} B, "
                f"collective demands {step.volume:.6f} B"
            )

    # Per-OCS replay: one activity at a time, config must match before use.
    for j in range(k):
        config = schedule.init_configs[j]
        free_at = 0.0
        for i, step in enumerate(steps):
            tag = f"step {step.index} ocs {j + 1}"
            if schedule.reconf[i][j]:
                rs, re = schedule.t_recfg_s[i][j], schedule.t_recfg_e[i][j]
                if _before(rs, free_at, tol):
                    bad.append(
                        f"{tag}: reconfiguration starts at {rs:.3e}s while "
                        f"port busy until {free_at:.3e}s"
                    )
                free_at = max(free_at, re)
                config = step.cfg
            if schedule.used[i][j] and schedule.volume[i][j] > 0:
                ts, te = schedule.t_start[i][j], schedule.t_end[i][j]
                if _before(ts, free_at, tol):
                    bad.append(
                        f"{tag}: transmission starts at {ts:.3e}s while "
                        f"port busy until {free_at:.3e}s"
                    )
                if config != step.cfg:
                    bad.append(
                        f"{tag}: port holds config {config}, "
                        f"step needs config {step.cfg}"
                    )
                free_at = max(free_at, te)

    # Step barrier and completion bookkeeping.
    for i, step in enumerate(steps):
        gate = (
            schedule.step_end[i - 1] + scenario.sync_latency if i > 0 else 0.0
        )
        latest = 0.0
        for j in range(k):
            if schedule.used[i][j] and schedule.volume[i][j] > 0:
                ts, te = schedule.t_start[i][j], schedule.t_end[i][j]
                if _before(ts, gate, tol):
                    bad.append(
                        f"step {step.index} ocs {j + 1}: starts at {ts:.3e}s "
                        f"before the step barrier at {gate:.3e}s"
                    )
                latest = max(latest, te)
        if _before(schedule.step_end[i], latest, tol):
            bad.append(
                f"step {step.index}: recorded end {schedule.step_end[i]:.3e}s "
                f"precedes last transmission at {latest:.3e}s"
            )

    makespan = max(schedule.step_end)
    if _before(schedule.cct, makespan, tol):
        bad.append(
            f"claimed completion {schedule.cct:.3e}s precedes the last "
            f"step end at {makespan:.3e}s"
        )
    elif _before(makespan, schedule.cct, tol):
        warn.append(
            f"claimed completion {schedule.cct:.3e}s overstates the "
            f"replayed makespan {makespan:.3e}s"
        )

    return SimReport(
        ok=not bad,
        cct=makespan,
        violations=tuple(bad),
        warnings=tuple(warn),
    )


def config_trace(
    schedule: Schedule, steps: list[StepPlan]
) -> tuple[tuple[tuple[float, int], ...], ...]:
    """Per-OCS config history as (effective_time, config) pairs.

    The first entry is the initial config at t=0; each reconfiguration
    appends its completion time and new config.
    """
    if schedule.steps != len(steps):
        raise DimensionMismatch(
            f"schedule covers {schedule.steps} steps, plan has {len(steps)}"
        )
    traces = []
    for j in range(schedule.ocs_count):
        hist = [(0.0, schedule.init_configs[j])]
        for i, step in enumerate(steps):
            if schedule.reconf[i][j]:
                hist.append((schedule.t_recfg_e[i][j], step.cfg))
        traces.append(tuple(hist))
    return tuple(traces)
