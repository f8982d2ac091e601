"""Earliest-feasible materialization of (usage, reconfig, volume) decisions.

Every producer of schedules (baselines, heuristic, exact solver extraction)
funnels through build_timeline: given which OCS transmits or reconfigures at
which step and the per-pair byte shares, it lays out all timestamps at their
earliest feasible values.  All timing constraints of the model are lower
bounds, so earliest-fill is always feasible and never increases the makespan.
"""

from __future__ import annotations

from .errors import DimensionMismatch
from .model import BLANK_CONFIG, Scenario, Schedule, StepPlan

__all__ = ["build_timeline"]


def build_timeline(
    scenario: Scenario,
    steps: list[StepPlan],
    used: list[list[bool]],
    reconf: list[list[bool]],
    volumes: list[list[float]],
    init_configs: list[int],
) -> Schedule:
    I = len(steps)
    J = scenario.ocs_count
    if not (len(used) == len(reconf) == len(volumes) == I):
        raise DimensionMismatch("per-step inputs disagree with the step count")
    if len(init_configs) != J:
        raise DimensionMismatch("init_configs length disagrees with OCS count")
    for grid in (used, reconf, volumes):
        if any(len(row) != J for row in grid):
            raise DimensionMismatch("per-pair inputs must be steps x ocs")

    B = scenario.bandwidth
    T = scenario.t_recfg
    sync = scenario.sync_latency

    config = list(init_configs)
    prev_end = [0.0] * J  # end of each OCS's latest activity
    se_prev = 0.0

    ts = [[0.0] * J for _ in range(I)]
    te = [[0.0] * J for _ in range(I)]
    rs = [[0.0] * J for _ in range(I)]
    re = [[0.0] * J for _ in range(I)]
    step_end: list[float] = []

    for i, step in enumerate(steps):
        step_start = se_prev + sync if i else 0.0
        ends = []
        for j in range(J):
            d = volumes[i][j]
            if d < 0:
                raise ValueError(f"negative volume at step {i + 1}, OCS {j + 1}")
            if d > 0 and not used[i][j]:
                raise ValueError(
                    f"volume without usage at step {i + 1}, OCS {j + 1}"
                )
            if reconf[i][j]:
                rs[i][j] = prev_end[j]
                re[i][j] = rs[i][j] + T
                prev_end[j] = re[i][j]
                config[j] = step.cfg
            else:
                rs[i][j] = re[i][j] = prev_end[j]
            if used[i][j]:
                if config[j] != step.cfg:
                    raise ValueError(
                        f"OCS {j + 1} holds config {config[j]} at step {i + 1}, "
                        f"which needs {step.cfg}"
                    )
                ts[i][j] = max(re[i][j], step_start)
                te[i][j] = ts[i][j] + d * 8.0 / B
                prev_end[j] = te[i][j]
                ends.append(te[i][j])
            else:
                ts[i][j] = te[i][j] = step_start
        if not ends:
            raise ValueError(f"step {i + 1} has no OCS assigned")
        se_prev = max(ends)
        step_end.append(se_prev)

    freeze = lambda grid: tuple(tuple(row) for row in grid)
    return Schedule(
        volume=freeze(volumes),
        used=freeze([[bool(x) for x in row] for row in used]),
        reconf=freeze([[bool(x) for x in row] for row in reconf]),
        t_start=freeze(ts),
        t_end=freeze(te),
        t_recfg_s=freeze(rs),
        t_recfg_e=freeze(re),
        step_end=tuple(step_end),
        cct=max(step_end),
        init_configs=tuple(int(c) for c in init_configs),
    )
