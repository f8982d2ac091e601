"""Reference scheduling policies the optimizer is measured against.

one_shot_schedule   preconfigure a static partition of the OCSes over the
                    config catalog, never reconfigure mid-collective
strawman_schedule   every OCS follows the step sequence, all of them stopping
                    to reconfigure (synchronously) at each config change
ideal_cct           bandwidth-only lower bound: all OCSes always usable,
                    reconfiguration free; a number, never a schedule
"""

from __future__ import annotations

from itertools import combinations

from .errors import EmptySteps, Infeasible
from .model import Scenario, Schedule, StepPlan
from .timeline import build_timeline

__all__ = [
    "one_shot_schedule",
    "one_shot_allocation",
    "strawman_schedule",
    "ideal_cct",
]

_ENUM_LIMIT = 8  # exhaustive composition search up to this many OCSes/configs


def _compositions(total: int, parts: int):
    """All ways to write total as an ordered sum of `parts` positive ints."""
    for cut in combinations(range(1, total), parts - 1):
        prev = 0
        out = []
        for c in list(cut) + [total]:
            out.append(c - prev)
            prev = c
        yield tuple(out)


def one_shot_allocation(cfg_volumes: list[float], ocs_count: int) -> tuple[int, ...]:
    """OCS counts per config minimizing sum(V_c / n_c), all n_c >= 1.

    Exhaustive over compositions at desk scale, greedy marginal-gain
    allocation beyond (the objective is separable convex, so greedy agrees
    with enumeration; both are kept so the small cases cross-check the
    greedy rule).
    """
    C = len(cfg_volumes)
    if C > ocs_count:
        raise Infeasible(C, ocs_count)
    if ocs_count <= _ENUM_LIMIT and C <= _ENUM_LIMIT:
        best = None
        for comp in _compositions(ocs_count, C):
            cost = sum(v / n for v, n in zip(cfg_volumes, comp))
            if best is None or cost < best[0] - 1e-15:
                best = (cost, comp)
        return best[1]
    alloc = [1] * C
    for _ in range(ocs_count - C):
        gains = [v / n - v / (n + 1) for v, n in zip(cfg_volumes, alloc)]
        winner = max(range(C), key=lambda c: (gains[c], -c))
        alloc[winner] += 1
    return tuple(alloc)


def one_shot_schedule(scenario: Scenario, steps: list[StepPlan]) -> Schedule:
    """Static full pre-configuration baseline.

    Raises Infeasible when the catalog needs more configs than there are
    OCSes.  Initial configs are scheduler-chosen (the baseline preinstalls
    its partition for free); the scenario's explicit initial_configs knob
    models cold starts for the optimizing modes only.
    """
    if not steps:
        raise EmptySteps("no steps to schedule")
    C = max(s.cfg for s in steps)
    k = scenario.ocs_count
    cfg_volumes = [0.0] * C
    for s in steps:
        cfg_volumes[s.cfg - 1] += s.volume
    alloc = one_shot_allocation(cfg_volumes, k)

    owner: list[int] = []  # OCS j -> pinned config id
    for c, n in enumerate(alloc, start=1):
        owner.extend([c] * n)

    I = len(steps)
    used = [[owner[j] == s.cfg for j in range(k)] for s in steps]
    reconf = [[False] * k for _ in range(I)]
    volumes = [
        [s.volume / alloc[s.cfg - 1] if used[i][j] else 0.0 for j in range(k)]
        for i, s in enumerate(steps)
    ]
    return build_timeline(scenario, steps, used, reconf, volumes, owner)


def strawman_schedule(scenario: Scenario, steps: list[StepPlan]) -> Schedule:
    """Stop-and-go baseline: every config change halts all OCSes for T_recfg.

    With free initial configs the first config is preinstalled for free;
    a scenario pinning initial_configs pays an upfront reconfiguration on
    every OCS that does not already hold it (cold start).
    """
    if not steps:
        raise EmptySteps("no steps to schedule")
    I = len(steps)
    k = scenario.ocs_count
    used = [[True] * k for _ in range(I)]
    reconf = [
        [i > 0 and steps[i].cfg != steps[i - 1].cfg] * k for i in range(I)
    ]
    if scenario.initial_configs is None:
        init = [steps[0].cfg] * k
    else:
        init = list(scenario.initial_configs)
        reconf[0] = [init[j] != steps[0].cfg for j in range(k)]
    volumes = [[s.volume / k] * k for s in steps]
    return build_timeline(scenario, steps, used, reconf, volumes, init)


def ideal_cct(scenario: Scenario, steps: list[StepPlan]) -> float:
    """Lower bound with free reconfiguration: sum over steps of m/(k*B)."""
    if not steps:
        raise EmptySteps("no steps to bound")
    return sum(
        scenario.transmit_seconds(s.volume) / scenario.ocs_count for s in steps
    )
