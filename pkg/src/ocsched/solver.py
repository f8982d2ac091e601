"""In-house MILP solving: LP relaxation plumbing, a greedy heuristic,
branch and bound, and a brute-force oracle for small instances.

The combinatorial core of the scheduling model is which OCSes serve which
steps.  Once that is fixed, reconfigurations are implied (an OCS reconfigures
exactly when it arrives at a step whose config differs from the one it
carried, and the move can always be backdated to the end of its previous
activity), and the remaining problem - volume splits and timestamps - is a
plain LP.  Branch and bound therefore branches on per-step service patterns,
bounds nodes with the LP relaxation, and evaluates complete assignments
exactly; the oracle enumerates the same space exhaustively.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import product

from .baselines import one_shot_schedule, strawman_schedule
from .errors import EmptySteps, Infeasible, NumericalBreakdown, TooLarge
from .milp import MILPModel, build_model
from .model import Scenario, Schedule, StepPlan
from .simplex import simplex_solve
from .simulate import simulate
from .timeline import build_timeline

__all__ = [
    "SolverReport",
    "solve_lp",
    "heuristic_schedule",
    "branch_and_bound",
    "brute_force_oracle",
]

_ORACLE_PAIR_LIMIT = 16  # I * J above this makes 2^(I*J) combos hopeless
_STRIP_BYTES = 1e-3  # LP volumes below this are noise, not traffic


@dataclass(frozen=True)
class SolverReport:
    """Outcome of an exact or budgeted search."""

    status: str  # "optimal" (proven) | "heuristic" (best found in budget)
    cct: float
    schedule: Schedule
    lower_bound: float
    nodes: int
    wall_time: float
    source: str  # candidate that produced the final schedule

    @property
    def gap(self) -> float:
        if self.cct <= 0:
            return 0.0
        return max(0.0, (self.cct - self.lower_bound) / self.cct)


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= 1e-9 + 1e-9 * max(abs(a), abs(b))


def step_chain_cuts(
    scenario: Scenario, steps: list[StepPlan]
) -> list[tuple[dict[str, float], str, float]]:
    """Valid inequalities tightening the LP relaxation during search.

    Each step moves its whole volume over at most k OCSes after the
    previous step's barrier, so se_i >= se_{i-1} + sync + m_i*8/(k*B)
    holds for every feasible schedule.  The relaxation needs the hint
    because fractional usage defuses the big-M rows that normally chain
    the steps together.  These rows never enter the exported model.
    """
    k = scenario.ocs_count
    cuts: list[tuple[dict[str, float], str, float]] = []
    for i, step in enumerate(steps, start=1):
        floor = scenario.transmit_seconds(step.volume) / k
        if i == 1:
            cuts.append(({"se_1": 1.0}, ">=", floor))
        else:
            cuts.append((
                {f"se_{i}": 1.0, f"se_{i - 1}": -1.0},
                ">=",
                floor + scenario.sync_latency,
            ))
    return cuts


def solve_lp(
    model: MILPModel,
    fixed: dict[str, float] | None = None,
    extra: list[tuple[dict[str, float], str, float]] | None = None,
) -> tuple[str, float | None, dict[str, float] | None]:
    """Solve the model's LP relaxation with some variables held constant.

    Integrality is dropped; variables named in `fixed` are substituted out.
    `extra` rows ({name: coef}, sense, rhs) are appended, letting callers
    tighten the relaxation without touching the model.  Returns (status,
    objective, values) where values covers every variable, fixed included.
    """
    fixed = dict(fixed) if fixed else {}
    for v in model.variables:
        pinned = v.ub is not None and v.lb == v.ub
        if pinned:
            if v.name in fixed and not _close(fixed[v.name], v.lb):
                return ("infeasible", None, None)
            fixed[v.name] = v.lb

    active = [v for v in model.variables if v.name not in fixed]
    col = {v.name: idx for idx, v in enumerate(active)}
    n = len(active)

    rows: list[list[float]] = []
    senses: list[str] = []
    rhs: list[float] = []
    for con in model.constraints:
        row = [0.0] * n
        r = con.rhs
        structural = False
        for vi, coef in con.terms:
            name = model.variables[vi].name
            if name in fixed:
                r -= coef * fixed[name]
            else:
                row[col[name]] += coef
                structural = True
        if not structural:
            # every variable substituted: the row is a consistency check
            slack = 1e-9 * (1.0 + abs(con.rhs))
            bad = (
                (con.sense == "=" and abs(r) > slack)
                or (con.sense == "<=" and r < -slack)
                or (con.sense == ">=" and r > slack)
            )
            if bad:
                return ("infeasible", None, None)
            continue
        rows.append(row)
        senses.append(con.sense.value)
        rhs.append(r)

    for terms, sense, r in extra or []:
        row = [0.0] * n
        structural = False
        for name, coef in terms.items():
            if name in fixed:
                r -= coef * fixed[name]
            else:
                row[col[name]] += coef
                structural = True
        if not structural:
            continue
        rows.append(row)
        senses.append(sense)
        rhs.append(r)

    for v in active:
        if v.ub is not None:
            row = [0.0] * n
            row[col[v.name]] = 1.0
            rows.append(row)
            senses.append("<=")
            rhs.append(v.ub)
        if v.lb > 0.0:
            row = [0.0] * n
            row[col[v.name]] = 1.0
            rows.append(row)
            senses.append(">=")
            rhs.append(v.lb)

    c = [0.0] * n
    c[col[model.variables[model.objective_var].name]] = 1.0
    res = simplex_solve(c, rows, senses, rhs)
    if res.status != "optimal":
        return (res.status, None, None)
    values = dict(fixed)
    for v, x in zip(active, res.x):
        values[v.name] = float(x)
    return ("optimal", res.objective, values)


# ---------------------------------------------------------------------------
# serving-pattern bookkeeping shared by branch and bound and the oracle


def _initial_configs(scenario: Scenario, steps: list[StepPlan],
                     columns: tuple[tuple[int, ...], ...]) -> list[int]:
    """Initial config per OCS: given ones, else the first served step's."""
    if scenario.initial_configs is not None:
        return list(scenario.initial_configs)
    init = []
    for bits in columns:
        first = next((i for i, b in enumerate(bits) if b), None)
        init.append(steps[first].cfg if first is not None else 0)
    return init


def _derive_reconfigs(steps: list[StepPlan],
                      columns: tuple[tuple[int, ...], ...],
                      init: list[int]) -> list[list[bool]]:
    """Reconfiguration pattern implied by a full service assignment."""
    I = len(steps)
    reconf = [[False] * len(columns) for _ in range(I)]
    for j, bits in enumerate(columns):
        held = init[j]
        for i in range(I):
            if bits[i]:
                if held != steps[i].cfg:
                    reconf[i][j] = True
                    held = steps[i].cfg
    return reconf


def _leaf_fixed(model: MILPModel, steps: list[StepPlan],
                columns: tuple[tuple[int, ...], ...],
                init: list[int]) -> dict[str, float]:
    """Pin every binary and config variable for a complete assignment."""
    reconf = _derive_reconfigs(steps, columns, init)
    fixed: dict[str, float] = {}
    for j, bits in enumerate(columns, start=1):
        held = float(init[j - 1])
        for i, step in enumerate(steps, start=1):
            r = reconf[i - 1][j - 1]
            fixed[f"u_{i}_{j}"] = float(bits[i - 1])
            fixed[f"r_{i}_{j}"] = 1.0 if r else 0.0
            fixed[f"lc_{i}_{j}"] = held
            fixed[f"s_{i}_{j}"] = 1.0 if held == float(step.cfg) else 0.0
            if r:
                held = float(step.cfg)
    return fixed


def _extract_schedule(scenario: Scenario, steps: list[StepPlan],
                      columns: tuple[tuple[int, ...], ...],
                      init: list[int],
                      values: dict[str, float]) -> Schedule:
    """Rebuild the earliest-start schedule from an LP solution's volumes."""
    I, J = len(steps), len(columns)
    reconf = _derive_reconfigs(steps, columns, init)
    used = [[False] * J for _ in range(I)]
    volume = [[0.0] * J for _ in range(I)]
    for i, step in enumerate(steps):
        carriers = []
        for j in range(J):
            if columns[j][i]:
                d = max(0.0, values[f"d_{i + 1}_{j + 1}"])
                if d > _STRIP_BYTES:
                    carriers.append(j)
                    volume[i][j] = d
                    used[i][j] = True
        if not carriers:
            # numerically everything collapsed; give the step to one server
            j = next(j for j in range(J) if columns[j][i])
            carriers = [j]
            volume[i][j] = 0.0
            used[i][j] = True
        top = max(carriers, key=lambda j: volume[i][j])
        volume[i][top] += step.volume - sum(volume[i][j] for j in carriers)
    return build_timeline(scenario, steps, used, reconf, volume, init)


def _columns_sorted(columns: tuple[tuple[int, ...], ...]) -> bool:
    return all(columns[j] >= columns[j + 1] for j in range(len(columns) - 1))


def _symmetric_ocses(scenario: Scenario) -> bool:
    init = scenario.initial_configs
    return init is None or len(set(init)) <= 1


# ---------------------------------------------------------------------------
# greedy heuristic


def _waterfill(starts: list[float], demand_s: float) -> float:
    """Finish time when demand_s seconds of work spread over links that
    become ready at the given times, loading earlier links more."""
    s = sorted(starts)
    total = 0.0
    fill = s[0] + demand_s
    for n, sn in enumerate(s, start=1):
        total += sn
        fill = (total + demand_s) / n
        if n == len(s) or fill <= s[n]:
            break
    return fill


def heuristic_schedule(scenario: Scenario, steps: list[StepPlan]) -> Schedule:
    """Greedy carry/advance scheduling with one step of lookahead.

    At each step, OCSes holding the right config serve it; idle OCSes are
    recruited (reconfiguring from wherever they are) whenever that lowers
    the step's water-filled finish time.  At a config boundary, some servers
    may be released early: they hand their remaining share to the others
    and spend the tail of the step reconfiguring toward the next config, so
    the switch-over hides behind traffic.  Falls back to the synchronized
    stop-and-go plan when greed loses to it.
    """
    if not steps:
        raise EmptySteps("nothing to schedule")
    I, k = len(steps), scenario.ocs_count
    bytes_per_s = scenario.bandwidth / 8.0
    T, sync = scenario.t_recfg, scenario.sync_latency
    cfgs = [s.cfg for s in steps]

    if scenario.initial_configs is not None:
        init = list(scenario.initial_configs)
    else:
        init = [cfgs[0]] * k
    conf = list(init)
    free = [0.0] * k
    used = [[False] * k for _ in range(I)]
    reconf = [[False] * k for _ in range(I)]
    volume = [[0.0] * k for _ in range(I)]
    gate = 0.0

    def est_next(i: int, ready: dict[int, float], free_est: dict[int, float],
                 next_gate: float) -> tuple[float, int]:
        """(finish, recruits) estimate for step i+1 given who is already
        turned toward it (ready) and everyone else's est free time."""
        demand = steps[i + 1].volume / bytes_per_s
        starts = {j: max(t, next_gate) for j, t in ready.items()}
        cand = sorted(
            (max(free_est[j] + T, next_gate), j)
            for j in free_est if j not in ready
        )
        recruits = 0
        if not starts:
            if not cand:
                return (float("inf"), 0)
            s0, j0 = cand.pop(0)
            starts[j0] = s0
            recruits = 1
        while cand:
            fill = _waterfill(list(starts.values()), demand)
            s_j, j = cand[0]
            trial = _waterfill(list(starts.values()) + [s_j], demand)
            if trial < fill - 1e-12:
                starts[j] = s_j
                cand.pop(0)
                recruits += 1
            else:
                break
        return (_waterfill(list(starts.values()), demand), recruits)

    for i in range(I):
        demand = steps[i].volume / bytes_per_s

        # membership and recruiting
        starts: dict[int, float] = {
            j: max(free[j], gate) for j in range(k) if conf[j] == cfgs[i]
        }
        cand = sorted(
            (max(free[j] + T, gate), j)
            for j in range(k) if conf[j] != cfgs[i]
        )
        recruited: list[int] = []
        if not starts:
            s0, j0 = cand.pop(0)
            starts[j0] = s0
            recruited.append(j0)
        while cand:
            fill = _waterfill(list(starts.values()), demand)
            s_j, j = cand[0]
            if _waterfill(list(starts.values()) + [s_j], demand) < fill - 1e-12:
                starts[j] = s_j
                recruited.append(j)
                cand.pop(0)
            else:
                break
        for j in recruited:
            reconf[i][j] = True
            conf[j] = cfgs[i]
            free[j] = free[j] + T  # reconfiguration occupies the port

        # release decision at a config boundary
        released: set[int] = set()
        if i + 1 < I and cfgs[i + 1] != cfgs[i]:
            members = sorted(starts, key=lambda j: (starts[j], j))
            best_score = None
            best_set: set[int] = set()
            for a in range(len(members)):
                rel = set(members[len(members) - a:]) if a else set()
                eff = [
                    starts[j] + (T if j in rel else 0.0) for j in members
                ]
                fill = _waterfill(eff, demand)
                ready = {}
                free_est = {}
                for j in range(k):
                    if j in rel:
                        carry = max(fill - T - starts[j], 0.0)
                        if carry > 0.0:
                            ready[j] = starts[j] + carry + T
                        else:  # never starts: reconfigure from its free time
                            ready[j] = free[j] + T
                    elif j in starts:
                        free_est[j] = max(fill, starts[j])
                    else:
                        free_est[j] = free[j]
                        if conf[j] == cfgs[i + 1]:
                            ready[j] = free[j]
                nxt, recruits = est_next(i, ready, free_est, fill + sync)
                score = (nxt, a + recruits, fill, a)
                if best_score is None or score < best_score:
                    best_score = score
                    best_set = rel
            released = best_set

        # final water fill with released members serving shortened shares
        eff = {
            j: starts[j] + (T if j in released else 0.0) for j in starts
        }
        fill = _waterfill(list(eff.values()), demand)
        carriers = []
        step_end = 0.0
        for j, s_j in eff.items():
            span = max(fill - s_j, 0.0)
            if span <= 0.0:
                if j in released:  # never started: back-dated reconfigure
                    reconf[i + 1][j] = True
                    conf[j] = cfgs[i + 1]
                    free[j] = free[j] + T
                continue
            d = span * bytes_per_s
            volume[i][j] = d
            used[i][j] = True
            carriers.append(j)
            te = starts[j] + span
            step_end = max(step_end, te)
            if j in released:
                reconf[i + 1][j] = True
                conf[j] = cfgs[i + 1]
                free[j] = te + T
            else:
                free[j] = te
        top = max(carriers, key=lambda j: volume[i][j])
        volume[i][top] += steps[i].volume - sum(volume[i][j] for j in carriers)
        gate = step_end + sync

    greedy = build_timeline(scenario, steps, used, reconf, volume, init)
    synced = strawman_schedule(scenario, steps)
    return greedy if greedy.cct <= synced.cct else synced


# ---------------------------------------------------------------------------
# branch and bound


def _prefix_bound(scenario: Scenario, steps: list[StepPlan],
                  durations: list[float],
                  columns: tuple[tuple[int, ...], ...], depth: int) -> float:
    """Cheap combinatorial lower bound for a partial service assignment.

    Serial view: each step takes its volume over however many servers it
    has (k for undecided steps), separated by sync barriers.  Average view:
    all transmission plus the reconfigurations already implied by the
    prefix, spread perfectly over k OCSes.
    """
    k = scenario.ocs_count
    serial = (len(steps) - 1) * scenario.sync_latency
    for i in range(len(steps)):
        if i < depth:
            serial += durations[i] / sum(col[i] for col in columns)
        else:
            serial += durations[i] / k
    prefix = tuple(col[:depth] for col in columns)
    init = _initial_configs(scenario, steps, prefix)
    reconf = _derive_reconfigs(steps[:depth], prefix, init)
    total_r = sum(sum(row) for row in reconf)
    average = (sum(durations) + scenario.t_recfg * total_r) / k
    return max(serial, average)


def _seed_candidates(scenario, steps) -> list[tuple[str, Schedule]]:
    seeds = [("greedy", heuristic_schedule(scenario, steps))]
    seeds.append(("stop-and-go", strawman_schedule(scenario, steps)))
    if scenario.initial_configs is None:
        try:
            seeds.append(("static", one_shot_schedule(scenario, steps)))
        except Infeasible:
            pass
    return seeds


def branch_and_bound(
    scenario: Scenario,
    steps: list[StepPlan],
    *,
    time_budget: float = 90.0,
) -> SolverReport:
    """Exact search over per-step service patterns with LP bounding.

    Returns a proven optimum when the tree is exhausted within the budget,
    otherwise the best incumbent with status "heuristic".
    """
    if not steps:
        raise EmptySteps("nothing to solve")
    t0 = time.monotonic()
    model = build_model(scenario, steps)
    I, k = len(steps), scenario.ocs_count

    inc_cct = float("inf")
    inc_sched: Schedule | None = None
    inc_src = ""
    for src, sched in _seed_candidates(scenario, steps):
        if simulate(scenario, steps, sched).ok and sched.cct < inc_cct:
            inc_cct, inc_sched, inc_src = sched.cct, sched, src
    if inc_sched is None:
        raise NumericalBreakdown("no valid seed schedule was produced")

    cuts = step_chain_cuts(scenario, steps)
    durations = [scenario.transmit_seconds(s.volume) for s in steps]
    status, root_bound, _ = solve_lp(model, {}, cuts)
    if status != "optimal":
        raise NumericalBreakdown(f"root relaxation came back {status}")

    symmetric = _symmetric_ocses(scenario)
    patterns = [
        tuple((p >> j) & 1 for j in range(k)) for p in range(1, 1 << k)
    ]
    patterns.sort(key=lambda bits: (-sum(bits), bits))

    def cutoff() -> float:
        return inc_cct - (1e-12 + 1e-9 * inc_cct)

    # stack entries: (depth, columns so far, inherited bound)
    stack: list[tuple[int, tuple[tuple[int, ...], ...], float]] = [
        (0, tuple(() for _ in range(k)), root_bound)
    ]
    nodes = 0
    proven = True
    open_bounds: list[float] = []

    while stack:
        if time.monotonic() - t0 > time_budget:
            proven = False
            open_bounds.extend(entry[2] for entry in stack)
            break
        depth, columns, inherited = stack.pop()
        if inherited >= cutoff():
            continue
        nodes += 1

        if depth == I:
            init = _initial_configs(scenario, steps, columns)
            fixed = _leaf_fixed(model, steps, columns, init)
            status, obj, values = solve_lp(model, fixed)
            if status != "optimal":
                continue
            sched = _extract_schedule(scenario, steps, columns, init, values)
            if sched.cct < inc_cct and simulate(scenario, steps, sched).ok:
                inc_cct, inc_sched, inc_src = sched.cct, sched, "search"
            continue

        comb = _prefix_bound(scenario, steps, durations, columns, depth)
        if comb >= cutoff():
            continue
        fixed = {}
        for j, bits in enumerate(columns, start=1):
            for i, b in enumerate(bits, start=1):
                fixed[f"u_{i}_{j}"] = float(b)
        status, bound, _ = solve_lp(model, fixed, cuts)
        if status != "optimal":
            continue
        bound = max(bound, comb)
        if bound >= cutoff():
            continue

        kids = []
        for bits in patterns:
            child = tuple(columns[j] + (bits[j],) for j in range(k))
            if symmetric and not _columns_sorted(child):
                continue
            kids.append((depth + 1, child, bound))
        # LIFO stack: reversed so the more-parallel patterns pop first
        stack.extend(reversed(kids))

    if proven:
        lower = inc_cct
    else:
        lower = min(open_bounds + [inc_cct]) if open_bounds else inc_cct
    return SolverReport(
        status="optimal" if proven else "heuristic",
        cct=inc_cct,
        schedule=inc_sched,
        lower_bound=min(lower, inc_cct),
        nodes=nodes,
        wall_time=time.monotonic() - t0,
        source=inc_src,
    )


# ---------------------------------------------------------------------------
# brute-force oracle


def brute_force_oracle(scenario: Scenario, steps: list[StepPlan]) -> SolverReport:
    """Exhaustive enumeration of service assignments, for small instances.

    Every OCS independently picks a subset of steps to serve; assignments
    leaving a step unserved are skipped, cheap lower bounds prune hopeless
    ones, and survivors are evaluated exactly by the residual LP.
    """
    if not steps:
        raise EmptySteps("nothing to solve")
    I, k = len(steps), scenario.ocs_count
    if I * k > _ORACLE_PAIR_LIMIT:
        raise TooLarge(
            f"brute force handles at most {_ORACLE_PAIR_LIMIT} "
            f"step-OCS pairs, got {I * k}"
        )
    t0 = time.monotonic()
    model = build_model(scenario, steps)
    durations = [scenario.transmit_seconds(s.volume) for s in steps]
    T, sync = scenario.t_recfg, scenario.sync_latency
    symmetric = _symmetric_ocses(scenario)

    best_cct = float("inf")
    best: tuple[tuple[tuple[int, ...], ...], list[int], dict] | None = None
    evaluated = 0

    masks = list(range(1 << I))
    for combo in product(masks, repeat=k):
        if symmetric and any(combo[j] < combo[j + 1] for j in range(k - 1)):
            continue
        columns = tuple(
            tuple((m >> i) & 1 for i in range(I)) for m in combo
        )
        servers = [sum(col[i] for col in columns) for i in range(I)]
        if any(n == 0 for n in servers):
            continue
        init = _initial_configs(scenario, steps, columns)
        reconf = _derive_reconfigs(steps, columns, init)
        total_r = sum(sum(row) for row in reconf)
        serial = sum(d / n for d, n in zip(durations, servers))
        serial += (I - 1) * sync
        average = (sum(durations) + T * total_r) / k
        if max(serial, average) >= best_cct - 1e-12:
            continue
        fixed = _leaf_fixed(model, steps, columns, init)
        status, obj, values = solve_lp(model, fixed)
        evaluated += 1
        if status != "optimal":
            continue
        if obj < best_cct - 1e-12:
            best_cct = obj
            best = (columns, init, values)

    if best is None:
        raise NumericalBreakdown("no service assignment evaluated feasibly")
    columns, init, values = best
    sched = _extract_schedule(scenario, steps, columns, init, values)
    report = simulate(scenario, steps, sched)
    if not report.ok:
        raise NumericalBreakdown(
            "oracle schedule failed replay: " + "; ".join(report.violations[:3])
        )
    return SolverReport(
        status="optimal",
        cct=sched.cct,
        schedule=sched,
        lower_bound=sched.cct,
        nodes=evaluated,
        wall_time=time.monotonic() - t0,
        source="oracle",
    )
