"""MILP formulation of reconfiguration/communication overlap scheduling.

The model minimizes collective completion time (CCT) over per-(step, OCS)
volume shares d, usage/reconfiguration/config-match binaries u/r/s and the
activity timestamps, subject to:

  eq1   volume conservation per step and d <= m_i * u capacity coupling
  eq2   transmission duration te - ts = d * 8 / B
  eq3   reconfiguration duration re - rs = r * T_recfg
  eq4   a transmission waits for its own reconfiguration (ts >= re)
  eq5   transmitting without a matching config forces a reconfiguration
  eq6   the config-match bit s may be 1 only when last_cfg equals the
        step's config (big-M pair on config ids)
  lastcfg  last_cfg recursion: reconfiguring installs the step's config,
        otherwise the previous config carries over (big-M linearized)
  eq7   previous-activity-end starts at zero
  eq8   previous-activity-end chains forward over transmissions and
        reconfigurations of the same OCS
  eq9   a reconfiguration may not start before the OCS finished its
        previous activity (this is what lets reconfigurations overlap
        other OCSes' transmissions of the running step)
  eq10  a step ends no earlier than every used transmission's end
  eq11  cross-step synchronization: transmissions of step i wait for
        step i-1 to end (plus sync latency)
  obj   cct >= every step end; minimize cct

Two big-M scales: the time horizon H bounds every timestamp of any schedule
worth considering (serial everything), while config-id arithmetic uses the
much smaller C + 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .errors import EmptySteps
from .model import BLANK_CONFIG, Scenario, StepPlan

__all__ = [
    "Sense",
    "LinTerm",
    "Constraint",
    "VarDef",
    "VarKind",
    "ModelMeta",
    "ScheduleBounds",
    "MILPModel",
    "schedule_bounds",
    "build_model",
    "assignment_from_schedule",
    "constraint_violations",
    "PAIR_FAMILIES",
]


class Sense(str, Enum):
    LE = "<="
    GE = ">="
    EQ = "="


class VarKind(str, Enum):
    CONTINUOUS = "continuous"
    BINARY = "binary"
    INTEGER = "integer"


@dataclass(frozen=True)
class VarDef:
    name: str
    kind: VarKind
    lb: float = 0.0
    ub: float | None = None  # None = unbounded above


# terms are (variable index, coefficient) pairs
LinTerm = tuple[int, float]


@dataclass(frozen=True)
class Constraint:
    name: str
    tag: str
    terms: tuple[LinTerm, ...]
    sense: Sense
    rhs: float


@dataclass(frozen=True)
class ModelMeta:
    steps: int
    ocs_count: int
    nodes: int
    cfg: tuple[int, ...]  # per-step config id, 1-based ids
    volumes: tuple[float, ...]  # per-step per-node bytes
    pairings: tuple[tuple[int, ...], ...]  # per-step permutation dest arrays
    bandwidth: float
    t_recfg: float
    sync_latency: float
    initial_configs: tuple[int, ...] | None

    @property
    def catalog_size(self) -> int:
        return max(self.cfg)


@dataclass(frozen=True)
class ScheduleBounds:
    """Cheap envelope on any schedule the model should consider."""

    horizon: float  # serial-everything upper bound, also the time big-M
    ideal: float  # bandwidth-only lower bound sum(m_i * 8 / (k * B))


# families indexed per (step, ocs) pair, in variable layout order
PAIR_FAMILIES = ("d", "u", "r", "s", "ts", "te", "rs", "re", "pe", "lc")


@dataclass(frozen=True)
class MILPModel:
    variables: tuple[VarDef, ...]
    constraints: tuple[Constraint, ...]
    objective_var: int  # index of cct, minimized
    big_m: float  # max(horizon, catalog size + 1), satisfies both uses
    horizon: float  # time-dimension big-M
    cfg_big_m: float  # config-arithmetic big-M (C + 1)
    meta: ModelMeta
    _index: dict[str, int] = field(repr=False, default_factory=dict)

    def vid(self, family: str, i: int, j: int | None = None) -> int:
        """Variable index by 1-based step i (and OCS j for pair families)."""
        name = f"{family}_{i}" if j is None else f"{family}_{i}_{j}"
        return self._index[name]

    def by_tag(self, tag: str) -> list[Constraint]:
        return [c for c in self.constraints if c.tag == tag]


def schedule_bounds(scenario: Scenario, steps: list[StepPlan]) -> ScheduleBounds:
    if not steps:
        raise EmptySteps("cannot bound an empty step list")
    k = scenario.ocs_count
    ideal = sum(scenario.transmit_seconds(s.volume) / k for s in steps)
    horizon = (
        ideal
        + len(steps) * scenario.t_recfg
        + len(steps) * scenario.sync_latency
    )
    return ScheduleBounds(horizon=horizon, ideal=ideal)


def build_model(scenario: Scenario, steps: list[StepPlan]) -> MILPModel:
    """Assemble the full MILP for one scenario + step list."""
    if not steps:
        raise EmptySteps("cannot build a model without steps")
    for step in steps:
        if step.cfg is None:
            raise ValueError(f"step {step.index} has no config id stamped")

    I = len(steps)
    J = scenario.ocs_count
    cfg = tuple(step.cfg for step in steps)
    volumes = tuple(step.volume for step in steps)
    C = max(cfg)
    bounds = schedule_bounds(scenario, steps)
    H = bounds.horizon
    Mc = float(C + 1)
    B = scenario.bandwidth
    T = scenario.t_recfg
    sync = scenario.sync_latency
    init = scenario.initial_configs
    if init is not None:
        for j, c in enumerate(init):
            if c != BLANK_CONFIG and not 1 <= c <= C:
                raise ValueError(
                    f"initial config {c} on OCS {j + 1} outside catalog [1, {C}]"
                )

    variables: list[VarDef] = []
    index: dict[str, int] = {}

    def add_var(name: str, kind: VarKind, lb: float = 0.0, ub: float | None = None) -> int:
        index[name] = len(variables)
        variables.append(VarDef(name, kind, lb, ub))
        return index[name]

    for fam in PAIR_FAMILIES:
        for i in range(1, I + 1):
            for j in range(1, J + 1):
                name = f"{fam}_{i}_{j}"
                if fam in ("u", "r", "s"):
                    add_var(name, VarKind.BINARY, 0.0, 1.0)
                elif fam == "lc":
                    if i == 1 and init is not None:
                        pin = float(init[j - 1])
                        add_var(name, VarKind.INTEGER, pin, pin)
                    else:
                        add_var(name, VarKind.INTEGER, 0.0, float(C))
                else:
                    add_var(name, VarKind.CONTINUOUS, 0.0, None)
    for i in range(1, I + 1):
        add_var(f"se_{i}", VarKind.CONTINUOUS, 0.0, None)
    cct = add_var("cct", VarKind.CONTINUOUS, 0.0, None)

    def vid(fam, i, j=None):
        return index[f"{fam}_{i}" if j is None else f"{fam}_{i}_{j}"]

    constraints: list[Constraint] = []
    counters: dict[str, int] = {}

    def add(tag: str, terms: list[LinTerm], sense: Sense, rhs: float):
        counters[tag] = counters.get(tag, 0) + 1
        constraints.append(
            Constraint(f"{tag}_{counters[tag]}", tag, tuple(terms), sense, rhs)
        )

    # eq1: volume conservation, then capacity coupling d <= m * u
    for i in range(1, I + 1):
        add("eq1", [(vid("d", i, j), 1.0) for j in range(1, J + 1)],
            Sense.EQ, volumes[i - 1])
    for i in range(1, I + 1):
        for j in range(1, J + 1):
            add("eq1", [(vid("d", i, j), 1.0), (vid("u", i, j), -volumes[i - 1])],
                Sense.LE, 0.0)

    # eq2: transmission duration
    for i in range(1, I + 1):
        for j in range(1, J + 1):
            add("eq2", [(vid("te", i, j), 1.0), (vid("ts", i, j), -1.0),
                        (vid("d", i, j), -8.0 / B)], Sense.EQ, 0.0)

    # eq3: reconfiguration duration
    for i in range(1, I + 1):
        for j in range(1, J + 1):
            add("eq3", [(vid("re", i, j), 1.0), (vid("rs", i, j), -1.0),
                        (vid("r", i, j), -T)], Sense.EQ, 0.0)

    # eq4: transmit after own reconfiguration
    for i in range(1, I + 1):
        for j in range(1, J + 1):
            add("eq4", [(vid("ts", i, j), 1.0), (vid("re", i, j), -1.0)],
                Sense.GE, 0.0)

    # eq5: use without matching config forces reconfiguration
    for i in range(1, I + 1):
        for j in range(1, J + 1):
            add("eq5", [(vid("r", i, j), 1.0), (vid("u", i, j), -1.0),
                        (vid("s", i, j), 1.0)], Sense.GE, 0.0)

    # eq6: s = 1 only when the held config matches the step's config
    for i in range(1, I + 1):
        for j in range(1, J + 1):
            ci = float(cfg[i - 1])
            add("eq6", [(vid("lc", i, j), -1.0), (vid("s", i, j), Mc)],
                Sense.LE, Mc - ci)
            add("eq6", [(vid("lc", i, j), 1.0), (vid("s", i, j), Mc)],
                Sense.LE, Mc + ci)

    # lastcfg: held-config recursion
    for i in range(1, I):
        for j in range(1, J + 1):
            ci = float(cfg[i - 1])
            nxt, cur, ri = vid("lc", i + 1, j), vid("lc", i, j), vid("r", i, j)
            add("lastcfg", [(nxt, 1.0), (ri, Mc)], Sense.LE, Mc + ci)
            add("lastcfg", [(nxt, -1.0), (ri, Mc)], Sense.LE, Mc - ci)
            add("lastcfg", [(nxt, 1.0), (cur, -1.0), (ri, -Mc)], Sense.LE, 0.0)
            add("lastcfg", [(nxt, -1.0), (cur, 1.0), (ri, -Mc)], Sense.LE, 0.0)

    # eq7: previous-activity-end starts the collective at zero
    for j in range(1, J + 1):
        add("eq7", [(vid("pe", 1, j), 1.0)], Sense.EQ, 0.0)

    # eq8: previous-activity-end chains over the same OCS's activities
    for i in range(2, I + 1):
        for j in range(1, J + 1):
            add("eq8", [(vid("pe", i, j), 1.0), (vid("pe", i - 1, j), -1.0)],
                Sense.GE, 0.0)
            add("eq8", [(vid("pe", i, j), 1.0), (vid("te", i - 1, j), -1.0),
                        (vid("u", i - 1, j), -H)], Sense.GE, -H)
            add("eq8", [(vid("pe", i, j), 1.0), (vid("re", i - 1, j), -1.0),
                        (vid("r", i - 1, j), -H)], Sense.GE, -H)

    # eq9: reconfiguration waits only for the OCS's own previous activity
    for i in range(1, I + 1):
        for j in range(1, J + 1):
            add("eq9", [(vid("rs", i, j), 1.0), (vid("pe", i, j), -1.0)],
                Sense.GE, 0.0)

    # eq10: step end covers every used transmission
    for i in range(1, I + 1):
        for j in range(1, J + 1):
            add("eq10", [(vid("se", i), 1.0), (vid("te", i, j), -1.0),
                         (vid("u", i, j), -H)], Sense.GE, -H)

    # eq11: transmissions wait for the previous step end plus sync latency
    for i in range(2, I + 1):
        for j in range(1, J + 1):
            add("eq11", [(vid("ts", i, j), 1.0), (vid("se", i - 1), -1.0)],
                Sense.GE, sync)

    # obj: cct dominates every step end
    for i in range(1, I + 1):
        add("obj", [(cct, 1.0), (vid("se", i), -1.0)], Sense.GE, 0.0)

    meta = ModelMeta(
        steps=I, ocs_count=J, nodes=scenario.nodes, cfg=cfg, volumes=volumes,
        pairings=tuple(step.pairing.dest for step in steps),
        bandwidth=B, t_recfg=T, sync_latency=sync, initial_configs=init,
    )
    return MILPModel(
        variables=tuple(variables),
        constraints=tuple(constraints),
        objective_var=cct,
        big_m=max(H, Mc),
        horizon=H,
        cfg_big_m=Mc,
        meta=meta,
        _index=index,
    )


def assignment_from_schedule(model: MILPModel, schedule) -> dict[str, float]:
    """Map a concrete Schedule onto the model's variables.

    Useful for checking that the formulation admits schedules known to be
    physically valid.  Unused pairs get their display timestamps replaced
    by the latest of their reconfiguration end and the step barrier, the
    free choice that satisfies the timing rows.
    """
    meta = model.meta
    I, J = meta.steps, meta.ocs_count
    vals: dict[str, float] = {}
    for j in range(1, J + 1):
        lc = float(schedule.init_configs[j - 1])
        pe = 0.0
        for i in range(1, I + 1):
            u = schedule.used[i - 1][j - 1]
            r = schedule.reconf[i - 1][j - 1]
            rs = schedule.t_recfg_s[i - 1][j - 1]
            re = schedule.t_recfg_e[i - 1][j - 1]
            gate = (
                schedule.step_end[i - 2] + meta.sync_latency if i > 1 else 0.0
            )
            if u:
                ts = schedule.t_start[i - 1][j - 1]
                te = schedule.t_end[i - 1][j - 1]
            else:
                ts = te = max(re, gate)
            vals[f"d_{i}_{j}"] = schedule.volume[i - 1][j - 1]
            vals[f"u_{i}_{j}"] = 1.0 if u else 0.0
            vals[f"r_{i}_{j}"] = 1.0 if r else 0.0
            vals[f"s_{i}_{j}"] = 1.0 if lc == float(meta.cfg[i - 1]) else 0.0
            vals[f"lc_{i}_{j}"] = lc
            vals[f"ts_{i}_{j}"] = ts
            vals[f"te_{i}_{j}"] = te
            vals[f"rs_{i}_{j}"] = rs
            vals[f"re_{i}_{j}"] = re
            vals[f"pe_{i}_{j}"] = pe
            if u:
                pe = max(pe, te)
            if r:
                pe = max(pe, re)
                lc = float(meta.cfg[i - 1])
    for i in range(1, I + 1):
        vals[f"se_{i}"] = schedule.step_end[i - 1]
    vals["cct"] = schedule.cct
    return vals


def constraint_violations(
    model: MILPModel, values: dict[str, float], tol: float = 1e-9
) -> list[str]:
    """Names of constraints and bounds an assignment fails to satisfy."""
    bad: list[str] = []
    for v in model.variables:
        x = values[v.name]
        scale = tol * (1.0 + abs(x))
        if x < v.lb - scale or (v.ub is not None and x > v.ub + scale):
            bad.append(f"bounds:{v.name}")
        if v.kind != VarKind.CONTINUOUS and abs(x - round(x)) > scale:
            bad.append(f"integrality:{v.name}")
    for con in model.constraints:
        lhs = 0.0
        scale = abs(con.rhs)
        for vi, coef in con.terms:
            term = coef * values[model.variables[vi].name]
            lhs += term
            scale = max(scale, abs(term))
        slack = tol * (1.0 + scale)
        if con.sense == Sense.EQ and abs(lhs - con.rhs) > slack:
            bad.append(con.name)
        elif con.sense == Sense.LE and lhs > con.rhs + slack:
            bad.append(con.name)
        elif con.sense == Sense.GE and lhs < con.rhs - slack:
            bad.append(con.name)
    return bad
