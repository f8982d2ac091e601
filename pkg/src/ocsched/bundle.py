"""Schedule bundles: the installable artifact of a solved scenario.

A bundle is a JSON document carrying everything the fabric side needs:
per-OCS reconfiguration timelines (explicit target permutations), the
per-node per-step transmission plan, a scenario echo, and schema_version.
Only schedules with zero simulator violations may be exported; parse_bundle
reverses the mapping so a bundle can be replayed and re-validated without
the original solve inputs.

Times are microseconds and sizes bytes in the file, matching the reporting
conventions; keys serialize sorted so identical schedules produce identical
bytes.
"""

from __future__ import annotations

import json

from .errors import ParseError, RefusesInvalid
from .model import BLANK_CONFIG, Scenario, Schedule, StepPlan, make_permutation
from .simulate import simulate

__all__ = [
    "SCHEMA_VERSION",
    "build_bundle",
    "export_schedule_bundle",
    "parse_bundle",
]

SCHEMA_VERSION = 1

_US = 1e6  # seconds -> microseconds


def _scenario_echo(scenario: Scenario) -> dict:
    return {
        "nodes": scenario.nodes,
        "ocs_count": scenario.ocs_count,
        "bandwidth_gbps": scenario.bandwidth / 1e9,
        "t_recfg_us": scenario.t_recfg * _US,
        "sync_latency_us": scenario.sync_latency * _US,
        "initial_configs": (
            "free" if scenario.initial_configs is None
            else list(scenario.initial_configs)
        ),
    }


def build_bundle(
    scenario: Scenario,
    steps: list[StepPlan],
    schedule: Schedule,
    *,
    algorithm: str | None = None,
    size_mb: float | None = None,
) -> dict:
    """Assemble the bundle document for a schedule already known valid."""
    perm_of = {step.cfg: list(step.pairing.dest) for step in steps}
    timelines = []
    for j in range(schedule.ocs_count):
        init_id = schedule.init_configs[j]
        events = []
        for i, step in enumerate(steps):
            if schedule.reconf[i][j]:
                events.append({
                    "step": step.index,
                    "start_us": schedule.t_recfg_s[i][j] * _US,
                    "end_us": schedule.t_recfg_e[i][j] * _US,
                    "config_id": step.cfg,
                    "config": perm_of[step.cfg],
                })
        timelines.append({
            "ocs": j + 1,
            "initial_config_id": init_id,
            "initial_config": (
                None if init_id == BLANK_CONFIG else perm_of.get(init_id)
            ),
            "events": events,
        })

    transmissions = []
    for i, step in enumerate(steps):
        for node in range(scenario.nodes):
            for j in range(schedule.ocs_count):
                if schedule.used[i][j] and schedule.volume[i][j] > 0:
                    transmissions.append({
                        "step": step.index,
                        "node": node,
                        "peer": step.pairing(node),
                        "ocs": j + 1,
                        "bytes": schedule.volume[i][j],
                        "start_us": schedule.t_start[i][j] * _US,
                        "end_us": schedule.t_end[i][j] * _US,
                    })

    bundle = {
        "schema_version": SCHEMA_VERSION,
        "scenario": _scenario_echo(scenario),
        "cct_us": schedule.cct * _US,
        "reconfig_count": schedule.reconfig_count,
        "step_end_us": [t * _US for t in schedule.step_end],
        "ocs_timelines": timelines,
        "transmissions": transmissions,
    }
    if algorithm is not None:
        bundle["collective"] = {
            "algorithm": algorithm,
            "size_mb": size_mb,
        }
    return bundle


def export_schedule_bundle(
    scenario: Scenario,
    steps: list[StepPlan],
    schedule: Schedule,
    *,
    algorithm: str | None = None,
    size_mb: float | None = None,
) -> str:
    """Serialize a schedule to bundle JSON, refusing invalid schedules."""
    report = simulate(scenario, steps, schedule)
    if not report.ok:
        raise RefusesInvalid(
            "schedule fails validation: " + "; ".join(report.violations)
        )
    bundle = build_bundle(
        scenario, steps, schedule, algorithm=algorithm, size_mb=size_mb
    )
    return json.dumps(bundle, indent=2, sort_keys=True) + "\n"


def _rebuild_scenario(echo: dict) -> Scenario:
    init = echo["initial_configs"]
    try:
        return Scenario(
            nodes=int(echo["nodes"]),
            ocs_count=int(echo["ocs_count"]),
            bandwidth=float(echo["bandwidth_gbps"]) * 1e9,
            t_recfg=float(echo["t_recfg_us"]) / _US,
            sync_latency=float(echo["sync_latency_us"]) / _US,
            initial_configs=(
                None if init == "free" else tuple(int(c) for c in init)
            ),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bundle scenario echo is malformed: {exc}") from None


def parse_bundle(text: str) -> tuple[Scenario, list[StepPlan], Schedule, dict]:
    """Rebuild (scenario, steps, schedule, document) from bundle JSON."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"bundle is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ParseError("bundle root must be an object")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ParseError(
            f"unsupported schema_version {doc.get('schema_version')!r}, "
            f"expected {SCHEMA_VERSION}"
        )
    for key in ("scenario", "ocs_timelines", "transmissions",
                "step_end_us", "cct_us"):
        if key not in doc:
            raise ParseError(f"bundle is missing {key!r}")

    scenario = _rebuild_scenario(doc["scenario"])
    J = scenario.ocs_count
    timelines = doc["ocs_timelines"]
    if len(timelines) != J:
        raise ParseError(
            f"bundle lists {len(timelines)} OCS timelines for {J} OCSes"
        )

    by_step: dict[int, list[dict]] = {}
    for row in doc["transmissions"]:
        try:
            by_step.setdefault(int(row["step"]), []).append(row)
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed transmission row: {exc}") from None
    if not by_step:
        raise ParseError("bundle carries no transmissions")
    I = max(by_step)
    if sorted(by_step) != list(range(1, I + 1)):
        raise ParseError("transmission plan must cover steps 1..I contiguously")

    # Per-step pairing from the (node, peer) columns; volume from the
    # per-OCS byte shares of any single node.
    steps: list[StepPlan] = []
    catalog: list[tuple[int, ...]] = []
    for i in range(1, I + 1):
        rows = by_step[i]
        pairs = {}
        per_ocs: dict[int, dict] = {}
        for row in rows:
            node, peer = int(row["node"]), int(row["peer"])
            if node in pairs and pairs[node] != peer:
                raise ParseError(f"step {i}: node {node} has two peers")
            pairs[node] = peer
            per_ocs.setdefault(int(row["ocs"]), row)
        try:
            perm = make_permutation(sorted(pairs.items()), scenario.nodes)
        except ValueError as exc:
            raise ParseError(f"step {i}: pairing is not a permutation: {exc}")
        volume = 0.0
        for row in rows:
            if int(row["node"]) == 0:
                volume += float(row["bytes"])
        if perm.dest not in catalog:
            catalog.append(perm.dest)
        cfg = catalog.index(perm.dest) + 1
        steps.append(StepPlan(index=i, pairing=perm, volume=volume, cfg=cfg))

    zero = [[0.0] * J for _ in range(I)]
    used = [[False] * J for _ in range(I)]
    vol = [row[:] for row in zero]
    ts = [row[:] for row in zero]
    te = [row[:] for row in zero]
    rs = [row[:] for row in zero]
    re = [row[:] for row in zero]
    reconf = [[False] * J for _ in range(I)]
    for i in range(1, I + 1):
        seen: dict[int, dict] = {}
        for row in by_step[i]:
            seen[int(row["ocs"])] = row
        for ocs, row in seen.items():
            if not 1 <= ocs <= J:
                raise ParseError(f"step {i}: OCS index {ocs} out of range")
            used[i - 1][ocs - 1] = True
            vol[i - 1][ocs - 1] = float(row["bytes"])
            ts[i - 1][ocs - 1] = float(row["start_us"]) / _US
            te[i - 1][ocs - 1] = float(row["end_us"]) / _US

    init_ids = []
    for j, tl in enumerate(timelines, start=1):
        if int(tl.get("ocs", -1)) != j:
            raise ParseError(f"OCS timelines out of order at position {j}")
        init_ids.append(int(tl.get("initial_config_id", BLANK_CONFIG)))
        for ev in tl.get("events", ()):
            try:
                step_idx = int(ev["step"])
            except (KeyError, TypeError) as exc:
                raise ParseError(f"ocs {j}: malformed event: {exc}") from None
            if not 1 <= step_idx <= I:
                raise ParseError(f"ocs {j}: event step {step_idx} out of range")
            want_cfg = steps[step_idx - 1].cfg
            if int(ev.get("config_id", want_cfg)) != want_cfg:
                raise ParseError(
                    f"ocs {j} step {step_idx}: event config_id disagrees "
                    "with the transmission plan"
                )
            reconf[step_idx - 1][j - 1] = True
            rs[step_idx - 1][j - 1] = float(ev["start_us"]) / _US
            re[step_idx - 1][j - 1] = float(ev["end_us"]) / _US

    step_end = [float(t) / _US for t in doc["step_end_us"]]
    if len(step_end) != I:
        raise ParseError("step_end_us length disagrees with the step count")

    freeze = lambda grid: tuple(tuple(r) for r in grid)
    schedule = Schedule(
        volume=freeze(vol),
        used=freeze(used),
        reconf=freeze(reconf),
        t_start=freeze(ts),
        t_end=freeze(te),
        t_recfg_s=freeze(rs),
        t_recfg_e=freeze(re),
        step_end=tuple(step_end),
        cct=float(doc["cct_us"]) / _US,
        init_configs=tuple(init_ids),
    )
    return scenario, steps, schedule, doc
