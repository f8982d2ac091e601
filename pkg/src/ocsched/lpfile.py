"""Deterministic LP-format export and strict round-trip parsing.

export_lp writes the model in the industry-standard LP grammar (sections
Minimize / Subject To / Bounds / Binaries / Generals) with constraints in
build order and numbers in shortest round-trip notation, so an identical
model always serializes to identical bytes.  A comment header carries the
scenario and step metadata needed to reconstruct the solve inputs.

parse_lp is strict: it parses the body back into rows, rebuilds the model
from the header, and refuses files whose body and header disagree, so a
successfully parsed file is guaranteed to mean what its header says.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError
from .milp import MILPModel, VarKind, build_model
from .model import Permutation, Scenario, StepPlan

__all__ = ["ParsedLP", "export_lp", "parse_lp"]

_SCHEMA = 1


def _fmt(x: float) -> str:
    return repr(float(x))


def _render_terms(terms) -> str:
    """Render [(name, coef), ...] as an LP expression."""
    parts: list[str] = []
    for pos, (name, coef) in enumerate(terms):
        mag = abs(coef)
        body = name if mag == 1.0 else f"{_fmt(mag)} {name}"
        if pos == 0:
            parts.append(f"- {body}" if coef < 0 else body)
        else:
            parts.append(f"{'-' if coef < 0 else '+'} {body}")
    return " ".join(parts)


def _header_lines(model: MILPModel) -> list[str]:
    meta = model.meta
    init = (
        "free" if meta.initial_configs is None
        else ",".join(str(c) for c in meta.initial_configs)
    )
    lines = [
        f"\\ ocsched LP export, schema {_SCHEMA}",
        "\\ scenario "
        f"nodes={meta.nodes} ocs_count={meta.ocs_count} "
        f"bandwidth={_fmt(meta.bandwidth)} t_recfg={_fmt(meta.t_recfg)} "
        f"sync_latency={_fmt(meta.sync_latency)} initial_configs={init}",
    ]
    seen: set[int] = set()
    for cfg, perm in zip(meta.cfg, meta.pairings):
        if cfg not in seen:
            seen.add(cfg)
            dest = ",".join(str(d) for d in perm)
            lines.append(f"\\ config {cfg} perm={dest}")
    for i, (cfg, vol) in enumerate(zip(meta.cfg, meta.volumes), start=1):
        lines.append(f"\\ step {i} cfg={cfg} volume={_fmt(vol)}")
    return lines


def export_lp(model: MILPModel) -> str:
    lines = _header_lines(model)
    lines.append("Minimize")
    lines.append(f" obj: {model.variables[model.objective_var].name}")
    lines.append("Subject To")
    for con in model.constraints:
        named = [(model.variables[vi].name, coef) for vi, coef in con.terms]
        lines.append(
            f" {con.name}: {_render_terms(named)} {con.sense.value} {_fmt(con.rhs)}"
        )
    lines.append("Bounds")
    for v in model.variables:
        if v.kind == VarKind.INTEGER:
            if v.ub is not None and v.lb == v.ub:
                lines.append(f" {v.name} = {_fmt(v.lb)}")
            else:
                lines.append(f" {_fmt(v.lb)} <= {v.name} <= {_fmt(v.ub)}")
    lines.append("Binaries")
    for v in model.variables:
        if v.kind == VarKind.BINARY:
            lines.append(f" {v.name}")
    lines.append("Generals")
    for v in model.variables:
        if v.kind == VarKind.INTEGER:
            lines.append(f" {v.name}")
    lines.append("End")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ParsedLP:
    """A verified round trip: solve inputs plus the model they rebuild."""

    scenario: Scenario
    steps: list[StepPlan]
    model: MILPModel


def _parse_float(token: str, where: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise ParseError(f"{where}: {token!r} is not a number") from None


def _parse_expression(tokens: list[str], where: str) -> list[tuple[str, float]]:
    terms: list[tuple[str, float]] = []
    sign = 1.0
    coef: float | None = None
    for tok in tokens:
        if tok == "+":
            sign, coef = 1.0, None
        elif tok == "-":
            sign, coef = -1.0, None
        elif tok[0].isdigit() or tok[0] == ".":
            if coef is not None:
                raise ParseError(f"{where}: two coefficients in a row")
            coef = _parse_float(tok, where)
        else:
            terms.append((tok, sign * (1.0 if coef is None else coef)))
            sign, coef = 1.0, None
    if coef is not None:
        raise ParseError(f"{where}: dangling coefficient")
    return terms


def _parse_header(lines: list[str]):
    scenario_kv: dict[str, str] = {}
    configs: dict[int, Permutation] = {}
    step_rows: list[tuple[int, int, float]] = []
    for line in lines:
        body = line[1:].strip()
        if body.startswith("scenario "):
            for item in body[len("scenario "):].split():
                key, _, val = item.partition("=")
                scenario_kv[key] = val
        elif body.startswith("config "):
            rest = body[len("config "):]
            cid_txt, _, perm_txt = rest.partition(" ")
            if not perm_txt.startswith("perm="):
                raise ParseError(f"config line missing perm=: {line!r}")
            dest = tuple(
                int(d) for d in perm_txt[len("perm="):].split(",")
            )
            configs[int(cid_txt)] = Permutation(dest)
        elif body.startswith("step "):
            parts = body.split()
            if len(parts) != 4:
                raise ParseError(f"malformed step line: {line!r}")
            idx = int(parts[1])
            kv = dict(p.partition("=")[::2] for p in parts[2:])
            step_rows.append(
                (idx, int(kv["cfg"]), _parse_float(kv["volume"], "step volume"))
            )
    required = (
        "nodes", "ocs_count", "bandwidth", "t_recfg", "sync_latency",
        "initial_configs",
    )
    for key in required:
        if key not in scenario_kv:
            raise ParseError(f"header scenario line is missing {key}")
    init_txt = scenario_kv["initial_configs"]
    init = (
        None if init_txt == "free"
        else tuple(int(c) for c in init_txt.split(","))
    )
    scenario = Scenario(
        nodes=int(scenario_kv["nodes"]),
        ocs_count=int(scenario_kv["ocs_count"]),
        bandwidth=_parse_float(scenario_kv["bandwidth"], "bandwidth"),
        t_recfg=_parse_float(scenario_kv["t_recfg"], "t_recfg"),
        sync_latency=_parse_float(scenario_kv["sync_latency"], "sync_latency"),
        initial_configs=init,
    )
    if not step_rows:
        raise ParseError("header declares no steps")
    steps = []
    for pos, (idx, cfg, vol) in enumerate(step_rows, start=1):
        if idx != pos:
            raise ParseError(f"step lines out of order at step {idx}")
        if cfg not in configs:
            raise ParseError(f"step {idx} references unknown config {cfg}")
        steps.append(
            StepPlan(index=idx, pairing=configs[cfg], volume=vol, cfg=cfg)
        )
    return scenario, steps


def parse_lp(text: str) -> ParsedLP:
    comment_lines: list[str] = []
    sections: dict[str, list[str]] = {}
    current: str | None = None
    for raw in text.splitlines():
        line = raw.rstrip()
        if not line.strip():
            continue
        if line.lstrip().startswith("\\"):
            comment_lines.append(line.lstrip())
            continue
        head = line.strip()
        if head in ("Minimize", "Subject To", "Bounds", "Binaries",
                    "Generals", "End"):
            current = head
            sections.setdefault(head, [])
            continue
        if current is None:
            raise ParseError(f"content before any section: {line!r}")
        sections[current].append(head)

    for needed in ("Minimize", "Subject To", "Bounds", "Binaries",
                   "Generals", "End"):
        if needed not in sections:
            raise ParseError(f"missing section {needed}")

    scenario, steps = _parse_header(comment_lines)
    model = build_model(scenario, steps)

    obj_lines = sections["Minimize"]
    if len(obj_lines) != 1 or not obj_lines[0].startswith("obj:"):
        raise ParseError("Minimize section must hold exactly one obj: line")
    obj_name = obj_lines[0][len("obj:"):].strip()
    if obj_name != model.variables[model.objective_var].name:
        raise ParseError(f"objective {obj_name!r} does not match the header")

    expected = model.constraints
    got = sections["Subject To"]
    if len(got) != len(expected):
        raise ParseError(
            f"body has {len(got)} constraints, header implies {len(expected)}"
        )
    for line, con in zip(got, expected):
        name, colon, rest = line.partition(":")
        if not colon or name.strip() != con.name:
            raise ParseError(f"constraint {con.name}: name mismatch in {line!r}")
        tokens = rest.split()
        if len(tokens) < 3 or tokens[-2] not in ("<=", ">=", "="):
            raise ParseError(f"constraint {con.name}: malformed row")
        sense = tokens[-2]
        rhs = _parse_float(tokens[-1], f"constraint {con.name} rhs")
        terms = _parse_expression(tokens[:-2], f"constraint {con.name}")
        want = [(model.variables[vi].name, coef) for vi, coef in con.terms]
        if sense != con.sense.value or rhs != con.rhs or terms != want:
            raise ParseError(
                f"constraint {con.name} disagrees with the header model"
            )

    bounds: dict[str, tuple[float, float]] = {}
    for line in sections["Bounds"]:
        tokens = line.split()
        if len(tokens) == 5 and tokens[1] == "<=" and tokens[3] == "<=":
            bounds[tokens[2]] = (
                _parse_float(tokens[0], "bound"),
                _parse_float(tokens[4], "bound"),
            )
        elif len(tokens) == 3 and tokens[1] == "=":
            pin = _parse_float(tokens[2], "bound")
            bounds[tokens[0]] = (pin, pin)
        else:
            raise ParseError(f"malformed bounds line: {line!r}")
    binaries = [line for line in sections["Binaries"]]
    generals = [line for line in sections["Generals"]]

    want_bin = [v.name for v in model.variables if v.kind == VarKind.BINARY]
    want_gen = [v.name for v in model.variables if v.kind == VarKind.INTEGER]
    if binaries != want_bin:
        raise ParseError("Binaries section does not match the header model")
    if generals != want_gen:
        raise ParseError("Generals section does not match the header model")
    want_bounds = {
        v.name: (v.lb, v.ub)
        for v in model.variables if v.kind == VarKind.INTEGER
    }
    if bounds != want_bounds:
        raise ParseError("Bounds section does not match the header model")

    return ParsedLP(scenario=scenario, steps=steps, model=model)
