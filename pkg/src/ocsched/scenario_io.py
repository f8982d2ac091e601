"""Sectioned scenario files: cluster, collective, and solve settings.

The format is INI as understood by configparser, chosen for diff-ability
of experiment grids.  Parsing is strict: unknown sections or keys and
malformed values are rejected with a diagnostic naming the offending key,
so a typo cannot silently fall back to a default.

Units follow the reporting conventions: bandwidth in Gbps, times in
microseconds, sizes in MB (decimal).  Internally everything converts to
bits/second, seconds, and bytes.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass

from .collectives import ALGORITHMS
from .errors import ParseError
from .model import Scenario

__all__ = ["MODES", "ScenarioFile", "parse_scenario_text", "load_scenario"]

MODES = (
    "oneshot", "strawman", "ideal", "swot-exact", "swot-heuristic", "oracle",
)

_SCHEMA = {
    "cluster": {
        "nodes", "ocs_count", "bandwidth_gbps", "t_recfg_us",
        "sync_latency_us", "initial_configs",
    },
    "collective": {"algorithm", "size_mb"},
    "solve": {"mode", "time_budget_s"},
}


@dataclass(frozen=True)
class ScenarioFile:
    """A fully resolved scenario: cluster, workload, and solve settings."""

    scenario: Scenario
    algorithm: str
    size: float  # bytes per node
    mode: str
    time_budget: float  # seconds

    @property
    def size_mb(self) -> float:
        return self.size / 1e6


def _positive_int(section: str, key: str, raw: str) -> int:
    try:
        value = int(raw)
    except ValueError:
        raise ParseError(
            f"{section}.{key}: expected an integer, got {raw!r}"
        ) from None
    if value <= 0:
        raise ParseError(f"{section}.{key}: must be positive, got {value}")
    return value


def _positive_float(section: str, key: str, raw: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise ParseError(
            f"{section}.{key}: expected a number, got {raw!r}"
        ) from None
    if value <= 0:
        raise ParseError(f"{section}.{key}: must be positive, got {value}")
    return value


def _nonnegative_float(section: str, key: str, raw: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise ParseError(
            f"{section}.{key}: expected a number, got {raw!r}"
        ) from None
    if value < 0:
        raise ParseError(f"{section}.{key}: cannot be negative, got {value}")
    return value


def _initial_configs(raw: str, ocs_count: int) -> tuple[int, ...] | None:
    if raw == "free":
        return None
    try:
        configs = tuple(int(part) for part in raw.split(","))
    except ValueError:
        raise ParseError(
            "cluster.initial_configs: expected 'free' or a comma-separated "
            f"list of config ids, got {raw!r}"
        ) from None
    if len(configs) != ocs_count:
        raise ParseError(
            f"cluster.initial_configs: lists {len(configs)} entries for "
            f"{ocs_count} OCSes"
        )
    if any(c < 0 for c in configs):
        raise ParseError("cluster.initial_configs: config ids cannot be negative")
    return configs


def parse_scenario_text(text: str) -> ScenarioFile:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ParseError(f"scenario file does not parse: {exc}") from None

    for section in parser.sections():
        if section not in _SCHEMA:
            raise ParseError(f"unknown section [{section}]")
        for key in parser[section]:
            if key not in _SCHEMA[section]:
                raise ParseError(f"unknown key {key!r} in [{section}]")
    for section in ("cluster", "collective", "solve"):
        if not parser.has_section(section):
            raise ParseError(f"missing section [{section}]")

    def need(section: str, key: str) -> str:
        if key not in parser[section]:
            raise ParseError(f"missing key {key!r} in [{section}]")
        return parser[section][key].strip()

    cluster = parser["cluster"]
    nodes = _positive_int("cluster", "nodes", need("cluster", "nodes"))
    ocs_count = _positive_int("cluster", "ocs_count", need("cluster", "ocs_count"))
    bandwidth = _positive_float(
        "cluster", "bandwidth_gbps", need("cluster", "bandwidth_gbps")
    ) * 1e9
    # dividing by the exactly representable 1e6 keeps round microsecond
    # inputs on the same floats as literal second values like 200e-6
    t_recfg = _nonnegative_float(
        "cluster", "t_recfg_us", need("cluster", "t_recfg_us")
    ) / 1e6
    sync_latency = _nonnegative_float(
        "cluster", "sync_latency_us", cluster.get("sync_latency_us", "0").strip()
    ) / 1e6
    init = _initial_configs(
        cluster.get("initial_configs", "free").strip(), ocs_count
    )

    algorithm = need("collective", "algorithm")
    if algorithm not in ALGORITHMS:
        raise ParseError(
            f"collective.algorithm: unknown algorithm {algorithm!r}, "
            f"expected one of {', '.join(ALGORITHMS)}"
        )
    size = _positive_float(
        "collective", "size_mb", need("collective", "size_mb")
    ) * 1e6

    mode = need("solve", "mode")
    if mode not in MODES:
        raise ParseError(
            f"solve.mode: unknown mode {mode!r}, expected one of "
            f"{', '.join(MODES)}"
        )
    time_budget = _positive_float(
        "solve", "time_budget_s", parser["solve"].get("time_budget_s", "90").strip()
    )

    try:
        scenario = Scenario(
            nodes=nodes,
            ocs_count=ocs_count,
            bandwidth=bandwidth,
            t_recfg=t_recfg,
            sync_latency=sync_latency,
            initial_configs=init,
        )
    except ValueError as exc:
        raise ParseError(f"cluster: {exc}") from None

    return ScenarioFile(
        scenario=scenario,
        algorithm=algorithm,
        size=size,
        mode=mode,
        time_budget=time_budget,
    )


def load_scenario(path) -> ScenarioFile:
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ParseError(f"cannot read scenario file {path}: {exc}") from None
    return parse_scenario_text(text)
