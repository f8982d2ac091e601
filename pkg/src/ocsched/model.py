"""Core domain types for OCS-based collective scheduling.

An optical circuit switch (OCS) configuration is a permutation: a bijective
map from ingress ports to egress ports.  Node i owns port i on every OCS, so
a communication step whose pairing sends node i to node pi(i) is servable by
any OCS currently holding exactly that permutation.

Units are decimal SI throughout: volumes in bytes (1 MB = 1e6 bytes),
bandwidth in bits/second (1 Gbps = 1e9 bits/s), times in seconds.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    DimensionMismatch,
    DuplicateDestination,
    DuplicateSource,
    OutOfRange,
)

__all__ = [
    "Permutation",
    "make_permutation",
    "permutation_equal",
    "Scenario",
    "StepPlan",
    "ConfigCatalog",
    "Schedule",
    "BLANK_CONFIG",
]

# Config id 0 means "no configuration installed" (cold start).
BLANK_CONFIG = 0


@dataclass(frozen=True)
class Permutation:
    """A bijective ingress-to-egress port map of a single OCS."""

    dest: tuple[int, ...]

    def __post_init__(self):
        n = len(self.dest)
        if n < 2:
            raise OutOfRange(f"permutation needs at least 2 ports, got {n}")
        seen = set()
        for src, dst in enumerate(self.dest):
            if not 0 <= dst < n:
                raise OutOfRange(f"port {src} maps to {dst}, outside [0, {n})")
            if dst in seen:
                raise DuplicateDestination(f"egress port {dst} used twice")
            seen.add(dst)

    @property
    def size(self) -> int:
        return len(self.dest)

    def __call__(self, src: int) -> int:
        return self.dest[src]


def make_permutation(pairs, size: int) -> Permutation:
    """Build a Permutation from an explicit (src, dst) pair list.

    Every ingress port 0..size-1 must appear exactly once as a source and
    exactly once as a destination.
    """
    dest = [-1] * size
    seen_dst = set()
    for src, dst in pairs:
        if not 0 <= src < size:
            raise OutOfRange(f"source port {src} outside [0, {size})")
        if not 0 <= dst < size:
            raise OutOfRange(f"destination port {dst} outside [0, {size})")
        if dest[src] != -1:
            raise DuplicateSource(f"ingress port {src} paired twice")
        if dst in seen_dst:
            raise DuplicateDestination(f"egress port {dst} paired twice")
        dest[src] = dst
        seen_dst.add(dst)
    missing = [i for i, d in enumerate(dest) if d == -1]
    if missing:
        raise OutOfRange(f"ingress ports {missing} have no pairing")
    return Permutation(tuple(dest))


def permutation_equal(a: Permutation, b: Permutation) -> bool:
    return a.dest == b.dest


@dataclass(frozen=True)
class Scenario:
    """Cluster-level parameters of one scheduling problem.

    initial_configs is None for free (scheduler-chosen) preconfiguration, or
    an explicit per-OCS tuple of config ids (BLANK_CONFIG = nothing installed)
    to model cold starts.
    """

    nodes: int
    ocs_count: int
    bandwidth: float  # bits/second per OCS port
    t_recfg: float  # seconds
    sync_latency: float = 0.0  # seconds, applied between steps
    initial_configs: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.nodes < 2:
            raise ValueError(f"need at least 2 nodes, got {self.nodes}")
        if self.ocs_count < 1:
            raise ValueError(f"need at least 1 OCS, got {self.ocs_count}")
        if self.bandwidth <= 0:
            raise ValueError("bandwidth must be positive")
        if self.t_recfg < 0:
            raise ValueError("reconfiguration delay cannot be negative")
        if self.sync_latency < 0:
            raise ValueError("sync latency cannot be negative")
        if self.initial_configs is not None:
            if len(self.initial_configs) != self.ocs_count:
                raise ValueError(
                    f"initial_configs lists {len(self.initial_configs)} entries "
                    f"for {self.ocs_count} OCSes"
                )
            for cfg in self.initial_configs:
                if cfg < 0:
                    raise ValueError(f"config id {cfg} is negative")

    def transmit_seconds(self, volume_bytes: float) -> float:
        """Time to push volume_bytes through one OCS port."""
        return volume_bytes * 8.0 / self.bandwidth


@dataclass(frozen=True)
class StepPlan:
    """One communication step of a collective: a pairing plus a per-node volume."""

    index: int  # 1-based position in the collective
    pairing: Permutation
    volume: float  # bytes each node must send this step
    cfg: int | None = None  # catalog id of the pairing, stamped by the catalog builder

    def __post_init__(self):
        if self.index < 1:
            raise ValueError(f"step index must be 1-based, got {self.index}")
        if self.volume <= 0:
            raise ValueError(f"step {self.index} has non-positive volume")
        if self.cfg is not None and self.cfg < 1:
            raise ValueError(f"step {self.index} cfg id must be >= 1, got {self.cfg}")


@dataclass(frozen=True)
class ConfigCatalog:
    """Deduplicated OCS configurations of a collective; ids are 1-based."""

    entries: tuple[Permutation, ...]

    def __post_init__(self):
        for i, a in enumerate(self.entries):
            for b in self.entries[i + 1:]:
                if permutation_equal(a, b):
                    raise ValueError("catalog entries must be distinct")

    def __len__(self) -> int:
        return len(self.entries)

    def permutation(self, cfg: int) -> Permutation:
        if not 1 <= cfg <= len(self.entries):
            raise OutOfRange(f"config id {cfg} outside [1, {len(self.entries)}]")
        return self.entries[cfg - 1]

    def id_of(self, perm: Permutation) -> int | None:
        for i, entry in enumerate(self.entries):
            if permutation_equal(entry, perm):
                return i + 1
        return None


@dataclass(frozen=True)
class Schedule:
    """A fully timed assignment of step volumes to OCSes.

    All per-pair fields are (steps x ocs) nested tuples indexed [i][j] with
    i, j zero-based here (reports and file formats use 1-based labels).
    Times are seconds, volumes bytes.  init_configs uses BLANK_CONFIG for an
    OCS that starts empty.
    """

    volume: tuple[tuple[float, ...], ...]  # d: bytes moved by OCS j at step i
    used: tuple[tuple[bool, ...], ...]  # u: OCS j transmits at step i
    reconf: tuple[tuple[bool, ...], ...]  # r: OCS j reconfigures at step i
    t_start: tuple[tuple[float, ...], ...]
    t_end: tuple[tuple[float, ...], ...]
    t_recfg_s: tuple[tuple[float, ...], ...]
    t_recfg_e: tuple[tuple[float, ...], ...]
    step_end: tuple[float, ...]
    cct: float
    init_configs: tuple[int, ...]

    def __post_init__(self):
        steps = len(self.volume)
        if steps == 0:
            raise DimensionMismatch("schedule has no steps")
        ocs = len(self.init_configs)
        if ocs == 0:
            raise DimensionMismatch("schedule has no OCS columns")
        per_pair = (
            self.volume, self.used, self.reconf,
            self.t_start, self.t_end, self.t_recfg_s, self.t_recfg_e,
        )
        for grid in per_pair:
            if len(grid) != steps or any(len(row) != ocs for row in grid):
                raise DimensionMismatch(
                    f"per-pair fields must all be {steps}x{ocs}"
                )
        if len(self.step_end) != steps:
            raise DimensionMismatch("step_end length disagrees with step count")

    @property
    def steps(self) -> int:
        return len(self.volume)

    @property
    def ocs_count(self) -> int:
        return len(self.init_configs)

    @property
    def reconfig_count(self) -> int:
        return sum(1 for row in self.reconf for flag in row if flag)
