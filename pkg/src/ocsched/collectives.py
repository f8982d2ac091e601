"""Step generators and semantic checkers for the supported collectives.

Each generator turns (algorithm, node count p, buffer size S) into an ordered
list of StepPlan entries: per step a pairing permutation and the byte volume
every node ships.  The pairing is exactly the OCS configuration a switch must
hold to serve the step.

Supported algorithms and their shapes:

  ring AllReduce         2(p-1) steps, all on the shift-by-1 pairing, S/p each
  rabenseifner AllReduce 2*log2(p) steps; halving phase t pairs i with
                         i XOR 2^(t-1) and ships S/2^t, doubling phase mirrors
  pairwise All-to-All    p-1 steps; step q pairs i with (i+q) mod p, S/p each
  bruck All-to-All       log2(p) steps; step t pairs i with (i + 2^(t-1)) mod p
                         and ships S/2 (local rotations cost no network time)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import UnsupportedNodeCount
from .model import ConfigCatalog, Permutation, StepPlan

__all__ = [
    "CollectiveSpec",
    "ALGORITHMS",
    "generate_steps",
    "build_config_catalog",
    "verify_collective_semantics",
    "shift_permutation",
    "xor_permutation",
]

ALGORITHMS = ("ring", "rabenseifner", "pairwise", "bruck")

_POW2_ALGOS = {"rabenseifner", "bruck"}


@dataclass(frozen=True)
class CollectiveSpec:
    """A collective workload: algorithm name, node count, per-node buffer bytes."""

    algorithm: str
    nodes: int
    size: float  # bytes per node

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(
                f"unknown algorithm {self.algorithm!r}, expected one of {ALGORITHMS}"
            )
        if self.nodes < 2:
            raise UnsupportedNodeCount(f"need at least 2 nodes, got {self.nodes}")
        if self.algorithm in _POW2_ALGOS and self.nodes & (self.nodes - 1):
            raise UnsupportedNodeCount(
                f"{self.algorithm} needs a power-of-two node count, got {self.nodes}"
            )
        if self.size <= 0:
            raise ValueError("buffer size must be positive")

    @property
    def block(self) -> int:
        """Per-destination block size in bytes (rounded up to a whole byte)."""
        return math.ceil(self.size / self.nodes)


def shift_permutation(p: int, offset: int) -> Permutation:
    return Permutation(tuple((i + offset) % p for i in range(p)))


def xor_permutation(p: int, mask: int) -> Permutation:
    return Permutation(tuple(i ^ mask for i in range(p)))


def _pairings_and_volumes(spec: CollectiveSpec) -> list[tuple[Permutation, float]]:
    p = spec.nodes
    if spec.algorithm == "ring":
        ring = shift_permutation(p, 1)
        vol = float(spec.block)
        return [(ring, vol)] * (2 * (p - 1))
    if spec.algorithm == "rabenseifner":
        levels = p.bit_length() - 1
        halving = [
            (xor_permutation(p, 1 << t), spec.size / float(2 ** (t + 1)))
            for t in range(levels)
        ]
        return halving + halving[::-1]
    if spec.algorithm == "pairwise":
        return [
            (shift_permutation(p, q), float(spec.block)) for q in range(1, p)
        ]
    if spec.algorithm == "bruck":
        levels = p.bit_length() - 1
        return [
            (shift_permutation(p, 1 << t), spec.size / 2.0) for t in range(levels)
        ]
    raise AssertionError(spec.algorithm)


def build_config_catalog(
    steps: list[StepPlan],
) -> tuple[ConfigCatalog, list[int]]:
    """Deduplicate step pairings into a catalog; first appearance fixes the id.

    Returns the catalog plus the per-step config id list.
    """
    entries: list[Permutation] = []
    ids: list[int] = []
    for step in steps:
        found = None
        for k, entry in enumerate(entries):
            if entry.dest == step.pairing.dest:
                found = k + 1
                break
        if found is None:
            entries.append(step.pairing)
            found = len(entries)
        ids.append(found)
    return ConfigCatalog(tuple(entries)), ids


def generate_steps(spec: CollectiveSpec) -> tuple[list[StepPlan], ConfigCatalog]:
    """Expand a collective into its timed-step skeleton plus config catalog."""
    raw = [
        StepPlan(index=i + 1, pairing=perm, volume=vol)
        for i, (perm, vol) in enumerate(_pairings_and_volumes(spec))
    ]
    catalog, ids = build_config_catalog(raw)
    steps = [replace(step, cfg=cfg) for step, cfg in zip(raw, ids)]
    return steps, catalog


# --------------------------------------------------------------------------
# Block-level semantic verification
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class VerificationResult:
    ok: bool
    failures: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def _fail(msg: str) -> VerificationResult:
    return VerificationResult(False, (msg,))


def verify_collective_semantics(
    spec: CollectiveSpec, steps: list[StepPlan]
) -> VerificationResult:
    """Replay the steps at block granularity and check delivery/reduction.

    All-to-All: every node must end holding exactly the blocks addressed to it.
    AllReduce: every node's buffer must end covered by contributions from all
    p nodes (reduce-scatter + allgather coverage tracking).

    Also checks that the bytes each node ships at step i equal the declared
    volume m_i.  Returns a falsy result carrying the first violation found.
    """
    if spec.algorithm == "pairwise":
        return _verify_pairwise(spec, steps)
    if spec.algorithm == "bruck":
        return _verify_bruck(spec, steps)
    if spec.algorithm == "ring":
        return _verify_ring(spec, steps)
    if spec.algorithm == "rabenseifner":
        return _verify_rabenseifner(spec, steps)
    raise AssertionError(spec.algorithm)


def _check_volume(step: StepPlan, sent_blocks: int, block: float) -> str | None:
    declared = step.volume
    shipped = sent_blocks * block
    if not math.isclose(shipped, declared, rel_tol=1e-12, abs_tol=0.5):
        return (
            f"step {step.index}: node ships {shipped} bytes "
            f"({sent_blocks} blocks) but volume says {declared}"
        )
    return None


def _verify_pairwise(spec, steps) -> VerificationResult:
    p = spec.nodes
    # holdings[v] = set of (origin, dest) blocks currently at node v
    holdings = [{(v, w) for w in range(p)} for v in range(p)]
    for step in steps:
        outgoing = []
        for v in range(p):
            peer = step.pairing(v)
            blk = (v, peer)
            if blk not in holdings[v]:
                return _fail(
                    f"step {step.index}: node {v} does not hold block {blk}"
                )
            outgoing.append((v, peer, blk))
        err = _check_volume(step, 1, spec.block)
        if err:
            return _fail(err)
        for v, peer, blk in outgoing:
            holdings[v].discard(blk)
            holdings[peer].add(blk)
    for v in range(p):
        want = {(w, v) for w in range(p)}
        if holdings[v] != want:
            diff = sorted(want - holdings[v]) + sorted(holdings[v] - want)
            return _fail(f"final: node {v} holdings wrong, first diff {diff[0]}")
    return VerificationResult(True)


def _verify_bruck(spec, steps) -> VerificationResult:
    p = spec.nodes
    holdings = [{(v, w) for w in range(p)} for v in range(p)]
    for t, step in enumerate(steps):
        hop = step.pairing(0)  # shift distance of this phase
        bit = 1 << t
        if hop != bit % p:
            return _fail(
                f"step {step.index}: pairing shifts by {hop}, phase needs {bit}"
            )
        moves = []
        for v in range(p):
            peer = step.pairing(v)
            send = {
                blk for blk in holdings[v] if ((blk[1] - blk[0]) % p) & bit
            }
            moves.append((v, peer, send))
        counts = {len(send) for _, _, send in moves}
        if len(counts) != 1:
            return _fail(f"step {step.index}: uneven send counts {sorted(counts)}")
        err = _check_volume(step, counts.pop(), spec.block)
        if err:
            return _fail(err)
        for v, peer, send in moves:
            holdings[v] -= send
            holdings[peer] |= send
    for v in range(p):
        want = {(w, v) for w in range(p)}
        if holdings[v] != want:
            diff = sorted(want - holdings[v]) + sorted(holdings[v] - want)
            return _fail(f"final: node {v} holdings wrong, first diff {diff[0]}")
    return VerificationResult(True)


def _verify_ring(spec, steps) -> VerificationResult:
    p = spec.nodes
    if len(steps) != 2 * (p - 1):
        return _fail(f"ring wants {2 * (p - 1)} steps, got {len(steps)}")
    # contrib[v][c] = set of origins reduced into chunk c at node v
    contrib = [[{v} for _ in range(p)] for v in range(p)]
    for t, step in enumerate(steps):
        reduce_phase = t < p - 1
        for v in range(p):
            if step.pairing(v) != (v + 1) % p:
                return _fail(f"step {step.index}: pairing is not shift-by-1")
        if reduce_phase:
            sends = [(v, (v - t) % p) for v in range(p)]
        else:
            sends = [(v, (v - (t - (p - 1)) + 1) % p) for v in range(p)]
        err = _check_volume(step, 1, spec.block)
        if err:
            return _fail(err)
        incoming = []
        for v, chunk in sends:
            peer = (v + 1) % p
            incoming.append((peer, chunk, set(contrib[v][chunk])))
        for peer, chunk, origins in incoming:
            if t < p - 1:
                contrib[peer][chunk] |= origins
            else:
                contrib[peer][chunk] = origins
    full = set(range(p))
    for v in range(p):
        for c in range(p):
            if contrib[v][c] != full:
                return _fail(
                    f"final: node {v} chunk {c} covers {sorted(contrib[v][c])}, "
                    f"not all {p} origins"
                )
    return VerificationResult(True)


def _verify_rabenseifner(spec, steps) -> VerificationResult:
    p = spec.nodes
    levels = p.bit_length() - 1
    if len(steps) != 2 * levels:
        return _fail(f"rabenseifner wants {2 * levels} steps, got {len(steps)}")
    contrib = [[{v} for _ in range(p)] for v in range(p)]
    # owned[v] = chunk indices node v is still responsible for (halving phase)
    owned = [set(range(p)) for v in range(p)]
    chunk = spec.size / p
    for t in range(levels):
        step = steps[t]
        mask = 1 << t
        for v in range(p):
            if step.pairing(v) != v ^ mask:
                return _fail(f"step {step.index}: pairing is not XOR {mask}")
        moves = []
        for v in range(p):
            peer = v ^ mask
            # v keeps chunks congruent to itself mod 2^(t+1), ships the rest
            keep = {c for c in owned[v] if (c ^ v) & mask == 0}
            send = owned[v] - keep
            moves.append((v, peer, keep, send))
        sizes = {len(send) for _, _, _, send in moves}
        if len(sizes) != 1:
            return _fail(f"step {step.index}: uneven halving {sorted(sizes)}")
        n_sent = sizes.pop()
        if not math.isclose(n_sent * chunk, step.volume, rel_tol=1e-12, abs_tol=0.5):
            return _fail(
                f"step {step.index}: node ships {n_sent * chunk} bytes, "
                f"volume says {step.volume}"
            )
        merged = []
        for v, peer, keep, send in moves:
            merged.append((peer, [(c, set(contrib[v][c])) for c in send]))
        for v, peer, keep, send in moves:
            owned[v] = keep
        for peer, items in merged:
            for c, origins in items:
                if c not in owned[peer]:
                    return _fail(f"chunk {c} shipped to node {peer} who dropped it")
                contrib[peer][c] |= origins
    full = set(range(p))
    for v in range(p):
        if owned[v] != {v}:
            return _fail(f"halving left node {v} owning {sorted(owned[v])}")
        for c in owned[v]:
            if contrib[v][c] != full:
                return _fail(
                    f"chunk {c} at node {v} covers {sorted(contrib[v][c])} "
                    f"after halving"
                )
    # doubling phase: mirror pairings, each node ships every chunk it has
    # fully assembled so far
    have = [set(owned[v]) for v in range(p)]
    for t in range(levels):
        step = steps[levels + t]
        mask = 1 << (levels - 1 - t)
        for v in range(p):
            if step.pairing(v) != v ^ mask:
                return _fail(f"step {step.index}: pairing is not XOR {mask}")
        sends = [(v, v ^ mask, set(have[v])) for v in range(p)]
        sizes = {len(s) for _, _, s in sends}
        if len(sizes) != 1:
            return _fail(f"step {step.index}: uneven doubling {sorted(sizes)}")
        n_sent = sizes.pop()
        if not math.isclose(n_sent * chunk, step.volume, rel_tol=1e-12, abs_tol=0.5):
            return _fail(
                f"step {step.index}: node ships {n_sent * chunk} bytes, "
                f"volume says {step.volume}"
            )
        for v, peer, chunks in sends:
            have[peer] |= chunks
    for v in range(p):
        if have[v] != full:
            return _fail(f"final: node {v} assembled chunks {sorted(have[v])} only")
    return VerificationResult(True)
