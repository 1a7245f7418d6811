"""Deterministic Monte Carlo sweep engine.

A sweep simulates one protocol over one topology for every grid point
(distance, or burst size x distance), accumulating per-segment key pools,
estimating QBER, applying the error-correction penalty and relaying keys
across trusted nodes.  All randomness is derived from counter-based streams
keyed by (master_seed, point_index, path_index), so results are bit-identical
for any worker count and any execution order.
"""

from __future__ import annotations

import dataclasses
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import protocols
from .channel import ChannelParams
from .keymgmt import KeyPool, corrected_key_rate, estimate_qber, xor_relay
from .protocols import ProtocolSpec
from .streams import derive_stream
from .topology import (REPEATER, TRUSTED, RoutePath, Topology, build_topology,
                       disjoint_paths)

DEFAULT_DISTANCES = tuple(float(x) for x in range(1, 61))
DEFAULT_BURSTS = (10, 50, 100, 200, 400, 800, 1200, 10_000, 100_000, 1_000_000)


@dataclass
class SweepConfig:
    """Everything needed to reproduce one sweep, including the master seed."""

    kind: str
    protocol: ProtocolSpec
    channel: ChannelParams = field(default_factory=ChannelParams)
    shape_params: dict = field(default_factory=dict)
    distances: tuple[float, ...] = DEFAULT_DISTANCES
    bursts: tuple[int, ...] | None = None
    rounds: int = 100_000
    master_seed: int = 0
    max_paths: int = 4
    sample_fraction: float = 0.1
    threads: int = 1

    def __post_init__(self):
        self.distances = tuple(float(x) for x in self.distances)
        if not self.distances:
            raise ValueError("distance grid must be non-empty")
        if any(b >= a for a, b in zip(self.distances[1:], self.distances)):
            raise ValueError("distance grid must be strictly increasing")
        if self.bursts is not None:
            self.bursts = tuple(int(b) for b in self.bursts)
            if not self.bursts:
                raise ValueError("burst grid must be non-empty")
            if any(b >= a for a, b in zip(self.bursts[1:], self.bursts)):
                raise ValueError("burst grid must be strictly increasing")
        if self.rounds < 1000:
            raise ValueError("rounds must be >= 1000")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if not 0.0 < self.sample_fraction <= 1.0:
            raise ValueError("sample_fraction must be in (0, 1]")


@dataclass(frozen=True)
class SweepPoint:
    """One grid point: x is a distance in km (or burst size for burst series)."""

    x: float
    key_rate: float
    delivered: int
    qber: float


@dataclass
class SweepResult:
    points: list[SweepPoint]
    config: SweepConfig

    @property
    def seed(self) -> int:
        return self.config.master_seed

    def xs(self) -> list[float]:
        return [p.x for p in self.points]

    def key_rates(self) -> list[float]:
        return [p.key_rate for p in self.points]

    def to_csv(self) -> str:
        lines = ["x,key_rate,delivered,qber,rounds,seed"]
        for p in self.points:
            q = "nan" if math.isnan(p.qber) else f"{p.qber:.8g}"
            lines.append(f"{p.x:.10g},{p.key_rate:.10g},{p.delivered},{q},"
                         f"{self.config.rounds},{self.config.master_seed}")
        return "\n".join(lines) + "\n"

    def to_json_doc(self) -> dict:
        return {
            "config": _config_doc(self.config),
            "points": [
                {"x": p.x, "key_rate": p.key_rate, "delivered": p.delivered,
                 "qber": None if math.isnan(p.qber) else p.qber}
                for p in self.points
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_doc(), indent=2, sort_keys=True) + "\n"


@dataclass
class BurstSweepResult:
    """Family of distance sweeps indexed by burst size (or redundancy)."""

    curves: list[tuple[int, SweepResult]]

    def burst_sizes(self) -> list[int]:
        return [b for b, _ in self.curves]


def _config_doc(cfg: SweepConfig) -> dict:
    spec = cfg.protocol
    return {
        "kind": cfg.kind,
        "shape_params": dict(cfg.shape_params),
        "protocol": {
            "name": spec.protocol,
            "burst_size": spec.burst_size,
            "intensities": [[l.mu, l.weight, l.role] for l in spec.intensities],
            "redundancy": spec.redundancy,
            "sifting_fraction": spec.sifting_fraction,
            "continuous_intensity": spec.continuous_intensity,
            "swap_redundancy": spec.swap_redundancy,
        },
        "channel": {
            "alpha": cfg.channel.alpha,
            "decoherence": cfg.channel.decoherence,
            "bsm_success": cfg.channel.bsm_success,
            "redundancy": cfg.channel.redundancy,
        },
        "distances": list(cfg.distances),
        "bursts": list(cfg.bursts) if cfg.bursts else None,
        "rounds": cfg.rounds,
        "master_seed": cfg.master_seed,
        "max_paths": cfg.max_paths,
        "sample_fraction": cfg.sample_fraction,
    }


def relay_sections(path: RoutePath, node_kinds: dict[int, str]) -> list[RoutePath]:
    """Split a path at interior relay nodes (trusted or repeater).

    Each section is the quantum channel between consecutive key-holding
    nodes; switch nodes pass photons through and stay inside a section.
    """
    cuts = [0]
    for idx in range(1, len(path.nodes) - 1):
        if node_kinds[path.nodes[idx]] in (TRUSTED, REPEATER):
            cuts.append(idx)
    cuts.append(len(path.nodes) - 1)
    return [
        RoutePath(path.nodes[a:b + 1], path.hop_lengths[a:b], path.hop_alphas[a:b])
        for a, b in zip(cuts, cuts[1:])
    ]


def _simulate_path(cfg: SweepConfig, spec: ProtocolSpec, topo: Topology,
                   path: RoutePath, point_index: int, path_index: int) -> list[KeyPool]:
    """Run all rounds for one path, returning its filled key pools.

    E91 distributes end-to-end entanglement, so the whole path feeds a
    single Alice-Bob pool; the other protocols relay hop keys between
    trusted nodes, one pool per relay section.
    """
    stream = derive_stream(cfg.master_seed, point_index, path_index)
    ch = cfg.channel
    if spec.protocol == protocols.E91:
        pool = KeyPool((path.nodes[0], path.nodes[-1]))
        for _ in range(cfg.rounds):
            out = protocols.run_e91_round(stream, path, spec, ch, path_index)
            pool.rounds_attempted += 1
            if out.delivered:
                pool.add(out.alice_bit, out.bob_bit)
        return [pool]

    kinds = dict(topo.nodes)
    sections = relay_sections(path, kinds)
    pools = [KeyPool((sec.nodes[0], sec.nodes[-1])) for sec in sections]
    engine = protocols.run_round
    for _ in range(cfg.rounds):
        for pool, sec in zip(pools, sections):
            out = engine(stream, sec, spec, ch, path_index)
            pool.rounds_attempted += 1
            if out.delivered:
                pool.add(out.alice_bit, out.bob_bit)
    return pools


def _finalize_path(pools: list[KeyPool], sample_fraction: float):
    """QBER-estimate, correct and relay one path's pools.

    Returns (end_to_end_bits, delivered_count, mismatches, sample_size).
    A path whose weakest segment delivered nothing contributes no key.
    """
    delivered = sum(len(p) for p in pools)
    if any(len(p) == 0 for p in pools):
        return 0, delivered, 0.0, 0
    seg_keys = []
    mismatch_sum = 0.0
    samples = 0
    for pool in pools:
        est = estimate_qber(pool, sample_fraction)
        mismatch_sum += est.q * est.sample_size
        samples += est.sample_size
        usable = int(corrected_key_rate(float(len(pool)), est.q))
        seg_keys.append(pool.bits_a[:usable])
    end_key = xor_relay(seg_keys)
    return len(end_key), delivered, mismatch_sum, samples


def _simulate_point(cfg: SweepConfig, spec: ProtocolSpec, point_index: int,
                    distance: float) -> SweepPoint:
    topo = build_topology(cfg.kind, distance, **cfg.shape_params)
    paths = disjoint_paths(topo, topo.alice, topo.bob, cfg.max_paths)
    total_bits = 0
    delivered = 0
    mismatch_sum = 0.0
    samples = 0
    for j, path in enumerate(paths):
        pools = _simulate_path(cfg, spec, topo, path, point_index, j)
        bits, d, mm, s = _finalize_path(pools, cfg.sample_fraction)
        total_bits += bits
        delivered += d
        mismatch_sum += mm
        samples += s
    qber = mismatch_sum / samples if samples else float("nan")
    return SweepPoint(distance, total_bits / cfg.rounds, delivered, qber)


def _checked_point(cfg: SweepConfig, spec: ProtocolSpec, index: int,
                   distance: float) -> SweepPoint:
    try:
        return _simulate_point(cfg, spec, index, distance)
    except ValueError as exc:
        raise ValueError(f"sweep point {index} (x={distance:g}): {exc}") from exc


def _run_points(cfg: SweepConfig, spec: ProtocolSpec) -> list[SweepPoint]:
    tasks = list(enumerate(cfg.distances))
    if cfg.threads == 1:
        return [_checked_point(cfg, spec, i, d) for i, d in tasks]
    with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
        futs = [pool.submit(_checked_point, cfg, spec, i, d) for i, d in tasks]
        return [f.result() for f in futs]


def run_distance_sweep(cfg: SweepConfig) -> SweepResult:
    """Key rate versus Alice-Bob distance for the configured protocol/topology."""
    return SweepResult(_run_points(cfg, cfg.protocol), cfg)


def run_burst_sweep(cfg: SweepConfig) -> BurstSweepResult:
    """Family of distance sweeps over the burst grid.

    The 3-stage protocol sweeps its burst size; E91 has no burst, so the
    grid varies its number of parallel pair attempts instead.  Point streams
    are shared across grid entries, so matched-seed comparisons between
    burst sizes are coupled (larger bursts deliver a superset of rounds).
    """
    if cfg.bursts is None:
        raise ValueError("burst grid not set")
    if cfg.protocol.protocol == protocols.DECOY:
        raise ValueError("burst sweeps apply to three_stage (burst size) or e91 (redundancy)")
    curves = []
    for b in cfg.bursts:
        if cfg.protocol.protocol == protocols.THREE_STAGE:
            spec = dataclasses.replace(cfg.protocol, burst_size=b)
        else:
            spec = dataclasses.replace(cfg.protocol, redundancy=b)
        sub_cfg = dataclasses.replace(cfg, protocol=spec)
        curves.append((b, SweepResult(_run_points(sub_cfg, spec), sub_cfg)))
    return BurstSweepResult(curves)
