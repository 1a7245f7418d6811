"""Per-round stochastic engines for the decoy-state, 3-stage and E91 protocols.

Each engine consumes uniforms from a caller-owned stream in a frozen order,
so identical (stream, inputs) pairs reproduce identical outcomes.  The
3-stage and E91 engines draw a fixed number of uniforms per round regardless
of outcome; this keeps rounds aligned across runs that differ only in burst
size or redundancy, making matched-seed comparisons monotone by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import channel
from .channel import ChannelParams
from .streams import RandomStream
from .topology import RoutePath

DECOY = "decoy"
THREE_STAGE = "three_stage"
E91 = "e91"

PROTOCOLS = (DECOY, THREE_STAGE, E91)

# Vacuum + weak decoy + signal is the standard three-intensity choice; all
# levels stay inside [0, 2].
VACUUM = "vacuum"
WEAK_DECOY = "decoy"
SIGNAL = "signal"


@dataclass(frozen=True)
class IntensityLevel:
    mu: float
    weight: float
    role: str


DEFAULT_INTENSITIES = (
    IntensityLevel(0.0, 0.10, VACUUM),
    IntensityLevel(0.1, 0.20, WEAK_DECOY),
    IntensityLevel(0.65, 0.70, SIGNAL),
)


@dataclass(frozen=True)
class ProtocolSpec:
    """Protocol identifier plus its tunables.

    sifting_fraction is the probability a round survives basis
    reconciliation (the 3-stage engine ignores it: its commuting encodings
    need no reconciliation).  continuous_intensity switches the decoy source
    to a uniform intensity on [0, 2] instead of the discrete level set.
    swap_redundancy applies the parallel-attempt boost to entanglement swaps
    as well as to pair establishment.
    """

    protocol: str
    burst_size: int = 10
    intensities: tuple[IntensityLevel, ...] = DEFAULT_INTENSITIES
    redundancy: int = 5
    sifting_fraction: float = 0.5
    continuous_intensity: bool = False
    swap_redundancy: bool = False

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"unknown protocol {self.protocol!r}")
        if self.burst_size < 1:
            raise ValueError("burst_size must be >= 1")
        if self.redundancy < 1:
            raise ValueError("redundancy must be >= 1")
        if not 0.0 < self.sifting_fraction <= 1.0:
            raise ValueError("sifting_fraction must be in (0, 1]")
        if not self.intensities:
            raise ValueError("at least one intensity level required")
        for lvl in self.intensities:
            if not 0.0 <= lvl.mu <= 2.0:
                raise ValueError("intensities must lie in [0, 2]")
            if lvl.role not in (VACUUM, WEAK_DECOY, SIGNAL):
                raise ValueError(f"unknown intensity role {lvl.role!r}")
        total = sum(lvl.weight for lvl in self.intensities)
        if abs(total - 1.0) > 1e-9:
            raise ValueError("intensity weights must sum to 1")


@dataclass(slots=True)
class RoundOutcome:
    """Record of a single protocol round."""

    delivered: bool
    alice_bit: int | None
    bob_bit: int | None
    path_index: int = 0
    rng_draws_used: int = 0
    mu: float | None = None
    arrivals: int | None = None


def _poisson_inverse(u: float, mu: float) -> int:
    """Invert the Poisson CDF at u using the stable pmf recurrence."""
    if mu == 0.0:
        return 0
    p = math.exp(-mu)
    cum = p
    n = 0
    while u >= cum and n < 1000:
        n += 1
        p *= mu / n
        cum += p
    return n


def run_decoy_round(rng: RandomStream, path: RoutePath, spec: ProtocolSpec,
                    ch: ChannelParams, path_index: int = 0) -> RoundOutcome:
    """One decoy-state round: a single weak coherent pulse over the path.

    Draw order: intensity, photon count, per-photon survival, bit value (for
    non-vacuum pulses), sifting.  Key material comes only from rounds where
    exactly one photon arrives on a signal-intensity pulse; multi-photon
    arrivals and decoy/vacuum intensities are discarded.
    """
    if spec.protocol != DECOY:
        raise ValueError("spec.protocol must be 'decoy'")
    start = rng.draws
    p_hop = channel.path_transmission(path)

    u = rng.uniform()
    if spec.continuous_intensity:
        mu, role = 2.0 * u, SIGNAL
    else:
        mu, role = spec.intensities[-1].mu, spec.intensities[-1].role
        acc = 0.0
        for lvl in spec.intensities:
            acc += lvl.weight
            if u < acc:
                mu, role = lvl.mu, lvl.role
                break

    n_photons = _poisson_inverse(rng.uniform(), mu)
    arrivals = 0
    for _ in range(n_photons):
        if rng.uniform() < p_hop:
            arrivals += 1

    alice_bit = rng.bit() if mu > 0.0 else None
    sifted = rng.uniform() < spec.sifting_fraction
    flip = rng.uniform() < ch.decoherence

    delivered = arrivals == 1 and role == SIGNAL and sifted and alice_bit is not None
    bob_bit = (alice_bit ^ flip) if delivered else None
    return RoundOutcome(delivered, alice_bit, bob_bit, path_index,
                        rng.draws - start, mu=mu, arrivals=arrivals)


def run_three_stage_round(rng: RandomStream, path: RoutePath, spec: ProtocolSpec,
                          ch: ChannelParams, path_index: int = 0) -> RoundOutcome:
    """One 3-stage round: a burst of identically prepared photons, three
    channel traversals, delivered if any photon of the burst survives.

    Burst survival is sampled with a single uniform against the exact
    probability 1 - (1-p)**b, so million-photon bursts cost the same as
    single photons and every round consumes exactly three draws.  No sifting
    applies: the commuting secret encodings need no basis reconciliation.
    """
    if spec.protocol != THREE_STAGE:
        raise ValueError("spec.protocol must be 'three_stage'")
    start = rng.draws
    p_photon = channel.path_transmission(path, traversals=3)
    p_burst = channel.burst_survival(p_photon, spec.burst_size)

    delivered = rng.uniform() < p_burst
    alice_bit = rng.bit()
    flip = rng.uniform() < ch.decoherence

    bob_bit = (alice_bit ^ flip) if delivered else None
    return RoundOutcome(delivered, alice_bit, bob_bit, path_index,
                        rng.draws - start)


def run_e91_round(rng: RandomStream, path: RoutePath, spec: ProtocolSpec,
                  ch: ChannelParams, path_index: int = 0) -> RoundOutcome:
    """One E91 round over a repeater chain.

    Every hop of the path is one entanglement-distribution segment; a Bell
    pair forms there with probability 1 - (1-p)**r (r parallel attempts).
    Each interior node then swaps, succeeding with the raw BSM probability
    (or its redundant variant when spec.swap_redundancy is set).  The round
    is delivered when all segments and swaps succeed and sifting passes.
    """
    if spec.protocol != E91:
        raise ValueError("spec.protocol must be 'e91'")
    if not path.hop_lengths:
        raise ValueError("path has no hops")
    start = rng.draws
    r = spec.redundancy

    ok = True
    for length, alpha in zip(path.hop_lengths, path.hop_alphas):
        p_seg = channel.transmission_probability(length, alpha)
        p_pair = channel.burst_survival(p_seg, r)
        if rng.uniform() >= p_pair:
            ok = False
    p_swap = (channel.redundant_bsm_success(ch.bsm_success, r)
              if spec.swap_redundancy else ch.bsm_success)
    for _ in range(path.hops - 1):
        if rng.uniform() >= p_swap:
            ok = False
    sifted = rng.uniform() < spec.sifting_fraction
    alice_bit = rng.bit()
    flip = rng.uniform() < ch.decoherence

    delivered = ok and sifted
    bob_bit = (alice_bit ^ flip) if delivered else None
    return RoundOutcome(delivered, alice_bit, bob_bit, path_index,
                        rng.draws - start)


_ENGINES = {
    DECOY: run_decoy_round,
    THREE_STAGE: run_three_stage_round,
    E91: run_e91_round,
}


def run_round(rng: RandomStream, path: RoutePath, spec: ProtocolSpec,
              ch: ChannelParams, path_index: int = 0) -> RoundOutcome:
    """Dispatch one round to the engine named by spec.protocol."""
    try:
        engine = _ENGINES[spec.protocol]
    except KeyError:
        raise ValueError(f"unknown protocol {spec.protocol!r}") from None
    return engine(rng, path, spec, ch, path_index)


def delivery_probability(path: RoutePath, spec: ProtocolSpec,
                         ch: ChannelParams) -> float:
    """Closed-form per-round delivery probability (sifting included).

    This is the analytic counterpart each engine's empirical rate converges
    to; sweeps use it for monotonicity checks without sampling noise.
    """
    if spec.protocol == THREE_STAGE:
        p = channel.path_transmission(path, traversals=3)
        return channel.burst_survival(p, spec.burst_size)
    if spec.protocol == E91:
        prob = spec.sifting_fraction
        for length, alpha in zip(path.hop_lengths, path.hop_alphas):
            p_seg = channel.transmission_probability(length, alpha)
            prob *= channel.burst_survival(p_seg, spec.redundancy)
        p_swap = (channel.redundant_bsm_success(ch.bsm_success, spec.redundancy)
                  if spec.swap_redundancy else ch.bsm_success)
        prob *= p_swap ** (path.hops - 1)
        return prob
    if spec.protocol == DECOY:
        p = channel.path_transmission(path)
        if spec.continuous_intensity:
            # Average of mu*p*exp(-mu*p) over mu ~ U[0, 2].
            if p == 0.0:
                single = 0.0
            else:
                t = 2.0 * p
                single = (1.0 - math.exp(-t) * (1.0 + t)) / t
        else:
            single = sum(lvl.weight * lvl.mu * p * math.exp(-lvl.mu * p)
                         for lvl in spec.intensities if lvl.role == SIGNAL)
        return spec.sifting_fraction * single
    raise ValueError(f"unknown protocol {spec.protocol!r}")


def intensity_yields(outcomes, spec: ProtocolSpec) -> dict[str, dict[str, float]]:
    """Per-intensity-role arrival statistics for decoy-state diagnostics.

    Yield-by-intensity comparison is the intrusion check of the decoy
    method; it is reported only and never alters delivery.
    """
    roles = {lvl.mu: lvl.role for lvl in spec.intensities}
    stats: dict[str, dict[str, float]] = {}
    for out in outcomes:
        if out.mu is None:
            continue
        role = roles.get(out.mu, SIGNAL)
        entry = stats.setdefault(role, {"rounds": 0, "detections": 0})
        entry["rounds"] += 1
        if out.arrivals:
            entry["detections"] += 1
    for entry in stats.values():
        entry["yield"] = entry["detections"] / entry["rounds"] if entry["rounds"] else 0.0
    return stats
