"""Physical-layer success models: fiber loss, decoherence and swap success.

Fiber transmission follows the standard attenuation law 10**(-alpha*L/10)
with alpha in dB/km equivalents; optical switches are modeled purely through
a higher per-km coefficient on their links.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .streams import RandomStream
from .topology import RoutePath

ALPHA_FIBER = 0.15
ALPHA_SWITCH = 0.4


@dataclass(frozen=True)
class ChannelParams:
    """Channel noise/success parameters shared by all protocol engines.

    decoherence is the probability that a delivered end-to-end bit flips
    (applied once per bit, not per hop).  bsm_success is the raw success
    probability of one Bell-state measurement; redundancy is the number of
    parallel pair-establishment attempts per segment.
    """

    alpha: float = ALPHA_FIBER
    decoherence: float = 0.02
    bsm_success: float = 0.85
    redundancy: int = 5

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if not 0.0 <= self.decoherence <= 1.0:
            raise ValueError("decoherence must be in [0, 1]")
        if not 0.0 <= self.bsm_success <= 1.0:
            raise ValueError("bsm_success must be in [0, 1]")
        if self.redundancy < 1:
            raise ValueError("redundancy must be >= 1")


def transmission_probability(length_km: float, alpha: float) -> float:
    """Probability that a photon survives length_km of fiber: 10**(-alpha*L/10)."""
    if length_km < 0:
        raise ValueError("length_km must be non-negative")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    return 10.0 ** (-alpha * length_km / 10.0)


def path_transmission(path: RoutePath, traversals: int = 1,
                      alphas=None) -> float:
    """End-to-end survival probability over a routed path.

    Product of per-hop transmission probabilities, raised to the number of
    traversals.  Hop attenuation coefficients default to the ones recorded on
    the path; `alphas` overrides them (one value per hop).
    """
    if traversals < 1:
        raise ValueError("traversals must be >= 1")
    if not path.hop_lengths:
        raise ValueError("path has no hops")
    if alphas is None:
        alphas = path.hop_alphas
    if len(alphas) != len(path.hop_lengths):
        raise ValueError("one alpha per hop required")
    # Exponents add, so accumulate alpha*L and exponentiate once.
    exponent = sum(a * l for a, l in zip(alphas, path.hop_lengths))
    return 10.0 ** (-traversals * exponent / 10.0)


def redundant_bsm_success(bsm_success: float, redundancy: int) -> float:
    """Success probability of redundancy parallel attempts: 1 - (1-B)**r."""
    if not 0.0 <= bsm_success <= 1.0:
        raise ValueError("bsm_success must be in [0, 1]")
    if redundancy < 1:
        raise ValueError("redundancy must be >= 1")
    if redundancy == 1:
        return bsm_success
    return 1.0 - (1.0 - bsm_success) ** redundancy


def burst_survival(single_photon_prob: float, burst_size: int) -> float:
    """Probability that at least one of burst_size independent photons survives.

    Computed as -expm1(b*log1p(-p)) for accuracy at extremes; exact for any
    burst size, which is what makes million-photon bursts O(1) to sample.
    """
    if not 0.0 <= single_photon_prob <= 1.0:
        raise ValueError("single_photon_prob must be in [0, 1]")
    if burst_size < 1:
        raise ValueError("burst_size must be >= 1")
    if single_photon_prob >= 1.0:
        return 1.0
    if single_photon_prob == 0.0:
        return 0.0
    return -math.expm1(burst_size * math.log1p(-single_photon_prob))


def sample_bernoulli(rng: RandomStream, p: float) -> bool:
    """True with probability p, consuming exactly one draw from the stream."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must be in [0, 1]")
    return rng.uniform() < p
