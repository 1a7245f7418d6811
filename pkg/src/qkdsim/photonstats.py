"""Closed-form photon-number statistics and beamsplitter leakage analysis.

Weak coherent pulses carry Poisson-distributed photon numbers.  The low-order
expansions and the multi-photon tail below follow the conventional
faint-pulse treatment; the quadratic tail form is kept verbatim alongside the
exact complement so the two can be compared.
"""

from __future__ import annotations

import math


def poisson_pmf(n: int, mu: float) -> float:
    """P(N = n) for N ~ Poisson(mu), evaluated in log-space for stability.

    Accurate for n well beyond 170 (where naive factorials overflow).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if mu < 0:
        raise ValueError("mu must be >= 0")
    if mu == 0.0:
        return 1.0 if n == 0 else 0.0
    return math.exp(n * math.log(mu) - mu - math.lgamma(n + 1))


def poisson_second_order(n: int, mu: float) -> float:
    """Second-order expansions of the Poisson probabilities for n in {0, 1, 2}:
    1 - mu + mu**2/2, mu - mu**2 and mu**2/2 respectively."""
    if mu < 0:
        raise ValueError("mu must be >= 0")
    if n == 0:
        return 1.0 - mu + mu * mu / 2.0
    if n == 1:
        return mu - mu * mu
    if n == 2:
        return mu * mu / 2.0
    raise ValueError("expansion defined for n in {0, 1, 2}")


def multi_photon_prob(mu: float, exact: bool = False) -> float:
    """Probability of a burst carrying more than one photon.

    Default is the quadratic form mu/2 + mu**2/4.  Note its leading term: a
    direct expansion of the exact tail starts at mu**2/2, so the quadratic
    form overstates the tail for small mu.  exact=True returns the
    untruncated complement 1 - exp(-mu)*(1 + mu) instead.
    """
    if mu < 0:
        raise ValueError("mu must be >= 0")
    if exact:
        return -math.expm1(-mu) - mu * math.exp(-mu)
    return mu / 2.0 + mu * mu / 4.0


def pns_mutual_information(mu: float, split_fraction: float) -> float:
    """Eavesdropper information (bits) from splitting off a fraction of each
    pulse: mu*lambda*(1-lambda)/2, maximal mu/8 at an even split."""
    if not 0.0 <= split_fraction <= 1.0:
        raise ValueError("split_fraction must be in [0, 1]")
    if mu < 0:
        raise ValueError("mu must be >= 0")
    # lambda*(1-lambda) grouped first so swapping the two factors is bit-exact
    return mu * (split_fraction * (1.0 - split_fraction)) / 2.0
