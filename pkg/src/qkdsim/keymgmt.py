"""Raw key pools, QBER estimation, error-correction penalty and XOR relay.

A pool holds the bit values both ends recorded for delivered rounds of one
node pair.  Error estimation consumes a deterministic prefix sample, the
corrected rate applies the binary-entropy penalty R*(1 - 2*h(Q)), and chains
of per-segment keys collapse to an end-to-end key via XOR announcements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass
class KeyPool:
    """Matched bit sequences accumulated between one node pair."""

    pair: tuple[int, int]
    bits_a: list[int] = field(default_factory=list)
    bits_b: list[int] = field(default_factory=list)
    rounds_attempted: int = 0

    def add(self, bit_a: int, bit_b: int) -> None:
        self.bits_a.append(bit_a)
        self.bits_b.append(bit_b)

    def __len__(self) -> int:
        return len(self.bits_a)


@dataclass(frozen=True)
class QberEstimate:
    q: float
    sample_size: int
    clamped: bool = False


def estimate_qber(pool: KeyPool, sample_fraction: float = 0.1) -> QberEstimate:
    """Mismatch fraction over the first ceil(fraction*n) pool bits.

    The sampled bits are disclosed for comparison, so they are removed from
    the pool.  Estimates above 0.5 clamp to 0.5 with the clamped flag set.
    """
    if not 0.0 < sample_fraction <= 1.0:
        raise ValueError("sample_fraction must be in (0, 1]")
    n = len(pool)
    if n == 0:
        raise ValueError("cannot estimate QBER of an empty pool")
    k = math.ceil(sample_fraction * n)
    mismatches = sum(a != b for a, b in zip(pool.bits_a[:k], pool.bits_b[:k]))
    del pool.bits_a[:k]
    del pool.bits_b[:k]
    q = mismatches / k
    if q > 0.5:
        return QberEstimate(0.5, k, clamped=True)
    return QberEstimate(q, k)


def binary_entropy(q: float) -> float:
    """-q*log2(q) - (1-q)*log2(1-q), with h(0) = h(1) = 0 by continuity."""
    if not 0.0 <= q <= 1.0:
        raise ValueError("q must be in [0, 1]")
    if q == 0.0 or q == 1.0:
        return 0.0
    return -q * math.log2(q) - (1.0 - q) * math.log2(1.0 - q)


def corrected_key_rate(raw_rate: float, q: float) -> float:
    """Error-corrected rate raw_rate*(1 - 2*h(q)), clamped at zero.

    The raw formula goes negative once q crosses roughly 0.11; a key rate
    cannot, so the result floors at 0.
    """
    if raw_rate < 0:
        raise ValueError("raw_rate must be >= 0")
    if not 0.0 <= q <= 0.5:
        raise ValueError("q must be in [0, 0.5]")
    return max(0.0, raw_rate * (1.0 - 2.0 * binary_entropy(q)))


def xor_relay(segment_keys: list[list[int]]) -> list[int]:
    """Collapse a chain of per-segment keys to the end-to-end key.

    Each intermediate node announces the XOR of its two adjacent segment
    keys; the receiving end folds the announcements into its own segment key
    and recovers the first segment's key exactly.  Keys are truncated to the
    shortest segment first.
    """
    if not segment_keys:
        raise ValueError("at least one segment key required")
    n = min(len(k) for k in segment_keys)
    keys = [k[:n] for k in segment_keys]
    announcements = [
        [x ^ y for x, y in zip(keys[i], keys[i + 1])]
        for i in range(len(keys) - 1)
    ]
    recovered = list(keys[-1])
    for ann in reversed(announcements):
        recovered = [x ^ y for x, y in zip(recovered, ann)]
    return recovered


def key_rate(final_pool_bits: int, rounds: int) -> float:
    """Key bits produced per round: pool size divided by rounds attempted."""
    if rounds <= 0:
        raise ValueError("rounds must be positive")
    if final_pool_bits < 0:
        raise ValueError("final_pool_bits must be >= 0")
    return final_pool_bits / rounds
