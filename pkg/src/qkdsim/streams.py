"""Deterministic random streams for reproducible, parallel Monte Carlo runs.

Every stream is a counter-based Philox generator keyed by the tuple
(master_seed, point_index, path_index, round_index).  Streams with distinct
keys are statistically independent, and a given key always yields the same
draw sequence no matter in which order (or on how many workers) the streams
are consumed.
"""

from __future__ import annotations

import numpy as np

_BLOCK = 1024

# Index widths inside the 64-bit stream sub-key.
_MAX_POINT = 1 << 24
_MAX_PATH = 1 << 8
_MAX_ROUND = 1 << 32


class RandomStream:
    """Buffered scalar uniform draws from a single bit generator.

    Draws are served one at a time (block-buffered internally) and counted,
    so a consumer can report exactly how many it used.
    """

    __slots__ = ("_gen", "_buf", "_pos", "_len", "draws")

    def __init__(self, bit_generator: np.random.BitGenerator):
        self._gen = np.random.Generator(bit_generator)
        self._buf = None
        self._pos = 0
        self._len = 0
        self.draws = 0

    def uniform(self) -> float:
        """One uniform draw on [0, 1)."""
        if self._pos == self._len:
            self._buf = self._gen.random(_BLOCK)
            self._pos = 0
            self._len = _BLOCK
        v = self._buf.item(self._pos)
        self._pos += 1
        self.draws += 1
        return v

    def bit(self) -> int:
        """One fair coin flip (consumes one uniform draw)."""
        return 1 if self.uniform() < 0.5 else 0


def derive_stream(master_seed: int, point_index: int, path_index: int,
                  round_index: int = 0) -> RandomStream:
    """Derive the independent stream for one (point, path, round) work unit.

    The indices are packed into the 128-bit Philox key, so equal inputs give
    bit-identical streams and unequal inputs give independent ones.  Bounds:
    point_index < 2**24, path_index < 2**8, round_index < 2**32.
    """
    if master_seed < 0:
        raise ValueError("master_seed must be non-negative")
    if point_index < 0 or path_index < 0 or round_index < 0:
        raise ValueError("stream indices must be non-negative")
    if point_index >= _MAX_POINT or path_index >= _MAX_PATH or round_index >= _MAX_ROUND:
        raise ValueError("stream index out of range")
    sub = (point_index << 40) | (path_index << 32) | round_index
    key = np.array([master_seed & 0xFFFFFFFFFFFFFFFF, sub], dtype=np.uint64)
    return RandomStream(np.random.Philox(key=key))
