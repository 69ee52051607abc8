"""Seeded Bernoulli erasure outcomes for the two broadcast links."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .model import ChannelParams

_BLOCK = 4096


class ErasurePair(NamedTuple):
    v1: int
    v2: int


def path_seed(master_seed: int, path_index: int) -> int:
    """64-bit seed for one sample path, mixed from the master seed and the path index."""
    seq = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(path_index),))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


class ErasureStream:
    """Per-path source of erasure pairs.

    Every slot consumes exactly two uniforms, user 1's first, whatever the
    scheme does with them. Pairs drawn one at a time with :meth:`next_pair` and
    in bulk with :meth:`take` come from the same underlying sequence, so the two
    can be mixed freely without changing the path.
    """

    def __init__(self, seed: int):
        self.path_seed = int(seed)
        self._rng = np.random.Generator(np.random.PCG64(self.path_seed))
        self._buf = np.empty((0, 2))
        self._pos = 0

    def uniforms(self, n: int) -> np.ndarray:
        """Next ``n`` slots' worth of uniforms, shape ``(n, 2)``."""
        avail = len(self._buf) - self._pos
        if avail >= n:
            out = self._buf[self._pos:self._pos + n]
            self._pos += n
            return out
        head = self._buf[self._pos:]
        self._buf = np.empty((0, 2))
        self._pos = 0
        return np.concatenate([head, self._rng.random((n - avail, 2))])

    def next_pair(self, ch: ChannelParams) -> ErasurePair:
        if self._pos >= len(self._buf):
            self._buf = self._rng.random((_BLOCK, 2))
            self._pos = 0
        u1, u2 = self._buf[self._pos]
        self._pos += 1
        return ErasurePair(int(u1 < ch.p1), int(u2 < ch.p2))

    def take(self, n: int, ch: ChannelParams) -> tuple[np.ndarray, np.ndarray]:
        """Erasure outcomes for the next ``n`` slots as two uint8 arrays."""
        u = self.uniforms(n)
        return (u[:, 0] < ch.p1).astype(np.uint8), (u[:, 1] < ch.p2).astype(np.uint8)


def derive_stream(master_seed: int, path_index: int) -> ErasureStream:
    return ErasureStream(path_seed(master_seed, path_index))


def derive_generator(master_seed: int, path_index: int, purpose: int) -> np.random.Generator:
    """Auxiliary generator for a path, independent of its erasure stream.

    Used for coding coefficients and analysis samplers; ``purpose`` separates
    the consumers so adding one never shifts another.
    """
    seq = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(path_index), 1, int(purpose)))
    return np.random.Generator(np.random.PCG64(seq))
