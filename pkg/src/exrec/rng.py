"""Seeded PRNG streams.

Every stream is a PCG64 generator built from a numpy ``SeedSequence`` whose
entropy is the master seed and whose spawn key names the consumer (query
index, case index, ...). Streams therefore never depend on scheduling.
"""

from __future__ import annotations

import hashlib

import numpy as np

_BLOCK = 4096


class Stream:
    """Buffered uniform [0, 1) doubles from one PCG64 substream."""

    __slots__ = ("_gen", "_buf", "_pos")

    def __init__(self, seed: int, key: tuple[int, ...] = ()):
        ss = np.random.SeedSequence(seed, spawn_key=key)
        self._gen = np.random.Generator(np.random.PCG64(ss))
        self._buf: list[float] = []
        self._pos = 0

    def uniform(self) -> float:
        if self._pos == len(self._buf):
            self._buf = self._gen.random(_BLOCK).tolist()
            self._pos = 0
        u = self._buf[self._pos]
        self._pos += 1
        return u

    def below(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        return int(self.uniform() * n)


def text_hash64(text: str) -> int:
    """Portable 64-bit hash (BLAKE2b, 8-byte digest, big-endian)."""
    return int.from_bytes(hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest(), "big")


def derive_seed(seed: int, *key: int) -> int:
    """A 64-bit child seed determined by ``seed`` and ``key``."""
    ss = np.random.SeedSequence(seed, spawn_key=key)
    return int(ss.generate_state(1, np.uint64)[0])


def generator(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))
