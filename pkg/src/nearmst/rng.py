"""Seed streams.

Every random draw comes from a PCG64 generator keyed by
``(seed, crc32(purpose), *indices)`` through :class:`numpy.random.SeedSequence`,
so replicas are independent of each other and of the order they run in.
"""
from __future__ import annotations

import zlib

import numpy as np


def _tag(purpose: str) -> int:
    return zlib.crc32(purpose.encode("utf-8"))


def seed_sequence(seed: int, purpose: str, *indices: int) -> np.random.SeedSequence:
    words = [int(seed) & 0xFFFFFFFFFFFFFFFF, _tag(purpose), *(int(i) for i in indices)]
    return np.random.SeedSequence(words)


def generator(seed: int, purpose: str, *indices: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed_sequence(seed, purpose, *indices)))


def derive_seed(seed: int, purpose: str, *indices: int) -> int:
    """A 63-bit integer seed for a sub-task (e.g. replica ``i`` of a sweep)."""
    state = seed_sequence(seed, purpose, *indices).generate_state(2, dtype=np.uint32)
    return int((int(state[0]) << 31) ^ int(state[1])) & 0x7FFFFFFFFFFFFFFF
