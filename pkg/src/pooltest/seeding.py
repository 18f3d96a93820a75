"""Seeded, splittable random streams.

Every replicate derives its own generator from (seed, index, ...), so the
result of a run never depends on how many workers executed it.
"""
import numpy as np


def derive_rng(seed: int, *keys: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in keys)))
