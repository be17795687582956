"""Seeded random streams derived by labeled splitting.

A single integer seed feeds every stream in a campaign; sub-streams are keyed
by labels (strings or integers) so that e.g. shard 3 of suite ``psd_block``
always sees the same numbers, whatever else ran before it.
"""

import zlib

import numpy as np

SeededRng = np.random.Generator


def _label_key(label) -> int:
    if isinstance(label, (int, np.integer)):
        if label < 0:
            raise ValueError("integer labels must be nonnegative")
        return int(label)
    return zlib.crc32(str(label).encode("utf-8"))


def make_rng(seed: int, *labels) -> SeededRng:
    if seed < 0:
        raise ValueError("seed must be nonnegative")
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(_label_key(x) for x in labels))
    return np.random.Generator(np.random.PCG64(ss))


def complex_normal(rng: SeededRng, shape) -> np.ndarray:
    """Standard circularly-symmetric complex Gaussian entries."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
