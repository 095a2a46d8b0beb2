"""
Seeded random number generation.

All randomness flows through PCG64 generators built from a SeedSequence whose
spawn key names the stream, e.g. (experiment, repeat, mode). Identical seeds and
streams give identical draws on every platform.
"""

from typing import Union

import numpy as np

SeedLike = Union[int, np.random.Generator]


def make_generator(seed: int, *stream: int) -> np.random.Generator:
    """
    Build a PCG64 generator for a named stream.

    Args:
        seed: Root seed (non-negative integer)
        *stream: Stream coordinates appended to the spawn key

    Returns:
        numpy Generator
    """
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.PCG64(sequence))


def as_generator(seed: SeedLike) -> np.random.Generator:
    """Accept either a seed or an existing generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return make_generator(seed)
