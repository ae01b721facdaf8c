"""Seed handling.

All randomness goes through numpy's PCG64 bit generator. Child streams are
derived by feeding ``(seed, *path)`` to :class:`numpy.random.SeedSequence`,
which hashes the words, so trial ``i`` gets the same stream no matter which
worker runs it.
"""

import numpy as np

SEED_MASK = (1 << 64) - 1


def derive_seed(seed, *path):
    """Hash ``seed`` and a path of non-negative ints into a new 64-bit seed."""
    words = [int(seed) & SEED_MASK, *(int(p) for p in path)]
    state = np.random.SeedSequence(words).generate_state(1, dtype=np.uint64)
    return int(state[0])


def generator(seed):
    """A PCG64 generator for a 64-bit seed."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed) & SEED_MASK)))
