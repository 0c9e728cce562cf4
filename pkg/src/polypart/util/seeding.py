"""Seeded, splittable random generators.

All randomness in polypart comes from one named 64-bit seed. Workers and
sub-steps get their own stream by extending the spawn key, so the result
of a computation does not depend on which process ran it, or in which
order.
"""

import logging
from fractions import Fraction

import numpy as np

logger = logging.getLogger(__name__)

SEED_MASK = 2**64 - 1


def make_rng(seed, *keys):
    """Return a counter-based generator for a seed and a path of keys.

    The same (seed, keys) always gives the same stream. Different key
    paths give statistically independent streams.

    Args:
        seed (int): The run seed. Must fit in 64 bits.
        keys (int): Path below the seed, e.g. (level, restart).

    Returns:
        numpy.random.Generator backed by Philox.
    """
    if seed is None:
        raise ValueError("An explicit seed is required")
    seed = int(seed)
    if seed < 0 or seed > SEED_MASK:
        raise ValueError("Seed must be a 64-bit unsigned integer, got %d" % seed)
    sequence = np.random.SeedSequence(seed, spawn_key=tuple(int(key) for key in keys))
    return np.random.Generator(np.random.Philox(sequence))


def derive_seed(seed, *keys):
    """A 64-bit integer seed derived from a parent seed and keys."""
    sequence = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def random_fraction(rng, low, high, denominator):
    """Uniform rational on the grid {low + j/denominator} inside [low, high)

    Args:
        rng (numpy.random.Generator)
        low, high (Fraction): interval, low < high
        denominator (int): grid resolution

    Returns:
        Fraction
    """
    low = Fraction(low)
    high = Fraction(high)
    steps = int((high - low) * denominator)
    if steps <= 0:
        return low
    if steps < 2**62:
        offset = int(rng.integers(0, steps))
    else:
        offset = int.from_bytes(rng.bytes(32), "big") % steps
    return low + Fraction(offset, denominator)
