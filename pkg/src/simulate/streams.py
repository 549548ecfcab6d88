"""Seeded random streams.

All randomness of a run comes from one 64-bit seed. Every independent unit
of work (a voltage step, a Monte-Carlo replica) gets its own stream keyed by
its position, so results do not depend on execution order or thread count.
"""

import numpy as np


def make_rng(seed, *keys):
    """
    Generator for the stream identified by (seed, keys).

    Args:
        seed: Run seed (non-negative integer, up to 64 bits)
        *keys: Non-negative integers naming the stream, e.g. (step, voltage_index)

    Returns:
        numpy.random.Generator
    """
    seq = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.PCG64(seq))
