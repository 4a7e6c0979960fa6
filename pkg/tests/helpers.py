"""Random inputs shared by the test modules."""

import numpy as np

from gowerslab.zmod import CyclicFn


def random_fn(rng, n, bounded=True, real=False):
    """Random function on Z/nZ; bounded ones take values in the closed unit disk."""
    if real:
        v = rng.uniform(-1.0, 1.0, n)
    else:
        v = np.sqrt(rng.random(n)) * np.exp(2j * np.pi * rng.random(n))
    if not bounded:
        v = v * rng.uniform(0.5, 3.0)
    return CyclicFn(n, v)


def random_unit_interval(rng, n):
    return CyclicFn(n, rng.random(n))
