"""Counter-based random streams keyed by integer tuples.

Every stochastic output draws from ``stream(seed, *key)``, a Philox
generator whose key is derived from the full tuple. Streams for different
keys are independent, so results do not depend on evaluation order or on
how work is split across threads.
"""
import numpy as np


def stream(seed: int, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, *[int(k) for k in key]])
    return np.random.Generator(np.random.Philox(ss))
