"""Counter-based random streams.

Every random quantity in the package is drawn from a Philox generator keyed
by a tuple ``(seed, stream, *indices)``.  A block of samples therefore depends
only on its key, never on which worker produced it or in what order.
"""

import numpy as np

# stream identifiers
DESIGN = 1
CUBE_SAMPLES = 2
SIMPLEX_SAMPLES = 3
OCCUPANCY = 4
CORRELATION = 5


def stream(seed, *key):
    """Return a fresh Philox generator for ``(seed, *key)``."""
    seed = int(seed)
    if seed < 0 or seed >= 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    ss = np.random.SeedSequence([seed & 0xFFFFFFFF, seed >> 32, *map(int, key)])
    return np.random.Generator(np.random.Philox(ss))


def as_seed(random_state):
    """Map an sklearn-style ``random_state`` to a 64-bit seed (``None`` -> 0)."""
    if random_state is None:
        return 0
    if isinstance(random_state, (int, np.integer)):
        return int(random_state)
    raise TypeError("random_state must be an int or None; generators are keyed, not stateful")
