"""Unscrambled base-2 Sobol sequence, gray-code construction.

Direction numbers are the Joe & Kuo (2008) set, bundled for the first 64
dimensions.  The sequence starts at index 0, the origin.
"""

import json
from functools import lru_cache
from importlib import resources

import numpy as np

BITS = 32
MAX_DIM = 64


@lru_cache(maxsize=None)
def _table():
    raw = json.loads(resources.files("weakcover").joinpath("data/sobol_directions.json").read_text())
    return raw["poly"], raw["m_init"]


@lru_cache(maxsize=None)
def direction_numbers(d: int) -> np.ndarray:
    """Return ``V`` of shape (d, BITS); ``V[j, i]`` is ``m_{i+1} << (BITS - i - 1)``."""
    if not 1 <= d <= MAX_DIM:
        raise ValueError(f"Sobol dimension must be in [1, {MAX_DIM}], got {d}")
    polys, m_init = _table()
    V = np.zeros((d, BITS), dtype=np.uint64)
    V[0] = [1 << (BITS - 1 - i) for i in range(BITS)]
    for j in range(1, d):
        p = polys[j]
        s = p.bit_length() - 1
        a = (p >> 1) & ((1 << (s - 1)) - 1)
        v = [0] * BITS
        for i in range(min(s, BITS)):
            v[i] = m_init[j][i] << (BITS - 1 - i)
        for i in range(s, BITS):
            x = v[i - s] ^ (v[i - s] >> s)
            for k in range(1, s):
                if (a >> (s - 1 - k)) & 1:
                    x ^= v[i - k]
            v[i] = x
        V[j] = v
    V.setflags(write=False)
    return V


def sobol_points(n: int, d: int, skip: int = 0) -> np.ndarray:
    """First ``n`` points (after ``skip``) of the ``d``-dimensional Sobol sequence in ``[0,1)^d``."""
    if n < 0 or skip < 0:
        raise ValueError("n and skip must be nonnegative")
    if n + skip > 2**BITS:
        raise ValueError("sequence exhausted")
    V = direction_numbers(d)
    idx = np.arange(skip, skip + n, dtype=np.uint64)
    gray = idx ^ (idx >> np.uint64(1))
    x = np.zeros((n, d), dtype=np.uint64)
    for b in range(BITS):
        bit = ((gray >> np.uint64(b)) & np.uint64(1)).astype(bool)
        if not bit.any():
            if (gray >> np.uint64(b)).max(initial=0) == 0:
                break
            continue
        x[bit] ^= V[:, b]
    return x.astype(float) / float(2**BITS)
