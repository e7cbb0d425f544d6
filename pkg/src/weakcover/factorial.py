"""Regular two-level fractional factorial designs on the cube vertices.

A ``2^(d-k)`` design has ``p = d - k`` base factors run as a full factorial;
each of the ``k`` added factors is the product of a subset ("generator word")
of base factors.  Words are tuples of 1-based base-factor indices.
"""

import itertools

import numpy as np

# Minimum-aberration generators for the cases tabulated in the experiments.
# d=10 entries are exhaustive-search minima of the word-length pattern; d=20
# entries are the best patterns found by a randomized exchange search.
CATALOG = {
    (10, 3): ((1, 2, 3, 4), (1, 2, 5, 6), (1, 3, 5, 7)),
    (10, 4): ((1, 2, 3), (1, 2, 4, 5), (1, 2, 4, 6), (1, 3, 5, 6)),
    (20, 10): (
        (1, 2, 3, 6, 7, 8, 9),
        (2, 5, 6, 8, 10),
        (1, 5, 6, 9, 10),
        (1, 2, 3, 4, 5, 7, 8),
        (1, 4, 7, 8, 10),
        (2, 3, 4, 5, 6),
        (3, 4, 5, 6, 8, 9, 10),
        (2, 5, 6, 7, 9),
        (2, 4, 6, 7, 8),
        (1, 2, 3, 5, 8, 9, 10),
    ),
    (20, 11): (
        (3, 4, 5, 6, 7, 8),
        (2, 3, 5, 6, 8),
        (1, 2, 4, 6),
        (2, 3, 4, 8, 9),
        (1, 2, 3, 5, 6, 9),
        (1, 2, 4, 5, 8, 9),
        (1, 5, 6, 7, 8, 9),
        (1, 2, 6, 7, 8),
        (1, 3, 4, 7, 8, 9),
        (2, 3, 4, 5, 7, 9),
        (1, 4, 5, 7),
    ),
    (20, 13): (
        (1, 3, 4, 7),
        (1, 6, 7),
        (2, 5, 7),
        (1, 2, 3, 5, 6, 7),
        (1, 2, 3, 4, 6),
        (1, 4, 5),
        (1, 4, 6),
        (3, 4, 5),
        (2, 4, 5, 6, 7),
        (3, 5, 6, 7),
        (2, 3, 4, 5, 6),
        (1, 2, 4),
        (1, 2, 3, 7),
    ),
    (20, 14): (
        (1, 2, 3),
        (2, 3, 5),
        (1, 3, 5, 6),
        (2, 3, 4, 5, 6),
        (3, 4, 6),
        (2, 3, 6),
        (1, 2, 5, 6),
        (1, 3, 4, 5),
        (2, 3, 4),
        (2, 4, 6),
        (1, 2, 4, 5),
        (1, 4, 6),
        (1, 2, 3, 4, 6),
        (4, 5, 6),
    ),
}


def default_generators(d: int, k: int):
    """Generator words for ``2^(d-k)``: catalog entry, or analytic for ``k <= 1``."""
    if not 0 <= k < d:
        raise ValueError(f"need 0 <= k < d, got d={d}, k={k}")
    if k == 0:
        return ()
    if k == 1:
        # maximum resolution half fraction: x_d = x_1 x_2 ... x_{d-1}
        return (tuple(range(1, d)),)
    try:
        return CATALOG[(d, k)]
    except KeyError:
        raise ValueError(
            f"no catalog generators for a 2^({d}-{k}) design; pass generator words explicitly"
        ) from None


def _validate(d, k, words):
    p = d - k
    if len(words) != k:
        raise ValueError(f"expected {k} generator words, got {len(words)}")
    seen = set()
    for w in words:
        w = tuple(sorted(w))
        if len(w) < 2 or len(set(w)) != len(w) or w[0] < 1 or w[-1] > p:
            raise ValueError(f"invalid generator word {w} for {p} base factors")
        if w in seen:
            raise ValueError(f"duplicate generator word {w}")
        seen.add(w)


def factorial_points(d: int, k: int = 0, generators=None) -> np.ndarray:
    """Rows of the ``2^(d-k)`` design as ``+-1`` vectors, base factors in standard order."""
    words = default_generators(d, k) if generators is None else tuple(map(tuple, generators))
    _validate(d, k, words)
    p = d - k
    runs = np.arange(2**p, dtype=np.int64)
    base = np.where((runs[:, None] >> np.arange(p)) & 1, 1.0, -1.0)
    added = [np.prod(base[:, [i - 1 for i in w]], axis=1) for w in words]
    return np.column_stack([base, *added]) if added else base


def word_length_pattern(d: int, k: int, generators=None) -> tuple:
    """``(A_3, ..., A_d)``: counts of defining words of each length."""
    words = default_generators(d, k) if generators is None else tuple(map(tuple, generators))
    _validate(d, k, words)
    masks = [sum(1 << (i - 1) for i in w) for w in words]
    counts = [0] * (d + 1)
    for size in range(1, k + 1):
        for combo in itertools.combinations(range(k), size):
            m = 0
            for j in combo:
                m ^= masks[j]
            counts[bin(m).count("1") + size] += 1
    return tuple(counts[3:])


def resolution(d: int, k: int, generators=None) -> int:
    """Length of the shortest defining word (``d + 1`` for a full factorial)."""
    pattern = word_length_pattern(d, k, generators)
    for length, count in enumerate(pattern, start=3):
        if count:
            return length
    return d + 1
