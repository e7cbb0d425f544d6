"""Point-design generators for the cube ``[-1,1]^d`` and the simplex.

Every cube family is a scaled copy of a unit design on ``[-1,1]^d``:
the design at scaling ``delta`` is ``delta * unit``.  Simplex families are
affine images of uniform simplex points.  :func:`unit_design` exposes the
unscaled points so that callers can sweep ``delta`` with common random
numbers.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace

import numpy as np

from . import _rng
from .factorial import default_generators, factorial_points
from .geometry import PointSet, simplex_spacings
from .sobol import MAX_DIM as SOBOL_MAX_DIM
from .sobol import sobol_points

BETA = "beta"
VERTEX_WITH = "vertex_with"
VERTEX_WITHOUT = "vertex_without"
SOBOL = "sobol"
FACTORIAL = "factorial"
SIMPLEX_S1 = "simplex_s1"
SIMPLEX_S2 = "simplex_s2"

FAMILIES = (BETA, VERTEX_WITH, VERTEX_WITHOUT, SOBOL, FACTORIAL, SIMPLEX_S1, SIMPLEX_S2)
RANDOM_FAMILIES = frozenset({BETA, VERTEX_WITH, VERTEX_WITHOUT, SIMPLEX_S1, SIMPLEX_S2})
NESTED_FAMILIES = frozenset({BETA, VERTEX_WITH, VERTEX_WITHOUT, SOBOL, SIMPLEX_S1, SIMPLEX_S2})
SIMPLEX_FAMILIES = frozenset({SIMPLEX_S1, SIMPLEX_S2})
# points whose norm does not depend on the draw (all on the vertex set)
VERTEX_FAMILIES = frozenset({VERTEX_WITH, VERTEX_WITHOUT, FACTORIAL})

# Random designs are drawn in fixed-size blocks, each from its own keyed
# stream, so the n-point design is a prefix of the (n+1)-point one.
BLOCK = 256
_MAX_VERTEX_DIM = 62


@dataclass(frozen=True)
class DesignSpec:
    """Declarative description of a design.

    Parameters
    ----------
    family : str
        One of :data:`FAMILIES`.
    d, n : int
        Dimension and number of points.
    delta : float
        Scaling in ``[0, 1]``.
    alpha : float
        Beta shape parameter, ``beta`` family only (must be > 0; ``alpha = 0``
        is the ``vertex_with`` family).
    k : int, optional
        Number of generators for ``factorial``; defaults to ``d - log2(n)``.
    generators : tuple of tuple of int, optional
        Generator words for ``factorial`` when no catalog entry exists.
    seed : int
        64-bit seed for random families.
    """

    family: str
    d: int
    n: int
    delta: float = 1.0
    alpha: float = 1.0
    k: int | None = None
    generators: tuple | None = None
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"d must be a positive integer, got {self.d}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError(f"delta must lie in [0, 1], got {self.delta}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.family == BETA and not self.alpha > 0:
            raise ValueError("beta designs need alpha > 0; alpha = 0 is the vertex_with family")
        if self.family in (VERTEX_WITH, VERTEX_WITHOUT) and self.d > _MAX_VERTEX_DIM:
            raise ValueError(f"vertex designs support d <= {_MAX_VERTEX_DIM}")
        if self.family == VERTEX_WITHOUT and self.n > 2**self.d:
            raise ValueError(f"sampling without replacement needs n <= 2^d = {2 ** self.d}")
        if self.family == SOBOL and self.d > SOBOL_MAX_DIM:
            raise ValueError(f"Sobol direction numbers are bundled for d <= {SOBOL_MAX_DIM}")
        if self.family == FACTORIAL:
            k = self.k
            if k is None:
                k = self.d - (self.n.bit_length() - 1)
                object.__setattr__(self, "k", k)
            if not 0 <= k < self.d or self.n != 2 ** (self.d - k):
                raise ValueError(f"factorial designs need n = 2^(d-k) with 0 <= k < d; got d={self.d}, n={self.n}, k={k}")
            if self.generators is None:
                default_generators(self.d, k)
            else:
                object.__setattr__(self, "generators", tuple(map(tuple, self.generators)))

    @property
    def is_random(self) -> bool:
        return self.family in RANDOM_FAMILIES

    def with_(self, **changes) -> "DesignSpec":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)


# ------------------------------------------------------------------- sampling


def sample_beta_scalar(alpha, delta, rng):
    """One draw from the symmetric Beta(alpha, alpha) law rescaled to ``(-delta, delta)``."""
    if not alpha > 0 or not delta > 0:
        raise ValueError("alpha and delta must be positive")
    return float(delta * _beta_unit(rng, alpha, ()))


def _beta_unit(rng, alpha, size):
    # X / (X + Y) with X, Y ~ Gamma(alpha), mapped to (-1, 1)
    x = rng.standard_gamma(alpha, size)
    y = rng.standard_gamma(alpha, size)
    tot = x + y
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(tot > 0, x / np.where(tot > 0, tot, 1.0), 0.5)
    return 2.0 * t - 1.0


def simplex_uniform(d: int, n: int, seed: int = 0, replicate: int = 0) -> PointSet:
    """``n`` i.i.d. uniform points on the standard simplex, by uniform spacings."""
    return PointSet(_blocks(n, d, seed, replicate, lambda rng, m: simplex_spacings(rng, m, d)))


def _blocks(n, d, seed, replicate, draw):
    out = np.empty((n, d))
    for b, start in enumerate(range(0, n, BLOCK)):
        rng = _rng.stream(seed, _rng.DESIGN, replicate, b)
        block = draw(rng, BLOCK)
        out[start : start + BLOCK] = block[: n - start]
    return out


def _vertex_codes_without(n, d, seed, replicate):
    # lazy Fisher-Yates over {0, ..., 2^d - 1}; the first n codes are nested in n
    k = 2**d
    swapped = {}
    codes = np.empty(n, dtype=np.int64)
    for b, start in enumerate(range(0, n, BLOCK)):
        rng = _rng.stream(seed, _rng.DESIGN, replicate, b)
        lows = np.arange(start, start + BLOCK, dtype=np.int64)
        lows = np.minimum(lows, k - 1)
        picks = rng.integers(lows, k, dtype=np.int64)
        for i, j in zip(range(start, min(start + BLOCK, n)), picks.tolist()):
            vi = swapped.get(i, i)
            vj = swapped.get(j, j)
            swapped[j] = vi
            codes[i] = vj
    return codes


def _codes_to_signs(codes, d):
    bits = (codes[:, None] >> np.arange(d, dtype=np.int64)) & 1
    return np.where(bits == 1, 1.0, -1.0)


def unit_design(spec: DesignSpec, replicate: int = 0) -> np.ndarray:
    """Points of ``spec`` before the delta map.

    Cube families return points on ``[-1,1]^d`` (delta = 1); simplex families
    return uniform points on the standard simplex.
    """
    d, n, seed = spec.d, spec.n, spec.seed
    fam = spec.family
    if fam == BETA:
        return _blocks(n, d, seed, replicate, lambda rng, m: _beta_unit(rng, spec.alpha, (m, d)))
    if fam == VERTEX_WITH:
        return _blocks(n, d, seed, replicate, lambda rng, m: 2.0 * rng.integers(0, 2, size=(m, d)) - 1.0)
    if fam == VERTEX_WITHOUT:
        return _codes_to_signs(_vertex_codes_without(n, d, seed, replicate), d)
    if fam == SOBOL:
        return 2.0 * sobol_points(n, d) - 1.0
    if fam == FACTORIAL:
        return factorial_points(d, spec.k, spec.generators)
    return _blocks(n, d, seed, replicate, lambda rng, m: simplex_spacings(rng, m, d))


def delta_center(spec: DesignSpec) -> np.ndarray:
    """Fixed point of the delta map: origin for cube and S1, centroid for S2."""
    if spec.family == SIMPLEX_S2:
        return np.full(spec.d, 1.0 / (spec.d + 1))
    return np.zeros(spec.d)


def apply_delta(spec: DesignSpec, unit: np.ndarray, delta: float) -> np.ndarray:
    c = delta_center(spec)
    return c + delta * (unit - c)


def generate(spec: DesignSpec, replicate: int = 0) -> PointSet:
    """Generate the point set described by ``spec``.

    ``replicate`` selects an independent draw of a random design (the
    ``replicate``-th of a Monte Carlo batch); deterministic families ignore it.
    """
    return PointSet(apply_delta(spec, unit_design(spec, replicate), spec.delta))
