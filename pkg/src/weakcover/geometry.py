"""Domains, point sets and Euclidean nearest-point distances."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _rng

FULL = "full"
HALF = "half"


class PointSet:
    """An immutable ordered collection of ``n`` points in ``R^d``.

    Parameters
    ----------
    points : array_like of shape (n, d)
        Coordinates.  Copied and frozen.
    """

    __slots__ = ("_points",)

    def __init__(self, points):
        arr = np.array(points, dtype=float, copy=True)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1)
        if arr.ndim != 2 or arr.shape[1] < 1:
            raise ValueError(f"points must have shape (n, d) with d >= 1, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("points must be finite")
        arr.setflags(write=False)
        self._points = arr

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def dim(self) -> int:
        return self._points.shape[1]

    def __len__(self):
        return self._points.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self._points if dtype is None else self._points.astype(dtype)

    def __eq__(self, other):
        return isinstance(other, PointSet) and np.array_equal(self._points, other._points)

    def __hash__(self):
        return hash(self._points.tobytes())

    def __repr__(self):
        return f"PointSet(n={len(self)}, dim={self.dim})"

    def prefix(self, n: int) -> "PointSet":
        if not 1 <= n <= len(self):
            raise ValueError(f"prefix length must be in [1, {len(self)}]")
        return PointSet(self._points[:n])

    def is_prefix_of(self, other: "PointSet") -> bool:
        return (
            self.dim == other.dim
            and len(self) <= len(other)
            and np.array_equal(self._points, other._points[: len(self)])
        )

    def to_csv(self, path=None) -> str:
        """Write one point per row under a ``x1,...,xd`` header.

        Values use ``repr`` formatting, so a round trip is exact.
        """
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"x{i + 1}" for i in range(self.dim)])
        for row in self._points:
            w.writerow([repr(float(v)) for v in row])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_csv(cls, source) -> "PointSet":
        text = source if "\n" in str(source) else Path(source).read_text()
        rows = list(csv.reader(io.StringIO(text)))
        header, body = rows[0], [r for r in rows[1:] if r]
        if header != [f"x{i + 1}" for i in range(len(header))]:
            raise ValueError("CSV header must be x1,...,xd")
        return cls([[float(v) for v in r] for r in body])


# --------------------------------------------------------------------- domains


@dataclass(frozen=True)
class Cube:
    """The cube ``[-1, 1]^dim``."""

    dim: int

    def __post_init__(self):
        _check_dim(self.dim)

    @property
    def center(self):
        return np.zeros(self.dim)

    def sample(self, n, rng):
        return rng.uniform(-1.0, 1.0, size=(n, self.dim))

    def contains(self, x, atol=1e-12):
        x = np.atleast_2d(x)
        return np.all(np.abs(x) <= 1.0 + atol, axis=1)

    def diameter_bound(self, delta=1.0):
        """Upper bound on the distance from the cube to any point of ``[-delta, delta]^dim``."""
        return math.sqrt(self.dim) * (1.0 + delta)


@dataclass(frozen=True)
class Simplex:
    """A simplex ``{u : sum(u) <= upper, u_i >= lower}``.

    ``Simplex(d)`` is the standard orthogonal simplex; use the
    :func:`scaled_simplex_1` and :func:`scaled_simplex_2` constructors for the
    two delta-scalings.
    """

    dim: int
    lower: float = 0.0
    upper: float = 1.0
    kind: str = field(default="standard", compare=False)

    def __post_init__(self):
        _check_dim(self.dim)
        if self.upper - self.dim * self.lower < 0:
            raise ValueError("empty simplex")

    @property
    def center(self):
        """Centroid of the standard simplex, the fixed point of both scalings."""
        return np.full(self.dim, 1.0 / (self.dim + 1))

    @property
    def vertices(self):
        d, lo = self.dim, self.lower
        side = self.upper - d * lo
        v = np.full((d + 1, d), lo)
        v[1:] += side * np.eye(d)
        return v

    def sample(self, n, rng):
        d, lo = self.dim, self.lower
        side = self.upper - d * lo
        return lo + side * simplex_spacings(rng, n, d)

    def contains(self, x, atol=1e-12):
        x = np.atleast_2d(x)
        return (x.sum(axis=1) <= self.upper + atol) & np.all(x >= self.lower - atol, axis=1)

    def diameter_bound(self, delta=1.0):
        return math.sqrt(2.0)


def scaled_simplex_1(dim, delta):
    """``delta * S_d``: the standard simplex shrunk toward the origin corner."""
    _check_delta(delta)
    return Simplex(dim, 0.0, float(delta), kind="S1")


def scaled_simplex_2(dim, delta):
    """The standard simplex shrunk by ``delta`` about its centroid."""
    _check_delta(delta)
    return Simplex(dim, (1.0 - delta) / (dim + 1), (dim + delta) / (dim + 1), kind="S2")


def simplex_spacings(rng, n, d):
    """First ``d`` spacings of ``d`` sorted uniforms with 0 and 1 appended."""
    u = np.sort(rng.random((n, d)), axis=1)
    padded = np.concatenate([np.zeros((n, 1)), u, np.ones((n, 1))], axis=1)
    return np.diff(padded, axis=1)[:, :d]


def _check_dim(d):
    if int(d) != d or d < 1:
        raise ValueError(f"dimension must be a positive integer, got {d}")


def _check_delta(delta):
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta must lie in [0, 1], got {delta}")


# ------------------------------------------------------------------- distances


def _as_points(Z):
    arr = Z.points if isinstance(Z, PointSet) else np.atleast_2d(np.asarray(Z, dtype=float))
    if arr.shape[0] == 0:
        raise ValueError("point set is empty")
    return arr


def min_distance(U, Z) -> float:
    """Euclidean distance from ``U`` to the nearest point of ``Z``."""
    u = np.asarray(U, dtype=float).ravel()
    z = _as_points(Z)
    if z.shape[1] != u.shape[0]:
        raise ValueError(f"dimension mismatch: point has {u.shape[0]} coords, set has {z.shape[1]}")
    return float(np.sqrt(np.min(np.sum((z - u) ** 2, axis=1))))


def nearest_sq_distances(X, Z, return_index=False):
    """Squared distance from every row of ``X`` to its nearest row of ``Z``.

    Brute-force scan using ``|x|^2 + |z|^2 - 2 x.z``; negative round-off is
    clipped to zero.
    """
    X = np.asarray(X, dtype=float)
    z = _as_points(Z)
    if X.shape[1] != z.shape[1]:
        raise ValueError(f"dimension mismatch: {X.shape[1]} vs {z.shape[1]}")
    d2 = np.einsum("ij,ij->i", X, X)[:, None] + np.einsum("ij,ij->i", z, z)[None, :] - 2.0 * (X @ z.T)
    idx = np.argmin(d2, axis=1)
    best = np.maximum(d2[np.arange(X.shape[0]), idx], 0.0)
    return (best, idx) if return_index else best


def covering_radius_factorial(d: int, fraction: str = FULL) -> float:
    """Covering radius of the full or half-fraction ``2^d`` design at ``delta = 1/2``.

    The full factorial on ``{+-1/2}^d`` has covering radius ``sqrt(d)/2``; the
    maximum-resolution half fraction has ``sqrt(d + 8)/2`` (``d > 2``).
    """
    _check_dim(d)
    if fraction == FULL:
        return math.sqrt(d) / 2.0
    if fraction == HALF:
        if d <= 2:
            raise ValueError("the half-fraction radius formula needs d > 2")
        return math.sqrt(d + 8) / 2.0
    raise ValueError(f"fraction must be {FULL!r} or {HALF!r}")


def normalized_radius(n: int, d: int, r: float) -> float:
    """``n^(1/d) * r``, the radius scaled for comparing designs of different sizes."""
    if n < 1 or d < 1:
        raise ValueError("n and d must be >= 1")
    if r < 0:
        raise ValueError("r must be nonnegative")
    return n ** (1.0 / d) * r


def uniform_cube(d, n, seed, *key):
    """``n`` uniform points in ``[-1,1]^d`` from the keyed cube stream."""
    return Cube(d).sample(n, _rng.stream(seed, _rng.CUBE_SAMPLES, *key))
