"""Monte Carlo reference estimators.

Every estimator draws its domain samples from keyed streams: the samples for
design replicate ``k`` come in chunks of :data:`CHUNK` rows, chunk ``j`` keyed
by ``(seed, stream, k, j)``.  Chunks are processed by a thread pool and
reduced in key order, so estimates are bit-identical for any worker count.
Because the samples do not depend on the design, two designs evaluated with
the same seed see the same uniform points (common random numbers).
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _rng
from .designs import (
    SIMPLEX_FAMILIES,
    DesignSpec,
    delta_center,
    generate,
    unit_design,
)
from .geometry import Cube, PointSet, Simplex

CHUNK = 4096
_COLUMN_BLOCK = 2048
_ROW_BLOCK = 256
DEFAULT_SAMPLES = 100_000
DEFAULT_REPLICATIONS = 40


def resolve_workers(workers=None) -> int:
    """Worker count: explicit value, else ``COVER_THREADS``, else the CPU count."""
    if workers is None:
        env = os.environ.get("COVER_THREADS")
        workers = int(env) if env else (os.cpu_count() or 1)
    workers = int(workers)
    if workers < 1:
        raise ValueError("workers must be >= 1")
    return workers


@dataclass(frozen=True)
class McConfig:
    """Monte Carlo settings.

    Parameters
    ----------
    samples : int
        Total number of domain samples ``N``, split evenly over the design
        replications.
    seed : int
        64-bit unsigned seed.  Also keys the random designs when a
        :class:`~weakcover.designs.DesignSpec` is evaluated.
    design_replications : int, optional
        Number ``R`` of independent designs averaged for random families.
        Defaults to 40 for random families and 1 otherwise.
    workers : int, optional
        Threads used for the sample chunks; see :func:`resolve_workers`.
    """

    samples: int = DEFAULT_SAMPLES
    seed: int = 0
    design_replications: int | None = None
    workers: int | None = None

    def __post_init__(self):
        if int(self.samples) != self.samples or self.samples < 1:
            raise ValueError("samples must be a positive integer")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.design_replications is not None and self.design_replications < 1:
            raise ValueError("design_replications must be >= 1")

    def replications(self, random_design: bool) -> int:
        if not random_design:
            return 1
        return self.design_replications or DEFAULT_REPLICATIONS

    def with_(self, **changes) -> "McConfig":
        return McConfig(**{**self.__dict__, **changes})


@dataclass(frozen=True)
class McEstimate:
    """A Monte Carlo estimate with its standard error."""

    value: float
    std_error: float
    samples_used: int


@dataclass(frozen=True)
class CoverageCurve:
    """Empirical distribution function of the distance to the nearest design point."""

    radii: np.ndarray
    values: np.ndarray
    std_errors: np.ndarray
    samples_used: int = 0

    def to_csv(self, path_or_file):
        rows = zip(self.radii, self.values, self.std_errors)
        _write_csv(path_or_file, ["r", "value", "std_error"], rows)


def _write_csv(path_or_file, header, rows):
    def dump(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])

    if hasattr(path_or_file, "write"):
        dump(path_or_file)
    else:
        with open(path_or_file, "w", newline="") as fh:
            dump(fh)


# ----------------------------------------------------------------- sampling


@dataclass(frozen=True)
class _Plan:
    designs: list  # one (n, d) array per replicate
    domain: object
    per_replicate: int
    stream: int
    workers: int

    @property
    def total(self):
        return self.per_replicate * len(self.designs)


def _default_domain(design, d):
    if isinstance(design, DesignSpec) and design.family in SIMPLEX_FAMILIES:
        return Simplex(d)
    return Cube(d)


def _as_design(design):
    if isinstance(design, DesignSpec):
        return design
    if isinstance(design, PointSet):
        return design.points
    arr = np.atleast_2d(np.asarray(design, dtype=float))
    if arr.size == 0:
        raise ValueError("point set is empty")
    return arr


def _plan(design, domain, cfg: McConfig) -> _Plan:
    design = _as_design(design)
    d = design.d if isinstance(design, DesignSpec) else design.shape[1]
    domain = domain if domain is not None else _default_domain(design, d)
    if domain.dim != d:
        raise ValueError(f"dimension mismatch: design has d={d}, domain has d={domain.dim}")
    if isinstance(design, DesignSpec):
        spec = design if design.seed == cfg.seed else design.with_(seed=cfg.seed)
        reps = cfg.replications(spec.is_random)
        designs = [generate(spec, k).points for k in range(reps)]
    else:
        designs = [design]
    reps = len(designs)
    per = max(1, -(-int(cfg.samples) // reps))
    stream = _rng.SIMPLEX_SAMPLES if isinstance(domain, Simplex) else _rng.CUBE_SAMPLES
    return _Plan(designs, domain, per, stream, resolve_workers(cfg.workers))


def _domain_chunk(domain, seed, stream, replicate, chunk, size):
    return domain.sample(size, _rng.stream(seed, stream, replicate, chunk))


def _chunks(per_replicate):
    starts = range(0, per_replicate, CHUNK)
    return [(j, min(CHUNK, per_replicate - s)) for j, s in enumerate(starts)]


def _min_sq(X, Z):
    """Squared nearest-neighbour distances, scanning ``Z`` in column blocks."""
    xx = np.einsum("ij,ij->i", X, X)
    best = np.full(X.shape[0], np.inf)
    for lo in range(0, Z.shape[0], _COLUMN_BLOCK):
        zb = Z[lo : lo + _COLUMN_BLOCK]
        d2 = xx[:, None] + np.einsum("ij,ij->i", zb, zb)[None, :] - 2.0 * (X @ zb.T)
        np.minimum(best, d2.min(axis=1), out=best)
    return np.maximum(best, 0.0)


def _run(tasks, fn, workers):
    if workers == 1 or len(tasks) == 1:
        return [fn(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def squared_distances(design, domain=None, cfg: McConfig = McConfig()) -> np.ndarray:
    """Squared distances from uniform domain samples to the nearest design point.

    Returns an array of shape ``(R, N_R)``: one row per design replicate.
    """
    plan = _plan(design, domain, cfg)
    tasks = [(k, j, m) for k in range(len(plan.designs)) for j, m in _chunks(plan.per_replicate)]

    def work(task):
        k, j, m = task
        U = _domain_chunk(plan.domain, cfg.seed, plan.stream, k, j, m)
        return _min_sq(U, plan.designs[k])

    parts = _run(tasks, work, plan.workers)
    return np.concatenate(parts).reshape(len(plan.designs), plan.per_replicate)


def distances(design, domain=None, cfg: McConfig = McConfig()) -> np.ndarray:
    """Pooled nearest-point distances ``rho(U, Z_n)``, flattened."""
    return np.sqrt(squared_distances(design, domain, cfg)).ravel()


# --------------------------------------------------------------- estimators


def _mean_estimate(per_rep_values: np.ndarray, pooled_sd_fn) -> tuple[float, float]:
    """Mean over replicates; standard error from replicate spread when R > 1."""
    R = per_rep_values.shape[0]
    means = per_rep_values.mean(axis=-1)
    value = float(means.mean()) if np.ndim(means) == 1 else means.mean(axis=0)
    if R > 1:
        se = means.std(axis=0, ddof=1) / math.sqrt(R)
    else:
        se = pooled_sd_fn()
    return value, se


def mc_cdf_curve(design, radii, domain=None, cfg: McConfig = McConfig()) -> CoverageCurve:
    """Empirical coverage ``C_d(Z_n, r)`` at every radius in ``radii`` from one sample set.

    Parameters
    ----------
    design : DesignSpec, PointSet or array_like
        Random specs are averaged over ``cfg.replications`` independent draws.
    radii : array_like
        Nondecreasing, nonnegative radii.
    domain : Cube or Simplex, optional
        Defaults to the cube, or the standard simplex for simplex families.
    """
    radii = np.asarray(radii, dtype=float).ravel()
    if radii.size == 0:
        raise ValueError("radii must be nonempty")
    if np.any(radii < 0) or np.any(np.diff(radii) < 0):
        raise ValueError("radii must be nonnegative and sorted ascending")
    sq = squared_distances(design, domain, cfg)
    R, N = sq.shape
    # per replicate: fraction of samples with rho <= r, via sorted search
    # stored radius-major so each radius reduces over a contiguous row: the
    # value at one radius is then bit-identical whatever the rest of the grid
    frac = np.empty((radii.size, R))
    for k in range(R):
        frac[:, k] = np.searchsorted(np.sort(sq[k]), radii * radii, side="right") / N
    values = frac.mean(axis=1)
    if R > 1:
        se = frac.std(axis=1, ddof=1) / math.sqrt(R)
    else:
        se = np.sqrt(values * (1 - values) / N)
    return CoverageCurve(radii, values, se, R * N)


def mc_coverage(design, r, domain=None, cfg: McConfig = McConfig()) -> McEstimate:
    """Monte Carlo estimate of ``C_d(Z_n, r)`` (``E_Z`` of it for random designs)."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    curve = mc_cdf_curve(design, [r], domain, cfg)
    return McEstimate(float(curve.values[0]), float(curve.std_errors[0]), curve.samples_used)


def mc_quantization(design, domain=None, cfg: McConfig = McConfig()) -> McEstimate:
    """Monte Carlo estimate of ``theta(Z_n) = E rho^2(U, Z_n)``."""
    sq = squared_distances(design, domain, cfg)
    value, se = _mean_estimate(sq, lambda: float(sq.std(ddof=1) / math.sqrt(sq.size)) if sq.size > 1 else 0.0)
    return McEstimate(float(value), float(se), sq.size)


def empirical_quantile(x, p) -> float:
    """Smallest sample value ``q`` with empirical c.d.f. ``F(q) >= p``."""
    return float(np.quantile(x, p, method="inverted_cdf"))


def _density_at(sorted_x, q, h):
    """5-point central difference of the empirical c.d.f. at ``q``."""
    F = lambda t: np.searchsorted(sorted_x, t, side="right") / sorted_x.size  # noqa: E731
    return (F(q - 2 * h) - 8 * F(q - h) + 8 * F(q + h) - F(q + 2 * h)) / (12 * h)


def quantile_std_error(x, p, q=None) -> float:
    """Asymptotic standard error ``sqrt(p(1-p)/N) / f(q)`` of an empirical quantile.

    ``f`` is a plug-in density from a five-point central difference of the
    empirical c.d.f. with a rule-of-thumb step ``sd * N^(-1/5)``; the result is
    approximate.
    """
    x = np.sort(np.asarray(x, dtype=float).ravel())
    N = x.size
    q = empirical_quantile(x, p) if q is None else q
    sd = x.std()
    if N < 5 or sd == 0:
        return 0.0
    h = sd * N ** (-0.2)
    f = _density_at(x, q, h)
    if f <= 0:
        return float("inf")
    return float(math.sqrt(p * (1 - p) / N) / f)


def mc_quantile_radius(design, gamma, domain=None, cfg: McConfig = McConfig()) -> McEstimate:
    """Radius ``r_{1-gamma}`` achieving coverage ``1 - gamma``: the empirical quantile.

    Distances from all design replicates are pooled, so for random designs
    this is the quantile of the mixture ``E_Z C_d(Z_n, .)``.
    """
    if not 0 < gamma < 1:
        raise ValueError("gamma must lie in (0, 1)")
    rho = distances(design, domain, cfg)
    q = empirical_quantile(rho, 1 - gamma)
    return McEstimate(q, quantile_std_error(rho, 1 - gamma, q), rho.size)


def mc_corr_check(d, cfg: McConfig = McConfig()) -> McEstimate:
    """Sample correlation of ``|U|^2`` and ``sum u_i^4`` for ``U`` uniform on the cube.

    The population value is ``3 sqrt(5) / 7`` for every ``d``.
    """
    if int(d) != d or d < 1:
        raise ValueError("d must be a positive integer")
    chunks = _chunks(int(cfg.samples))
    cube = Cube(int(d))

    def work(task):
        j, m = task
        U = cube.sample(m, _rng.stream(cfg.seed, _rng.CORRELATION, int(d), j))
        u2 = U * U
        a, b = u2.sum(axis=1), (u2 * u2).sum(axis=1)
        return np.array([a.sum(), b.sum(), (a * a).sum(), (b * b).sum(), (a * b).sum()])

    parts = _run(chunks, work, resolve_workers(cfg.workers))
    sa, sb, saa, sbb, sab = np.sum(parts, axis=0)
    N = int(cfg.samples)
    cov = sab / N - (sa / N) * (sb / N)
    va = saa / N - (sa / N) ** 2
    vb = sbb / N - (sb / N) ** 2
    rho = float(cov / math.sqrt(va * vb))
    se = (1 - rho * rho) / math.sqrt(max(N - 3, 1))
    return McEstimate(rho, float(se), N)


def mc_distinct_vertices(d, draws, replications=10_000, seed=0) -> McEstimate:
    """Mean number of distinct vertices among ``draws`` uniform picks from ``2^d``.

    Used to check the with/without replacement equivalence: drawing
    ``round(equivalent_m(d, n))`` vertices with replacement should hit about
    ``n`` distinct ones.
    """
    if int(d) != d or not 1 <= d <= 62:
        raise ValueError("d must be an integer in [1, 62]")
    draws = int(draws)
    if draws < 1 or replications < 1:
        raise ValueError("draws and replications must be >= 1")
    counts = np.empty(replications)
    batch = max(1, (1 << 20) // draws)
    for b, lo in enumerate(range(0, replications, batch)):
        m = min(batch, replications - lo)
        codes = np.sort(_rng.stream(seed, _rng.OCCUPANCY, int(d), draws, b).integers(0, 2**d, size=(m, draws)), axis=1)
        counts[lo : lo + m] = 1 + np.count_nonzero(np.diff(codes, axis=1), axis=1)
    return McEstimate(float(counts.mean()), float(counts.std(ddof=1) / math.sqrt(replications)), replications)


# ------------------------------------------------------------ delta profiles


@dataclass(frozen=True)
class DeltaProfile:
    """Squared nearest distances of one design family across a grid of ``delta``.

    The same unit designs and domain samples are used at every ``delta``
    (common random numbers), so differences between grid points are not
    masked by independent noise.  ``sq`` has shape ``(len(deltas), R, N_R)``.
    """

    deltas: np.ndarray
    sq: np.ndarray = field(repr=False)

    def quantization(self) -> np.ndarray:
        return self.sq.mean(axis=(1, 2))

    def quantization_se(self) -> np.ndarray:
        R = self.sq.shape[1]
        if R > 1:
            return self.sq.mean(axis=2).std(axis=1, ddof=1) / math.sqrt(R)
        return self.sq.std(axis=(1, 2), ddof=1) / math.sqrt(self.sq[0].size)

    def coverage(self, r) -> np.ndarray:
        return (self.sq <= r * r).mean(axis=(1, 2))

    def quantile_radius(self, gamma) -> np.ndarray:
        flat = self.sq.reshape(len(self.deltas), -1)
        return np.sqrt(np.quantile(flat, 1 - gamma, axis=1, method="inverted_cdf"))


def _profile_chunk(U, unit, center, deltas):
    """Squared nearest distances of ``U`` to ``center + delta (unit - center)`` for all deltas."""
    Uc = U - center
    Yc = unit - center
    base = np.einsum("ij,ij->i", Uc, Uc)
    q = np.einsum("ij,ij->i", Yc, Yc)
    out = np.empty((len(deltas), U.shape[0]))
    if np.ptp(q) <= 1e-12 * max(q[0], 1.0):
        # equal norms (vertex designs): the nearest point is the same for every delta
        gmax = np.full(U.shape[0], -np.inf)
        for lo in range(0, Yc.shape[0], _COLUMN_BLOCK):
            np.maximum(gmax, (Uc @ Yc[lo : lo + _COLUMN_BLOCK].T).max(axis=1), out=gmax)
        for i, dl in enumerate(deltas):
            out[i] = base + dl * dl * q[0] - 2 * dl * gmax
    else:
        # |u - c - delta y|^2 = base + delta (delta q - 2 G): minimize the bracket
        # over rows small enough for the scratch block to stay in cache
        out[:] = np.inf
        for lo in range(0, Yc.shape[0], _COLUMN_BLOCK):
            H = Uc @ Yc[lo : lo + _COLUMN_BLOCK].T
            H *= -2.0
            qb = q[lo : lo + _COLUMN_BLOCK]
            tmp = np.empty((_ROW_BLOCK, H.shape[1]))
            for r0 in range(0, H.shape[0], _ROW_BLOCK):
                Hb = H[r0 : r0 + _ROW_BLOCK]
                t = tmp[: Hb.shape[0]]
                for i, dl in enumerate(deltas):
                    np.add(Hb, dl * qb, out=t)
                    seg = out[i, r0 : r0 + _ROW_BLOCK]
                    np.minimum(seg, dl * t.min(axis=1), out=seg)
        out += base[None, :]
    return np.maximum(out, 0.0)


def mc_delta_profile(spec: DesignSpec, deltas: Sequence[float], domain=None, cfg: McConfig = McConfig()) -> DeltaProfile:
    """Evaluate ``spec`` at every ``delta`` in ``deltas`` on shared samples.

    ``spec.delta`` is ignored.  The result at each ``delta`` is bit-for-bit
    a function of ``(spec, delta, cfg)`` only through the shared unit designs
    and domain samples.
    """
    deltas = np.asarray(deltas, dtype=float).ravel()
    if deltas.size == 0:
        raise ValueError("deltas must be nonempty")
    if np.any(deltas < 0) or np.any(deltas > 1):
        raise ValueError("deltas must lie in [0, 1]")
    spec = spec if spec.seed == cfg.seed else spec.with_(seed=cfg.seed)
    plan = _plan(spec, domain, cfg)
    units = [unit_design(spec, k) for k in range(len(plan.designs))]
    center = delta_center(spec)
    tasks = [(k, j, m) for k in range(len(units)) for j, m in _chunks(plan.per_replicate)]

    def work(task):
        k, j, m = task
        U = _domain_chunk(plan.domain, cfg.seed, plan.stream, k, j, m)
        return _profile_chunk(U, units[k], center, deltas)

    parts = _run(tasks, work, plan.workers)
    sq = np.concatenate(parts, axis=1).reshape(len(deltas), len(units), plan.per_replicate)
    return DeltaProfile(deltas, sq)


__all__ = [
    "CHUNK",
    "CoverageCurve",
    "DeltaProfile",
    "McConfig",
    "McEstimate",
    "distances",
    "empirical_quantile",
    "mc_cdf_curve",
    "mc_corr_check",
    "mc_coverage",
    "mc_delta_profile",
    "mc_distinct_vertices",
    "mc_quantile_radius",
    "mc_quantization",
    "quantile_std_error",
    "resolve_workers",
    "squared_distances",
]
