"""Delta sweeps of coverage and quantization on the simplex.

Designs S1 and S2 place ``n`` uniform points of the standard simplex
``S_d = {u : u_i >= 0, sum(u) <= 1}`` into a shrunken copy of it: S1 scales
toward the origin corner, S2 toward the centroid.  The domain being covered
is always the full standard simplex.  Coverage is the covered fraction of
uniform simplex samples, which is the same quantity as the volume ratio
``d! vol(S_d intersect union of balls)``.

All ``delta`` columns of a sweep share their designs and domain samples,
so the shape of a curve in ``delta`` is not blurred by independent noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .designs import BETA, SIMPLEX_S1, SIMPLEX_S2, DesignSpec
from .montecarlo import DeltaProfile, McConfig, McEstimate, _write_csv, mc_delta_profile

S1 = "S1"
S2 = "S2"
_FAMILY = {S1: SIMPLEX_S1, S2: SIMPLEX_S2}

CSV_HEADER = ["design", "d", "n", "delta", "r", "value", "std_error"]


def default_delta_grid(step=0.05) -> np.ndarray:
    k = int(round(1.0 / step))
    return np.round(np.arange(1, k + 1) * step, 10)


def _family(design):
    try:
        return _FAMILY[design]
    except KeyError:
        raise ValueError(f"design must be 'S1' or 'S2', got {design!r}") from None


def _vector(values, name):
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0:
        raise ValueError(f"{name} must be nonempty")
    return v


@dataclass(frozen=True)
class SimplexSweep:
    """Monte Carlo estimates over a ``delta`` (by ``r``) grid.

    ``values`` and ``std_errors`` have shape ``(len(delta_grid), len(r_grid))``
    for coverage sweeps and ``(len(delta_grid), 1)`` for quantization sweeps,
    in which case ``r_grid`` is empty.
    """

    design: str
    d: int
    n: int
    delta_grid: np.ndarray
    r_grid: np.ndarray
    values: np.ndarray
    std_errors: np.ndarray
    samples_used: int
    profile: DeltaProfile | None = field(default=None, repr=False, compare=False)

    @property
    def kind(self) -> str:
        return "coverage" if self.r_grid.size else "quantization"

    @property
    def results(self) -> list:
        """The estimates as a nested list of :class:`McEstimate`."""
        return [
            [McEstimate(float(v), float(s), self.samples_used) for v, s in zip(row, srow)]
            for row, srow in zip(self.values, self.std_errors)
        ]

    def column(self, delta) -> np.ndarray:
        """Row of estimates at the grid point closest to ``delta``."""
        return self.values[int(np.argmin(np.abs(self.delta_grid - delta)))]

    def best_delta(self, j: int = 0) -> float:
        """Maximizer of coverage (or minimizer of quantization) in column ``j``."""
        col = self.values[:, j]
        i = int(np.argmax(col)) if self.kind == "coverage" else int(np.argmin(col))
        return float(self.delta_grid[i])

    def rows(self):
        rs = self.r_grid if self.r_grid.size else [None]
        for i, dl in enumerate(self.delta_grid):
            for j, r in enumerate(rs):
                yield (self.design, self.d, self.n, float(dl), "" if r is None else float(r),
                       float(self.values[i, j]), float(self.std_errors[i, j]))

    def to_csv(self, path_or_file):
        _write_csv(path_or_file, CSV_HEADER, self.rows())


def _replicate_se(per_rep, pooled_var, n_total):
    """Spread of per-design means when there are several designs, else iid."""
    R = per_rep.shape[-1]
    if R > 1:
        return per_rep.std(axis=-1, ddof=1) / math.sqrt(R)
    return np.sqrt(pooled_var / n_total)


def _profile(design, d, n, delta_grid, cfg):
    spec = DesignSpec(_family(design), d, n, seed=cfg.seed)
    return mc_delta_profile(spec, delta_grid, cfg=cfg)


def coverage_sweep_from_profile(label, d, n, prof: DeltaProfile, r_grid) -> SimplexSweep:
    """Coverage matrix of an existing delta profile (any domain) over ``r_grid``."""
    r_grid = _vector(r_grid, "r_grid")
    if np.any(r_grid < 0):
        raise ValueError("radii must be nonnegative")
    hit = prof.sq[..., None] <= (r_grid * r_grid)  # (delta, R, N_R, r)
    per_rep = hit.mean(axis=2).transpose(0, 2, 1)  # (delta, r, R)
    values = per_rep.mean(axis=-1)
    n_total = prof.sq[0].size
    se = _replicate_se(per_rep, values * (1 - values), n_total)
    return SimplexSweep(label, d, n, prof.deltas, r_grid, values, se, n_total, prof)


def quantization_sweep_from_profile(label, d, n, prof: DeltaProfile) -> SimplexSweep:
    """``E theta`` of an existing delta profile for each ``delta``."""
    per_rep = prof.sq.mean(axis=2)  # (delta, R)
    values = per_rep.mean(axis=1)
    n_total = prof.sq[0].size
    se = _replicate_se(per_rep, prof.sq.reshape(len(prof.deltas), -1).var(axis=1, ddof=1), n_total)
    return SimplexSweep(label, d, n, prof.deltas, np.empty(0), values[:, None], se[:, None], n_total, prof)


def sweep_coverage(design, d, n, delta_grid, r_grid, cfg: McConfig = McConfig()) -> SimplexSweep:
    """Coverage of the standard simplex for every ``(delta, r)`` pair.

    Examples
    --------
    >>> sw = sweep_coverage("S1", 5, 128, [0.5, 1.0], [0.11, 0.17], McConfig(samples=8000))
    >>> sw.values.shape
    (2, 2)
    >>> bool(np.all(np.diff(sw.values, axis=1) >= 0))
    True
    """
    delta_grid = _vector(delta_grid, "delta_grid")
    r_grid = _vector(r_grid, "r_grid")
    return coverage_sweep_from_profile(design, d, n, _profile(design, d, n, delta_grid, cfg), r_grid)


def sweep_quantization(design, d, n, delta_grid, cfg: McConfig = McConfig()) -> SimplexSweep:
    """Expected quantization error ``E theta`` of the simplex for each ``delta``."""
    delta_grid = _vector(delta_grid, "delta_grid")
    return quantization_sweep_from_profile(design, d, n, _profile(design, d, n, delta_grid, cfg))


# ------------------------------------------------------------- comparisons


def coincidence_test(d, n, cfg: McConfig = McConfig(design_replications=500)):
    """Two-sample Kolmogorov-Smirnov test of S1 against S2 at ``delta = 1``.

    The two designs are drawn from independent seeds (``cfg.seed`` and
    ``cfg.seed + 1``) so that the test compares distributions, not the same
    points twice.  Distances sharing a design are dependent, which makes the
    test anti-conservative when there are few designs; the default spreads
    the samples over 500 of them.  Returns the ``scipy.stats`` result object.
    """
    a = _profile(S1, d, n, [1.0], cfg).sq.ravel()
    b = _profile(S2, d, n, [1.0], cfg.with_(seed=cfg.seed + 1)).sq.ravel()
    return stats.ks_2samp(a, b)


@dataclass(frozen=True)
class DeltaEffect:
    """Coverage gain from tuning ``delta`` at a matched radius.

    ``radius`` is the smallest ``0.9``-coverage radius over the grid, reached
    at ``delta_star``; ``gain`` is ``C(delta_star) - C(1)`` at that radius.
    """

    label: str
    radius: float
    delta_star: float
    coverage_star: float
    coverage_at_one: float

    @property
    def gain(self) -> float:
        return self.coverage_star - self.coverage_at_one


def _matched_effect(label, profile: DeltaProfile, target) -> DeltaEffect:
    if not np.isclose(profile.deltas[-1], 1.0):
        raise ValueError("the delta grid must end at 1")
    radii = profile.quantile_radius(1 - target)
    i = int(np.argmin(radii))
    r = float(radii[i])
    cov = profile.coverage(r)
    return DeltaEffect(label, r, float(profile.deltas[i]), float(cov[i]), float(cov[-1]))


def delta_effect(design, d, n, delta_grid=None, target=0.9, cfg: McConfig = McConfig()) -> DeltaEffect:
    """Matched-radius delta effect for a simplex design."""
    grid = np.unique(default_delta_grid() if delta_grid is None else _vector(delta_grid, "delta_grid"))
    return _matched_effect(design, _profile(design, d, n, grid, cfg), target)


def cube_delta_effect(d, n, alpha=0.5, delta_grid=None, target=0.9, cfg: McConfig = McConfig()) -> DeltaEffect:
    """The same measure for Beta-scattered points in the cube, for comparison."""
    grid = np.unique(default_delta_grid() if delta_grid is None else _vector(delta_grid, "delta_grid"))
    spec = DesignSpec(BETA, d, n, alpha=alpha, seed=cfg.seed)
    return _matched_effect(f"cube beta({alpha})", mc_delta_profile(spec, grid, cfg=cfg), target)


__all__ = [
    "CSV_HEADER",
    "DeltaEffect",
    "S1",
    "S2",
    "SimplexSweep",
    "coincidence_test",
    "coverage_sweep_from_profile",
    "cube_delta_effect",
    "default_delta_grid",
    "delta_effect",
    "quantization_sweep_from_profile",
    "sweep_coverage",
    "sweep_quantization",
]
