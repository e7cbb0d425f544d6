"""Tuning the scaling parameter ``delta`` of a design family.

Two objectives are supported: the smallest radius reaching a target
coverage (``r_{1-gamma}``), and the normalized quantization error
``n^(2/d) theta``.  Both are minimized over a fixed grid of ``delta`` values.
Monte Carlo evaluation uses a single frozen set of unit designs and domain
samples for the whole grid, so the objective is a smooth function of
``delta`` rather than independent noise at each grid point.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import approx, quantize
from .designs import BETA, VERTEX_WITH, VERTEX_WITHOUT, DesignSpec
from .montecarlo import McConfig, _write_csv, mc_delta_profile, mc_quantile_radius
from .quantize import r_max

APPROX = "approx"
MONTE_CARLO = "mc"
METHODS = (APPROX, MONTE_CARLO)

_APPROX_FAMILY = {BETA: approx.DESIGN1, VERTEX_WITH: approx.DESIGN2A, VERTEX_WITHOUT: approx.DESIGN2B}
BISECTION_TOL = 1e-4


def default_delta_grid(step=0.02) -> np.ndarray:
    """``step, 2 step, ..., 1``; the default resolves two decimals."""
    k = int(round(1.0 / step))
    return np.round(np.arange(1, k + 1) * step, 10)


def approx_family(spec: DesignSpec) -> str:
    """Name of the coverage approximation for ``spec``'s family."""
    try:
        return _APPROX_FAMILY[spec.family]
    except KeyError:
        raise ValueError(f"no approximation for family {spec.family!r}; use method='mc'") from None


@dataclass(frozen=True)
class TuneResult:
    """Outcome of a grid search over ``delta``.

    ``trace`` lists ``(delta, objective)`` for every grid point in increasing
    ``delta``; ``delta_star`` is the smallest minimizer.
    """

    delta_star: float
    objective_star: float
    trace: tuple
    method: str
    objective: str = "radius"
    std_errors: tuple = ()
    meta: dict = field(default_factory=dict, compare=False)

    def to_csv(self, path_or_file):
        _write_csv(path_or_file, ["delta", "objective"], [(float(a), float(b)) for a, b in self.trace])

    def summary(self) -> dict:
        return {
            **self.meta,
            "method": self.method,
            "objective": self.objective,
            "delta_star": self.delta_star,
            "objective_star": self.objective_star,
        }

    def to_json(self, path_or_file=None) -> str:
        text = json.dumps(self.summary(), indent=2, sort_keys=True)
        if path_or_file is None:
            return text
        if hasattr(path_or_file, "write"):
            path_or_file.write(text)
        else:
            with open(path_or_file, "w") as fh:
                fh.write(text)
        return text


def _select(deltas, values, method, objective, ses=None, meta=None) -> TuneResult:
    values = np.asarray(values, dtype=float)
    i = int(np.argmin(values))  # first index wins ties, i.e. the smallest delta
    se = tuple(float(x) for x in ses) if ses is not None else ()
    return TuneResult(
        float(deltas[i]),
        float(values[i]),
        tuple((float(a), float(b)) for a, b in zip(deltas, values)),
        method,
        objective,
        se,
        meta or {},
    )


def _grid(delta_grid):
    g = default_delta_grid() if delta_grid is None else np.asarray(delta_grid, dtype=float).ravel()
    if g.size == 0:
        raise ValueError("delta grid is empty")
    if np.any(g <= 0) or np.any(g > 1):
        raise ValueError("delta grid must lie in (0, 1]")
    return np.unique(g)


def _check_method(method):
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")


def _meta(spec, cfg, method):
    m = {"design": spec.to_dict(), "method": method}
    if method == MONTE_CARLO:
        m.update(seed=int(cfg.seed), samples=int(cfg.samples), replications=cfg.replications(spec.is_random))
    return m


# ---------------------------------------------------------------- radius


def approx_radius(spec: DesignSpec, target: float, variant=approx.REFINED, tol=BISECTION_TOL) -> float:
    """Smallest ``r`` with approximate coverage ``>= target``, by bisection."""
    fam = approx_family(spec)
    alpha = spec.alpha if fam == approx.DESIGN1 else 0.0
    lo, hi = 0.0, r_max(spec.d, spec.delta)

    def cov(r):
        v, _, _ = approx.coverage_values(fam, spec.d, spec.n, spec.delta, alpha, [r], variant)
        return v[0]

    if cov(hi) < target:
        raise approx.ApproximationError(f"coverage {target} not reached below r = {hi:.3f}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if cov(mid) >= target:
            hi = mid
        else:
            lo = mid
    return hi


def radius_for_coverage(spec: DesignSpec, target: float, cfg: McConfig = McConfig(), method=MONTE_CARLO, domain=None) -> float:
    """Smallest radius whose (expected) coverage reaches ``target``.

    With ``method="approx"`` the approximate coverage is bisected in ``r``.
    With ``method="mc"`` the answer is the empirical ``target``-quantile of
    the pooled nearest-point distances, which is exactly the smallest ``r``
    at which the Monte Carlo coverage estimate reaches ``target``.
    """
    if not 0 < target < 1:
        raise ValueError("target must lie in (0, 1)")
    _check_method(method)
    if method == APPROX:
        return approx_radius(spec, target)
    return mc_quantile_radius(spec, 1 - target, domain, cfg).value


def optimal_delta_for_coverage(
    spec: DesignSpec, target: float = 0.9, delta_grid=None, cfg: McConfig = McConfig(), method=MONTE_CARLO, domain=None
) -> TuneResult:
    """Minimize the ``target``-coverage radius over ``delta_grid``.

    ``spec.delta`` is ignored.  Monte Carlo runs evaluate every grid point on
    the same designs and samples.

    Examples
    --------
    >>> from weakcover.designs import DesignSpec
    >>> res = optimal_delta_for_coverage(DesignSpec("vertex_with", 10, 512), method="approx",
    ...                                  delta_grid=[0.4, 0.5, 0.6])
    >>> res.delta_star
    0.5
    """
    if not 0 < target < 1:
        raise ValueError("target must lie in (0, 1)")
    _check_method(method)
    grid = _grid(delta_grid)
    if method == APPROX:
        values = [approx_radius(spec.with_(delta=float(dl)), target) for dl in grid]
        return _select(grid, values, method, "radius", meta=_meta(spec, cfg, method))
    profile = mc_delta_profile(spec, grid, domain, cfg)
    return _select(grid, profile.quantile_radius(1 - target), method, "radius", meta=_meta(spec, cfg, method))


# ---------------------------------------------------------- quantization


def optimal_delta_for_quantization(
    spec: DesignSpec, delta_grid=None, cfg: McConfig = McConfig(), method=MONTE_CARLO, domain=None
) -> TuneResult:
    """Minimize ``n^(2/d) theta`` over ``delta_grid``.

    Examples
    --------
    >>> from weakcover.designs import DesignSpec
    >>> res = optimal_delta_for_quantization(DesignSpec("factorial", 10, 512), delta_grid=[0.44, 0.48, 0.52],
    ...                                      cfg=McConfig(samples=20000))
    >>> res.delta_star
    0.48
    """
    _check_method(method)
    grid = _grid(delta_grid)
    scale = spec.n ** (2.0 / spec.d)
    if method == APPROX:
        fam = approx_family(spec)
        alpha = spec.alpha if fam == approx.DESIGN1 else 0.0
        values = [quantize.quant_error(fam, spec.d, spec.n, float(dl), alpha).normalized for dl in grid]
        return _select(grid, values, method, "normalized_quantization", meta=_meta(spec, cfg, method))
    profile = mc_delta_profile(spec, grid, domain, cfg)
    return _select(
        grid,
        scale * profile.quantization(),
        method,
        "normalized_quantization",
        scale * profile.quantization_se(),
        _meta(spec, cfg, method),
    )


def mc_radius_curve(spec: DesignSpec, target: float, delta_grid, cfg: McConfig = McConfig(), domain=None):
    """``(deltas, radii)`` of the Monte Carlo ``target``-coverage radius across ``delta``."""
    grid = _grid(delta_grid)
    profile = mc_delta_profile(spec, grid, domain, cfg)
    return grid, profile.quantile_radius(1 - target)


__all__ = [
    "APPROX",
    "BISECTION_TOL",
    "MONTE_CARLO",
    "TuneResult",
    "approx_family",
    "approx_radius",
    "default_delta_grid",
    "mc_radius_curve",
    "optimal_delta_for_coverage",
    "optimal_delta_for_quantization",
    "radius_for_coverage",
]
