"""Closed-form approximations of single-ball and union-of-balls coverage.

For a design of i.i.d. points ``Z`` the covered proportion of the cube is
approximately ``1 - E_U exp(-n P(U))`` with ``P(U) = P_Z(|U - Z| <= r)``.
``P`` is approximated by a normal law for ``|U - Z|^2`` (``"normal"``) or by
an Edgeworth-corrected law (``"refined"``), and the outer expectation over
``U`` uses a normal law for ``|U|^2`` with mean ``d/3`` and variance
``4d/45``.

Families
--------
``"design1"``
    i.i.d. Beta_delta(alpha, alpha) coordinates, ``alpha > 0``.
``"design2a"``
    cube vertices ``{+-delta}^d`` sampled with replacement.
``"design2b"``
    vertices sampled without replacement, mapped to ``design2a`` with the
    equivalent sample size :func:`equivalent_m`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .quadrature import DEFAULT_TOL, integrate

NORMAL = "normal"
REFINED = "refined"
VARIANTS = (NORMAL, REFINED)

DESIGN1 = "design1"
DESIGN2A = "design2a"
DESIGN2B = "design2b"
APPROX_FAMILIES = (DESIGN1, DESIGN2A, DESIGN2B)

S_LIMIT = 10.0
# lower bound on the variance factor |U|^2 (+ kappa); the normal law for |U|^2
# puts a little mass on negative values, where the formulas are undefined
VAR_FLOOR = 1e-12
_RADII_PER_PASS = 16

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


class ApproximationError(ArithmeticError):
    """Quadrature failed to reach its tolerance."""


def _phi(x):
    return _INV_SQRT_2PI * np.exp(-0.5 * x * x)


@dataclass(frozen=True)
class CoverageApprox:
    family: str
    variant: str
    value: float
    quadrature_error: float
    clamp_effect: float = 0.0

    @property
    def clamped(self) -> bool:
        """Whether clamping ``P`` into ``[0, 1]`` moved the value by more than 1e-8."""
        return self.clamp_effect > 1e-8


# ------------------------------------------------------------ single ball


def _terms_beta(sp, d, delta, alpha, r2):
    """``c`` and the skewness coefficient for the Beta family (broadcasting)."""
    a1, a3, a5 = 2 * alpha + 1, 2 * alpha + 3, 2 * alpha + 5
    d2 = delta * delta
    kappa = d * d2 * alpha / (a1 * a3)
    shift = d * d2 * (2 * alpha - 1) / (3 * a5 * a1)
    v = np.maximum(sp + kappa, VAR_FLOOR)
    c = math.sqrt(a1) * (r2 - sp - d * d2 / a1) / (2 * delta * np.sqrt(v))
    skew = (1 + 3 / (alpha * d)) * alpha * delta * (sp + shift) / (a3 * math.sqrt(a1) * v**1.5)
    return c, skew, v


def _terms_vertex(sp, d, delta, r2):
    """``c`` and the kurtosis coefficient for the two-point family."""
    v = np.maximum(sp, VAR_FLOOR)
    c = (r2 - sp - d * delta * delta) / (2 * delta * np.sqrt(v))
    kurt = (1 + 3 / d) * (2 * (sp - d / 3) / math.sqrt(5) + d / 5) / (12 * v * v)
    return c, kurt, v


def _ball_prob(sp, d, delta, alpha, r2, variant):
    """Unclamped ``P(|U - Z| <= r)`` given ``|U|^2 = sp``."""
    with np.errstate(over="ignore", invalid="ignore"):
        if alpha == 0:
            c, kurt, _ = _terms_vertex(sp, d, delta, r2)
            p = ndtr(c)
            if variant == REFINED:
                p = p + np.nan_to_num(kurt * (c**3 - 3 * c) * _phi(c))
        else:
            c, skew, _ = _terms_beta(sp, d, delta, alpha, r2)
            p = ndtr(c)
            if variant == REFINED:
                p = p + np.nan_to_num(skew * (1 - c * c) * _phi(c))
    return p


def _check_common(d, delta, alpha, variant):
    if int(d) != d or d < 1:
        raise ValueError(f"d must be a positive integer, got {d}")
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    if alpha < 0:
        raise ValueError(f"alpha must be nonnegative, got {alpha}")
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")


def p_ball(normU2, d, delta, alpha, r, variant=REFINED):
    """Approximate probability that a random design point lies within ``r`` of ``U``.

    Parameters
    ----------
    normU2 : float or array
        ``|U|^2``; the approximations depend on ``U`` only through it.
    alpha : float
        Beta shape; ``0`` selects the two-point vertex law.
    variant : {"normal", "refined"}

    Returns
    -------
    float or ndarray, clamped to ``[0, 1]``.
    """
    _check_common(d, delta, alpha, variant)
    normU2 = np.asarray(normU2, dtype=float)
    r = np.asarray(r, dtype=float)
    if np.any(normU2 < 0) or np.any(r < 0):
        raise ValueError("normU2 and r must be nonnegative")
    p = np.clip(_ball_prob(normU2, d, delta, alpha, r * r, variant), 0.0, 1.0)
    return float(p) if p.ndim == 0 else p


def coverage_exact_product(p, n):
    """``1 - (1 - p)^n``: probability that one of ``n`` i.i.d. balls covers a point."""
    p = np.asarray(p, dtype=float)
    if np.any((p < 0) | (p > 1)):
        raise ValueError("p must lie in [0, 1]")
    if np.any(np.asarray(n) < 1):
        raise ValueError("n must be >= 1")
    out = -np.expm1(n * np.log1p(-np.minimum(p, 1.0))) if np.all(p < 1) else 1.0 - (1.0 - p) ** n
    return float(out) if np.ndim(out) == 0 else out


def equivalent_m(d: int, n: int) -> float:
    """With-replacement sample size matching ``n`` draws without replacement from ``2^d`` vertices.

    Solves ``2^d - n = 2^d (1 - 2^-d)^m``: the expected number of vertices
    missed by ``m`` draws with replacement equals the number missed by ``n``
    draws without.
    """
    if int(d) != d or d < 1:
        raise ValueError("d must be a positive integer")
    k = 2.0**d
    if not 1 <= n < k:
        raise ValueError(f"need 1 <= n < 2^d = {int(k)}, got n={n}")
    if n == 1:
        return 1.0
    return math.log1p(-n / k) / math.log1p(-1.0 / k)


# --------------------------------------------------------------- coverage


def _resolve(family, d, n, alpha):
    """Effective (n, alpha) fed to the i.i.d. formulas."""
    if family == DESIGN1:
        if not alpha > 0:
            raise ValueError("design1 needs alpha > 0; use design2a for the vertex law")
        return float(n), float(alpha)
    if family == DESIGN2A:
        return float(n), 0.0
    if family == DESIGN2B:
        if n >= 2**d:
            raise ValueError(f"design2b approximation needs n < 2^d = {2 ** d}")
        return equivalent_m(d, n), 0.0
    raise ValueError(f"family must be one of {APPROX_FAMILIES}, got {family!r}")


def s_to_norm2(s, d):
    """Normal quantile ``s`` of ``|U|^2`` for ``U`` uniform on ``[-1,1]^d``."""
    return s * math.sqrt(4.0 * d / 45.0) + d / 3.0


def _psi(s, d, n_eff, delta, alpha, r2, variant):
    """``exp(-n P)`` on the (s, r) grid and its change due to clamping ``P``."""
    sp = s_to_norm2(s, d)[:, None]
    raw = _ball_prob(sp, d, delta, alpha, r2[None, :], variant)
    psi = np.exp(-n_eff * np.clip(raw, 0.0, 1.0))
    with np.errstate(over="ignore"):
        shift = np.abs(np.exp(-n_eff * np.clip(raw, -1.0, 2.0)) - psi)
    return psi, np.minimum(shift, 1.0), (raw < 0) | (raw > 1)


def integrate_gaussian(f, tol=DEFAULT_TOL, limit=S_LIMIT, control=None):
    """``int_{-limit}^{limit} f(s) phi(s) ds`` for the standard normal density ``phi``.

    ``f`` maps a 1-D array of nodes to values with the nodes on the first
    axis; trailing axes are integrated componentwise (see
    :func:`weakcover.quadrature.integrate`).  Truncation at ``limit = 10``
    drops mass ``2 Phi(-10) < 2e-23``.

    Returns
    -------
    (value, error) : tuple
        ``error`` is the quadrature error estimate.

    Raises
    ------
    ApproximationError
        If ``tol`` is not reached within the panel budget.

    Examples
    --------
    >>> v, err = integrate_gaussian(lambda s: s * s)
    >>> round(float(v), 10)
    1.0
    """

    def weighted(s):
        v = np.asarray(f(s), dtype=float)
        return v * _phi(s).reshape((-1,) + (1,) * (v.ndim - 1))

    res = integrate(weighted, -limit, limit, tol=tol, control=control)
    if not res.converged:
        raise ApproximationError(f"Gaussian quadrature did not converge (error estimate {res.error:.3g})")
    return res.value, res.error


def coverage_values(family, d, n, delta, alpha, radii, variant=REFINED, tol=DEFAULT_TOL):
    """Vectorized coverage approximation over ``radii``.

    Returns ``(values, quadrature_error, clamp_effect)`` where
    ``clamp_effect`` bounds the change in any value caused by clamping the
    Edgeworth-corrected ``P`` into ``[0, 1]``.
    """
    _check_common(d, delta, alpha if family == DESIGN1 else 0.0, variant)
    n_eff, a = _resolve(family, d, n, alpha)
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    if np.any(radii < 0):
        raise ValueError("radii must be nonnegative")
    values = np.empty(len(radii))
    err = effect = 0.0
    # each radius has its own steep transition in s; chunking keeps the panel
    # budget per integration small
    for start in range(0, len(radii), _RADII_PER_PASS):
        r2 = radii[start : start + _RADII_PER_PASS] ** 2
        R = len(r2)

        def integrand(s, r2=r2):
            psi, shift, _ = _psi(s, d, n_eff, delta, a, r2, variant)
            return np.concatenate([psi, shift], axis=1)

        total, e = integrate_gaussian(integrand, tol=tol, control=slice(0, R))
        values[start : start + R] = np.clip(1.0 - total[:R], 0.0, 1.0)
        err = max(err, e)
        effect = max(effect, float(np.max(total[R:])))
    return values, err, effect


def coverage_approx(family, d, n, delta, alpha, r, variant=REFINED, tol=DEFAULT_TOL) -> CoverageApprox:
    """Approximate ``C_d(Z_n, r)`` for ``design1``, ``design2a`` or ``design2b``.

    ``alpha`` is ignored for the vertex families.
    """
    values, err, effect = coverage_values(family, d, n, delta, alpha, [r], variant, tol)
    return CoverageApprox(family, variant, float(values[0]), err, effect)
