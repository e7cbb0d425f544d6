"""Moments of ``eta = (z - u)^2`` for ``z`` ~ Beta_delta(alpha, alpha) on ``(-delta, delta)``.

``alpha = 0`` denotes the two-point law ``P(z = +-delta) = 1/2``, the limit
of the Beta family as ``alpha -> 0``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate


@dataclass(frozen=True)
class EtaMoments:
    mean: float
    variance: float
    third_central: float


@dataclass(frozen=True)
class AggregateMoments:
    """Moments of ``|U - Z|^2 = sum_i eta_i``; ``kappa4`` is set only for ``alpha = 0``."""

    mu: float
    sigma2: float
    mu3: float
    kappa4: float | None = None


def _check(delta, alpha):
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    if alpha < 0:
        raise ValueError(f"alpha must be nonnegative, got {alpha}")


def eta_moments(u: float, delta: float, alpha: float) -> EtaMoments:
    """Mean, variance and third central moment of ``(z - u)^2``."""
    _check(delta, alpha)
    u2, d2 = u * u, delta * delta
    if alpha == 0:
        return EtaMoments(u2 + d2, 4.0 * d2 * u2, 0.0)
    a1, a3, a5 = 2 * alpha + 1, 2 * alpha + 3, 2 * alpha + 5
    mean = u2 + d2 / a1
    var = 4 * d2 / a1 * (u2 + d2 * alpha / (a1 * a3))
    third = 48 * alpha * d2 * d2 / (a1 * a1 * a3) * (u2 + d2 * (2 * alpha - 1) / (3 * a5 * a1))
    return EtaMoments(mean, var, third)


def aggregate(U, delta: float, alpha: float) -> AggregateMoments:
    """Coordinate-wise sums of :func:`eta_moments` over the point ``U``.

    Everything except ``kappa4`` depends on ``U`` only through ``|U|^2``.
    """
    _check(delta, alpha)
    U = np.asarray(U, dtype=float).ravel()
    d = U.size
    s2 = float(U @ U)
    d2 = delta * delta
    if alpha == 0:
        kappa4 = -32.0 * d2 * d2 * float(np.sum(U**4))
        return AggregateMoments(s2 + d * d2, 4.0 * d2 * s2, 0.0, kappa4)
    a1, a3, a5 = 2 * alpha + 1, 2 * alpha + 3, 2 * alpha + 5
    mu = s2 + d * d2 / a1
    sigma2 = 4 * d2 / a1 * (s2 + d * d2 * alpha / (a1 * a3))
    mu3 = 48 * alpha * d2 * d2 / (a1 * a1 * a3) * (s2 + d * d2 * (2 * alpha - 1) / (3 * a5 * a1))
    return AggregateMoments(mu, sigma2, mu3)


def eta_moments_numeric(u: float, delta: float, alpha: float) -> EtaMoments:
    """Reference values by adaptive quadrature against the Beta density.

    The endpoint factor ``(delta + t)^(alpha-1) (delta - t)^(alpha-1)`` is
    handled exactly as an algebraic weight, so ``alpha < 1`` poses no
    difficulty.  The normalizing constant is integrated too rather than taken
    from the Beta function.
    """
    _check(delta, alpha)
    if alpha == 0:
        vals = np.array([(delta - u) ** 2, (-delta - u) ** 2])
        m = vals.mean()
        return EtaMoments(m, float(np.mean((vals - m) ** 2)), float(np.mean((vals - m) ** 3)))

    def expect(g):
        # epsabs=0 asks for full relative accuracy; where a moment vanishes
        # (u=0, alpha=1/2) QUADPACK reports roundoff, which is harmless here
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, _ = integrate.quad(
                g, -delta, delta, weight="alg", wvar=(alpha - 1, alpha - 1), epsabs=0.0, epsrel=1e-12, limit=200
            )
        return val

    norm = expect(lambda t: 1.0)
    mean = expect(lambda t: (t - u) ** 2) / norm
    var = expect(lambda t: ((t - u) ** 2 - mean) ** 2) / norm
    third = expect(lambda t: ((t - u) ** 2 - mean) ** 3) / norm
    return EtaMoments(mean, var, third)


def fourth_cumulant_two_point(u: float, delta: float) -> float:
    """``mu_4 - 3 mu_2^2`` of ``(z - u)^2`` for the two-point law, computed directly."""
    vals = np.array([(delta - u) ** 2, (-delta - u) ** 2])
    c = vals - vals.mean()
    return float(np.mean(c**4) - 3 * np.mean(c**2) ** 2)
