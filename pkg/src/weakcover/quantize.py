"""Mean squared quantization error from the coverage approximations.

``C_d(Z_n, r)`` viewed as a function of ``r`` is the distribution function of
the distance from a uniform point to its nearest design point, so the
quantization error is its second moment, ``theta = int r^2 dC``.  The density
``dC/dr`` is written out in closed form under the ``s``-integral and the
resulting double integral is evaluated by nested adaptive quadrature
(``s`` inside, ``r`` outside).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import ndtr

from .approx import (
    _RADII_PER_PASS,
    DESIGN1,
    DESIGN2A,
    DESIGN2B,
    REFINED,
    S_LIMIT,
    VAR_FLOOR,
    ApproximationError,
    _ball_prob,
    _check_common,
    _phi,
    _resolve,
    _terms_beta,
    _terms_vertex,
    s_to_norm2,
)
from .quadrature import DEFAULT_TOL, integrate


@dataclass(frozen=True)
class QuantResult:
    """Approximate quantization error of a design.

    ``tail_mass`` is ``1 - C(r_max)``, the distance mass the approximation
    leaves beyond the integration range.
    """

    theta: float
    normalized: float
    quadrature_error: float
    tail_mass: float = 0.0


def normalized_quant(n, d, theta) -> float:
    """``n^(2/d) * theta``, comparable across design sizes."""
    if n < 1 or d < 1:
        raise ValueError("n and d must be >= 1")
    if theta < 0:
        raise ValueError("theta must be nonnegative")
    return n ** (2.0 / d) * theta


def r_max(d, delta) -> float:
    """Distance bound from the cube to ``[-delta, delta]^d``, plus a margin of one."""
    return math.sqrt(d) * (1.0 + delta) + 1.0


# Beyond this |c| the normal density underflows and the bracket is meaningless.
_C_CUTOFF = 38.0


def _floor_geometry(d, delta, alpha):
    """Where the conditional variance of ``|U - Z|^2`` reaches zero.

    Returns ``(s_floor, offset)``: for ``s < s_floor`` the variance is at its
    floor, so ``P`` is a unit step at ``r^2 = offset + s'``.
    """
    k = math.sqrt(4.0 * d / 45.0)
    if alpha == 0:
        edge, offset = VAR_FLOOR, d * delta * delta
    else:
        a1, a3 = 2 * alpha + 1, 2 * alpha + 3
        edge = VAR_FLOOR - d * delta * delta * alpha / (a1 * a3)
        offset = d * delta * delta / a1
    return (edge - d / 3.0) / k, offset


def _density_integrand(s, radii, d, n_eff, delta, alpha):
    """``-d psi / dr`` times the weight of ``s``, on the (s, r) grid.

    ``psi = exp(-n P)`` with ``P`` clamped into ``[0, 1]``, so the result is
    zero wherever the clamp is active.
    """
    sp = s_to_norm2(s, d)[:, None]
    r = radii[None, :]
    r2 = r * r
    p = _ball_prob(sp, d, delta, alpha, r2, REFINED)
    inside = (p > 0) & (p < 1)
    psi = np.exp(-n_eff * np.clip(p, 0.0, 1.0))
    with np.errstate(over="ignore", invalid="ignore"):
        if alpha == 0:
            c, kurt, v = _terms_vertex(sp, d, delta, r2)
            bracket = 1.0 + kurt * (6 * c * c - c**4 - 3)
            body = _phi(c) * psi / np.sqrt(v) * bracket
        else:
            a1, a3, a5 = 2 * alpha + 1, 2 * alpha + 3, 2 * alpha + 5
            d2 = delta * delta
            c, _, v = _terms_beta(sp, d, delta, alpha, r2)
            shift = d * d2 * (2 * alpha - 1) / (3 * a5 * a1)
            cda = 1 + 3 / (alpha * d)
            curl = delta * (c**3 - c) - math.sqrt(a1) * (r2 - d * d2 / a1 - sp) / np.sqrt(v)
            bracket = math.sqrt(a1) / np.sqrt(v) + cda * alpha * (sp + shift) / (a3 * v * v) * curl
            body = _phi(c) * psi * bracket
        body = np.where(inside & (np.abs(c) < _C_CUTOFF), body, 0.0)
    return n_eff * r / delta * _phi(s)[:, None] * body


def _step_density(radii, d, n_eff, delta, alpha):
    """Density contributed by the ``s`` range where ``P`` is a unit step in ``r``."""
    s_floor, offset = _floor_geometry(d, delta, alpha)
    k = math.sqrt(4.0 * d / 45.0)
    s_star = (radii * radii - offset - d / 3.0) / k
    live = (s_star > -S_LIMIT) & (s_star < s_floor)
    return np.where(live, -math.expm1(-n_eff) * _phi(s_star) * 2.0 * radii / k, 0.0)


def _density(family, radii, d, n, delta, alpha, tol):
    """Density at ``radii`` with negative values clamped: (f, clamped, quad_err, converged)."""
    n_eff, a = _resolve(family, d, n, alpha)
    s_floor, _ = _floor_geometry(d, delta, a)
    lo = max(-S_LIMIT, s_floor)
    f = np.empty(len(radii))
    err, ok = 0.0, True
    for start in range(0, len(radii), _RADII_PER_PASS):
        chunk = radii[start : start + _RADII_PER_PASS]
        res = integrate(lambda s, chunk=chunk: _density_integrand(s, chunk, d, n_eff, delta, a), lo, S_LIMIT, tol=tol)
        f[start : start + len(chunk)] = res.value
        err, ok = max(err, res.error), ok and res.converged
    f = f + _step_density(radii, d, n_eff, delta, a)
    return np.maximum(f, 0.0), np.maximum(-f, 0.0), err, ok


def quant_density(family, r, d, n, delta, alpha=0.0, tol=DEFAULT_TOL, return_info=False):
    """Approximate density ``dC_d(Z_n, r)/dr`` of the nearest-point distance.

    Parameters
    ----------
    family : {"design1", "design2a", "design2b"}
    r : float or array_like
        Radii, nonnegative.
    return_info : bool
        Also return a dict with the clamped negative mass at each radius,
        the quadrature error estimate and whether the quadrature converged.

    Notes
    -----
    Negative values (Edgeworth artifacts) are clamped to zero.
    """
    if family not in (DESIGN1, DESIGN2A, DESIGN2B):
        raise ValueError(f"no quantization approximation for family {family!r}")
    _check_common(d, delta, alpha if family == DESIGN1 else 0.0, REFINED)
    radii = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(radii < 0):
        raise ValueError("r must be nonnegative")
    f, neg, err, ok = _density(family, radii, d, n, delta, alpha, tol)
    if not ok:
        raise ApproximationError(f"density quadrature did not converge (error {err:.3g})")
    out = float(f[0]) if np.ndim(r) == 0 else f
    if return_info:
        return out, {"clamped": neg, "quadrature_error": err, "converged": ok}
    return out


# Beyond |c| = _C_CUTOFF the Edgeworth-corrected P equals the step h(c) to
# double precision, so the c-integrals below are truncated there.
_PANELS = 64


def _affine(s, d, delta, alpha):
    """``r^2 = A + B c`` and the correction coefficient, per ``s``."""
    sp = s_to_norm2(s, d)
    d2 = delta * delta
    if alpha == 0:
        v = np.maximum(sp, VAR_FLOOR)
        coef = (1 + 3 / d) * (2 * (sp - d / 3) / math.sqrt(5) + d / 5) / (12 * v * v)
        return sp + d * d2, 2 * delta * np.sqrt(v), coef
    a1, a3, a5 = 2 * alpha + 1, 2 * alpha + 3, 2 * alpha + 5
    v = np.maximum(sp + d * d2 * alpha / (a1 * a3), VAR_FLOOR)
    shift = d * d2 * (2 * alpha - 1) / (3 * a5 * a1)
    coef = (1 + 3 / (alpha * d)) * alpha * delta * (sp + shift) / (a3 * math.sqrt(a1) * v**1.5)
    return sp + d * d2 / a1, 2 * delta * np.sqrt(v) / math.sqrt(a1), coef


def _prob_in_c(c, coef, alpha):
    """Corrected ``P`` as a function of the standardized radius ``c``, clamped."""
    phi = _phi(c)
    if alpha == 0:
        p = ndtr(c) + coef * (c**3 - 3 * c) * phi
    else:
        p = ndtr(c) + coef * (1 - c * c) * phi
    return np.clip(p, 0.0, 1.0)


@lru_cache(maxsize=None)
def _inner_rule(panels, order=10):
    """Fixed composite Gauss-Legendre rule on ``[0, 1]``."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, 1.0, panels + 1)
    half = 0.5 / panels
    nodes = (0.5 * (edges[:-1] + edges[1:])[:, None] + half * x[None, :]).ravel()
    return nodes, np.tile(half * w, panels)


def _second_moment_given_s(s, d, n_eff, delta, alpha, R2, panels=_PANELS):
    """``int_0^{R^2} psi(s, t) dt - R^2 psi(s, R^2)`` with ``t = r^2``.

    Writing ``t = A + B c`` the integral is ``B int psi dc``; the step
    ``h(c) = 1[c < 0] + exp(-n) 1[c >= 0]`` is integrated exactly and only the
    localized remainder ``psi - h`` is left to a fixed composite rule (the
    remainder is smooth on each side of ``c = 0`` except where the clamp of
    ``P`` is active).
    """
    A, B, coef = _affine(s, d, delta, alpha)
    c_lo, c_hi = -A / B, (R2 - A) / B
    floor = math.exp(-n_eff)
    # h jumps at c = 0, so the remainder is integrated on each side separately
    left = (np.maximum(c_lo, -_C_CUTOFF), np.clip(c_hi, -_C_CUTOFF, 0.0), 1.0)
    right = (np.clip(c_lo, 0.0, _C_CUTOFF), np.minimum(c_hi, _C_CUTOFF), floor)

    u, wu = _inner_rule(panels)
    res_value = np.zeros_like(A)
    for low, high, level in (left, right):
        span = np.maximum(high - low, 0.0)
        c = low[None, :] + span[None, :] * u[:, None]
        psi = np.exp(-n_eff * _prob_in_c(c, coef[None, :], alpha))
        res_value += span * (wu @ (psi - level))
    step = np.maximum(np.minimum(c_hi, 0.0) - c_lo, 0.0) + floor * np.maximum(c_hi - np.maximum(c_lo, 0.0), 0.0)
    psi_top = np.exp(-n_eff * _prob_in_c(c_hi, coef, alpha))
    return B * (res_value + step) - R2 * psi_top


def _theta_fixed(d, n_eff, delta, alpha, panels):
    """(theta, tail mass) on a ``panels`` x ``panels`` composite tensor rule."""
    R2 = r_max(d, delta) ** 2
    u, wu = _inner_rule(panels)
    s = -S_LIMIT + 2 * S_LIMIT * u
    w = 2 * S_LIMIT * wu * _phi(s)
    g = _second_moment_given_s(s, d, n_eff, delta, alpha, R2, panels)
    A, B, coef = _affine(s, d, delta, alpha)
    tail = np.exp(-n_eff * _prob_in_c((R2 - A) / B, coef, alpha))
    return float(w @ g), float(w @ tail)


def quant_error(family, d, n, delta, alpha=0.0, panels=_PANELS) -> QuantResult:
    """Approximate mean squared quantization error ``theta = int_0^rmax r^2 dC(r)``.

    The Stieltjes integral is evaluated by parts under the ``s``-integral,
    ``theta = E_s[int_0^{R^2} psi dt - R^2 psi(R^2)]`` with ``t = r^2``, which
    needs only the bounded ``psi = exp(-n P)``.  It equals
    ``int r^2 f(r) dr`` for the density of :func:`quant_density`.

    Parameters
    ----------
    family : {"design1", "design2a", "design2b"}
    d, n : int
    delta : float
    alpha : float
        Beta shape for ``design1``; ignored otherwise.
    panels : int
        Panels of the composite 10-point Gauss-Legendre rules in ``s`` and in
        the standardized radius.  The error estimate compares against half
        as many panels.

    Examples
    --------
    >>> res = quant_error("design2a", d=20, n=1024, delta=0.39)
    >>> round(res.normalized, 2)
    7.38
    """
    if family not in (DESIGN1, DESIGN2A, DESIGN2B):
        raise ValueError(f"no quantization approximation for family {family!r}")
    _check_common(d, delta, alpha if family == DESIGN1 else 0.0, REFINED)
    if panels < 2:
        raise ValueError("panels must be >= 2")
    n_eff, a = _resolve(family, d, n, alpha)
    theta, tail = _theta_fixed(d, n_eff, delta, a, panels)
    coarse, _ = _theta_fixed(d, n_eff, delta, a, panels // 2)
    theta = max(theta, 0.0)
    return QuantResult(theta, normalized_quant(n, d, theta), abs(theta - coarse), tail)


def quant_error_from_density(family, d, n, delta, alpha=0.0, panels=16, tol=1e-6):
    """``(int_0^rmax r^2 f(r) dr, int_0^rmax f(r) dr)`` from :func:`quant_density`.

    An independent, slower route to ``theta`` used to cross-check the
    density: a fixed composite rule in ``r`` over adaptively integrated
    density values.
    """
    if family not in (DESIGN1, DESIGN2A, DESIGN2B):
        raise ValueError(f"no quantization approximation for family {family!r}")
    _check_common(d, delta, alpha if family == DESIGN1 else 0.0, REFINED)
    R = r_max(d, delta)
    u, w = _inner_rule(panels)
    rs, w = R * u, R * w
    f, _, err, ok = _density(family, rs, d, n, delta, alpha, tol)
    if not ok:
        raise ApproximationError(f"density quadrature did not converge (error {err:.3g})")
    return float(w @ (rs * rs * f)), float(w @ f)
