import math

import numpy as np
import pytest

from weakcover.approx import ApproximationError, integrate_gaussian
from weakcover.quadrature import integrate


@pytest.mark.parametrize(
    "f, a, b, exact",
    [
        (np.sin, 0.0, math.pi, 2.0),
        (np.exp, -1.0, 2.0, math.e**2 - math.exp(-1)),
        (lambda x: 1 / (1 + 25 * x * x), -1.0, 1.0, 0.4 * math.atan(5)),
        (lambda x: np.sqrt(np.abs(x)), -1.0, 1.0, 4 / 3),
    ],
)
def test_integrate_scalar(f, a, b, exact):
    res = integrate(f, a, b, tol=1e-10)
    assert res.converged
    assert res.value == pytest.approx(exact, abs=1e-9)


def test_integrate_vector_components():
    res = integrate(lambda x: np.stack([x, x**2, np.cos(x)], axis=1), 0.0, 1.0, tol=1e-12)
    np.testing.assert_allclose(res.value, [0.5, 1 / 3, math.sin(1.0)], atol=1e-12)


def test_integrate_is_reproducible():
    f = lambda x: np.exp(-x * x) * np.cos(3 * x)  # noqa: E731
    a = integrate(f, -4, 4, tol=1e-12)
    b = integrate(f, -4, 4, tol=1e-12)
    assert a.value == b.value and a.panels == b.panels


def test_integrate_reports_nonconvergence():
    res = integrate(lambda x: np.sign(x - 1 / 3), 0.0, 1.0, tol=1e-15, max_panels=32)
    assert not res.converged


@pytest.mark.parametrize(
    "f, exact",
    [
        (lambda s: np.ones_like(s), 1.0),
        (lambda s: s, 0.0),
        (lambda s: s * s, 1.0),
        (lambda s: s**4, 3.0),
        (lambda s: np.cos(s), math.exp(-0.5)),
    ],
)
def test_integrate_gaussian(f, exact):
    value, err = integrate_gaussian(f, tol=1e-12)
    assert value == pytest.approx(exact, abs=1e-12)
    assert err <= 1e-12


def test_integrate_gaussian_raises_when_tolerance_unreachable():
    with pytest.raises(ApproximationError):
        integrate_gaussian(lambda s: np.cos(1e5 * s), tol=1e-12)
