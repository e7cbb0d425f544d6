import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from weakcover import approx
from weakcover.approx import (
    DESIGN1,
    DESIGN2A,
    DESIGN2B,
    NORMAL,
    REFINED,
    coverage_approx,
    coverage_exact_product,
    coverage_values,
    equivalent_m,
    p_ball,
)
from weakcover.moments import aggregate


def test_p_ball_limits():
    assert p_ball(10 / 3, 10, 0.5, 1.0, 50.0) == 1.0
    assert p_ball(10 / 3, 10, 0.5, 1.0, 0.0) == pytest.approx(0.0, abs=1e-12)
    assert p_ball(10 / 3, 10, 0.5, 0.0, 0.0) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("variant", [NORMAL, REFINED])
@given(s2=st.floats(0, 50), r=st.floats(0, 20), alpha=st.sampled_from([0.0, 0.1, 1.0, 3.0]))
def test_p_ball_in_unit_interval(variant, s2, r, alpha):
    assert 0.0 <= p_ball(s2, 20, 0.6, alpha, r, variant) <= 1.0


@pytest.mark.parametrize("c", [-1.0, 1.0])
@pytest.mark.parametrize("alpha", [0.1, 0.5, 1.0, 2.0])
def test_refined_equals_normal_where_skew_term_vanishes(c, alpha):
    d, delta = 10, 0.5
    U = np.full(d, 0.4)
    agg = aggregate(U, delta, alpha)
    r = math.sqrt(agg.mu + c * math.sqrt(agg.sigma2))
    s2 = float(U @ U)
    assert p_ball(s2, d, delta, alpha, r, REFINED) == pytest.approx(p_ball(s2, d, delta, alpha, r, NORMAL), abs=1e-14)


@pytest.mark.parametrize("c", [-math.sqrt(3), 0.0, math.sqrt(3)])
def test_refined_equals_normal_where_kurtosis_term_vanishes(c):
    d, delta = 12, 0.4
    s2 = 4.1
    r = math.sqrt(s2 + d * delta**2 + c * 2 * delta * math.sqrt(s2))
    assert p_ball(s2, d, delta, 0.0, r, REFINED) == pytest.approx(p_ball(s2, d, delta, 0.0, r, NORMAL), abs=1e-14)


def test_p_ball_tracks_simulation_in_small_probability_regime():
    d, delta, alpha = 10, 0.5, 0.5
    U = np.full(d, 0.5)
    radii = np.array([0.8, 1.0, 1.2])
    rng = np.random.default_rng(4)
    hits = np.zeros(len(radii))
    N = 0
    for _ in range(4):
        Z = delta * (2 * rng.beta(alpha, alpha, size=(500_000, d)) - 1)
        hits += (((Z - U) ** 2).sum(1)[:, None] <= radii**2).sum(0)
        N += len(Z)
    mc = hits / N
    se = np.sqrt(mc * (1 - mc) / N)
    refined = p_ball(float(U @ U), d, delta, alpha, radii)
    assert np.all(np.abs(refined - mc) <= 2e-3 + 3 * se)


@pytest.mark.parametrize("p, n, expected", [(0.3, 1, 0.3), (0.0, 7, 0.0), (1.0, 7, 1.0), (0.01, 100, 1 - 0.99**100)])
def test_coverage_exact_product(p, n, expected):
    assert coverage_exact_product(p, n) == pytest.approx(expected, abs=1e-14)


@given(p=st.floats(0, 1), n=st.integers(1, 10**6))
def test_exp_form_never_exceeds_product_form(p, n):
    assert -math.expm1(-n * p) <= coverage_exact_product(p, n) + 1e-15


def test_equivalent_m():
    assert equivalent_m(10, 1) == 1.0
    assert equivalent_m(50, 1) == 1.0
    assert equivalent_m(10, 512) == pytest.approx(math.log(2) / math.log(1024 / 1023), rel=1e-12)
    assert equivalent_m(10, 512) == pytest.approx(709.4, abs=0.05)
    for bad in [(10, 0), (10, 1024), (3, 9)]:
        with pytest.raises(ValueError):
            equivalent_m(*bad)


@given(d=st.integers(2, 40), frac=st.floats(0.0, 0.999))
def test_equivalent_m_not_below_n(d, frac):
    n = max(1, int(frac * (2**d - 1)))
    m = equivalent_m(d, n)
    assert m >= n * (1 - 1e-12)


def test_equivalent_m_large_d_matches_n():
    # collisions are negligible when n << 2^d
    assert equivalent_m(50, 1024) == pytest.approx(1024, rel=1e-9)


@pytest.mark.parametrize(
    "family, d, n, delta, alpha, r",
    [(DESIGN1, 20, 128, 0.48, 0.5, 2.455), (DESIGN2A, 10, 512, 0.50, 0.0, 1.228)],
)
def test_coverage_examples(family, d, n, delta, alpha, r):
    res = coverage_approx(family, d, n, delta, alpha, r)
    assert res.value == pytest.approx(0.9, abs=0.03)
    assert res.quadrature_error <= 1e-8
    assert 0.0 <= res.value <= 1.0


@pytest.mark.parametrize("family, alpha", [(DESIGN1, 0.5), (DESIGN2A, 0.0), (DESIGN2B, 0.0)])
def test_coverage_degenerate_radii(family, alpha):
    d, n, delta = 10, 128, 0.5
    # not exactly 0: the corrected law leaves a little mass at |U - Z| = 0 in d = 10
    assert coverage_approx(family, d, n, delta, alpha, 0.0).value == pytest.approx(0.0, abs=1e-3)
    assert coverage_approx(family, 50, n, delta, alpha, 0.0).value == pytest.approx(0.0, abs=1e-8)
    big = math.sqrt(d) * (1 + delta)
    assert coverage_approx(family, d, n, delta, alpha, big).value == pytest.approx(1.0, abs=1e-8)


FAMILY_ALPHAS = [(DESIGN1, 0.1), (DESIGN1, 1.5), (DESIGN2A, 0.0), (DESIGN2B, 0.0)]


def _largest_dip(values):
    return float(np.max(np.maximum.accumulate(values) - values))


@pytest.mark.parametrize("family, alpha", FAMILY_ALPHAS)
@pytest.mark.parametrize("d", [5, 10, 20])
@pytest.mark.parametrize("delta", [0.2, 0.6, 1.0])
def test_normal_variant_monotone_in_r(family, alpha, d, delta):
    n = 256 if family != DESIGN2B or d > 8 else 20
    radii = np.linspace(0.0, 1.3 * math.sqrt(d), 121)
    vals, err, _ = coverage_values(family, d, n, delta, alpha, radii, NORMAL)
    assert _largest_dip(vals) <= 2 * err


@pytest.mark.parametrize("family, alpha", FAMILY_ALPHAS)
@pytest.mark.parametrize("d, bound", [(5, 2e-2), (10, 1e-3), (20, 1e-5)])
def test_refined_variant_monotone_up_to_edgeworth_artifact(family, alpha, d, bound):
    # the corrected single-ball law is not a proper c.d.f. in r: its density
    # phi(c) (1 + coefficient * polynomial(c)) dips below zero in the tails,
    # and the dip shrinks quickly with d
    n = 256 if family != DESIGN2B or d > 8 else 20
    radii = np.linspace(0.0, 1.3 * math.sqrt(d), 121)
    for delta in [0.2, 0.6, 1.0]:
        vals, err, _ = coverage_values(family, d, n, delta, alpha, radii, REFINED)
        assert _largest_dip(vals) <= bound + 2 * err


@pytest.mark.parametrize("variant", [NORMAL, REFINED])
@pytest.mark.parametrize("family, alpha", FAMILY_ALPHAS)
def test_coverage_monotone_in_n(variant, family, alpha):
    radii = np.linspace(0.5, 2.5, 21)
    fewer, err1, _ = coverage_values(family, 10, 256, 0.6, alpha, radii, variant)
    more, err2, _ = coverage_values(family, 10, 512, 0.6, alpha, radii, variant)
    assert np.all(more >= fewer - err1 - err2)


@pytest.mark.parametrize("variant", [NORMAL, REFINED])
@pytest.mark.parametrize("d, n", [(10, 128), (10, 1000), (20, 512)])
def test_design2b_is_design2a_at_equivalent_m(variant, d, n):
    radii = np.linspace(0.5, 3.0, 11)
    b = coverage_values(DESIGN2B, d, n, 0.5, 0.0, radii, variant)
    a = coverage_values(DESIGN2A, d, equivalent_m(d, n), 0.5, 0.0, radii, variant)
    np.testing.assert_array_equal(a[0], b[0])
    assert a[1] == b[1]


@pytest.mark.parametrize("delta", [0.3, 0.7, 1.0])
def test_alpha_continuity_of_normal_variant(delta):
    d, n = 10, 512
    radii = np.linspace(0.6, 2.2, 9)
    beta = coverage_values(DESIGN1, d, n, delta, 1e-4, radii, NORMAL)[0]
    vertex = coverage_values(DESIGN2A, d, n, delta, 0.0, radii, NORMAL)[0]
    np.testing.assert_allclose(beta, vertex, atol=1e-3)


def test_invalid_parameters():
    with pytest.raises(ValueError):
        coverage_approx(DESIGN1, 10, 128, 0.5, 0.0, 1.0)
    with pytest.raises(ValueError):
        coverage_approx(DESIGN2B, 10, 1024, 0.5, 0.0, 1.0)
    with pytest.raises(ValueError):
        coverage_approx("design3", 10, 128, 0.5, 0.0, 1.0)
    with pytest.raises(ValueError):
        coverage_approx(DESIGN2A, 10, 128, 0.5, 0.0, 1.0, variant="fancy")
    with pytest.raises(ValueError):
        p_ball(1.0, 10, 0.0, 1.0, 1.0)


def test_clamping_is_reported():
    # deep-tail Edgeworth overshoot at large n
    res = coverage_approx(DESIGN2A, 20, 2048, 0.8, 0.0, 2.0)
    assert res.clamp_effect >= 0.0
    assert isinstance(res.clamped, bool)
    assert approx.VAR_FLOOR > 0
