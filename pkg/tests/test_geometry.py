import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from weakcover.factorial import factorial_points
from weakcover.geometry import (
    FULL,
    HALF,
    Cube,
    PointSet,
    Simplex,
    covering_radius_factorial,
    min_distance,
    nearest_sq_distances,
    normalized_radius,
    scaled_simplex_1,
    scaled_simplex_2,
    uniform_cube,
)

finite = st.floats(-5, 5, allow_nan=False, allow_infinity=False)


@pytest.mark.parametrize(
    "U, Z, expected",
    [
        ([0.0, 0.0], [[0.0, 0.0], [1.0, 1.0]], 0.0),
        ([1.0, 1.0], [[0.5, 0.5]], math.sqrt(0.5)),
    ],
)
def test_min_distance_examples(U, Z, expected):
    assert min_distance(U, Z) == pytest.approx(expected, abs=1e-15)


def test_min_distance_corner_to_full_factorial():
    Z = 0.5 * factorial_points(10, 0)
    assert min_distance(np.ones(10), Z) == pytest.approx(math.sqrt(10) / 2, abs=1e-12)


def test_min_distance_errors():
    with pytest.raises(ValueError):
        min_distance([0.0, 0.0], np.empty((0, 2)))
    with pytest.raises(ValueError):
        min_distance([0.0, 0.0, 0.0], [[0.0, 0.0]])


@given(
    U=arrays(float, 3, elements=finite),
    Z=arrays(float, (6, 3), elements=finite),
    extra=arrays(float, (2, 3), elements=finite),
    perm_seed=st.integers(0, 2**32 - 1),
)
def test_min_distance_properties(U, Z, extra, perm_seed):
    base = min_distance(U, Z)
    assert base >= 0.0
    perm = np.random.default_rng(perm_seed).permutation(len(Z))
    assert min_distance(U, Z[perm]) == pytest.approx(base, rel=1e-12, abs=1e-12)
    assert min_distance(U, np.vstack([Z, extra])) <= base + 1e-12


def test_nearest_sq_distances_matches_brute_force(rng):
    X = rng.uniform(-1, 1, (50, 4))
    Z = rng.uniform(-1, 1, (30, 4))
    brute = ((X[:, None, :] - Z[None, :, :]) ** 2).sum(-1)
    sq, idx = nearest_sq_distances(X, Z, return_index=True)
    np.testing.assert_allclose(sq, brute.min(1), rtol=1e-12, atol=1e-14)
    np.testing.assert_array_equal(idx, brute.argmin(1))


@pytest.mark.parametrize(
    "d, fraction, expected",
    [(10, HALF, math.sqrt(18) / 2), (10, FULL, math.sqrt(10) / 2), (4, FULL, 1.0)],
)
def test_covering_radius_factorial(d, fraction, expected):
    assert covering_radius_factorial(d, fraction) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("d", [0, 1, 2])
def test_covering_radius_half_needs_d_above_two(d):
    with pytest.raises(ValueError):
        covering_radius_factorial(d, HALF)


@pytest.mark.parametrize("d", range(3, 30))
def test_full_factorial_radius_is_smaller(d):
    assert covering_radius_factorial(d, FULL) < covering_radius_factorial(d, HALF)


@pytest.mark.parametrize(
    "n, d, r, expected",
    [(512, 10, math.sqrt(18) / 2, 3.9585), (1024, 10, math.sqrt(10) / 2, 3.1623), (1, 7, 0.37, 0.37)],
)
def test_normalized_radius(n, d, r, expected):
    assert normalized_radius(n, d, r) == pytest.approx(expected, abs=1e-4)


@given(n=st.integers(1, 10_000), d=st.integers(1, 50), r=st.floats(0.01, 10))
def test_normalized_radius_strictly_increasing(n, d, r):
    assert normalized_radius(n + 1, d, r) > normalized_radius(n, d, r)
    assert normalized_radius(n, d, r * 1.01) > normalized_radius(n, d, r)


def test_factorial_radius_monte_carlo_bound():
    # sample maximum of the nearest distance stays below the analytic radius
    for k, fraction in [(0, FULL), (1, HALF)]:
        Z = 0.5 * factorial_points(10, k)
        U = uniform_cube(10, 200_000, 7, 99, k)
        dist = np.sqrt(nearest_sq_distances(U, Z))
        running = np.maximum.accumulate(dist)
        cr = covering_radius_factorial(10, fraction)
        assert running[-1] <= cr + 1e-12
        # the running maximum creeps up toward the radius; corners are rare in d=10
        assert running[-1] >= running[len(running) // 10]
        assert running[-1] > 0.6 * cr


def test_pointset_prefix_and_csv_roundtrip(tmp_path):
    ps = PointSet(np.arange(12.0).reshape(4, 3) / 7)
    assert len(ps) == 4 and ps.dim == 3
    assert ps.prefix(2).is_prefix_of(ps)
    assert not PointSet(ps.points[1:3]).is_prefix_of(ps)
    text = ps.to_csv()
    assert text.splitlines()[0] == "x1,x2,x3"
    assert PointSet.from_csv(text) == ps
    path = tmp_path / "pts.csv"
    ps.to_csv(path)
    assert PointSet.from_csv(path) == ps


def test_pointset_rejects_bad_input():
    with pytest.raises(ValueError):
        PointSet([[0.0, np.nan]])
    with pytest.raises(ValueError):
        PointSet(np.zeros((2, 0)))


def test_domains(rng):
    cube = Cube(3)
    assert cube.contains(cube.sample(100, rng)).all()
    assert cube.diameter_bound(0.5) == pytest.approx(math.sqrt(3) * 1.5)
    assert scaled_simplex_2(4, 1.0) == Simplex(4)
    s1 = scaled_simplex_1(4, 0.3)
    assert s1.contains(s1.sample(500, rng)).all()
    s2 = scaled_simplex_2(4, 0.3)
    assert s2.contains(s2.sample(500, rng)).all()
    np.testing.assert_allclose(s2.vertices.mean(0), Simplex(4).center)
