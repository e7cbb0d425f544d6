import io
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from weakcover import approx
from weakcover.designs import BETA, FACTORIAL, SOBOL, VERTEX_WITH, VERTEX_WITHOUT, DesignSpec
from weakcover.montecarlo import McConfig, mc_coverage
from weakcover.tuner import (
    APPROX,
    BISECTION_TOL,
    MONTE_CARLO,
    _select,
    approx_family,
    approx_radius,
    default_delta_grid,
    mc_radius_curve,
    optimal_delta_for_coverage,
    optimal_delta_for_quantization,
    radius_for_coverage,
)

CFG = McConfig(samples=100_000, seed=0)


def test_default_grid_resolves_two_decimals():
    g = default_delta_grid()
    assert g.size == 50 and g[0] == 0.02 and g[-1] == 1.0
    assert np.allclose(np.diff(g), 0.02)


@given(st.lists(st.integers(0, 5), min_size=1, max_size=30))
def test_select_takes_smallest_delta_among_ties(values):
    deltas = np.linspace(0.1, 1.0, len(values))
    res = _select(deltas, values, MONTE_CARLO, "radius")
    objs = [o for _, o in res.trace]
    assert res.objective_star == min(objs)
    first = objs.index(min(objs))
    assert res.delta_star == deltas[first]
    assert all(res.objective_star <= o for o in objs)


@pytest.mark.parametrize("method", [APPROX, MONTE_CARLO])
def test_single_point_grid_returns_it(method):
    spec = DesignSpec(VERTEX_WITH, 10, 128)
    cfg = McConfig(samples=5000)
    for res in (optimal_delta_for_coverage(spec, 0.9, [0.37], cfg, method),
                optimal_delta_for_quantization(spec, [0.37], cfg, method)):
        assert res.delta_star == 0.37
        assert res.trace == ((0.37, res.objective_star),)


@pytest.mark.parametrize("grid", [[], [0.0, 0.5], [0.5, 1.2]])
def test_invalid_grid(grid):
    with pytest.raises(ValueError):
        optimal_delta_for_coverage(DesignSpec(VERTEX_WITH, 5, 20), 0.9, grid, McConfig(samples=100))


@pytest.mark.parametrize("target", [0.0, 1.0, -0.2])
def test_invalid_target(target):
    with pytest.raises(ValueError):
        radius_for_coverage(DesignSpec(VERTEX_WITH, 5, 20), target, McConfig(samples=100))
    with pytest.raises(ValueError):
        optimal_delta_for_coverage(DesignSpec(VERTEX_WITH, 5, 20), target, [0.5], McConfig(samples=100))


def test_invalid_method_and_family():
    with pytest.raises(ValueError):
        radius_for_coverage(DesignSpec(VERTEX_WITH, 5, 20), 0.9, method="golden")
    with pytest.raises(ValueError):
        approx_family(DesignSpec(SOBOL, 5, 20))
    assert approx_family(DesignSpec(VERTEX_WITHOUT, 5, 20)) == approx.DESIGN2B


def test_mc_radius_is_bisection_limit():
    spec = DesignSpec(VERTEX_WITH, 6, 40, delta=0.5)
    cfg = McConfig(samples=20_000, seed=3)
    r = radius_for_coverage(spec, 0.9, cfg)
    assert mc_coverage(spec, r, cfg=cfg).value >= 0.9
    assert mc_coverage(spec, r * (1 - 1e-9), cfg=cfg).value < 0.9


def test_approx_radius_bracket():
    spec = DesignSpec(VERTEX_WITH, 10, 512, delta=0.5)
    r = approx_radius(spec, 0.9)
    v, _, _ = approx.coverage_values(approx.DESIGN2A, 10, 512, 0.5, 0.0, [r - BISECTION_TOL, r])
    assert v[1] >= 0.9 > v[0]
    assert r == pytest.approx(1.228, abs=0.02)


def test_radius_shrinks_to_zero_with_target():
    spec = DesignSpec(FACTORIAL, 10, 512, delta=0.5)
    radii = [radius_for_coverage(spec, t, CFG) for t in (0.9, 0.5, 0.1, 1e-3, 1e-5)]
    assert np.all(np.diff(radii) < 0)
    low = DesignSpec(VERTEX_WITH, 2, 4, delta=0.5)
    assert radius_for_coverage(low, 1e-4, CFG) < 0.05


def test_factorial_radius_example():
    spec = DesignSpec(FACTORIAL, 10, 512, delta=0.5, k=1)
    assert radius_for_coverage(spec, 0.9, CFG) == pytest.approx(1.115, abs=0.02)


def test_beta_tuned_coverage_example():
    spec = DesignSpec(BETA, 10, 1024, alpha=0.5)
    res = optimal_delta_for_coverage(spec, 0.9, np.round(np.arange(0.6, 0.92, 0.02), 10), CFG)
    assert res.delta_star == pytest.approx(0.75, abs=0.04)
    assert res.objective_star == pytest.approx(1.165, abs=0.02)


def test_sobol_unscaled_is_worse_than_tuned():
    spec = DesignSpec(SOBOL, 20, 1024)
    fixed = optimal_delta_for_coverage(spec, 0.9, [1.0], CFG)
    assert fixed.objective_star == pytest.approx(2.325, abs=0.03)
    tuned = optimal_delta_for_coverage(spec, 0.9, [0.64, 0.68, 0.72, 0.76, 0.8, 1.0], CFG)
    assert tuned.objective_star == pytest.approx(2.196, abs=0.03)
    assert tuned.objective_star < fixed.objective_star


def test_factorial_quantization_example():
    spec = DesignSpec(FACTORIAL, 10, 512, k=1)
    res = optimal_delta_for_quantization(spec, np.round(np.arange(0.40, 0.58, 0.02), 10), CFG)
    assert res.delta_star == pytest.approx(0.48, abs=0.04)
    assert res.objective_star == pytest.approx(3.221, abs=0.05)
    assert len(res.std_errors) == len(res.trace)


def test_vertex_quantization_example_d20():
    spec = DesignSpec(VERTEX_WITH, 20, 1024)
    res = optimal_delta_for_quantization(spec, np.round(np.arange(0.31, 0.48, 0.02), 10), CFG)
    assert res.delta_star == pytest.approx(0.39, abs=0.04)
    assert res.objective_star == pytest.approx(7.248, abs=0.08)


@pytest.mark.parametrize("family", [BETA, VERTEX_WITH, VERTEX_WITHOUT, SOBOL])
def test_radius_non_increasing_in_n(family):
    cfg = McConfig(samples=20_000, seed=5)
    radii = [radius_for_coverage(DesignSpec(family, 8, n, delta=0.6), 0.9, cfg) for n in (32, 64, 128, 250)]
    # nested designs + common samples: every nearest distance can only shrink
    assert np.all(np.diff(radii) <= 0)


@pytest.mark.parametrize("family,alpha", [(BETA, 0.5), (BETA, 1.5), (VERTEX_WITH, 0.0),
                                          (VERTEX_WITHOUT, 0.0), (SOBOL, 0.0), (FACTORIAL, 0.0)])
def test_delta_effect_at_table_scale(family, alpha):
    spec = DesignSpec(family, 10, 128, alpha=alpha)
    res = optimal_delta_for_quantization(spec, default_delta_grid(0.04), CFG)
    i_star = [d for d, _ in res.trace].index(res.delta_star)
    se = np.hypot(res.std_errors[i_star], res.std_errors[-1])
    assert res.trace[-1][0] == 1.0
    assert res.trace[-1][1] - res.objective_star > 3 * se


def test_radius_curve_matches_tuner_trace():
    spec = DesignSpec(VERTEX_WITH, 6, 40)
    cfg = McConfig(samples=8000, seed=2)
    grid = [0.3, 0.5, 0.7]
    deltas, radii = mc_radius_curve(spec, 0.9, grid, cfg)
    res = optimal_delta_for_coverage(spec, 0.9, grid, cfg)
    assert np.array_equal(deltas, grid)
    assert [o for _, o in res.trace] == list(radii)


def test_csv_and_json_outputs():
    spec = DesignSpec(VERTEX_WITH, 6, 40)
    res = optimal_delta_for_quantization(spec, [0.4, 0.6], McConfig(samples=4000, seed=9))
    buf = io.StringIO()
    res.to_csv(buf)
    lines = buf.getvalue().strip().splitlines()
    assert lines[0] == "delta,objective" and len(lines) == 3
    summary = json.loads(res.to_json())
    assert summary["delta_star"] == res.delta_star
    assert summary["objective_star"] == res.objective_star
    assert summary["seed"] == 9 and summary["samples"] == 4000 and summary["replications"] == 40
    assert summary["design"]["family"] == VERTEX_WITH
