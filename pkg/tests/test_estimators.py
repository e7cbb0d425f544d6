import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import FunctionTransformer

from weakcover.designs import DesignSpec, generate
from weakcover.estimators import (
    BetaDesign,
    DeltaTuner,
    DesignQuantizer,
    FactorialDesign,
    SimplexDesign,
    SobolDesign,
    VertexDesign,
)
from weakcover.geometry import nearest_sq_distances


@pytest.fixture
def X(rng):
    return rng.uniform(-1, 1, size=(300, 5))


def test_get_params_and_clone():
    q = BetaDesign(n=32, delta=0.7, alpha=0.5, seed=3)
    params = q.get_params()
    assert params["family"] == "beta" and params["alpha"] == 0.5 and params["seed"] == 3
    c = clone(q)
    assert c.get_params() == params and c is not q
    q.set_params(delta=0.2)
    assert q.delta == 0.2


@pytest.mark.parametrize("make", [
    lambda: BetaDesign(n=16, alpha=2.0),
    lambda: VertexDesign(n=16),
    lambda: VertexDesign(n=16, replace=False),
    lambda: SobolDesign(n=16, delta=0.8),
    lambda: FactorialDesign(n=16, delta=0.5),
    lambda: SimplexDesign(n=16, scaling="S2", delta=0.5),
])
def test_fit_matches_generated_design(make, X):
    q = make().fit(X)
    spec = DesignSpec(q.family, 5, q.n, q.delta, q.alpha, q.k, seed=q.seed)
    assert np.array_equal(q.cluster_centers_, generate(spec).points)
    assert q.n_features_in_ == 5 and q.cluster_centers_.shape == (16, 5)


def test_transform_predict_score(X):
    q = VertexDesign(n=20, delta=0.5, seed=1).fit(X)
    D = q.transform(X)
    assert D.shape == (300, 20)
    sq, idx = nearest_sq_distances(X, q.cluster_centers_, return_index=True)
    assert np.array_equal(q.predict(X), idx)
    assert np.allclose(D.min(axis=1), np.sqrt(sq))
    assert q.score(X) == pytest.approx(-np.mean(sq))
    assert q.coverage(X, np.inf) == 1.0 and q.coverage(X, 0.0) == 0.0
    assert np.allclose(q.fit_transform(X), D)


def test_dimension_checks(X):
    with pytest.raises(ValueError):
        DesignQuantizer(d=4).fit(X)
    with pytest.raises(ValueError):
        DesignQuantizer().fit()
    with pytest.raises(NotFittedError):
        DesignQuantizer().predict(X)
    q = DesignQuantizer(n=8, d=5).fit()
    with pytest.raises(ValueError):
        q.predict(X[:, :3])


def test_pipeline_composition(X):
    pipe = make_pipeline(FunctionTransformer(lambda a: 0.5 * a), VertexDesign(n=8, delta=0.5))
    pipe.fit(X)
    assert pipe.predict(X).shape == (300,)


def test_delta_tuner_on_factorial():
    tuner = DeltaTuner("factorial", n=512, d=10, objective="quantization", delta_grid=[0.44, 0.48, 0.52],
                       samples=20_000)
    tuner.fit()
    assert tuner.delta_star_ == 0.48
    assert tuner.objective_star_ == min(o for _, o in tuner.result_.trace)
    assert tuner.best_estimator_.delta == 0.48
    assert tuner.best_estimator_.cluster_centers_.shape == (512, 10)


def test_delta_tuner_approx_coverage():
    tuner = DeltaTuner("vertex_with", n=512, d=10, method="approx", delta_grid=[0.4, 0.5, 0.6]).fit()
    assert tuner.delta_star_ == 0.5
    assert tuner.objective_star_ == pytest.approx(1.228, abs=0.02)


def test_delta_tuner_rejects_unknown_objective():
    with pytest.raises(ValueError):
        DeltaTuner(d=3, objective="volume", delta_grid=[0.5], samples=100).fit()
