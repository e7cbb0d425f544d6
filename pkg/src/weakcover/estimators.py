"""scikit-learn style wrappers around the design families and the delta tuner.

A :class:`DesignQuantizer` behaves like a fitted ``KMeans`` whose centers are
a point design rather than learned from data: ``transform`` gives distances
to every design point, ``predict`` the nearest one and ``score`` the negative
mean squared distance.  Fitting only reads the dimension from ``X`` (or uses
the ``d`` parameter), so the estimators compose with pipelines and
``clone``/``get_params`` as usual.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .designs import BETA, FACTORIAL, SIMPLEX_S1, SIMPLEX_S2, SOBOL, VERTEX_WITH, VERTEX_WITHOUT, DesignSpec, generate
from .geometry import nearest_sq_distances
from .montecarlo import McConfig
from .tuner import MONTE_CARLO, optimal_delta_for_coverage, optimal_delta_for_quantization


class DesignQuantizer(TransformerMixin, BaseEstimator):
    """A point design used as a fixed quantizer.

    Parameters
    ----------
    family : str
        Design family, see :data:`weakcover.designs.FAMILIES`.
    n : int
        Number of design points.
    delta : float
        Scaling in ``[0, 1]``.
    alpha : float
        Beta shape parameter (``beta`` family only).
    d : int, optional
        Dimension.  If omitted, taken from ``X`` in :meth:`fit`.
    k : int, optional
        Number of generators for the ``factorial`` family.
    seed : int
        Seed for random families.
    replicate : int
        Which independent draw of a random design to use.

    Attributes
    ----------
    cluster_centers_ : ndarray of shape (n, d)
    spec_ : DesignSpec
    n_features_in_ : int

    Examples
    --------
    >>> q = DesignQuantizer("factorial", n=8, delta=0.5).fit(np.zeros((1, 3)))
    >>> q.predict([[0.4, 0.4, 0.4]])
    array([7])
    """

    def __init__(self, family=VERTEX_WITH, n=64, delta=0.5, alpha=1.0, d=None, k=None, seed=0, replicate=0):
        self.family = family
        self.n = n
        self.delta = delta
        self.alpha = alpha
        self.d = d
        self.k = k
        self.seed = seed
        self.replicate = replicate

    def _dimension(self, X):
        if X is not None:
            X = check_array(X)
            if self.d is not None and self.d != X.shape[1]:
                raise ValueError(f"X has {X.shape[1]} features but d={self.d}")
            return X.shape[1]
        if self.d is None:
            raise ValueError("pass X or set d")
        return int(self.d)

    def fit(self, X=None, y=None):
        d = self._dimension(X)
        self.spec_ = DesignSpec(self.family, d, self.n, self.delta, self.alpha, self.k, seed=self.seed)
        self.cluster_centers_ = generate(self.spec_, self.replicate).points
        self.n_features_in_ = d
        return self

    def _check(self, X):
        check_is_fitted(self, "cluster_centers_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return X

    def transform(self, X):
        """Euclidean distances from each row of ``X`` to every design point."""
        X = self._check(X)
        Z = self.cluster_centers_
        d2 = (X * X).sum(1)[:, None] + (Z * Z).sum(1)[None, :] - 2.0 * X @ Z.T
        return np.sqrt(np.maximum(d2, 0.0))

    def predict(self, X):
        """Index of the nearest design point."""
        _, idx = nearest_sq_distances(self._check(X), self.cluster_centers_, return_index=True)
        return idx

    def nearest_distance(self, X):
        return np.sqrt(nearest_sq_distances(self._check(X), self.cluster_centers_))

    def score(self, X, y=None):
        """Negative mean squared distance to the nearest point (higher is better)."""
        return -float(np.mean(nearest_sq_distances(self._check(X), self.cluster_centers_)))

    def coverage(self, X, r):
        """Fraction of the rows of ``X`` within distance ``r`` of the design."""
        return float(np.mean(self.nearest_distance(X) <= r))


def BetaDesign(n=64, delta=0.5, alpha=1.0, **kw):
    """Design 1: i.i.d. ``delta``-scaled symmetric Beta(alpha, alpha) coordinates."""
    return DesignQuantizer(BETA, n, delta, alpha, **kw)


def VertexDesign(n=64, delta=0.5, replace=True, **kw):
    """Designs 2a (``replace=True``) and 2b: random vertices of ``[-delta, delta]^d``."""
    return DesignQuantizer(VERTEX_WITH if replace else VERTEX_WITHOUT, n, delta, **kw)


def SobolDesign(n=64, delta=1.0, **kw):
    """Design 3: the first ``n`` Sobol points mapped to ``[-delta, delta]^d``."""
    return DesignQuantizer(SOBOL, n, delta, **kw)


def FactorialDesign(n=64, delta=0.5, k=None, **kw):
    """Design 4: a minimum-aberration ``2^(d-k)`` fraction on the scaled vertices."""
    return DesignQuantizer(FACTORIAL, n, delta, k=k, **kw)


def SimplexDesign(n=64, delta=1.0, scaling="S1", **kw):
    """Uniform points in the simplex shrunk toward the origin (S1) or centroid (S2)."""
    fam = {"S1": SIMPLEX_S1, "S2": SIMPLEX_S2}[scaling]
    return DesignQuantizer(fam, n, delta, **kw)


class DeltaTuner(BaseEstimator):
    """Grid search for the best scaling ``delta`` of a design family.

    Parameters
    ----------
    family, n, alpha, d, k, seed :
        As for :class:`DesignQuantizer`.
    objective : {"coverage", "quantization"}
        Minimize the ``target``-coverage radius or ``n^(2/d) E theta``.
    target : float
        Coverage level for ``objective="coverage"``.
    method : {"mc", "approx"}
        Evaluation engine.
    delta_grid : array-like, optional
        Defaults to ``0.02, 0.04, ..., 1``.
    samples, replications : int
        Monte Carlo budget.

    Attributes
    ----------
    delta_star_, objective_star_ : float
    result_ : TuneResult
    best_estimator_ : DesignQuantizer
        Fitted at ``delta_star_``.
    """

    def __init__(self, family=VERTEX_WITH, n=64, alpha=1.0, d=None, k=None, objective="coverage", target=0.9,
                 method=MONTE_CARLO, delta_grid=None, samples=100_000, replications=None, seed=0):
        self.family = family
        self.n = n
        self.alpha = alpha
        self.d = d
        self.k = k
        self.objective = objective
        self.target = target
        self.method = method
        self.delta_grid = delta_grid
        self.samples = samples
        self.replications = replications
        self.seed = seed

    def fit(self, X=None, y=None):
        d = DesignQuantizer(d=self.d)._dimension(X)
        spec = DesignSpec(self.family, d, self.n, 1.0, self.alpha, self.k, seed=self.seed)
        cfg = McConfig(self.samples, self.seed, self.replications)
        if self.objective == "coverage":
            res = optimal_delta_for_coverage(spec, self.target, self.delta_grid, cfg, self.method)
        elif self.objective == "quantization":
            res = optimal_delta_for_quantization(spec, self.delta_grid, cfg, self.method)
        else:
            raise ValueError(f"objective must be 'coverage' or 'quantization', got {self.objective!r}")
        self.result_ = res
        self.delta_star_ = res.delta_star
        self.objective_star_ = res.objective_star
        self.n_features_in_ = d
        self.best_estimator_ = DesignQuantizer(self.family, self.n, res.delta_star, self.alpha, d, spec.k, self.seed)
        self.best_estimator_.fit()
        return self


__all__ = [
    "BetaDesign",
    "DeltaTuner",
    "DesignQuantizer",
    "FactorialDesign",
    "SimplexDesign",
    "SobolDesign",
    "VertexDesign",
]
