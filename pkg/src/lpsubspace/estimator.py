"""Scikit-learn style estimator wrapping the lp subspace optimizer.

``LpSubspace`` fits a d-dimensional linear subspace minimizing the
lp-averaged orthogonal distances, which makes the robust fit usable inside
sklearn pipelines: ``transform`` returns subspace coordinates,
``inverse_transform`` embeds them back, and ``score`` is the negative mean
energy.
"""

from __future__ import annotations

import numbers

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_random_state

from .energy import Dataset, energy
from .grassmann import point_distances
from .optimize import OptimizerConfig, minimize


class LpSubspace(TransformerMixin, BaseEstimator):
    """Robust linear subspace estimator by geometric lp minimization.

    Parameters
    ----------
    n_components : int
        Dimension d of the fitted subspace.
    p : float, default=1.0
        Exponent of the distance energy; p = 1 is the robust geometric
        median flavor, p = 2 recovers PCA's objective.
    restarts : int, default=20
        Independent descent starts (the energy is non-convex).
    max_iters, step_init, step_shrink, grad_tol :
        Geodesic descent controls; see ``OptimizerConfig``.
    seeding : {"both", "random-grassmannian", "data-span"}, default="both"
        Restart seeding strategy.  Spans of data subsets are essential for
        p <= 1, where minimizers interpolate data points.
    random_state : int or None, default=None
        Seed for restart generation.

    Attributes
    ----------
    subspace_ : Subspace
        The fitted subspace.
    basis_ : ndarray of shape (n_features, n_components)
        Orthonormal basis, columns are basis vectors.
    energy_ : float
        Final value of sum_x dist(x, L)^p.
    optimization_result_ : OptimizationResult
        Full per-restart record.
    """

    def __init__(
        self,
        n_components=1,
        p=1.0,
        restarts=20,
        max_iters=200,
        step_init=0.5,
        step_shrink=0.5,
        grad_tol=1e-10,
        seeding="both",
        random_state=None,
    ):
        self.n_components = n_components
        self.p = p
        self.restarts = restarts
        self.max_iters = max_iters
        self.step_init = step_init
        self.step_shrink = step_shrink
        self.grad_tol = grad_tol
        self.seeding = seeding
        self.random_state = random_state

    def _validate(self, X):
        return check_array(X, dtype=float, ensure_2d=True, ensure_min_samples=1)

    def fit(self, X, y=None):
        X = self._validate(X)
        if not isinstance(self.n_components, numbers.Integral) or self.n_components < 1:
            raise ValueError("n_components must be a positive integer")
        rs = check_random_state(self.random_state)
        config = OptimizerConfig(
            p=self.p,
            restarts=self.restarts,
            max_iters=self.max_iters,
            step_init=self.step_init,
            step_shrink=self.step_shrink,
            grad_tol=self.grad_tol,
            seed=int(rs.randint(np.iinfo(np.int32).max)),
            seeding=self.seeding,
        )
        result = minimize(Dataset(X), int(self.n_components), config)
        self.subspace_ = result.best
        self.basis_ = result.best.basis
        self.energy_ = result.energy
        self.optimization_result_ = result
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "basis_")
        X = self._validate(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, expected {self.n_features_in_}"
            )
        return X @ self.basis_

    def inverse_transform(self, Xt):
        check_is_fitted(self, "basis_")
        Xt = check_array(Xt, dtype=float, ensure_2d=True)
        return Xt @ self.basis_.T

    def residual_distances(self, X):
        """Orthogonal distance of each sample to the fitted subspace."""
        check_is_fitted(self, "subspace_")
        X = self._validate(X)
        return point_distances(X, self.subspace_)

    def score(self, X, y=None):
        """Negative mean lp energy (higher is better)."""
        check_is_fitted(self, "subspace_")
        X = self._validate(X)
        return -energy(Dataset(X), self.subspace_, self.p) / X.shape[0]
