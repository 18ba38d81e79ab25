"""scikit-learn style wrappers around the moment extension and the sampled estimator.

The core API works on exact rationals; these classes expose float arrays so
they drop into pipelines and ``GridSearchCV``-style parameter handling.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .estimation import EstimationConfig, estimate_from_moments, run_algorithm1
from .exact import Spectrum, as_fraction


class MomentExtender(TransformerMixin, BaseEstimator):
    """Each row holds ``t`` moments ``P_1..P_t``; output rows hold ``P_1..P_k``.

    Rows are extended independently with the order-``t`` recurrence, in exact
    arithmetic after converting every float through its shortest repr.
    """

    def __init__(self, k=32):
        self.k = k

    def fit(self, X, y=None):
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] < 1:
            raise ValueError("X must be 2-D with at least one moment per row")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} moments per row")
        out = np.empty((X.shape[0], self.k))
        for row, moments in zip(out, X):
            series, _ = estimate_from_moments([as_fraction(float(m)) for m in moments], self.k)
            row[:] = series.as_floats()
        return out


class TracePowerEstimator(BaseEstimator):
    """Fit on a spectrum, predict ``Tr(rho^i)`` for requested powers."""

    def __init__(self, k=32, epsilon=0.1, t=None, seed=0, exact_oracle=False):
        self.k = k
        self.epsilon = epsilon
        self.t = t
        self.seed = seed
        self.exact_oracle = exact_oracle

    def fit(self, X, y=None):
        spectrum = X if isinstance(X, Spectrum) else Spectrum(
            [x if isinstance(x, (Fraction, int)) else float(x) for x in np.ravel(X)]
        )
        cfg = EstimationConfig(
            k=self.k, epsilon=self.epsilon, t=self.t, seed=self.seed, exact_oracle=self.exact_oracle
        )
        est = run_algorithm1(spectrum, cfg)
        self.estimate_ = est
        self.q_ = np.array(est.q.as_floats())
        self.coef_ = np.array([float(c) for c in est.b.coeffs])
        self.t_ = est.t
        self.n_samples_ = est.samples_per_moment
        return self

    def predict(self, X):
        check_is_fitted(self, "q_")
        powers = np.asarray(X, dtype=int).ravel()
        if powers.size and (powers.min() < 1 or powers.max() > self.k):
            raise ValueError(f"powers must lie in 1..{self.k}")
        return self.q_[powers - 1]
