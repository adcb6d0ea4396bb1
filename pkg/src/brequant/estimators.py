"""scikit-learn style wrappers around the quantizer designs.

The designs are data-free (the prior is assumed spread over the whole
simplex), so ``fit`` ignores ``X``.  Once fitted, ``predict`` maps priors to
cell labels and ``transform`` maps them to the decision weights that should
be plugged into the likelihood-ratio test.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .exceptions import DomainError
from .models import BinaryGaussianModel, DetectionModel
from .quantizer_scalar import design_mean_bre, design_minimax
from .quantizer_simplex import design_minimax_simplex, quantize_simplex


def _check_priors(X, M: int) -> np.ndarray:
    """Validate priors given as chart coordinates (``M - 1`` columns) or full vectors (``M`` columns)."""
    X = check_array(X, ensure_2d=False, dtype=float)
    if X.ndim == 1:
        if M != 2:
            raise DomainError("one-dimensional input is only accepted for binary models")
        X = X[:, None]
    if X.shape[1] == M:
        if not np.allclose(X.sum(axis=1), 1.0, atol=1e-9):
            raise DomainError("full prior vectors must sum to one")
        X = X[:, :-1]
    if X.shape[1] != M - 1:
        raise DomainError(f"expected {M - 1} or {M} columns, got {X.shape[1]}")
    bary_last = 1.0 - X.sum(axis=1)
    if np.any(X < -1e-12) or np.any(bary_last < -1e-12):
        raise DomainError("priors must lie in the probability simplex")
    return np.clip(X, 0.0, 1.0)


class _QuantizerBase(TransformerMixin, BaseEstimator):

    def _model(self) -> DetectionModel:
        model = BinaryGaussianModel() if self.model is None else self.model
        if not isinstance(model, DetectionModel):
            raise DomainError("model must be a DetectionModel instance")
        return model

    def _check_levels(self):
        if not isinstance(self.n_levels, (int, np.integer)) or self.n_levels < 1:
            raise DomainError("n_levels must be a positive integer")

    def predict(self, X):
        """Zero-based cell label of each prior."""
        check_is_fitted(self, "quantizer_")
        X = _check_priors(X, self.model_.M)
        if self.model_.M == 2:
            return np.searchsorted(self.quantizer_.boundaries, X[:, 0], side="left")
        return np.asarray(quantize_simplex(self.quantizer_, X)[0])

    def transform(self, X):
        """Decision weight (chart coordinates) of each prior's cell, shape ``(n, M - 1)``."""
        labels = self.predict(X)
        return self.cluster_centers_[labels]

    def divergence(self, X):
        """``d(p || q(p))`` for each prior."""
        Xc = _check_priors(X, self.model_.M)
        A = self.transform(X)
        if self.model_.M == 2:
            return self.model_.divergence(Xc[:, 0], A[:, 0])
        return self.model_.divergence(Xc, A)

    def score(self, X, y=None):
        """Negative worst divergence over ``X`` (larger is better)."""
        return -float(np.max(self.divergence(X)))


class MinimaxQuantizer(_QuantizerBase):
    """Quantizer of prior probabilities minimising the worst-case Bayes risk error.

    Parameters
    ----------
    model : DetectionModel, optional
        Binary or ternary detection model; defaults to the unit Gaussian
        shift model with equal costs.
    n_levels : int
        Number of cells ``K``.
    tol, max_iter : optional
        Passed to the design loop; ``None`` uses the design defaults.
    n_init : int, optional
        Number of starts.  Defaults to 1 for binary models and 8 otherwise.
    random_state : int or None
        Seeds the extra starts.

    Attributes
    ----------
    quantizer_ : ScalarQuantizer or SimplexQuantizer
    cluster_centers_ : ndarray of shape (n_levels, M - 1)
    max_divergence_ : float
    n_iter_ : int
    converged_ : bool
    """

    def __init__(self, model=None, n_levels=4, tol=None, max_iter=None, n_init=None, random_state=0):
        self.model = model
        self.n_levels = n_levels
        self.tol = tol
        self.max_iter = max_iter
        self.n_init = n_init
        self.random_state = random_state

    def fit(self, X=None, y=None):
        self._check_levels()
        model = self._model()
        kw = {}
        if self.tol is not None:
            kw["tol"] = self.tol
        if self.max_iter is not None:
            kw["max_iter"] = self.max_iter
        if model.M == 2:
            q, rep = design_minimax(model, int(self.n_levels), n_init=self.n_init or 1,
                                    random_state=self.random_state, **kw)
            centers = q.weights[:, None]
        else:
            q, rep = design_minimax_simplex(model, int(self.n_levels), n_starts=self.n_init or 8,
                                            random_state=self.random_state, **kw)
            centers = np.asarray(q.seeds)
        self.model_ = model
        self.quantizer_ = q
        self.cluster_centers_ = centers
        self.max_divergence_ = rep.max_divergence
        self.n_iter_ = rep.iterations
        self.converged_ = rep.converged
        return self


class MeanBREQuantizer(_QuantizerBase):
    """Binary quantizer minimising the average Bayes risk error under a uniform prior.

    A comparison baseline for :class:`MinimaxQuantizer`; it shares the
    nearest-neighbour boundary rule but uses average rather than worst-case
    cell centroids.
    """

    def __init__(self, model=None, n_levels=4, tol=1e-8, max_iter=2000):
        self.model = model
        self.n_levels = n_levels
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X=None, y=None):
        self._check_levels()
        model = self._model()
        if model.M != 2:
            raise DomainError("the mean-divergence baseline is binary only")
        q, mean = design_mean_bre(model, int(self.n_levels), tol=self.tol, max_iter=self.max_iter)
        self.model_ = model
        self.quantizer_ = q
        self.cluster_centers_ = q.weights[:, None]
        self.mean_divergence_ = mean
        return self

