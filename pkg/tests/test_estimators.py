import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from brequant.estimators import MeanBREQuantizer, MinimaxQuantizer
from brequant.exceptions import DomainError
from brequant.models import BinaryGaussianModel, ExponentialTernaryModel


class TestMinimaxQuantizer:
    def test_params_and_clone(self):
        est = MinimaxQuantizer(n_levels=3, tol=1e-9)
        assert est.get_params()["n_levels"] == 3
        other = clone(est).set_params(n_levels=5)
        assert other.n_levels == 5 and est.n_levels == 3

    def test_binary_fit(self):
        est = MinimaxQuantizer(n_levels=4).fit()
        assert est.cluster_centers_.shape == (4, 1)
        assert est.converged_
        X = np.linspace(0, 1, 101)
        labels = est.predict(X)
        assert labels.min() == 0 and labels.max() == 3
        assert np.all(np.diff(labels) >= 0)
        np.testing.assert_allclose(est.transform(X)[:, 0], est.cluster_centers_[labels, 0])
        assert np.max(est.divergence(X)) <= est.max_divergence_ + 1e-12
        assert est.score(X) == pytest.approx(-np.max(est.divergence(X)))

    def test_full_vectors_accepted(self):
        est = MinimaxQuantizer(n_levels=2).fit()
        X = np.array([[0.2, 0.8], [0.9, 0.1]])
        np.testing.assert_array_equal(est.predict(X), est.predict(X[:, 0]))

    def test_ternary_fit(self):
        est = MinimaxQuantizer(ExponentialTernaryModel(), n_levels=3, n_init=1).fit()
        assert est.cluster_centers_.shape == (3, 2)
        X = np.array([[0.8, 0.1], [0.1, 0.8], [0.1, 0.1]])
        assert set(est.predict(X)) <= {0, 1, 2}
        assert est.transform(X).shape == (3, 2)
        with pytest.raises(DomainError):
            est.predict([0.3, 0.4])

    def test_not_fitted(self):
        with pytest.raises(NotFittedError):
            MinimaxQuantizer().predict([0.5])

    @pytest.mark.parametrize("X", [[[0.6, 0.6]], [-0.1], [[0.2, 0.3, 0.5]]])
    def test_bad_priors(self, X):
        est = MinimaxQuantizer(n_levels=2).fit()
        with pytest.raises(DomainError):
            est.predict(X)

    @pytest.mark.parametrize("n", [0, 2.5, "4"])
    def test_bad_levels(self, n):
        with pytest.raises(DomainError):
            MinimaxQuantizer(n_levels=n).fit()


class TestMeanBREQuantizer:
    def test_fit(self):
        est = MeanBREQuantizer(n_levels=2).fit()
        assert est.mean_divergence_ > 0
        np.testing.assert_allclose(est.cluster_centers_[:, 0].sum(), 1.0, atol=1e-6)

    def test_binary_only(self):
        with pytest.raises(DomainError):
            MeanBREQuantizer(ExponentialTernaryModel()).fit()

    def test_custom_model(self):
        est = MeanBREQuantizer(BinaryGaussianModel(1.0, 2.0, 1.0, 1.0), n_levels=1).fit()
        assert est.cluster_centers_.shape == (1, 1)
