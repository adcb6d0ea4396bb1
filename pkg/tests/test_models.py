import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from brequant.exceptions import DomainError, KinkError, ThresholdOrderError
from brequant.models import (
    BinaryGaussianModel,
    ExponentialTernaryModel,
    SimplexPoint,
    decision_rule_errors,
    derivative_binary,
    error_probabilities_gaussian,
    exponential_thresholds,
    gaussian_tail,
    gradient,
    model_from_params,
    risk,
    risk_mismatched,
)

from helpers import (
    DJ_03,
    GRAD_UNIFORM,
    J_03,
    J_UNIFORM,
    P_I_03,
    P_II_03,
    Q_HALF,
    all_models,
    away_from_kinks,
    random_points,
)

UNIFORM = np.array([1 / 3, 1 / 3])


class TestSimplexPoint:
    def test_valid_point(self):
        p = SimplexPoint([0.2, 0.3, 0.5])
        assert p.M == 3
        np.testing.assert_allclose(p.chart, [0.2, 0.3])

    @pytest.mark.parametrize("coords", [[0.5, 0.6], [-0.1, 1.1], [0.2, 0.2, 0.2]])
    def test_rejects_off_simplex(self, coords):
        with pytest.raises(DomainError):
            SimplexPoint(coords)

    def test_from_chart_round_trip(self):
        p = SimplexPoint.from_chart([0.1, 0.7])
        np.testing.assert_allclose(p.coords, [0.1, 0.7, 0.2])

    def test_interior_flag(self):
        assert SimplexPoint([0.5, 0.5]).is_interior()
        assert not SimplexPoint([1.0, 0.0]).is_interior()


class TestModelValidation:
    @pytest.mark.parametrize("kw", [dict(mu=0.0), dict(sigma2=0.0), dict(c10=-1.0), dict(c01=0.0)])
    def test_gaussian_invariants(self, kw):
        with pytest.raises(DomainError):
            BinaryGaussianModel(**kw)

    @pytest.mark.parametrize("rates", [(3, 4, 5), (5, 5, 3), (5, 4, 0)])
    def test_exponential_rates_must_decrease(self, rates):
        with pytest.raises(DomainError):
            ExponentialTernaryModel(*rates)

    def test_params_round_trip(self):
        for m in all_models():
            assert model_from_params(m.params()) == m

    def test_unknown_kind(self):
        with pytest.raises(DomainError):
            model_from_params({"kind": "laplace"})


class TestGaussianTail:
    def test_centre(self):
        assert gaussian_tail(0.0) == 0.5

    def test_far_tail(self):
        assert gaussian_tail(50.0) < 1e-300
        assert gaussian_tail(-50.0) == 1.0

    def test_half(self):
        assert gaussian_tail(0.5) == pytest.approx(Q_HALF, abs=1e-15)

    @given(st.floats(-30, 30))
    def test_reflection(self, x):
        assert gaussian_tail(x) + gaussian_tail(-x) == pytest.approx(1.0, abs=1e-15)

    def test_monotone(self):
        x = np.linspace(-8, 8, 2001)
        assert np.all(np.diff(gaussian_tail(x)) <= 0)


class TestGaussianModel:
    def test_symmetric_error_probabilities(self, gauss):
        e = error_probabilities_gaussian(gauss, 0.5)
        assert e.pI == pytest.approx(Q_HALF, abs=1e-14)
        assert e.pII == pytest.approx(e.pI, abs=1e-15)

    def test_error_probabilities_at_03(self, gauss):
        e = error_probabilities_gaussian(gauss, 0.3)
        assert e.pI == pytest.approx(P_I_03, abs=1e-13)
        assert e.pII == pytest.approx(P_II_03, abs=1e-13)

    @pytest.mark.parametrize("a", [0.0, 1.0, -0.2, 1.5])
    def test_error_probabilities_domain(self, gauss, a):
        with pytest.raises(DomainError):
            error_probabilities_gaussian(gauss, a)

    def test_risk_values(self, gauss):
        assert risk(gauss, 0.5) == pytest.approx(Q_HALF, abs=1e-14)
        assert risk(gauss, 0.3) == pytest.approx(J_03, abs=1e-13)
        assert risk(gauss, 0.0) == 0.0
        assert risk(gauss, 1.0) == 0.0

    def test_mismatched_at_peak(self, gauss):
        # the tangent at the symmetric peak is flat
        assert risk_mismatched(gauss, 0.3, 0.5) == pytest.approx(Q_HALF, abs=1e-14)

    def test_derivative(self, gauss):
        assert derivative_binary(gauss, 0.5) == pytest.approx(0.0, abs=1e-15)
        assert derivative_binary(gauss, 0.3) == pytest.approx(DJ_03, abs=1e-13)
        with pytest.raises(DomainError):
            derivative_binary(gauss, 1.0)

    def test_derivative_decreasing(self, gauss):
        a = np.linspace(0.01, 0.99, 500)
        assert np.all(np.diff(gauss.gradient(a)) < 0)

    def test_asymmetric_costs_shift_peak(self):
        m = BinaryGaussianModel(1.0, 1.0, 10.0, 1.0)
        assert m.gradient(0.5) < 0


class TestExponentialModel:
    def test_thresholds_uniform(self, expo):
        g01, g12 = exponential_thresholds(expo, UNIFORM)
        assert g01 == pytest.approx(math.log(5 / 4), abs=1e-15)
        assert g12 == pytest.approx(math.log(4 / 3), abs=1e-15)

    def test_threshold_clamps(self, expo):
        # a0*l0 == a1*l1 gives a zero crossover; below it the clamp holds it at zero
        a = np.array([0.4 * 4 / 9, 0.4 * 5 / 9])
        assert exponential_thresholds(expo, a)[0] == pytest.approx(0.0, abs=1e-15)
        assert exponential_thresholds(expo, [0.1, 0.5])[0] == 0.0

    def test_risk_uniform(self, expo):
        assert risk(expo, UNIFORM) == pytest.approx(J_UNIFORM, abs=1e-14)
        assert risk_mismatched(expo, UNIFORM, UNIFORM) == pytest.approx(J_UNIFORM, abs=1e-14)

    def test_gradient_uniform(self, expo):
        np.testing.assert_allclose(gradient(expo, UNIFORM), GRAD_UNIFORM, atol=1e-14)

    def test_zero_at_vertices(self, expo):
        np.testing.assert_array_equal(risk(expo, [[1, 0], [0, 1], [0, 0]]), 0.0)

    def test_closed_form_requires_ordered_thresholds(self, expo):
        a = np.array([0.6, 0.05])  # large a0: gamma01 overtakes gamma12
        g01, g12 = expo.thresholds(a)
        assert g01 > g12
        with pytest.raises(ThresholdOrderError):
            expo.closed_form_coefficients(a)

    def test_coefficients_match_direct_rule(self, expo, rng):
        pts = random_points(expo, rng, 300, margin=1e-4)
        coef = expo.coefficients(pts)
        direct = np.array([decision_rule_errors(expo, p) for p in pts])
        np.testing.assert_allclose(coef, direct, atol=1e-13)

    def test_strict_gradient_near_kink(self, expo):
        a = np.array([0.4 * 4 / 9, 0.4 * 5 / 9])
        with pytest.raises(KinkError):
            expo.gradient(a, strict=True)
        assert np.all(np.isfinite(expo.gradient(a)))

    def test_domain(self, expo):
        with pytest.raises(DomainError):
            risk(expo, [0.8, 0.5])
        with pytest.raises(DomainError):
            risk(expo, [0.3])


@pytest.mark.parametrize("model", all_models(), ids=lambda m: repr(m.params()))
class TestModelContract:
    def test_tangency(self, model, rng):
        p = random_points(model, rng, 200)
        a = random_points(model, rng, 200)
        gap = model.risk_mismatched(p, a) - model.risk(p)
        assert np.all(gap >= -1e-12)
        np.testing.assert_allclose(model.risk_mismatched(p, p), model.risk(p), atol=1e-12)

    def test_affine_in_prior(self, model, rng):
        p1, p2, a = (random_points(model, rng, 100) for _ in range(3))
        t = rng.uniform(0, 1, 100)
        tt = t if model.M == 2 else t[:, None]
        lhs = model.risk_mismatched(tt * p1 + (1 - tt) * p2, a)
        rhs = t * model.risk_mismatched(p1, a) + (1 - t) * model.risk_mismatched(p2, a)
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)

    def test_concave_along_chords(self, model, rng):
        p, q = random_points(model, rng, 200), random_points(model, rng, 200)
        s = np.linspace(0, 1, 21)
        for u, v in zip(p, q):
            pts = np.outer(1 - s, np.atleast_1d(u)) + np.outer(s, np.atleast_1d(v))
            pts = pts[:, 0] if model.M == 2 else pts
            assert np.all(np.diff(model.risk(pts), 2) <= 1e-10)

    def test_point_slope_identity(self, model, rng):
        p, a = random_points(model, rng, 200), random_points(model, rng, 200)
        g = model.gradient(a)
        slope = g * (p - a) if model.M == 2 else np.sum(g * (p - a), axis=1)
        np.testing.assert_allclose(model.risk_mismatched(p, a), model.risk(a) + slope, atol=1e-10)

    def test_gradient_matches_finite_differences(self, model, rng):
        a = away_from_kinks(model, random_points(model, rng, 400, margin=1e-2))[:100]
        h = 1e-5
        if model.M == 2:
            fd = (model.risk(a + h) - model.risk(a - h)) / (2 * h)
        else:
            fd = np.stack([(model.risk(a + h * e) - model.risk(a - h * e)) / (2 * h) for e in np.eye(2)], axis=1)
        np.testing.assert_allclose(model.gradient(a), fd, atol=1e-5)

    def test_positive_inside(self, model, rng):
        assert np.all(model.risk(random_points(model, rng, 200)) > 0)
