import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from brequant.analysis import grid_oracle_scalar, weight_spread
from brequant.exceptions import DegenerateError, DomainError
from brequant.models import BinaryGaussianModel
from brequant.quantizer_scalar import (
    ScalarQuantizer,
    boundary,
    centroid,
    design_mean_bre,
    design_minimax,
    endpoint_divergences,
    max_divergence,
    quantize,
)

from helpers import BINARY_PARAMS, CENTROID_0_05, D_K2, Q_HALF, binary_models


class TestCentroid:
    def test_full_interval_symmetric(self, gauss):
        assert centroid(gauss, 0.0, 1.0) == pytest.approx(0.5, abs=1e-12)

    def test_half_interval(self, gauss):
        assert centroid(gauss, 0.0, 0.5) == pytest.approx(CENTROID_0_05, abs=1e-10)

    @given(st.floats(0.0, 0.95), st.floats(0.01, 0.5))
    def test_equalises_endpoints(self, lo, width):
        m = BinaryGaussianModel(1.0, 2.0, 1.0, 1.0)
        hi = min(lo + width, 1.0)
        a = centroid(m, lo, hi)
        assert lo < a < hi
        d_lo, d_hi = m.divergence(lo, a), m.divergence(hi, a)
        assert d_lo == pytest.approx(d_hi, rel=1e-6, abs=1e-12)

    @pytest.mark.parametrize("lo,hi", [(0.5, 0.5), (0.6, 0.4), (-0.1, 0.5), (0.2, 1.2)])
    def test_bad_interval(self, gauss, lo, hi):
        with pytest.raises(DomainError):
            centroid(gauss, lo, hi)


class TestBoundary:
    def test_symmetry(self, gauss):
        assert boundary(gauss, 0.3, 0.7) == pytest.approx(0.5, abs=1e-12)

    @given(st.floats(0.01, 0.98), st.floats(0.005, 0.5))
    def test_equal_divergence(self, a, gap):
        m = BinaryGaussianModel(1.0, 1.0, 10.0, 1.0)
        a2 = min(a + gap, 0.995)
        b = boundary(m, a, a2)
        assert a < b < a2
        assert m.divergence(b, a) == pytest.approx(m.divergence(b, a2), rel=1e-7, abs=1e-12)

    def test_coincident(self, gauss):
        with pytest.raises(DegenerateError):
            boundary(gauss, 0.4, 0.4)


class TestDesign:
    def test_single_level(self, gauss):
        q, rep = design_minimax(gauss, 1)
        assert q.weights[0] == pytest.approx(0.5, abs=1e-12)
        assert rep.max_divergence == pytest.approx(Q_HALF, abs=1e-12)

    def test_two_levels(self, gauss):
        q, rep = design_minimax(gauss, 2)
        assert rep.converged
        assert q.boundaries[0] == pytest.approx(0.5, abs=1e-10)
        assert q.weights[0] == pytest.approx(1 - q.weights[1], abs=1e-10)
        assert rep.max_divergence == pytest.approx(D_K2, abs=1e-10)

    @pytest.mark.parametrize("model", binary_models(), ids=lambda m: repr(m.params()))
    @pytest.mark.parametrize("K", [2, 3, 5, 8])
    def test_equalised_and_interleaved(self, model, K):
        q, rep = design_minimax(model, K)
        assert rep.converged
        assert q.is_interleaved()
        ends = endpoint_divergences(model, q)
        assert np.ptp(ends) < 1e-6 * ends.max()
        assert rep.max_divergence == pytest.approx(max_divergence(model, q)[0])

    @pytest.mark.parametrize("model", binary_models(), ids=lambda m: repr(m.params()))
    def test_more_levels_help(self, model):
        D = [design_minimax(model, K)[1].max_divergence for K in range(1, 7)]
        assert np.all(np.diff(D) < 0)

    @pytest.mark.parametrize("K", [0, -1, 2.5])
    def test_bad_K(self, gauss, K):
        with pytest.raises(DomainError):
            design_minimax(gauss, K)

    @pytest.mark.parametrize("K", [2, 3])
    def test_matches_grid_oracle(self, gauss, K):
        q, rep = design_minimax(gauss, K)
        oq, oD = grid_oracle_scalar(gauss, K)
        # the grid can only be as good as the continuous optimum, and not much worse
        assert rep.max_divergence <= oD + 1e-9
        assert oD - rep.max_divergence < 1e-3
        np.testing.assert_allclose(q.weights, oq.weights, atol=1e-3)

    def test_multistart_never_worse(self):
        m = BinaryGaussianModel(1.0, 1.0, 10.0, 1.0)
        _, one = design_minimax(m, 6)
        _, many = design_minimax(m, 6, n_init=4, random_state=3)
        assert many.max_divergence <= one.max_divergence + 1e-12

    def test_without_acceleration(self, gauss):
        _, fast = design_minimax(gauss, 4)
        _, slow = design_minimax(gauss, 4, accelerate=False, tol=1e-9)
        assert slow.converged
        assert fast.max_divergence == pytest.approx(slow.max_divergence, rel=1e-6)


class TestQuantize:
    def test_cells_closed_on_the_right(self):
        q = ScalarQuantizer([0.2, 0.6], [0.4])
        assert quantize(q, 0.0) == (1, 0.2)
        assert quantize(q, 0.4) == (1, 0.2)
        assert quantize(q, 0.400001) == (2, 0.6)
        assert quantize(q, 1.0) == (2, 0.6)

    def test_vectorised_and_monotone(self, gauss):
        q, _ = design_minimax(gauss, 6)
        idx, w = quantize(q, np.linspace(0, 1, 1001))
        assert np.all(np.diff(idx) >= 0)
        assert np.all(np.diff(w) >= 0)
        assert idx.min() == 1 and idx.max() == 6

    @pytest.mark.parametrize("p", [-0.01, 1.01, np.nan])
    def test_domain(self, p):
        with pytest.raises(DomainError):
            quantize(ScalarQuantizer([0.5], []), p)

    def test_shape_mismatch(self):
        with pytest.raises(DomainError):
            ScalarQuantizer([0.2, 0.6], [])


class TestMeanBaseline:
    def test_symmetric(self, gauss):
        q, mean = design_mean_bre(gauss, 2)
        assert q.boundaries[0] == pytest.approx(0.5, abs=1e-6)
        assert q.weights[0] == pytest.approx(1 - q.weights[1], abs=1e-6)
        assert mean > 0

    def test_minimax_more_central(self, gauss):
        qm, _ = design_minimax(gauss, 4)
        qa, _ = design_mean_bre(gauss, 4)
        assert weight_spread(qm.weights, 0.5) < weight_spread(qa.weights, 0.5)

    def test_tradeoff(self, gauss):
        # each design wins on its own criterion
        from brequant.quantizer_scalar import mean_divergence

        qm, rm = design_minimax(gauss, 3)
        qa, mean = design_mean_bre(gauss, 3)
        assert mean <= mean_divergence(gauss, qm) + 1e-9
        assert rm.max_divergence <= max_divergence(gauss, qa)[0] + 1e-9


@pytest.mark.parametrize("params", BINARY_PARAMS)
def test_design_runs_for_each_parameter_set(params):
    m = BinaryGaussianModel(*params)
    q, rep = design_minimax(m, 4)
    assert rep.converged and q.K == 4
