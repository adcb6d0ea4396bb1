"""Shared constants and sampling helpers for the test suite."""

import numpy as np

from brequant.models import BinaryGaussianModel, ExponentialTernaryModel

# (mu, sigma2, c10, c01) triples exercised throughout
BINARY_PARAMS = [(1.0, 1.0, 1.0, 1.0), (1.0, 2.0, 1.0, 1.0), (1.0, 1.0, 10.0, 1.0)]

# high-precision reference values for the unit Gaussian model (40-digit arithmetic)
Q_HALF = 0.30853753872598689636
P_I_03 = 0.63581622098160076736
P_II_03 = 0.088942160470220537841
J_03 = 0.25300437862363460670
DJ_03 = 0.54687406051138022952
D_03_05 = 0.055533160102352289665
CENTROID_0_05 = 0.27202874121585210042
D_K2 = 0.068857536827411518272
PEAK_C10 = 0.21137499779546082636
WORST_C10 = 0.68649087965975334797

# ternary model (5, 4, 3) at the uniform prior, exact rationals
J_UNIFORM = 0.60420375
GRAD_UNIFORM = (0.32768 - 0.578125, 0.90680625 - 0.578125)


def binary_models():
    return [BinaryGaussianModel(*p) for p in BINARY_PARAMS]


def all_models():
    return binary_models() + [ExponentialTernaryModel(5.0, 4.0, 3.0)]


def random_points(model, rng, n, margin=1e-3):
    """Interior chart points drawn uniformly from the simplex."""
    if model.M == 2:
        return rng.uniform(margin, 1.0 - margin, n)
    bary = rng.dirichlet(np.ones(model.M), n)
    bary = np.maximum(bary, margin)
    bary /= bary.sum(axis=1, keepdims=True)
    return bary[:, :-1]


def away_from_kinks(model, pts, margin=1e-3):
    """Drop ternary points whose thresholds sit near a clamp switch."""
    if model.M == 2:
        return pts
    return pts[model.kink_distance(pts) > margin]


def all_decisions_used(model, pts):
    """Ternary points at which every hypothesis wins on some interval of the observation."""
    bary = np.concatenate([pts, 1.0 - pts.sum(axis=1, keepdims=True)], axis=1)
    g01, g12 = model._raw_thresholds(bary)[:2]
    return pts[(g01 > 0) & (g12 > g01)]
