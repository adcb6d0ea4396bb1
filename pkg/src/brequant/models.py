"""Detection models exposing Bayes risk, mismatched risk and risk gradients.

Points on the M-ary probability simplex are handled in two forms:

* barycentric: all M coordinates, summing to one;
* chart: the first M-1 coordinates.  For binary models the chart coordinate
  is the scalar prior ``p0`` (arrays of any shape are evaluated elementwise);
  for ternary models it is a trailing axis of length 2 holding ``(p0, p1)``.

All model methods accept chart coordinates (or :class:`SimplexPoint`) and are
vectorised over leading axes.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.special import erfc

from .exceptions import DomainError, KinkError, ThresholdOrderError

INTERIOR_MARGIN = 1e-9
KINK_MARGIN = 1e-7
SIMPLEX_TOL = 1e-12


@dataclass(frozen=True)
class SimplexPoint:
    """A probability vector stored in full barycentric form."""

    coords: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.array(self.coords, dtype=float).reshape(-1)
        if c.size < 2:
            raise DomainError("a simplex point needs at least two coordinates")
        if np.any(c < -SIMPLEX_TOL) or abs(c.sum() - 1.0) > SIMPLEX_TOL:
            raise DomainError(f"not a probability vector: {c!r}")
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    @classmethod
    def from_chart(cls, x) -> "SimplexPoint":
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return cls(np.append(x, 1.0 - x.sum()))

    @property
    def M(self) -> int:
        return self.coords.size

    @property
    def chart(self):
        """Chart coordinates: a float for M=2, an array of length M-1 otherwise."""
        if self.M == 2:
            return float(self.coords[0])
        return self.coords[:-1].copy()

    def is_interior(self, margin: float = INTERIOR_MARGIN) -> bool:
        return bool(np.all(self.coords >= margin))

    def __repr__(self):
        return f"SimplexPoint({np.array2string(self.coords, precision=6)})"


@dataclass(frozen=True)
class ErrorProbabilities:
    """Type-I and type-II error probabilities of a binary threshold test."""

    pI: Union[float, np.ndarray]
    pII: Union[float, np.ndarray]


def gaussian_tail(alpha):
    """Upper tail ``Q(alpha)`` of the standard normal distribution.

    Uses the complementary error function so deep tails keep their relative
    accuracy.  Saturates to exactly 0 / 1 for ``|alpha| > 40``.
    """
    alpha = np.asarray(alpha, dtype=float)
    q = 0.5 * erfc(alpha / math.sqrt(2.0))
    q = np.where(alpha > 40.0, 0.0, np.where(alpha < -40.0, 1.0, q))
    return q[()] if q.ndim == 0 else q


class DetectionModel(ABC):
    """Common interface of the concrete detection models.

    Subclasses only provide :meth:`error_coefficients`: the cost-weighted
    conditional error of the decision rule tuned to weight ``a``, one entry
    per hypothesis.  The mismatched risk is the inner product of the true
    prior with these coefficients, which makes it affine in the prior.
    """

    M: int = 0

    @abstractmethod
    def error_coefficients(self, a_bary: np.ndarray) -> np.ndarray:
        """Per-hypothesis error coefficients for interior barycentric ``a``."""

    @abstractmethod
    def params(self) -> dict:
        """JSON-ready parameter dictionary (includes a ``kind`` key)."""

    # -- coordinate handling -------------------------------------------------

    def as_chart(self, x) -> np.ndarray:
        if isinstance(x, SimplexPoint):
            if x.M != self.M:
                raise DomainError(f"expected a {self.M}-ary point, got M={x.M}")
            x = x.chart
        x = np.asarray(x, dtype=float)
        if self.M > 2 and (x.ndim == 0 or x.shape[-1] != self.M - 1):
            raise DomainError(f"chart coordinates must have trailing length {self.M - 1}")
        return x

    def to_barycentric(self, x) -> np.ndarray:
        x = self.as_chart(x)
        if self.M == 2:
            bary = np.stack([x, 1.0 - x], axis=-1)
        else:
            bary = np.concatenate([x, 1.0 - x.sum(axis=-1, keepdims=True)], axis=-1)
        if np.any(bary < -SIMPLEX_TOL):
            raise DomainError("point lies outside the probability simplex")
        return bary

    def to_chart(self, bary: np.ndarray) -> np.ndarray:
        bary = np.asarray(bary, dtype=float)
        if self.M == 2:
            return bary[..., 0]
        return bary[..., :-1]

    def interior(self, x) -> np.ndarray:
        """Barycentric coordinates pushed at least ``INTERIOR_MARGIN`` inside."""
        bary = np.maximum(self.to_barycentric(x), INTERIOR_MARGIN)
        return bary / bary.sum(axis=-1, keepdims=True)

    # -- risk functions ------------------------------------------------------

    def coefficients(self, a) -> np.ndarray:
        return self.error_coefficients(self.interior(a))

    def risk_mismatched(self, p, a):
        """Bayes risk when the prior is ``p`` but the test is tuned to ``a``."""
        r = np.sum(self.to_barycentric(p) * self.coefficients(a), axis=-1)
        return r[()] if r.ndim == 0 else r

    def risk(self, p):
        """Bayes risk J(p); exactly zero at the simplex vertices."""
        bary = self.to_barycentric(p)
        r = np.sum(bary * self.error_coefficients(self.interior(p)), axis=-1)
        r = np.where(np.max(bary, axis=-1) >= 1.0 - SIMPLEX_TOL, 0.0, r)
        return r[()] if r.ndim == 0 else r

    def gradient(self, a):
        """Gradient of J in the chart; a scalar derivative when M=2."""
        c = self.coefficients(a)
        g = c[..., :-1] - c[..., -1:]
        if self.M == 2:
            g = g[..., 0]
        return g[()] if g.ndim == 0 else g

    def divergence(self, p, a):
        """Bayes risk error divergence ``J(p, a) - J(p)``."""
        return self.risk_mismatched(p, a) - self.risk(p)


@dataclass(frozen=True)
class BinaryGaussianModel(DetectionModel):
    """Known signal ``mu`` in zero-mean Gaussian noise of variance ``sigma2``."""

    mu: float = 1.0
    sigma2: float = 1.0
    c10: float = 1.0
    c01: float = 1.0
    M = 2

    def __post_init__(self):
        if not all(map(math.isfinite, (self.mu, self.sigma2, self.c10, self.c01))):
            raise DomainError("model parameters must be finite")
        if self.mu == 0:
            raise DomainError("mu must be nonzero")
        if self.sigma2 <= 0 or self.c10 <= 0 or self.c01 <= 0:
            raise DomainError("sigma2 and the costs must be positive")

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)

    def params(self) -> dict:
        return {"kind": "gaussian", "mu": self.mu, "sigma2": self.sigma2,
                "c10": self.c10, "c01": self.c01}

    def _tail_args(self, a0, a1):
        # the sign of mu only mirrors the observation axis
        d = abs(self.mu) / self.sigma
        t = np.log(self.c10 * a0 / (self.c01 * a1))
        return d / 2 + t / d, d / 2 - t / d

    def error_coefficients(self, a_bary):
        arg_I, arg_II = self._tail_args(a_bary[..., 0], a_bary[..., 1])
        return np.stack([self.c10 * gaussian_tail(arg_I),
                         self.c01 * gaussian_tail(arg_II)], axis=-1)


@dataclass(frozen=True)
class ExponentialTernaryModel(DetectionModel):
    """Three exponential service-time hypotheses with 0/1 costs."""

    lambda0: float = 5.0
    lambda1: float = 4.0
    lambda2: float = 3.0
    M = 3

    def __post_init__(self):
        if not (self.lambda0 > self.lambda1 > self.lambda2 > 0):
            raise DomainError("rates must satisfy lambda0 > lambda1 > lambda2 > 0")

    @property
    def rates(self) -> np.ndarray:
        return np.array([self.lambda0, self.lambda1, self.lambda2])

    def params(self) -> dict:
        return {"kind": "exponential",
                "lambda": [self.lambda0, self.lambda1, self.lambda2]}

    def _raw_thresholds(self, a_bary):
        l0, l1, l2 = self.lambda0, self.lambda1, self.lambda2
        w = a_bary * self.rates
        g01 = np.log(w[..., 0] / w[..., 1]) / (l0 - l1)
        g12 = np.log(w[..., 1] / w[..., 2]) / (l1 - l2)
        g02 = np.log(w[..., 0] / w[..., 2]) / (l0 - l2)
        return g01, g12, g02

    def thresholds(self, a):
        """Clamped crossover times ``(gamma01, gamma12)`` of the decision rule."""
        g01, g12, _ = self._raw_thresholds(self.interior(a))
        return np.maximum(g01, 0.0), np.maximum(g12, 0.0)

    def error_coefficients(self, a_bary):
        l0, l1, l2 = self.lambda0, self.lambda1, self.lambda2
        g01, g12, g02 = (np.maximum(g, 0.0) for g in self._raw_thresholds(a_bary))
        ordered = g01 <= g12
        # empty middle region: the rule only ever picks h0 or h2
        A = np.where(ordered, np.exp(-l0 * g01), np.exp(-l0 * g02))
        B = np.where(ordered, 1.0 - np.exp(-l1 * g01) + np.exp(-l1 * g12), 1.0)
        C = np.where(ordered, 1.0 - np.exp(-l2 * g12), 1.0 - np.exp(-l2 * g02))
        return np.stack([A, B, C], axis=-1)

    def closed_form_coefficients(self, a):
        """Coefficients from the three-threshold formula only.

        Raises :class:`ThresholdOrderError` when ``gamma01 > gamma12``, where
        the formula no longer describes the decision rule.
        """
        g01, g12 = self.thresholds(a)
        if np.any(g01 > g12):
            raise ThresholdOrderError("gamma01 > gamma12: middle decision region is empty")
        l0, l1, l2 = self.lambda0, self.lambda1, self.lambda2
        return np.stack([np.exp(-l0 * g01),
                         1.0 - np.exp(-l1 * g01) + np.exp(-l1 * g12),
                         1.0 - np.exp(-l2 * g12)], axis=-1)

    def kink_distance(self, a):
        """Distance (in threshold units) to the nearest locus where the rule changes form."""
        g01, g12, g02 = self._raw_thresholds(self.interior(a))
        d = np.min(np.abs(np.stack([g01, g12, g02, g01 - g12])), axis=0)
        return d[()] if d.ndim == 0 else d

    def gradient(self, a, strict: bool = False):
        if strict and np.any(self.kink_distance(a) < KINK_MARGIN):
            raise KinkError("decision weight lies on a threshold-clamp locus")
        return super().gradient(a)


def decision_rule_errors(model: ExponentialTernaryModel, a) -> np.ndarray:
    """Conditional error probabilities of the rule ``argmax a_m f_m(y)``.

    Evaluated directly from the decision intervals on ``y >= 0`` rather than
    from the threshold formula; used to cross-check :meth:`error_coefficients`.
    Accepts a single point only.
    """
    bary = model.interior(a)
    rates = model.rates
    logw = np.log(bary * rates)
    cuts = [0.0]
    for i in range(3):
        for j in range(i + 1, 3):
            y = (logw[i] - logw[j]) / (rates[i] - rates[j])
            if y > 0:
                cuts.append(y)
    cuts = sorted(set(cuts))
    edges = cuts + [math.inf]
    err = np.zeros(3)
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid = lo + 1.0 if math.isinf(hi) else 0.5 * (lo + hi)
        winner = int(np.argmax(logw - rates * mid))
        mass = np.exp(-rates * lo) - (0.0 if math.isinf(hi) else np.exp(-rates * hi))
        for m in range(3):
            if m != winner:
                err[m] += mass[m]
    return err


# -- functional interface ----------------------------------------------------

def error_probabilities_gaussian(model: BinaryGaussianModel, a) -> ErrorProbabilities:
    a = np.asarray(a, dtype=float)
    if np.any((a <= 0) | (a >= 1)):
        raise DomainError("decision weight must lie in (0, 1)")
    arg_I, arg_II = model._tail_args(a, 1.0 - a)
    return ErrorProbabilities(gaussian_tail(arg_I), gaussian_tail(arg_II))


def exponential_thresholds(model: ExponentialTernaryModel, a):
    return model.thresholds(a)


def risk_mismatched(model: DetectionModel, p, a):
    return model.risk_mismatched(p, a)


def risk(model: DetectionModel, p):
    return model.risk(p)


def gradient(model: DetectionModel, a):
    return model.gradient(a)


def derivative_binary(model: DetectionModel, a):
    """Slope ``c10 pI(a) - c01 pII(a)`` of the tangent to J at ``a``."""
    if model.M != 2:
        raise DomainError("derivative_binary needs a binary model")
    a = np.asarray(a, dtype=float)
    if np.any((a <= 0) | (a >= 1)):
        raise DomainError("decision weight must lie in (0, 1)")
    return model.gradient(a)


def model_from_params(params: dict) -> DetectionModel:
    kind = params.get("kind")
    if kind == "gaussian":
        return BinaryGaussianModel(float(params["mu"]), float(params["sigma2"]),
                                   float(params["c10"]), float(params["c01"]))
    if kind == "exponential":
        lam = [float(v) for v in params["lambda"]]
        if len(lam) != 3:
            raise DomainError("exponential model needs three rates")
        return ExponentialTernaryModel(*lam)
    raise DomainError(f"unknown model kind {kind!r}")
