"""Minimax Bayes risk error quantizers of the binary prior ``p0`` on [0, 1].

The design alternates two closed-form optimality conditions (Lloyd-Max):

* centroid: inside ``[b_lo, b_hi]`` the minimax weight has tangent slope
  equal to the secant slope of J over the cell, which equalises the
  divergence at both cell endpoints;
* boundary: adjacent weights are separated where their tangent lines to J
  intersect.

A minimum-mean-divergence design sharing the same boundary rule is provided
as a comparison baseline.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize

from .divergence import minimax_weight
from .exceptions import BracketError, DegenerateError, DomainError
from .models import INTERIOR_MARGIN, DetectionModel

log = logging.getLogger(__name__)

_BISECT_ITERS = 200


@dataclass
class ScalarQuantizer:
    """K decision weights interleaved with K-1 cell boundaries on [0, 1]."""

    weights: np.ndarray
    boundaries: np.ndarray

    def __post_init__(self):
        self.weights = np.atleast_1d(np.asarray(self.weights, dtype=float))
        self.boundaries = np.atleast_1d(np.asarray(self.boundaries, dtype=float))
        if self.boundaries.size != self.weights.size - 1:
            raise DomainError("need exactly K-1 boundaries for K weights")

    @property
    def K(self) -> int:
        return self.weights.size

    @property
    def edges(self) -> np.ndarray:
        """Boundaries padded with the simplex endpoints 0 and 1."""
        return np.concatenate([[0.0], self.boundaries, [1.0]])

    def is_interleaved(self) -> bool:
        seq = np.empty(2 * self.K + 1)
        seq[0::2] = self.edges
        seq[1::2] = self.weights
        return bool(np.all(np.diff(seq) > 0))


@dataclass
class DesignReport:
    iterations: int
    converged: bool
    max_divergence: float
    cell_maxima: np.ndarray = field(repr=False)


def _secant_slope(model, lo, hi):
    return (model.risk(hi) - model.risk(lo)) / (hi - lo)


def _centroids(model: DetectionModel, lo, hi, check: bool = True) -> np.ndarray:
    """Vectorised bisection on the decreasing derivative for each cell."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if np.any(hi <= lo):
        raise DomainError("cells must have b_lo < b_hi")
    target = _secant_slope(model, lo, hi)
    left = np.clip(lo + INTERIOR_MARGIN, INTERIOR_MARGIN, 1 - INTERIOR_MARGIN)
    right = np.clip(hi - INTERIOR_MARGIN, INTERIOR_MARGIN, 1 - INTERIOR_MARGIN)
    if check:
        slack = 1e-9 * (1.0 + np.abs(target))
        if np.any(target > model.gradient(left) + slack) or np.any(target < model.gradient(right) - slack):
            raise BracketError("secant slope outside the derivative range; J is not concave here")
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (left + right)
        go_right = model.gradient(mid) > target
        left = np.where(go_right, mid, left)
        right = np.where(go_right, right, mid)
        if np.all(right - left <= 4.5e-16 * np.maximum(np.abs(left), 1e-3)):
            break
    return 0.5 * (left + right)


def centroid(model: DetectionModel, b_lo: float, b_hi: float) -> float:
    """Minimax decision weight of the cell ``[b_lo, b_hi]``."""
    if not 0.0 <= b_lo < b_hi <= 1.0:
        raise DomainError("need 0 <= b_lo < b_hi <= 1")
    return float(_centroids(model, b_lo, b_hi))


def _boundaries(model: DetectionModel, a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    a1, a2 = a[:-1], a[1:]
    g1, g2 = model.gradient(a1), model.gradient(a2)
    denom = g2 - g1
    if np.any(denom == 0):
        raise DegenerateError("adjacent weights have identical tangent slopes")
    return (a2 * g2 - a1 * g1 - (model.risk(a2) - model.risk(a1))) / denom


def boundary(model: DetectionModel, a_k: float, a_k1: float) -> float:
    """Abscissa where the tangent lines of J at ``a_k`` and ``a_k1`` meet."""
    if a_k == a_k1:
        raise DegenerateError("weights coincide")
    return float(_boundaries(model, [a_k, a_k1])[0])


def cell_maxima(model: DetectionModel, q: ScalarQuantizer) -> np.ndarray:
    """Per-cell worst divergence; the maximum sits at a cell endpoint."""
    e = q.edges
    return np.maximum(model.divergence(e[:-1], q.weights), model.divergence(e[1:], q.weights))


def max_divergence(model: DetectionModel, q: ScalarQuantizer) -> tuple[float, np.ndarray]:
    cm = cell_maxima(model, q)
    return float(cm.max()), cm


def endpoint_divergences(model: DetectionModel, q: ScalarQuantizer) -> np.ndarray:
    """The 2K values ``d(b_{k-1}||a_k), d(b_k||a_k)`` in order along [0, 1]."""
    e = q.edges
    out = np.empty(2 * q.K)
    out[0::2] = model.divergence(e[:-1], q.weights)
    out[1::2] = model.divergence(e[1:], q.weights)
    return out


def quantize(q: ScalarQuantizer, p0):
    """Cell index (1-based) and decision weight for prior(s) ``p0``.

    Cells are ``[0, b_1], (b_1, b_2], ..., (b_{K-1}, 1]``.
    """
    p = np.asarray(p0, dtype=float)
    if np.any((p < 0) | (p > 1)) or np.any(np.isnan(p)):
        raise DomainError("prior must lie in [0, 1]")
    idx = np.searchsorted(q.boundaries, p, side="left")
    w = q.weights[idx]
    if idx.ndim == 0:
        return int(idx) + 1, float(w)
    return idx + 1, w


def _initial_boundaries(K: int, rng: np.random.Generator | None) -> np.ndarray:
    b = np.arange(1, K) / K
    if rng is not None and K > 1:
        b = np.sort(b + rng.uniform(-0.3, 0.3, K - 1) / K)
    return b


def _lloyd(step, b0: np.ndarray, tol: float, max_iter: int, accelerate: bool, memory: int = 6):
    """Fixed-point iteration ``b <- step(b)`` with optional Anderson mixing.

    ``step`` returns ``(new_boundaries, weights)``.  Convergence is always
    judged on the plain map, so accelerated runs stop at the same fixed point.
    """
    b = b0.copy()
    xs, fs = [], []
    prev_a = None
    for it in range(1, max_iter + 1):
        tb, a = step(b)
        f = tb - b
        change = float(np.max(np.abs(f))) if f.size else 0.0
        if prev_a is not None:
            change = max(change, float(np.max(np.abs(a - prev_a))))
        prev_a = a
        if change < tol:
            return tb, a, it, True
        nxt = tb
        if accelerate and f.size:
            xs.append(b.copy())
            fs.append(f.copy())
            xs, fs = xs[-memory - 1:], fs[-memory - 1:]
            if len(fs) > 1:
                dF = np.diff(np.array(fs), axis=0).T
                dX = np.diff(np.array(xs), axis=0).T
                gamma = np.linalg.lstsq(dF, f, rcond=None)[0]
                cand = b + f - (dX + dF) @ gamma
                if np.all(np.diff(np.concatenate([[0.0], cand, [1.0]])) > 0):
                    nxt = cand
                else:
                    xs, fs = [], []
        b = nxt
    return tb, a, max_iter, False


def design_minimax(model: DetectionModel, K: int, tol: float = 1e-10, max_iter: int = 10_000,
                   accelerate: bool = True, n_init: int = 1, random_state=None):
    """Lloyd-Max design of the K-level minimax BRE quantizer.

    Starts from uniform boundaries ``k/K``; further ``n_init - 1`` starts use
    jittered boundaries and the run with the smallest worst divergence wins.

    Returns
    -------
    (ScalarQuantizer, DesignReport)
    """
    if model.M != 2:
        raise DomainError("scalar design needs a binary model")
    if int(K) != K or K < 1:
        raise DomainError("K must be a positive integer")
    K = int(K)
    if K == 1:
        a, worst = minimax_weight(model)
        q = ScalarQuantizer([a], [])
        return q, DesignReport(0, True, worst, np.array([worst]))

    def step(b):
        e = np.concatenate([[0.0], b, [1.0]])
        a = _centroids(model, e[:-1], e[1:])
        return _boundaries(model, a), a

    rng = np.random.default_rng(random_state)
    best = None
    for start in range(max(n_init, 1)):
        b0 = _initial_boundaries(K, rng if start else None)
        b, _, it, ok = _lloyd(step, b0, tol, max_iter, accelerate)
        e = np.concatenate([[0.0], b, [1.0]])
        q = ScalarQuantizer(_centroids(model, e[:-1], e[1:]), b)
        D, cm = max_divergence(model, q)
        if not ok:
            log.warning("minimax design K=%d did not converge in %d iterations", K, max_iter)
        if best is None or D < best[1].max_divergence:
            best = (q, DesignReport(it, ok, D, cm))
    return best


# -- minimum mean divergence baseline ----------------------------------------

def mean_divergence_centroid(model: DetectionModel, b_lo: float, b_hi: float) -> float:
    """Weight minimising the cell-average divergence under a uniform prior density."""

    def cost(a):
        val, _ = integrate.quad(lambda p: float(model.divergence(p, a)), b_lo, b_hi,
                                epsabs=1e-14, epsrel=1e-12, limit=200)
        return val

    res = optimize.minimize_scalar(cost, bounds=(b_lo + INTERIOR_MARGIN, b_hi - INTERIOR_MARGIN),
                                   method="bounded", options={"xatol": 1e-11})
    return float(np.clip(res.x, b_lo + INTERIOR_MARGIN, b_hi - INTERIOR_MARGIN))


def mean_divergence(model: DetectionModel, q: ScalarQuantizer) -> float:
    """Average of ``d(p || q(p))`` for ``p`` uniform on [0, 1]."""
    e = q.edges
    total = 0.0
    for lo, hi, a in zip(e[:-1], e[1:], q.weights):
        val, _ = integrate.quad(lambda p: float(model.divergence(p, a)), lo, hi,
                                epsabs=1e-14, epsrel=1e-12, limit=200)
        total += val
    return total


def design_mean_bre(model: DetectionModel, K: int, tol: float = 1e-8, max_iter: int = 2_000,
                    accelerate: bool = True):
    """Lloyd-Max design minimising the mean divergence (comparison baseline).

    Returns
    -------
    (ScalarQuantizer, float)
        The quantizer and its mean divergence.
    """
    if model.M != 2:
        raise DomainError("scalar design needs a binary model")
    if int(K) != K or K < 1:
        raise DomainError("K must be a positive integer")
    K = int(K)

    def cents(b):
        e = np.concatenate([[0.0], b, [1.0]])
        return np.array([mean_divergence_centroid(model, lo, hi) for lo, hi in zip(e[:-1], e[1:])])

    if K == 1:
        q = ScalarQuantizer(cents(np.array([])), [])
        return q, mean_divergence(model, q)

    def step(b):
        a = cents(b)
        return _boundaries(model, a), a

    b, _, it, ok = _lloyd(step, _initial_boundaries(K, None), tol, max_iter, accelerate)
    if not ok:
        log.warning("mean-divergence design K=%d did not converge in %d iterations", K, max_iter)
    q = ScalarQuantizer(cents(b), b)
    return q, mean_divergence(model, q)
