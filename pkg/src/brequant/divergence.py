"""Bayes risk error divergence and the single-group (minimax) decision weight."""

from __future__ import annotations

import numpy as np

from .exceptions import ConvergenceError
from .models import INTERIOR_MARGIN, DetectionModel


def bre_divergence(model: DetectionModel, p, a):
    """Bayes risk error divergence ``d(p || a) = J(p, a) - J(p)``.

    The Bregman divergence generated by ``-J``: nonnegative, zero at
    ``p = a`` and convex in ``p``.
    """
    return model.divergence(p, a)


def simplex_vertices(M: int) -> np.ndarray:
    """Corners of the simplex in chart coordinates, shape ``(M, M-1)``."""
    return np.vstack([np.eye(M - 1), np.zeros(M - 1)])


def worst_vertex_divergence(model: DetectionModel, a) -> float:
    """Largest divergence from ``a`` to any simplex corner."""
    corners = simplex_vertices(model.M)
    if model.M == 2:
        corners = corners[:, 0]
    return float(np.max(model.divergence(corners, a)))


def _peak_binary(model: DetectionModel) -> float:
    # J' is strictly decreasing, so its root is the concave peak
    lo, hi = INTERIOR_MARGIN, 1.0 - INTERIOR_MARGIN
    if model.gradient(lo) <= 0:
        return lo
    if model.gradient(hi) >= 0:
        return hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if model.gradient(mid) > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4.5e-16:
            break
    return 0.5 * (lo + hi)


def _project_simplex(x: np.ndarray, margin: float) -> np.ndarray:
    """Euclidean projection of chart points onto ``{x >= margin, 1 - sum x >= margin}``."""
    n = x.size
    # shift so the problem becomes projection onto the scaled standard simplex
    scale = 1.0 - (n + 1) * margin
    y = np.append(x - margin, 1.0 - x.sum() - margin)
    u = np.sort(y)[::-1]
    css = np.cumsum(u) - scale
    rho = np.nonzero(u * np.arange(1, n + 2) > css)[0][-1]
    theta = css[rho] / (rho + 1.0)
    z = np.maximum(y - theta, 0.0)
    return z[:-1] + margin


def _peak_ascent(model: DetectionModel, x0: np.ndarray, max_iter: int) -> tuple[np.ndarray, bool]:
    x = _project_simplex(np.asarray(x0, dtype=float), INTERIOR_MARGIN)
    fx = model.risk(x)
    step = 1.0
    for _ in range(max_iter):
        g = model.gradient(x)
        while True:
            y = _project_simplex(x + step * g, INTERIOR_MARGIN)
            fy = model.risk(y)
            # Armijo condition along the projection arc
            if fy >= fx + 1e-4 * g @ (y - x) or step < 1e-16:
                break
            step *= 0.5
        moved = np.max(np.abs(y - x))
        x, fx = y, fy
        step = min(step * 2.0, 1e3)
        if moved < 1e-14:
            return x, True
    return x, False


def minimax_weight(model: DetectionModel, n_starts: int = 4, max_iter: int = 10_000):
    """Decision weight of the K=1 quantizer and its worst-case divergence.

    This is the peak of the concave Bayes risk.  Binary models use bisection
    on the monotone derivative; higher-order models use projected gradient
    ascent from several starting points.

    Returns
    -------
    a_star : float or ndarray
        Chart coordinates of the peak.
    worst : float
        ``max`` over simplex corners of ``d(corner || a_star)``.
    """
    if model.M == 2:
        a = _peak_binary(model)
        return a, worst_vertex_divergence(model, a)

    starts = [np.full(model.M - 1, 1.0 / model.M)]
    starts += list(simplex_vertices(model.M) * 0.8 + 0.2 / model.M)[: max(n_starts - 1, 0)]
    best, best_val, ok_any = None, -np.inf, False
    for s in starts:
        x, ok = _peak_ascent(model, s, max_iter)
        ok_any |= ok
        val = model.risk(x)
        if val > best_val:
            best, best_val = x, val
    if not ok_any:
        raise ConvergenceError("projected ascent did not localise the peak of J")
    return best, worst_vertex_divergence(model, best)
