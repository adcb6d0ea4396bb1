"""Rate-distortion sweeps, log-log slope fits and brute-force oracles."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed
from scipy import stats

from .divergence import minimax_weight
from .exceptions import DomainError, InsufficientDataError
from .models import INTERIOR_MARGIN, DetectionModel
from .quantizer_scalar import ScalarQuantizer, design_minimax
from .quantizer_simplex import CellPolygon, _project_interior, design_minimax_simplex, grown_seeds

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SweepEntry:
    K: int
    D: float
    converged: bool
    iterations: int = 0


@dataclass
class SweepResult:
    """Worst-case divergence ``D`` for each quantizer size ``K``."""

    entries: list = field(default_factory=list)

    @property
    def K(self) -> np.ndarray:
        return np.array([e.K for e in self.entries], dtype=int)

    @property
    def D(self) -> np.ndarray:
        return np.array([e.D for e in self.entries], dtype=float)

    @property
    def converged(self) -> np.ndarray:
        return np.array([e.converged for e in self.entries], dtype=bool)

    def is_monotone(self, atol: float = 1e-9) -> bool:
        """True when D never increases (beyond ``atol``) across converged entries."""
        d = self.D[self.converged]
        return bool(np.all(np.diff(d) <= atol))


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    r2: float
    k_min_used: int


def _design(model, K, tol, max_iter, n_starts, random_state, init_seeds=None):
    if model.M == 2:
        q, rep = design_minimax(model, K, tol=tol or 1e-10, max_iter=max_iter or 10_000,
                                n_init=n_starts, random_state=random_state)
    else:
        q, rep = design_minimax_simplex(model, K, tol=tol or 1e-8, max_iter=max_iter or 500,
                                        n_starts=n_starts, random_state=random_state,
                                        init_seeds=init_seeds)
    return SweepEntry(int(K), float(rep.max_divergence), bool(rep.converged), int(rep.iterations)), q


def sweep(model: DetectionModel, K_list, tol: float | None = None, max_iter: int | None = None,
          n_starts: int | None = None, random_state=0, n_jobs: int = 1, grow: bool = True) -> SweepResult:
    """Design a minimax quantizer for every ``K`` in ``K_list`` and record its D.

    A failed entry is recorded as not converged instead of aborting the sweep.

    Parameters
    ----------
    n_starts : int, optional
        Starts per entry, default 1.  For ternary models the growth start
        (see ``grow``) comes on top of these.
    n_jobs : int
        Entries are fanned out with joblib when ``n_jobs != 1`` and ``grow``
        is off; results keep the order of ``K_list``.
    grow : bool
        Ternary only.  When consecutive sizes are swept, also start each
        design from the previous seeds plus one seed at the worst-covered
        point.  This chains the entries, so they run sequentially.
    """
    K_list = [int(k) for k in K_list]
    if not K_list:
        raise DomainError("K_list must not be empty")
    if any(k < 1 for k in K_list) or np.any(np.diff(K_list) <= 0):
        raise DomainError("K_list must be strictly increasing positive integers")
    if n_starts is None:
        n_starts = 1
    grow = grow and model.M == 3

    def one(K, init=None):
        try:
            return _design(model, K, tol, max_iter, n_starts, random_state, init)
        except Exception as exc:  # a single bad entry must not sink the sweep
            log.warning("sweep entry K=%d failed: %s", K, exc)
            return SweepEntry(K, float("nan"), False, 0), None

    if grow:
        entries, prev = [], None
        for K in K_list:
            init = grown_seeds(prev) if prev is not None and prev.K == K - 1 else None
            entry, prev = one(K, init)
            entries.append(entry)
    elif n_jobs == 1:
        entries = [one(K)[0] for K in K_list]
    else:
        entries = [r[0] for r in Parallel(n_jobs=n_jobs)(delayed(one)(K) for K in K_list)]
    log.info("sweep done: %s", ", ".join(f"K={e.K}: D={e.D:.6g}" for e in entries))
    return SweepResult(list(entries))


def loglog_slope(s: SweepResult, k_min: int = 4) -> SlopeFit:
    """Least-squares line through ``(ln K, ln D)`` for converged entries with ``K >= k_min``."""
    K, D = s.K, s.D
    keep = s.converged & (K >= k_min) & np.isfinite(D) & (D > 0)
    if keep.sum() < 3:
        raise InsufficientDataError(f"need at least 3 converged entries with K >= {k_min}")
    fit = stats.linregress(np.log(K[keep]), np.log(D[keep]))
    return SlopeFit(float(fit.slope), float(fit.intercept), float(fit.rvalue ** 2), int(k_min))


# -- oracles -------------------------------------------------------------------

def _equal_divergence_points(model: DetectionModel, lo: np.ndarray, hi: np.ndarray,
                             xtol: float = 1e-5) -> np.ndarray:
    """Points in each ``[lo, hi]`` where both endpoints are equally far in divergence.

    ``d(lo || c)`` grows and ``d(hi || c)`` shrinks as ``c`` moves right, so a
    plain bisection on their difference finds the crossing.
    """
    left = np.maximum(lo, INTERIOR_MARGIN)
    right = np.minimum(hi, 1.0 - INTERIOR_MARGIN)
    while np.any(right - left > xtol):
        mid = 0.5 * (left + right)
        f = model.divergence(lo, mid) - model.divergence(hi, mid)
        left = np.where(f < 0, mid, left)
        right = np.where(f < 0, right, mid)
    return 0.5 * (left + right)


def grid_oracle_scalar(model: DetectionModel, K: int, grid_step: float = 1e-3,
                       xtol: float = 1e-5) -> tuple[ScalarQuantizer, float]:
    """Brute-force minimax quantizer with boundaries restricted to a grid.

    Every cell ``[b_i, b_j]`` between grid nodes gets its equal-divergence
    point, and all boundary tuples are scored by their worst cell.  Only
    meant for ``K <= 3``, where exhaustive enumeration is affordable.
    """
    if model.M != 2:
        raise DomainError("scalar oracle needs a binary model")
    if K not in (1, 2, 3):
        raise DomainError("the exhaustive oracle supports K in {1, 2, 3}")
    if not 0 < grid_step <= 1e-3:
        raise DomainError("grid_step must lie in (0, 1e-3]")
    n = int(round(1.0 / grid_step))
    g = np.linspace(0.0, 1.0, n + 1)

    if K == 1:
        inner = g[1:-1]
        a = float(inner[np.argmax(model.risk(inner))])
        D = float(max(model.divergence(0.0, a), model.divergence(1.0, a)))
        return ScalarQuantizer([a], []), D

    i, j = np.triu_indices(n + 1, k=1)
    if K == 2:
        # only cells touching an endpoint are needed
        keep = (i == 0) | (j == n)
        i, j = i[keep], j[keep]
    c = _equal_divergence_points(model, g[i], g[j], xtol)
    worst = np.maximum(model.divergence(g[i], c), model.divergence(g[j], c))
    W = np.full((n + 1, n + 1), np.inf)
    C = np.full((n + 1, n + 1), np.nan)
    W[i, j], C[i, j] = worst, c

    if K == 2:
        D_all = np.maximum(W[0, 1:n], W[1:n, n])
        b = 1 + int(np.argmin(D_all))
        bounds = [b]
    else:
        # D(b1, b2) = max(W[0, b1], W[b1, b2], W[b2, n]) over 0 < b1 < b2 < n
        inner = np.arange(1, n)
        D_all = np.maximum(np.maximum(W[0, inner][:, None], W[np.ix_(inner, inner)]), W[inner, n][None, :])
        r, s = np.unravel_index(int(np.argmin(D_all)), D_all.shape)
        bounds = [inner[r], inner[s]]
    e = [0] + bounds + [n]
    weights = [C[e[k], e[k + 1]] for k in range(K)]
    D = max(W[e[k], e[k + 1]] for k in range(K))
    return ScalarQuantizer(weights, g[bounds]), float(D)


def grid_oracle_centroid_simplex(model: DetectionModel, cell: CellPolygon,
                                 grid_step: float = 2e-3) -> tuple[np.ndarray, float]:
    """Grid point inside ``cell`` with the smallest worst-vertex divergence.

    Cells too small to contain a grid node are scored on their vertices and
    vertex mean instead.
    """
    if cell.is_empty:
        raise DomainError("empty cell")
    if not 0 < grid_step <= 2e-3:
        raise DomainError("grid_step must lie in (0, 2e-3]")
    V = cell.vertices
    n = int(round(1.0 / grid_step))
    lo, hi = V.min(axis=0), V.max(axis=0)
    ii = np.arange(int(np.floor(lo[0] * n)), int(np.ceil(hi[0] * n)) + 1)
    jj = np.arange(int(np.floor(lo[1] * n)), int(np.ceil(hi[1] * n)) + 1)
    I, Jg = np.meshgrid(ii, jj, indexing="ij")
    keep = (I >= 0) & (Jg >= 0) & (I + Jg <= n)
    pts = np.column_stack([I[keep], Jg[keep]]) / n
    pts = pts[cell.contains(pts, tol=1e-12)] if len(pts) else pts
    pts = np.vstack([pts, V, V.mean(axis=0)])
    pts = _project_interior(pts)
    best_val, best_pt = np.inf, None
    for chunk in np.array_split(pts, max(1, len(pts) // 4096)):
        vals = model.divergence(V[None, :, :], chunk[:, None, :]).max(axis=1)
        k = int(np.argmin(vals))
        if vals[k] < best_val:
            best_val, best_pt = float(vals[k]), chunk[k]
    return best_pt, best_val


def single_group_worst(model: DetectionModel) -> float:
    """Worst-case divergence of the K=1 quantizer."""
    return float(minimax_weight(model)[1])


def weight_spread(weights, center: float) -> float:
    """Mean absolute distance of the weights from ``center``."""
    return float(np.mean(np.abs(np.asarray(weights, dtype=float) - center)))
