"""Minimax Bayes risk error quantization of the ternary probability simplex.

Everything is expressed in the chart ``(p0, p1)`` where the simplex is the
triangle with corners (0, 0), (1, 0), (0, 1).

Two facts make the geometry tractable:

* the set of priors equidistant (in divergence) from two weights is a
  straight line, so every Voronoi cell is a convex polygon obtained by
  clipping the triangle with half-planes;
* ``d(p || a)`` is convex in ``p``, so the worst divergence over a cell is
  attained at one of its vertices.

The cell centroid ``argmin_a max_i d(b_i || a)`` is found by enumerating
candidate supports.  Writing ``theta = grad J(a)``, equal divergence to two
vertices is a *linear* condition on ``theta``; a three-vertex support is
therefore a 2x2 linear solve followed by :func:`inverse_gradient`, and a
two-vertex support lies on the segment joining the pair (stationarity puts
``a`` in the convex hull of its support).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np
from scipy import optimize
from scipy.stats import qmc

from .divergence import minimax_weight
from .exceptions import DegenerateError, DomainError, OutOfImageError
from .models import INTERIOR_MARGIN, DetectionModel
from .quantizer_scalar import DesignReport

log = logging.getLogger(__name__)

CLIP_TOL = 1e-12
MERGE_TOL = 1e-11
TRIANGLE = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])


@dataclass(frozen=True)
class Halfplane:
    """Region ``orientation * (normal . x - offset) >= 0``.

    With ``normal = grad J(a_j) - grad J(a_k)`` the signed value
    ``normal . x - offset`` equals ``d(x || a_j) - d(x || a_k)``, so
    orientation +1 is the side of seed ``k``.
    """

    normal: np.ndarray
    offset: float
    orientation: int = 1

    def __post_init__(self):
        if not np.linalg.norm(self.normal) > 0:
            raise DegenerateError("half-plane normal vanishes")

    def value(self, x):
        return self.orientation * (np.asarray(x, dtype=float) @ np.atleast_1d(self.normal) - self.offset)

    def contains(self, x, tol: float = CLIP_TOL):
        return self.value(x) >= -tol

    def flipped(self) -> "Halfplane":
        return Halfplane(self.normal, self.offset, -self.orientation)


@dataclass
class CellPolygon:
    """Convex Voronoi cell, vertices counterclockwise in the chart."""

    seed_index: int
    vertices: np.ndarray

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float).reshape(-1, 2)

    @property
    def v_count(self) -> int:
        return len(self.vertices)

    @property
    def is_empty(self) -> bool:
        return self.v_count == 0

    @property
    def area(self) -> float:
        if self.v_count < 3:
            return 0.0
        x, y = self.vertices[:, 0], self.vertices[:, 1]
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    def contains(self, pts, tol: float = 1e-9) -> np.ndarray:
        """Closed-polygon membership with slack ``tol`` (edge-normal distance)."""
        pts = np.atleast_2d(pts)
        if self.v_count < 3:
            return np.zeros(len(pts), dtype=bool)
        v = self.vertices
        e = np.roll(v, -1, axis=0) - v
        rel = pts[:, None, :] - v[None, :, :]
        cross = e[None, :, 0] * rel[..., 1] - e[None, :, 1] * rel[..., 0]
        cross = cross / np.linalg.norm(e, axis=1)[None, :]
        return np.all(cross >= -tol, axis=1)


@dataclass
class WeightVector:
    """Convex weights over the vertices of a cell."""

    w: np.ndarray

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=float)
        if np.any(self.w < -1e-12) or abs(self.w.sum() - 1.0) > 1e-12:
            raise DomainError("weights must be nonnegative and sum to one")

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.w > 1e-12)


@dataclass
class SimplexQuantizer:
    model: DetectionModel = field(repr=False)
    seeds: np.ndarray
    cells: list

    @property
    def K(self) -> int:
        return len(self.seeds)


# -- bisectors and cells -----------------------------------------------------

def _tangent_data(model: DetectionModel, seeds):
    seeds = np.asarray(seeds, dtype=float)
    g = np.atleast_1d(model.gradient(seeds))
    if model.M == 2:
        g = g.reshape(-1, 1)
        seeds = seeds.reshape(-1, 1)
    J = np.atleast_1d(model.risk(seeds[:, 0] if model.M == 2 else seeds))
    return seeds, g, J


def bisector(model: DetectionModel, a_k, a_k1) -> Halfplane:
    """Divergence bisector of two weights, oriented toward ``a_k``.

    The line is ``x . (g1 - g0) = a1 . g1 - a0 . g0 - (J(a1) - J(a0))`` with
    ``g = grad J``; for binary models it is the single boundary point.
    """
    s, g, J = _tangent_data(model, np.array([a_k, a_k1], dtype=float))
    normal = g[1] - g[0]
    if np.linalg.norm(normal) <= 1e-15 * (1 + np.linalg.norm(g[0])):
        raise DegenerateError("seeds have identical gradients")
    offset = float(s[1] @ g[1] - s[0] @ g[0] - (J[1] - J[0]))
    return Halfplane(normal, offset, 1)


def _pairwise_planes(model: DetectionModel, seeds: np.ndarray):
    """Antisymmetric matrices of bisector normals and offsets for all seed pairs."""
    s, g, J = _tangent_data(model, seeds)
    tangent0 = J - np.einsum("kd,kd->k", s, g)  # value of each tangent plane at the origin
    normals = g[None, :, :] - g[:, None, :]
    offsets = tangent0[:, None] - tangent0[None, :]
    return normals, offsets


def _clip(poly: np.ndarray, n: np.ndarray, c: float) -> np.ndarray:
    """Keep the part of convex ``poly`` with ``n . x - c >= 0``."""
    if len(poly) == 0:
        return poly
    vals = poly @ n - c
    scale = CLIP_TOL * max(1.0, float(np.linalg.norm(n)), abs(c))
    inside = vals >= -scale
    if np.all(inside):
        return poly
    if not np.any(inside):
        return poly[:0]
    out = []
    m = len(poly)
    for i in range(m):
        j = (i + 1) % m
        if inside[i]:
            out.append(poly[i])
        if inside[i] != inside[j]:
            vi, vj = vals[i], vals[j]
            t = vi / (vi - vj)
            out.append(poly[i] + t * (poly[j] - poly[i]))
    return _dedupe(np.array(out))


def _dedupe(poly: np.ndarray) -> np.ndarray:
    if len(poly) < 2:
        return poly
    keep = [0]
    for i in range(1, len(poly)):
        if np.max(np.abs(poly[i] - poly[keep[-1]])) > MERGE_TOL:
            keep.append(i)
    if len(keep) > 1 and np.max(np.abs(poly[keep[-1]] - poly[keep[0]])) <= MERGE_TOL:
        keep.pop()
    return poly[keep]


def _cell_from_planes(k: int, normals, offsets) -> np.ndarray:
    poly = TRIANGLE.copy()
    K = normals.shape[0]
    for j in range(K):
        if j == k:
            continue
        n, c = normals[k, j], offsets[k, j]
        if np.linalg.norm(n) <= 1e-14:
            # identical gradients: the divergence difference is the constant -c
            if c > 1e-14 or (abs(c) <= 1e-14 and j < k):
                return poly[:0]
            continue
        poly = _clip(poly, n, c)
        if len(poly) == 0:
            break
    return poly


def cell_polygon(model: DetectionModel, seeds, k: int) -> CellPolygon:
    """Voronoi cell of seed ``k``; an empty cell has zero vertices."""
    seeds = np.asarray(seeds, dtype=float).reshape(-1, 2)
    normals, offsets = _pairwise_planes(model, seeds)
    return CellPolygon(k, _cell_from_planes(k, normals, offsets))


def voronoi_cells(model: DetectionModel, seeds) -> list:
    seeds = np.asarray(seeds, dtype=float).reshape(-1, 2)
    normals, offsets = _pairwise_planes(model, seeds)
    return [CellPolygon(k, _cell_from_planes(k, normals, offsets)) for k in range(len(seeds))]


def vertex_bound(K: int, M: int = 3) -> int:
    return comb(K - 1, M - 2) + M


def cell_max_divergence(model: DetectionModel, cell: CellPolygon, seed) -> tuple[float, np.ndarray]:
    """Largest divergence from ``seed`` over the cell, found among its vertices."""
    if cell.is_empty:
        raise DomainError("empty cell")
    d = model.divergence(cell.vertices, seed)
    i = int(np.argmax(d))
    return float(d[i]), cell.vertices[i]


def quantize_simplex(q: SimplexQuantizer, p):
    """Index and seed of the nearest weight in divergence; ties go to the lowest index."""
    p = np.asarray(p, dtype=float)
    single = p.ndim == 1
    pts = np.atleast_2d(p)
    d = np.stack([q.model.divergence(pts, s) for s in q.seeds], axis=-1)
    # divergence differences are exact affine functions; snap rounding-level ties
    dmin = d.min(axis=-1, keepdims=True)
    idx = np.argmax(d <= dmin + 1e-15 * (1 + np.abs(dmin)), axis=-1)
    if single:
        return int(idx[0]), q.seeds[idx[0]]
    return idx, q.seeds[idx]


# -- inverse gradient ----------------------------------------------------------

@lru_cache(maxsize=16)
def _gradient_table(model: DetectionModel, n: int = 60):
    t = (np.arange(n) + 0.5) / n
    x, y = np.meshgrid(t, t, indexing="ij")
    pts = np.column_stack([x.ravel(), y.ravel()])
    pts = pts[pts.sum(axis=1) < 1.0]
    return pts, model.gradient(pts)


def _project_interior(x: np.ndarray) -> np.ndarray:
    bary = np.concatenate([x, 1.0 - x.sum(axis=-1, keepdims=True)], axis=-1)
    bary = np.maximum(bary, INTERIOR_MARGIN)
    bary /= bary.sum(axis=-1, keepdims=True)
    return bary[..., :-1]


def _gradient_jacobian(model: DetectionModel, x: np.ndarray, h: float = 1e-7) -> np.ndarray:
    cols = []
    for i in range(2):
        e = np.zeros(2)
        e[i] = h
        # near an edge the stencil is pulled back inside, so divide by the actual span
        xp, xm = _project_interior(x + e), _project_interior(x - e)
        span = np.maximum(xp[..., i] - xm[..., i], 1e-300)
        cols.append((model.gradient(xp) - model.gradient(xm)) / span[..., None])
    return np.stack(cols, axis=-1)


def _inverse_gradient_batch(model: DetectionModel, targets: np.ndarray, tol: float = 1e-12,
                            max_iter: int = 60):
    """Solve ``grad J(x) = target`` for each target.

    ``J(x) - target . x`` is concave, so its maximiser over the simplex is
    found reliably by SLSQP from the tabulated gradient entry nearest the
    target; damped Newton then polishes the root.  Returns
    ``(x, residual_norm)``.
    """
    targets = np.atleast_2d(targets)
    pts, grads = _gradient_table(model)
    nearest = np.argmin(((targets[:, None, :] - grads[None, :, :]) ** 2).sum(-1), axis=1)
    x = pts[nearest].copy()
    lo = INTERIOR_MARGIN
    cons = [{"type": "ineq", "fun": lambda z: 1.0 - lo - z.sum(), "jac": lambda z: -np.ones(2)}]
    for n, g in enumerate(targets):
        res = optimize.minimize(lambda z: float(g @ z - model.risk(z)), x[n],
                                jac=lambda z: g - model.gradient(z), method="SLSQP",
                                bounds=[(lo, 1.0 - lo)] * 2, constraints=cons,
                                options={"ftol": 1e-15, "maxiter": 500})
        x[n] = _project_interior(res.x[None, :])[0]
    return _newton_inverse(model, x, targets, tol, max_iter)


def _newton_inverse(model, x, targets, tol, max_iter):
    x = x.copy()
    r = model.gradient(x) - targets
    res = np.linalg.norm(r, axis=1)
    for _ in range(max_iter):
        active = res > tol
        if not np.any(active):
            break
        xa, ra = x[active], r[active]
        step = np.einsum("nij,nj->ni", np.linalg.pinv(_gradient_jacobian(model, xa), rcond=1e-10), ra)
        t = np.ones(len(xa))
        best_x, best_r = xa.copy(), ra.copy()
        best_res = res[active].copy()
        for _ in range(30):
            cand = _project_interior(xa - t[:, None] * step)
            rc = model.gradient(cand) - targets[active]
            nc = np.linalg.norm(rc, axis=1)
            better = nc < best_res
            best_x[better], best_r[better], best_res[better] = cand[better], rc[better], nc[better]
            t = np.where(better | (best_res < res[active]), t, 0.5 * t)
            if np.all(best_res < res[active]):
                break
        stalled = best_res >= res[active]
        x[active], r[active], res[active] = best_x, best_r, best_res
        if np.all(stalled):
            break
    return x, res


def inverse_gradient(model: DetectionModel, g, tol: float = 1e-9):
    """Interior weight whose risk gradient equals ``g``."""
    if model.M == 2:
        g = float(g)
        lo, hi = INTERIOR_MARGIN, 1.0 - INTERIOR_MARGIN
        if not model.gradient(hi) - tol <= g <= model.gradient(lo) + tol:
            raise OutOfImageError("slope outside the derivative range")
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if model.gradient(mid) > g:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)
    x, res = _inverse_gradient_batch(model, np.asarray(g, dtype=float).reshape(1, 2))
    if res[0] > tol:
        raise OutOfImageError(f"no interior point with that gradient (residual {res[0]:.2e})")
    return x[0]


# -- minimax centroid ----------------------------------------------------------

def jensen_gap(model: DetectionModel, V: np.ndarray, w) -> float:
    """``J(sum w_i b_i) - sum w_i J(b_i)``: a lower bound on the minimax cell value."""
    w = np.asarray(w, dtype=float)
    a = _project_interior((w @ V)[None, :])[0]
    return float(model.risk(a) - w @ np.atleast_1d(model.risk(V)))


def _dual_centroid(model, V, Jv, w0=None):
    """Maximise the concave Jensen gap over convex vertex weights.

    Its gradient in ``w`` is the vector of vertex divergences from the
    combined point, so at the optimum the vertices carrying weight share the
    largest divergence.  Unlike the equal-divergence enumeration this stays
    reliable where J is flat along some directions.
    """
    n = len(V)

    def neg_gap(w):
        a = _project_interior((w @ V)[None, :])[0]
        c = model.error_coefficients(np.append(a, 1.0 - a.sum()))
        grad = c[:-1] - c[-1]
        return -(c[-1] + a @ grad - w @ Jv), -(V @ grad + c[-1] - Jv)

    res = optimize.minimize(
        neg_gap, np.full(n, 1.0 / n) if w0 is None else w0, jac=True, method="SLSQP", bounds=[(0.0, 1.0)] * n,
        constraints=[{"type": "eq", "fun": lambda w: w.sum() - 1.0, "jac": lambda w: np.ones(n)}],
        options={"ftol": 1e-14, "maxiter": 500},
    )
    w = np.maximum(res.x, 0.0)
    w /= w.sum()
    return _project_interior((w @ V)[None, :])[0], w


def _equalise_pair(model, P, JP, combine):
    # d_0 - d_1 = grad J(a) . (P_0 - P_1) - (J_0 - J_1), nondecreasing along the segment
    def f(t):
        return float(model.gradient(combine(np.array([1.0 - t, t]))) @ (P[0] - P[1]) - (JP[0] - JP[1]))

    f0, f1 = f(0.0), f(1.0)
    if f0 >= 0:
        t = 0.0
    elif f1 <= 0:
        t = 1.0
    else:
        t = optimize.brentq(f, 0.0, 1.0, xtol=1e-16, rtol=4 * np.finfo(float).eps, maxiter=200)
    return np.array([1.0 - t, t])


def _equalise_triple(model, P, JP, combine, u):
    D = P[0] - P[1:]
    rhs = JP[0] - JP[1:]

    def F(u):
        return D @ model.gradient(combine(np.array([1.0 - u.sum(), u[0], u[1]]))) - rhs

    h = 1e-8
    for _ in range(30):
        r = F(u)
        if np.max(np.abs(r)) < 1e-15:
            break
        Jm = np.column_stack([(F(u + h * e) - F(u - h * e)) / (2 * h) for e in np.eye(2)])
        if abs(np.linalg.det(Jm)) < 1e-14:
            return None
        u = u - np.linalg.solve(Jm, r)
    w = np.array([1.0 - u.sum(), u[0], u[1]])
    if np.any(w < -1e-12) or not np.all(np.isfinite(w)):
        return None
    w = np.maximum(w, 0.0)
    return w / w.sum()


def _polish(model, V, Jv, w, value):
    """Tighten the dual solution by equalising the divergences of near-active vertices.

    Pairs are balanced by bisection along their segment and triples by
    Newton steps on their convex weights.  The best polished point is
    returned if it beats ``value``; otherwise ``None``.
    """
    a = _project_interior((w @ V)[None, :])[0]
    d = model.divergence(V, a)
    near = np.flatnonzero(d >= value * (1.0 - 1e-3))
    if len(near) > 5:
        return None
    best = None
    for size in (2, 3):
        for sub in combinations(near, size):
            sub = np.array(sub)
            P = V[sub]

            def combine(ws, P=P):
                return _project_interior((ws @ P)[None, :])[0]

            if size == 2:
                ws = _equalise_pair(model, P, Jv[sub], combine)
            else:
                u = w[sub[1:]] / max(w[sub].sum(), 1e-300)
                ws = _equalise_triple(model, P, Jv[sub], combine, u)
                if ws is None:
                    continue
            x = combine(ws)
            val = float(np.max(model.divergence(V, x)))
            if val <= value + 1e-15 and (best is None or val < best[2]):
                full = np.zeros(len(V))
                full[sub] = ws
                best = (x, full, val)
    return best


def _centroid_from_vertices(model: DetectionModel, V: np.ndarray, w0=None):
    """Return ``(a, weights, value)`` minimising the worst vertex divergence.

    ``w0`` optionally warm-starts the vertex weights.
    """
    if len(V) == 1:
        return V[0].copy(), np.array([1.0]), 0.0
    Jv = np.atleast_1d(model.risk(V))
    a, w = _dual_centroid(model, V, Jv, w0)
    value = float(np.max(model.divergence(V, a)))
    tight = _polish(model, V, Jv, w, value)
    if tight is not None:
        a, w, value = tight
    # a vertex can already cover the whole cell when J is affine across it
    at_vertex = model.divergence(V[None, :, :], V[:, None, :]).max(axis=1)
    k = int(np.argmin(at_vertex))
    if at_vertex[k] < value:
        w = np.zeros(len(V))
        w[k] = 1.0
        return V[k].copy(), w, float(at_vertex[k])
    return a, w, value


def _transfer_weights(V_old, w_old, V_new) -> np.ndarray:
    """Carry vertex weights over to a nearby polygon by nearest-vertex matching."""
    near = np.argmin(((V_old[:, None, :] - V_new[None, :, :]) ** 2).sum(-1), axis=1)
    w = np.bincount(near, weights=w_old, minlength=len(V_new))
    w = 0.9 * w + 0.1 / len(V_new)
    return w / w.sum()


def minimax_centroid(model: DetectionModel, cell: CellPolygon):
    """Weight minimising the worst divergence over the cell, with convex vertex weights.

    Returns
    -------
    a : ndarray, shape (2,)
    w : WeightVector
        ``a = sum_i w_i b_i``; vertices with ``w_i > 0`` share the maximal
        divergence.
    """
    if cell.is_empty:
        raise DomainError("empty cell")
    a, w, _ = _centroid_from_vertices(model, cell.vertices)
    return a, WeightVector(w)


def gradient_mean_residual(model: DetectionModel, cell: CellPolygon, a) -> tuple[float, np.ndarray]:
    """Distance from ``grad J(a)`` to the convex hull of the vertex gradients.

    Returns the residual and the minimising convex weights.
    """
    G = np.atleast_2d(model.gradient(cell.vertices))
    target = np.atleast_1d(model.gradient(a))
    Aug = np.vstack([G.T, 1e3 * np.ones(len(G))])
    w, _ = optimize.nnls(Aug, np.concatenate([target, [1e3]]))
    w = w / w.sum()
    return float(np.linalg.norm(G.T @ w - target)), w


# -- design loop -------------------------------------------------------------

def _simplex_starts(K: int, n_starts: int, rng: np.random.Generator) -> list:
    """Seed sets from a scrambled Halton sequence folded into the triangle."""
    sampler = qmc.Halton(d=2, scramble=True, seed=rng)
    starts = []
    for _ in range(n_starts):
        u = sampler.random(K)
        flip = u.sum(axis=1) > 1
        u[flip] = 1.0 - u[flip]
        starts.append(_project_interior(u))
    return starts


def _refresh(model, seeds):
    """Voronoi cells for ``seeds``, reseeding empty cells at the worst-covered vertex."""
    for _ in range(len(seeds) + 1):
        cells = voronoi_cells(model, seeds)
        empty = [c.seed_index for c in cells if c.is_empty]
        if not empty:
            return seeds, cells
        worst_val, worst_pt = -np.inf, None
        for c in cells:
            if c.is_empty:
                continue
            val, pt = cell_max_divergence(model, c, seeds[c.seed_index])
            if val > worst_val:
                worst_val, worst_pt = val, pt
        seeds = seeds.copy()
        seeds[empty[0]] = _project_interior(worst_pt[None, :])[0]
    return seeds, voronoi_cells(model, seeds)


def _cell_maxima(model, seeds, cells) -> np.ndarray:
    return np.array([cell_max_divergence(model, c, seeds[c.seed_index])[0] if not c.is_empty else 0.0
                     for c in cells])


def _centroids_of(model, cells, memo=None) -> np.ndarray:
    """Minimax centroid of every cell; ``memo`` keeps last weights per seed for warm starts."""
    out = []
    for c in cells:
        w0 = None
        if memo is not None and c.seed_index in memo:
            w0 = _transfer_weights(*memo[c.seed_index], c.vertices)
        a, w, _ = _centroid_from_vertices(model, c.vertices, w0)
        if memo is not None:
            memo[c.seed_index] = (c.vertices, w)
        out.append(a)
    return np.array(out)


def _run(model, seeds, tol, max_iter, accelerate=True, memory=5, warm=True):
    """Alternate Voronoi cells and minimax centroids until the seeds settle.

    With ``accelerate`` the seed update uses Anderson mixing over the last
    ``memory`` steps.  The mixed point is kept only if it lands inside the
    simplex without emptying a cell and the step length keeps shrinking;
    otherwise the plain update is used and the history is dropped.
    """
    seeds, cells = _refresh(model, seeds)
    memo = {} if warm else None
    xs, fs = [], []
    last = np.inf
    for it in range(1, max_iter + 1):
        new = _centroids_of(model, cells, memo)
        f = (new - seeds).ravel()
        move = float(np.max(np.abs(f)))
        if move < tol:
            seeds, cells = _refresh(model, new)
            return seeds, cells, it, True
        nxt = new
        if accelerate and move < last:
            xs.append(seeds.ravel().copy())
            fs.append(f)
            xs, fs = xs[-memory - 1:], fs[-memory - 1:]
            if len(fs) > 1:
                dF = np.diff(np.array(fs), axis=0).T
                dX = np.diff(np.array(xs), axis=0).T
                gamma = np.linalg.lstsq(dF, f, rcond=None)[0]
                cand = (seeds.ravel() + f - (dX + dF) @ gamma).reshape(seeds.shape)
                inside = np.all(cand > 0) and np.all(cand.sum(axis=1) < 1)
                if inside and not any(c.is_empty for c in voronoi_cells(model, cand)):
                    nxt = cand
        else:
            xs, fs = [], []
        last = move
        prev = seeds
        seeds, cells = _refresh(model, nxt)
        if seeds.shape == prev.shape and not np.allclose(seeds, nxt):
            # reseeding moved a point discontinuously
            xs, fs = [], []
    return seeds, cells, max_iter, False


def grown_seeds(q: SimplexQuantizer) -> np.ndarray:
    """Seeds of ``q`` plus one new seed at its worst-covered cell vertex.

    A convenient starting point for the design with one more cell.
    """
    worst_val, worst_pt = -np.inf, None
    for c in q.cells:
        if c.is_empty:
            continue
        val, pt = cell_max_divergence(q.model, c, q.seeds[c.seed_index])
        if val > worst_val:
            worst_val, worst_pt = val, pt
    return np.vstack([q.seeds, _project_interior(worst_pt[None, :])])


def design_minimax_simplex(model: DetectionModel, K: int, tol: float = 1e-8, max_iter: int = 500,
                           n_starts: int = 8, random_state=0, init_seeds=None, accelerate: bool = True):
    """Alternating Voronoi/centroid design of a K-cell ternary minimax quantizer.

    Each of ``n_starts`` runs begins from low-discrepancy seeds; the run with
    the smallest worst-case divergence is returned.  ``init_seeds`` adds one
    more run from the given ``(K, 2)`` seed array.

    Returns
    -------
    (SimplexQuantizer, DesignReport)
    """
    if model.M != 3:
        raise DomainError("simplex design is implemented for ternary models")
    if int(K) != K or K < 1:
        raise DomainError("K must be a positive integer")
    K = int(K)
    if K == 1:
        a, worst = minimax_weight(model)
        seeds = np.asarray(a).reshape(1, 2)
        cells = voronoi_cells(model, seeds)
        return SimplexQuantizer(model, seeds, cells), DesignReport(0, True, worst, np.array([worst]))

    rng = np.random.default_rng(random_state)
    starts = _simplex_starts(K, n_starts, rng) if n_starts > 0 else []
    if init_seeds is not None:
        init_seeds = np.asarray(init_seeds, dtype=float)
        if init_seeds.shape != (K, 2):
            raise DomainError("init_seeds must have shape (K, 2)")
        starts.append(_project_interior(init_seeds))
    if not starts:
        raise DomainError("need at least one start")
    best = None
    for start, seeds in enumerate(starts):
        seeds, cells, it, ok = _run(model, seeds, tol, max_iter, accelerate=accelerate)
        cm = _cell_maxima(model, seeds, cells)
        D = float(cm.max())
        log.debug("start %d: D=%.6g iterations=%d converged=%s", start, D, it, ok)
        # converged runs take precedence over lower but unsettled ones
        key = (not ok, D)
        if best is None or key < best[0]:
            best = (key, SimplexQuantizer(model, seeds, cells), DesignReport(it, ok, D, cm))
    best = best[1:]
    if not best[1].converged:
        log.warning("simplex design K=%d did not converge in %d iterations", K, max_iter)
    return best
