"""Euclidean primitives: balls, polytopes, enclosing and inscribed balls, hulls, fans."""
from __future__ import annotations

import itertools
import math
import zlib
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .tolerance import DEFAULT_TOL, Tolerance


class GeometryError(ValueError):
    """Raised for degenerate or malformed geometric input."""


def as_points(points, min_count: int = 1) -> np.ndarray:
    """Coerce ``points`` to a finite (m, n) float array with a common dimension."""
    try:
        arr = np.asarray(points, dtype=np.float64)
    except ValueError as exc:  # ragged input
        raise GeometryError("points must share a common dimension") from exc
    if arr.ndim == 1 and arr.size:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[0] < min_count:
        if arr.size == 0:
            raise GeometryError("empty point set")
        raise GeometryError(f"expected at least {min_count} points of common dimension")
    if not np.all(np.isfinite(arr)):
        raise GeometryError("non-finite coordinates")
    return arr


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=np.float64))
        if not self.radius >= 0:
            raise GeometryError(f"negative radius {self.radius}")

    def contains(self, x, eps: float = 0.0) -> bool:
        return bool(np.linalg.norm(np.asarray(x, dtype=np.float64) - self.center) <= self.radius + eps)


# ---------------------------------------------------------------------------
# minimum enclosing ball


def _support_ball(support: list[np.ndarray], dim: int):
    """Smallest ball with every support point on its boundary, inside their affine hull."""
    if not support:
        return None, -1.0
    p0 = support[0]
    if len(support) == 1:
        return p0.copy(), 0.0
    A = np.array([p - p0 for p in support[1:]])
    G = 2.0 * A @ A.T
    rhs = np.einsum("ij,ij->i", A, A)
    lam, *_ = np.linalg.lstsq(G, rhs, rcond=None)
    c = p0 + A.T @ lam
    r = max(float(np.linalg.norm(p - c)) for p in support)
    return c, r


def _mtf_ball(pts: list[np.ndarray], end: int, support: list[np.ndarray], dim: int, slack: float):
    c, r = _support_ball(support, dim)
    if len(support) == dim + 1:
        return c, r
    i = 0
    while i < end:
        p = pts[i]
        if c is None or np.linalg.norm(p - c) > r + slack:
            c, r = _mtf_ball(pts, i, support + [p], dim, slack)
            pts.insert(0, pts.pop(i))
        i += 1
    return c, r


def _seed_from(arr: np.ndarray) -> int:
    return zlib.crc32(np.ascontiguousarray(arr).tobytes())


def min_enclosing_ball(points, tol: Tolerance = DEFAULT_TOL) -> Ball:
    """Smallest closed ball containing ``points``.

    Welzl's algorithm with the move-to-front heuristic; the initial order is a
    shuffle seeded from the input bytes, so the result is deterministic.
    """
    P = as_points(points)
    m, n = P.shape
    if m == 1:
        return Ball(P[0].copy(), 0.0)
    order = np.random.default_rng(_seed_from(P)).permutation(m)
    pts = [P[i] for i in order]
    scale = float(np.abs(P).max()) or 1.0
    c, r = _mtf_ball(pts, len(pts), [], n, 1e-12 * scale)
    # guard against round-off in the support computation
    r = max(r, float(np.linalg.norm(P - c, axis=1).max()))
    return Ball(c, r)


# ---------------------------------------------------------------------------
# affine structure


def affine_rank(points, tol: Tolerance = DEFAULT_TOL) -> int:
    P = as_points(points)
    if P.shape[0] == 1:
        return 0
    D = P[1:] - P[0]
    diam = float(np.linalg.norm(P[:, None, :] - P[None, :, :], axis=-1).max())
    if diam == 0.0:
        return 0
    s = np.linalg.svd(D, compute_uv=False)
    return int(np.sum(s > tol.eps_geom * diam))


def affine_basis(points, tol: Tolerance = DEFAULT_TOL):
    """Return (origin, orthonormal rows spanning the directions of aff(points))."""
    P = as_points(points)
    k = affine_rank(P, tol)
    if k == 0:
        return P[0].copy(), np.zeros((0, P.shape[1]))
    _, _, vt = np.linalg.svd(P[1:] - P[0])
    return P[0].copy(), vt[:k]


def circumcenter(simplex, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Point of aff(simplex) equidistant from all vertices."""
    S = as_points(simplex)
    k = S.shape[0] - 1
    if k == 0:
        return S[0].copy()
    if affine_rank(S, tol) != k:
        raise GeometryError("degenerate simplex: vertices are affinely dependent")
    A = S[1:] - S[0]
    lam = np.linalg.solve(2.0 * A @ A.T, np.einsum("ij,ij->i", A, A))
    return S[0] + A.T @ lam


def circumradius(simplex, tol: Tolerance = DEFAULT_TOL) -> float:
    S = as_points(simplex)
    return float(np.linalg.norm(S[0] - circumcenter(S, tol)))


# ---------------------------------------------------------------------------
# 2D hull


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull_2d_indices(points, tol: Tolerance = DEFAULT_TOL) -> list[int]:
    """Indices of the extreme points, counterclockwise from the lowest-leftmost one.

    Monotone chain; points within ``eps_geom`` (relative to the diameter) of a
    hull edge are dropped, and duplicates keep their first index.
    """
    P = as_points(points)
    if P.shape[1] != 2:
        raise GeometryError("convex_hull_2d needs planar points")
    order = sorted(range(len(P)), key=lambda i: (P[i, 0], P[i, 1], i))
    uniq = []
    for i in order:
        if not uniq or np.any(np.abs(P[i] - P[uniq[-1]]) > 0):
            uniq.append(i)
    if len(uniq) <= 2:
        if len(uniq) == 2 and np.linalg.norm(P[uniq[0]] - P[uniq[1]]) <= tol.eps_geom:
            return uniq[:1]
        return uniq
    span = float(np.linalg.norm(P[uniq[-1]] - P[uniq[0]]))
    span = max(span, float(np.ptp(P, axis=0).max()))
    eps = tol.eps_geom * max(span, 1e-300)

    def chain(seq):
        out: list[int] = []
        for i in seq:
            while len(out) >= 2:
                a, b = P[out[-2]], P[out[-1]]
                # drop b when it is not strictly left of a->P[i] (distance-scaled test)
                d = _cross(a, b, P[i]) / max(np.linalg.norm(P[i] - a), 1e-300)
                if d <= eps:
                    out.pop()
                else:
                    break
            out.append(i)
        return out

    lower = chain(uniq)
    upper = chain(reversed(uniq))
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 2:
        # all collinear: report the two endpoints
        return [uniq[0], uniq[-1]]
    return hull


def convex_hull_2d(points, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    P = as_points(points)
    return P[convex_hull_2d_indices(P, tol)]


def polygon_area(vertices) -> float:
    V = np.asarray(vertices, dtype=np.float64)
    x, y = V[:, 0], V[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


# ---------------------------------------------------------------------------
# polytopes


def _dedupe_rows(M: np.ndarray, eps: float) -> np.ndarray:
    keep: list[np.ndarray] = []
    for row in M:
        if not any(np.all(np.abs(row - k) <= eps) for k in keep):
            keep.append(row)
    return np.array(keep) if keep else np.zeros((0, M.shape[1]))


def enumerate_vertices(A: np.ndarray, b: np.ndarray, eps: float = 1e-9) -> np.ndarray:
    """Vertices of {x : A x <= b} by brute force over n-subsets of constraints (n <= 3)."""
    n = A.shape[1]
    found = []
    for idx in itertools.combinations(range(A.shape[0]), n):
        M = A[list(idx)]
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        x = np.linalg.solve(M, b[list(idx)])
        if np.all(A @ x <= b + eps * max(1.0, float(np.abs(b).max()))):
            found.append(x)
    if not found:
        return np.zeros((0, n))
    return _dedupe_rows(np.array(found), 1e-9)


class PolytopeBody:
    """Bounded convex polytope in dimension 2 or 3.

    Holds both a vertex list and unit-normal halfspaces ``A x <= b``.
    2D vertices are stored counterclockwise.
    """

    def __init__(self, vertices: np.ndarray, A: np.ndarray, b: np.ndarray, bounded: bool = True):
        self.vertices = np.asarray(vertices, dtype=np.float64)
        self.A = np.asarray(A, dtype=np.float64)
        self.b = np.asarray(b, dtype=np.float64)
        self.bounded = bounded
        self.dim = self.A.shape[1] if self.A.size else self.vertices.shape[1]

    # -- constructors ------------------------------------------------------
    @classmethod
    def polygon(cls, points, tol: Tolerance = DEFAULT_TOL) -> "PolytopeBody":
        """Convex polygon spanned by ``points`` (the hull is taken)."""
        P = as_points(points)
        if P.shape[1] != 2:
            raise GeometryError("polygon needs 2D points")
        H = convex_hull_2d(P, tol)
        if len(H) < 3:
            # keep degenerate input representable; inscribed-ball queries reject it
            return cls(H, np.zeros((0, 2)), np.zeros(0))
        E = np.roll(H, -1, axis=0) - H
        normals = np.stack([E[:, 1], -E[:, 0]], axis=1)
        normals /= np.linalg.norm(normals, axis=1, keepdims=True)
        offsets = np.einsum("ij,ij->i", normals, H)
        return cls(H, normals, offsets)

    @classmethod
    def box(cls, lo, hi) -> "PolytopeBody":
        lo = np.asarray(lo, dtype=np.float64)
        hi = np.asarray(hi, dtype=np.float64)
        n = lo.size
        if n == 2:
            return cls.polygon([[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]])
        A = np.vstack([np.eye(n), -np.eye(n)])
        b = np.concatenate([hi, -lo])
        return cls.from_halfspaces(A, b)

    @classmethod
    def from_points(cls, points, tol: Tolerance = DEFAULT_TOL) -> "PolytopeBody":
        P = as_points(points)
        if P.shape[1] == 2:
            return cls.polygon(P, tol)
        if P.shape[1] != 3:
            raise GeometryError("only dimensions 2 and 3 are supported")
        if affine_rank(P, tol) < 3:
            return cls(P, np.zeros((0, 3)), np.zeros(0))
        from scipy.spatial import ConvexHull

        hull = ConvexHull(P)
        eq = hull.equations  # rows (normal, offset) with normal.x + offset <= 0
        A, b = eq[:, :3], -eq[:, 3]
        H = _dedupe_rows(np.column_stack([A, b]), 1e-9)
        return cls(P[hull.vertices], H[:, :3], H[:, 3])

    @classmethod
    def from_halfspaces(cls, A, b) -> "PolytopeBody":
        A = np.atleast_2d(np.asarray(A, dtype=np.float64))
        b = np.asarray(b, dtype=np.float64).ravel()
        if A.shape[0] != b.size:
            raise GeometryError("A and b disagree in length")
        nrm = np.linalg.norm(A, axis=1)
        if np.any(nrm == 0):
            raise GeometryError("zero normal in halfspace list")
        A, b = A / nrm[:, None], b / nrm
        bounded = _is_bounded(A, b)
        V = enumerate_vertices(A, b) if bounded else np.zeros((0, A.shape[1]))
        if A.shape[1] == 2 and len(V) >= 3:
            return cls.polygon(V)
        return cls(V, A, b, bounded)

    @classmethod
    def regular_polygon(cls, k: int, radius: float = 1.0, phase: float = 0.0) -> "PolytopeBody":
        t = phase + 2 * np.pi * np.arange(k) / k
        return cls.polygon(radius * np.column_stack([np.cos(t), np.sin(t)]))

    # -- queries -----------------------------------------------------------
    def has_interior(self, tol: Tolerance = DEFAULT_TOL) -> bool:
        return len(self.vertices) > self.dim and affine_rank(self.vertices, tol) == self.dim

    def contains(self, X, eps: float = 1e-9) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        return np.all(X @ self.A.T <= self.b + eps, axis=1)

    def support(self, u) -> float:
        return float((self.vertices @ np.asarray(u, dtype=np.float64)).max())

    def width(self, u) -> float:
        h = self.vertices @ np.asarray(u, dtype=np.float64)
        return float(h.max() - h.min())

    def translate(self, t) -> "PolytopeBody":
        t = np.asarray(t, dtype=np.float64)
        return PolytopeBody(self.vertices + t, self.A, self.b + self.A @ t, self.bounded)

    def scale(self, s: float) -> "PolytopeBody":
        return PolytopeBody(self.vertices * s, self.A, self.b * s, self.bounded)

    def bbox(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def __repr__(self):
        return f"PolytopeBody(dim={self.dim}, vertices={len(self.vertices)}, facets={len(self.b)})"


def _is_bounded(A: np.ndarray, b: np.ndarray) -> bool:
    n = A.shape[1]
    for i in range(n):
        for sgn in (1.0, -1.0):
            c = np.zeros(n)
            c[i] = -sgn
            res = linprog(c, A_ub=A, b_ub=b, bounds=[(None, None)] * n, method="highs")
            if res.status == 3:
                return False
            if res.status == 2:
                raise GeometryError("empty polytope")
    return True


def chebyshev_ball(body: PolytopeBody, tol: Tolerance = DEFAULT_TOL) -> Ball:
    """Largest ball inside ``body``: an LP over (center, radius)."""
    if not body.bounded:
        raise GeometryError("unbounded body has no Chebyshev ball")
    if not body.has_interior(tol) or body.A.shape[0] == 0:
        raise GeometryError("body has empty interior")
    return _chebyshev_lp(body.A, body.b, tol)


def _chebyshev_lp(A: np.ndarray, b: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> Ball:
    n = A.shape[1]
    norms = np.linalg.norm(A, axis=1)
    c = np.zeros(n + 1)
    c[-1] = -1.0
    res = linprog(
        c,
        A_ub=np.column_stack([A, norms]),
        b_ub=b,
        bounds=[(None, None)] * n + [(0, None)],
        method="highs",
    )
    if res.status == 3:
        raise GeometryError("unbounded body has no Chebyshev ball")
    if res.status != 0:
        raise GeometryError(f"Chebyshev LP failed: {res.message}")
    r = float(res.x[-1])
    if r <= tol.eps_geom:
        raise GeometryError("body has empty interior")
    return Ball(res.x[:n], r)


def dist_to_polyhedron(X, A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Euclidean distance from each row of ``X`` to {y : A y <= b}, for n <= 3.

    Enumerates active sets of at most n constraints; returns inf for an empty set.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    N, n = X.shape
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if A.shape[0] == 0:
        return np.zeros(N)
    slack = 1e-10 * max(1.0, float(np.abs(b).max()))
    best = np.where(np.all(X @ A.T <= b + slack, axis=1), 0.0, np.inf)
    todo = best > 0
    if not todo.any():
        return best
    Xt = X[todo]
    res = np.full(Xt.shape[0], np.inf)
    for size in range(1, min(n, A.shape[0]) + 1):
        for idx in itertools.combinations(range(A.shape[0]), size):
            M = A[list(idx)]
            G = M @ M.T
            if abs(np.linalg.det(G)) < 1e-12:
                continue
            # projection of x onto {M y = b_S}
            lam = np.linalg.solve(G, (Xt @ M.T - b[list(idx)]).T).T
            Y = Xt - lam @ M
            ok = np.all(Y @ A.T <= b + slack, axis=1)
            d = np.linalg.norm(Y - Xt, axis=1)
            res = np.where(ok & (d < res), d, res)
    best[todo] = res
    return best


# ---------------------------------------------------------------------------
# fans


@dataclass(frozen=True)
class Fan:
    """Union of ``m`` rays from ``apex`` at angles rotation + 2*pi*j/m."""

    apex: tuple = (0.0, 0.0)
    m: int = 2
    rotation: float = 0.0

    def __post_init__(self):
        if self.m < 2:
            raise GeometryError("a fan needs m >= 2 rays")
        object.__setattr__(self, "apex", tuple(float(v) for v in self.apex))
        if len(self.apex) != 2:
            raise GeometryError("fans live in the plane")

    @property
    def angles(self) -> np.ndarray:
        return self.rotation + 2 * np.pi * np.arange(self.m) / self.m

    @property
    def directions(self) -> np.ndarray:
        a = self.angles
        return np.column_stack([np.cos(a), np.sin(a)])

    @property
    def half_angle(self) -> float:
        return math.pi / self.m


def dist_to_fan(x, fan: Fan) -> float:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (2,):
        raise GeometryError("dist_to_fan is planar")
    p = x - np.asarray(fan.apex)
    best = math.inf
    for d in fan.directions:
        t = max(float(p @ d), 0.0)
        best = min(best, float(np.linalg.norm(p - t * d)))
    return best


def fan_rays(fans) -> tuple[np.ndarray, np.ndarray]:
    """Stack the rays of several fans as (apexes, unit directions)."""
    apex, dirs = [], []
    for f in fans:
        D = f.directions
        apex.append(np.repeat(np.asarray(f.apex)[None], len(D), axis=0))
        dirs.append(D)
    if not apex:
        return np.zeros((0, 2)), np.zeros((0, 2))
    return np.vstack(apex), np.vstack(dirs)
