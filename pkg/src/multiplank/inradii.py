"""Upper and lower intrinsic inradii of polytopes, and inscribed radii of multi-planks.

Both radii are infima over k-dimensional subspaces L:

* upper: inradius of the orthogonal projection K|L, measured inside L;
* lower: radius of the largest k-ball parallel to L that fits in K after a
  translation (equivalently the best section K ∩ (L + x)). For a polytope
  {A x <= b} this is one LP per subspace: a k-ball c + r(B ∩ L) lies in K iff
  <a_i, c> + r |P_L a_i| <= b_i for every facet.

The search over subspaces is a fixed grid (720 angles in the plane, a
Fibonacci sphere in space) plus polytope-aware candidate directions, followed
by local refinement.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog, minimize, minimize_scalar

from .geom import GeometryError, PolytopeBody, _chebyshev_lp, dist_to_polyhedron
from .tolerance import DEFAULT_TOL, Tolerance

ANGLE_GRID = 720
SPHERE_GRID = 1000


@dataclass(frozen=True)
class IntrinsicRadii:
    k: int
    upper: float
    lower: float
    upper_basis: np.ndarray
    lower_basis: np.ndarray


@dataclass(frozen=True)
class SubspaceSample:
    k: int
    basis: np.ndarray
    refined: bool


# ---------------------------------------------------------------------------
# objectives for a fixed subspace


def _check(K: PolytopeBody, k: int):
    if not K.bounded:
        raise GeometryError("unbounded body")
    n = K.dim
    if n not in (2, 3):
        raise GeometryError("intrinsic radii are implemented for n = 2, 3")
    if not (1 <= k <= n):
        raise GeometryError(f"need 1 <= k <= {n}")
    if not K.has_interior():
        raise GeometryError("body has empty interior")


def projection_inradius(K: PolytopeBody, basis: np.ndarray) -> float:
    """Inradius of K|L measured in L, where ``basis`` has orthonormal rows spanning L."""
    k, n = basis.shape
    Y = K.vertices @ basis.T
    if k == 1:
        return float(Y.max() - Y.min()) / 2
    if k == n:
        return _chebyshev_lp(K.A, K.b).radius
    poly = PolytopeBody.polygon(Y)
    if len(poly.b) == 0:
        return 0.0
    try:
        return _chebyshev_lp(poly.A, poly.b).radius
    except GeometryError:
        return 0.0


def section_inradius(K: PolytopeBody, basis: np.ndarray) -> float:
    """Largest r such that some translate of the k-ball r(B ∩ L) lies in K."""
    k, n = basis.shape
    if k == n:
        return _chebyshev_lp(K.A, K.b).radius
    if n == 2 and k == 1:
        return _max_chord_2d(K, basis[0]) / 2
    w = np.linalg.norm(K.A @ basis.T, axis=1)
    c = np.zeros(n + 1)
    c[-1] = -1.0
    res = linprog(c, A_ub=np.column_stack([K.A, w]), b_ub=K.b,
                  bounds=[(None, None)] * n + [(0, None)], method="highs")
    if res.status != 0:
        raise GeometryError(f"section LP failed: {res.message}")
    return float(res.x[-1])


def _max_chord_2d(K: PolytopeBody, u: np.ndarray) -> float:
    # chord length is concave in the offset, so the longest chord passes through a vertex
    au = K.A @ u
    best = 0.0
    for p in K.vertices:
        s = K.b - K.A @ p
        hi = np.where(au > 1e-15, s / np.where(au > 1e-15, au, 1), np.inf).min()
        lo = np.where(au < -1e-15, s / np.where(au < -1e-15, au, 1), -np.inf).max()
        best = max(best, float(hi - lo))
    return best


def max_chord(K: PolytopeBody, u) -> float:
    """Length of the longest chord of K in direction u (LP: max t with y, y + t u in K)."""
    u = np.asarray(u, dtype=np.float64)
    u = u / np.linalg.norm(u)
    if K.dim == 2:
        return _max_chord_2d(K, u)
    return 2 * section_inradius(K, u[None, :])


# ---------------------------------------------------------------------------
# subspace parametrisations


def _plane_basis(normal: np.ndarray) -> np.ndarray:
    normal = normal / np.linalg.norm(normal)
    a = np.eye(3)[int(np.argmin(np.abs(normal)))]
    e1 = np.cross(normal, a)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(normal, e1)
    return np.vstack([e1, e2])


def fibonacci_sphere(count: int = SPHERE_GRID) -> np.ndarray:
    i = np.arange(count) + 0.5
    z = 1 - 2 * i / count
    phi = math.pi * (1 + 5 ** 0.5) * i
    rho = np.sqrt(1 - z * z)
    return np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])


def _sph(theta_phi) -> np.ndarray:
    t, p = theta_phi
    return np.array([math.sin(t) * math.cos(p), math.sin(t) * math.sin(p), math.cos(t)])


def _candidate_dirs_3d(K: PolytopeBody) -> np.ndarray:
    dirs = [K.A]
    V = K.vertices
    E = (V[:, None, :] - V[None, :, :]).reshape(-1, 3)
    E = E[np.linalg.norm(E, axis=1) > 1e-12]
    dirs.append(E)
    nA = len(K.A)
    if nA > 1:
        C = np.cross(K.A[:, None, :], K.A[None, :, :]).reshape(-1, 3)
        dirs.append(C)
    D = np.vstack(dirs)
    D = D[np.linalg.norm(D, axis=1) > 1e-12]
    D = D / np.linalg.norm(D, axis=1, keepdims=True)
    # canonical hemisphere and dedupe
    D = D * np.where(D[:, 2:3] < 0, -1, 1)
    return np.unique(np.round(D, 12), axis=0)


def _search(K: PolytopeBody, k: int, objective, tol: Tolerance) -> tuple[np.ndarray, float]:
    """Minimise ``objective(basis)`` over k-dimensional subspaces."""
    n = K.dim
    if k == n:
        basis = np.eye(n)
        return basis, objective(basis)
    if n == 2:  # k == 1
        def f(theta):
            return objective(np.array([[math.cos(theta), math.sin(theta)]]))

        thetas = np.pi * np.arange(ANGLE_GRID) / ANGLE_GRID
        vals = np.array([f(t) for t in thetas])
        cands = [(float(vals[i]), float(thetas[i])) for i in range(ANGLE_GRID)]
        # edge normals and edge directions are where polygonal minima sit
        for a in K.A:
            for d in (a, np.array([-a[1], a[0]])):
                t = math.atan2(d[1], d[0]) % math.pi
                cands.append((f(t), t))
        i = int(np.argmin(vals))
        h = math.pi / ANGLE_GRID
        res = minimize_scalar(f, bounds=(thetas[i] - h, thetas[i] + h), method="bounded",
                              options={"xatol": 1e-12})
        cands.append((float(res.fun), float(res.x)))
        val, t = min(cands)
        return np.array([[math.cos(t), math.sin(t)]]), val

    # n == 3: k = 1 uses the direction itself, k = 2 the plane orthogonal to it
    def basis_of(d):
        d = d / np.linalg.norm(d)
        return d[None, :] if k == 1 else _plane_basis(d)

    def f(d):
        return objective(basis_of(d))

    grid = fibonacci_sphere()
    grid = grid[grid[:, 2] >= 0]
    pool = np.vstack([grid, _candidate_dirs_3d(K)])
    vals = np.array([f(d) for d in pool])
    order = np.argsort(vals, kind="stable")
    best_val, best_dir = float(vals[order[0]]), pool[order[0]]
    for idx in order[:4]:
        d = pool[idx]
        start = np.array([math.acos(np.clip(d[2], -1, 1)), math.atan2(d[1], d[0])])
        res = minimize(lambda tp: f(_sph(tp)), start, method="Nelder-Mead",
                       options={"xatol": 1e-9, "fatol": tol.eps_opt * 1e-3, "maxiter": 400})
        if res.fun < best_val:
            best_val, best_dir = float(res.fun), _sph(res.x)
    return basis_of(best_dir), best_val


def best_projection_subspace(K: PolytopeBody, k: int, tol: Tolerance = DEFAULT_TOL):
    """(basis, value) of the k-subspace minimising the projection inradius."""
    _check(K, k)
    return _search(K, k, lambda B: projection_inradius(K, B), tol)


def upper_intrinsic(K: PolytopeBody, k: int, tol: Tolerance = DEFAULT_TOL) -> float:
    return best_projection_subspace(K, k, tol)[1]


def best_section_subspace(K: PolytopeBody, k: int, tol: Tolerance = DEFAULT_TOL):
    _check(K, k)
    return _search(K, k, lambda B: section_inradius(K, B), tol)


def lower_intrinsic(K: PolytopeBody, k: int, tol: Tolerance = DEFAULT_TOL) -> float:
    return best_section_subspace(K, k, tol)[1]


def intrinsic_radii(K: PolytopeBody, k: int, tol: Tolerance = DEFAULT_TOL) -> IntrinsicRadii:
    bu, u = best_projection_subspace(K, k, tol)
    bl, lo = best_section_subspace(K, k, tol)
    return IntrinsicRadii(k, u, lo, bu, bl)


# ---------------------------------------------------------------------------
# inscribed radius of a multi-plank


def complement_cells(V: np.ndarray):
    """Halfspace systems (A, b) of the shifted cells v_j + A_{-V}^j.

    With d = v_j' - v_j the cell is {x : <x, d> <= -|d|^2 / 2 for all j' != j}.
    """
    cells = []
    for j in range(len(V)):
        D = np.delete(V, j, axis=0) - V[j]
        cells.append((D, -0.5 * np.einsum("ij,ij->i", D, D)))
    return cells


def clearance(P, X) -> np.ndarray:
    """Distance from each point (in the multi-plank's frame) to the complement of P."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64)) - P.translation
    out = np.full(len(X), np.inf)
    for A, b in complement_cells(P.V):
        out = np.minimum(out, dist_to_polyhedron(X, A, b))
    return out


def multiplank_inscribed_radius(P, seeds: int = 400, seed: int = 0) -> tuple[float, np.ndarray]:
    """Numerically maximise the radius of a ball inside P.

    Seeds: the origin, the generators and their pairwise midpoints, and random
    points in the ball of radius 2 r(V); the best few are polished by Nelder-Mead.
    Returns (radius, center) in the multi-plank's own frame.
    """
    V = P.V
    n = P.dim
    r = P.inradius
    rng = np.random.default_rng(seed)
    mids = ((V[:, None, :] + V[None, :, :]) / 2).reshape(-1, n)
    rand = rng.normal(size=(seeds, n))
    rand *= (2 * r * rng.random(seeds) ** (1 / n) / np.linalg.norm(rand, axis=1))[:, None]
    S = np.vstack([np.zeros((1, n)), V, 0.5 * V, mids, rand]) + P.translation
    vals = clearance(P, S)
    order = np.argsort(-vals, kind="stable")
    best_val, best_x = float(vals[order[0]]), S[order[0]]
    for idx in order[:3]:
        res = minimize(lambda x: -clearance(P, x)[0], S[idx], method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 300 * n})
        if -res.fun > best_val:
            best_val, best_x = float(-res.fun), res.x
    return best_val, best_x - P.translation
