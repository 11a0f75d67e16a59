"""Multi-planks: generating sets, membership, inradius and constructions.

A multi-plank is never stored as a region. It is the generating set ``V``
(centered so that its minimum enclosing ball sits at the origin), a
translation, and an open/closed flag; every question about it is answered by
evaluating membership predicates.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from . import kernels
from .geom import (
    Ball,
    GeometryError,
    PolytopeBody,
    affine_rank,
    as_points,
    chebyshev_ball,
    min_enclosing_ball,
)
from .tolerance import DEFAULT_TOL, Membership, Tolerance

BANG_PLANK_CAP = 12


def _dedupe(P: np.ndarray, eps: float) -> np.ndarray:
    keep = [0]
    for i in range(1, len(P)):
        if np.min(np.linalg.norm(P[keep] - P[i], axis=1)) > eps:
            keep.append(i)
    return P[keep]


@dataclass(frozen=True, eq=False)
class GeneratingSet:
    """A finite point set together with its minimum enclosing ball.

    Coincident points (within ``eps_geom``) are merged, keeping the first.
    """

    points: np.ndarray
    meb: Ball = field(init=False)
    tol: Tolerance = DEFAULT_TOL

    def __post_init__(self):
        P = as_points(self.points)
        scale = max(1.0, float(np.abs(P).max()))
        P = _dedupe(P, self.tol.eps_geom * scale)
        if len(P) < 2:
            raise GeometryError("a generating set needs at least 2 distinct points")
        P.setflags(write=False)
        object.__setattr__(self, "points", P)
        object.__setattr__(self, "meb", min_enclosing_ball(P, self.tol))

    @property
    def m(self) -> int:
        return len(self.points)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def radius(self) -> float:
        return self.meb.radius

    @property
    def is_centered(self) -> bool:
        return float(np.linalg.norm(self.meb.center)) <= self.tol.eps_geom * max(1.0, self.radius) * 10

    @property
    def rank(self) -> int:
        return affine_rank(self.points, self.tol)

    def __repr__(self):
        return f"GeneratingSet(m={self.m}, dim={self.dim}, r={self.radius:.6g})"


def center(points, tol: Tolerance = DEFAULT_TOL) -> tuple[GeneratingSet, np.ndarray]:
    """Translate ``points`` so their minimum enclosing ball is origin-centered.

    Returns the centered set and the shift that was added to every point.
    """
    P = as_points(points)
    if len(P) < 2:
        raise GeometryError("centering needs at least 2 points")
    shift = -min_enclosing_ball(P, tol).center
    gen = GeneratingSet(P + shift, tol=tol)
    # second pass absorbs the round-off of the first MEB
    residual = gen.meb.center
    if np.any(residual != 0):
        gen = GeneratingSet(gen.points - residual, tol=tol)
        shift = shift - residual
    return gen, shift


class MultiPlank:
    """Translate of the open (or closed) centered multi-plank generated by ``gen``."""

    def __init__(self, gen: GeneratingSet, translation=None, closed: bool = False):
        if not isinstance(gen, GeneratingSet):
            gen = GeneratingSet(gen)
        if not gen.is_centered:
            raise GeometryError("generating set must be centered; use center() first")
        self.gen = gen
        t = np.zeros(gen.dim) if translation is None else np.asarray(translation, dtype=np.float64)
        if t.shape != (gen.dim,):
            raise GeometryError("translation dimension mismatch")
        self.translation = t
        self.closed = bool(closed)
        self.tol = gen.tol

    @classmethod
    def from_points(cls, points, translation=None, closed: bool = False, tol: Tolerance = DEFAULT_TOL):
        """Center ``points`` and build the multi-plank they generate."""
        gen, _ = center(points, tol)
        return cls(gen, translation, closed)

    @property
    def V(self) -> np.ndarray:
        return self.gen.points

    @property
    def dim(self) -> int:
        return self.gen.dim

    @property
    def rank(self) -> int:
        return self.gen.rank

    @property
    def inradius(self) -> float:
        return self.gen.radius

    def _local(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.dim:
            raise GeometryError(f"point dimension {X.shape[1]} != multi-plank dimension {self.dim}")
        return X - self.translation

    def margin(self, X) -> np.ndarray:
        """Signed membership margin: positive inside, negative outside."""
        return kernels.plank_margin(self.V, self._local(X))

    def cell_margin(self, X) -> np.ndarray:
        """Margin computed from the shifted anti-Voronoi cells of -V."""
        return kernels.cell_margin(self.V, self._local(X))

    def classify(self, X, via: str = "definition") -> np.ndarray:
        """Vectorised membership: array of Membership values (as ints)."""
        g = self.margin(X) if via == "definition" else self.cell_margin(X)
        eps = self.tol.eps_geom
        return np.where(g > eps, 1, np.where(g < -eps, -1, 0)).astype(np.int8)

    def covers(self, X) -> np.ndarray:
        c = self.classify(X)
        return (c >= 0) if self.closed else (c > 0)

    def __repr__(self):
        kind = "closed" if self.closed else "open"
        return f"MultiPlank({kind}, m={self.gen.m}, rank={self.rank}, r={self.inradius:.6g})"


def contains(P: MultiPlank, x) -> Membership:
    """Membership of ``x`` by the defining inequality.

    For every j some j' must satisfy |y| < |y - v_j + v_j'| with y = x - translation.
    Closed multi-planks treat BOUNDARY as contained (see ``Membership.contained``).
    """
    return Membership(int(P.classify(x)[0]))


def contains_via_cells(P: MultiPlank, x) -> Membership:
    """Membership as the complement of the shifted cells v_j + A_{-V}^j."""
    return Membership(int(P.classify(x, via="cells")[0]))


def anti_voronoi_indices(V, x, tol: Tolerance = DEFAULT_TOL) -> set[int]:
    """Indices j for which v_j is (within ``eps_geom``) a farthest point of V from x."""
    pts = V.points if isinstance(V, GeneratingSet) else as_points(V)
    x = np.asarray(x, dtype=np.float64)
    d = np.linalg.norm(pts - x, axis=1)
    return set(np.flatnonzero(d >= d.max() - tol.eps_geom).tolist())


def inradius(P: MultiPlank) -> float:
    return P.inradius


# ---------------------------------------------------------------------------
# simple multi-planks


def _relint_support(W: np.ndarray, tol: Tolerance) -> list[int]:
    """Indices of an affinely independent subset of W whose hull has 0 in its relative interior."""
    m = len(W)
    res = linprog(
        np.zeros(m),
        A_eq=np.vstack([W.T, np.ones(m)]),
        b_eq=np.concatenate([np.zeros(W.shape[1]), [1.0]]),
        bounds=[(0, None)] * m,
        method="highs-ds",
    )
    if res.status != 0:
        raise GeometryError("contact points do not certify the inscribed ball")
    lam = res.x
    S = [i for i in range(m) if lam[i] > 1e-12]
    # Caratheodory elimination until the support is affinely independent
    while len(S) > 1 and affine_rank(W[S], tol) < len(S) - 1:
        M = np.vstack([W[S].T, np.ones(len(S))])
        mu = np.linalg.svd(M)[2][-1]
        if not np.any(mu > 1e-14):
            mu = -mu
        pos = mu > 1e-14
        step = np.min(lam[S][pos] / mu[pos])
        new = lam[S] - step * mu
        for idx, v in zip(S, new):
            lam[idx] = v
        S = [i for i in S if lam[i] > 1e-12]
    return S


def simple_multiplank(C: PolytopeBody, k: int, closed: bool = True, tol: Tolerance = DEFAULT_TOL) -> MultiPlank:
    """Simple multi-plank of rank <= k containing C with inradius equal to r^(k)(C).

    The subspace L minimising the inradius of the projection C|L comes from the
    upper-intrinsic search; the largest k-ball c + rB of C|L provides contact
    vectors, pruned to 2..k+1 of them with c in the relative interior of their hull.
    """
    from .inradii import best_projection_subspace

    n = C.dim
    if not (1 <= k <= n):
        raise GeometryError(f"need 1 <= k <= {n}, got {k}")
    if not C.bounded:
        raise GeometryError("C must be bounded")
    basis, _ = best_projection_subspace(C, k, tol)  # (k, n) orthonormal rows
    Y = C.vertices @ basis.T
    if k == 1:
        lo, hi = float(Y.min()), float(Y.max())
        c_L = np.array([(lo + hi) / 2])
        r = (hi - lo) / 2
        W = np.array([[r], [-r]])
    else:
        if k == n:
            # basis is a rotation of the whole space
            proj = PolytopeBody(Y, C.A @ basis.T, C.b, True)
        else:
            proj = PolytopeBody.polygon(Y, tol)
        ball = chebyshev_ball(proj, tol)
        c_L, r = ball.center, ball.radius
        slack = proj.b - proj.A @ c_L - r * np.linalg.norm(proj.A, axis=1)
        active = np.flatnonzero(slack <= 10 * tol.eps_opt * max(1.0, r))
        W = r * proj.A[active] / np.linalg.norm(proj.A[active], axis=1, keepdims=True)
        W = _dedupe(W, tol.eps_geom * max(1.0, r))
        W = W[_relint_support(W, tol)]
    V = W @ basis
    gen = GeneratingSet(V, tol=tol)
    if not gen.is_centered:
        gen, _ = center(V, tol)
    return MultiPlank(gen, translation=c_L @ basis, closed=closed)


# ---------------------------------------------------------------------------
# plank unions


def plank_union_multiplank(u, tol: Tolerance = DEFAULT_TOL) -> MultiPlank:
    """Multi-plank generated by all sign combinations sum(+-u_i).

    Covers every plank {-|u_i|^2 < <x, u_i> < |u_i|^2}. A single vector gives
    that ordinary plank back.
    """
    U = as_points(u)
    if len(U) > BANG_PLANK_CAP:
        raise GeometryError(f"at most {BANG_PLANK_CAP} planks (Bang set has 2^N points)")
    if np.any(np.linalg.norm(U, axis=1) == 0):
        raise GeometryError("zero plank vector")
    signs = np.array(list(itertools.product((1.0, -1.0), repeat=len(U))))
    V = signs @ U
    gen, _ = center(V, tol)
    return MultiPlank(gen)


def plank_contains(u, X) -> np.ndarray:
    """Open ordinary plank test -|u|^2 < <x, u> < |u|^2 for rows of X."""
    u = np.asarray(u, dtype=np.float64)
    s = np.atleast_2d(X) @ u
    return np.abs(s) < u @ u
