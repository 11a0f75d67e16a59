"""Multi-planks and intrinsic inradii for polygonal, possibly asymmetric, gauges."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import linprog, minimize_scalar

from . import kernels
from .experiments.bang import EscapeReport, _escape
from .geom import GeometryError, PolytopeBody, as_points
from .inradii import max_chord
from .tolerance import DEFAULT_TOL, Membership, Tolerance

ANGLE_GRID = 720


class Gauge:
    """Gauge of a convex polygon B with the origin in its interior.

    B = {x : <a_e, x> <= 1} and ||x|| = max_e <a_e, x>.
    """

    def __init__(self, polygon, tol: Tolerance = DEFAULT_TOL):
        P = as_points(polygon, min_count=3)
        if P.shape[1] != 2:
            raise GeometryError("gauges are planar")
        body = PolytopeBody.polygon(P, tol)
        if len(body.b) < 3:
            raise GeometryError("gauge polygon is degenerate")
        scale = float(np.abs(body.vertices).max())
        if np.any(body.b <= tol.eps_geom * scale):
            raise GeometryError("origin must lie strictly inside the gauge polygon")
        self.body = body
        self.tol = tol
        self.A = np.ascontiguousarray(body.A / body.b[:, None])
        if np.any(np.abs(self.norms(P) - 1) > 10 * tol.eps_geom * max(1.0, scale)):
            raise GeometryError("gauge polygon must be convex and listed by its vertices")

    @classmethod
    def regular(cls, k: int = 256, radius: float = 1.0, phase: float = 0.0) -> "Gauge":
        t = phase + 2 * np.pi * np.arange(k) / k
        return cls(radius * np.column_stack([np.cos(t), np.sin(t)]))

    @property
    def vertices(self) -> np.ndarray:
        return self.body.vertices

    def norms(self, X) -> np.ndarray:
        return kernels.gauge_norms(self.A, X)

    def norm(self, x) -> float:
        return float(self.norms(np.asarray(x, dtype=np.float64)[None])[0])

    def support(self, U) -> np.ndarray:
        """h_B(u) = max over vertices of <b, u>, row-wise."""
        return (np.atleast_2d(U) @ self.vertices.T).max(axis=1)

    def __repr__(self):
        return f"Gauge({len(self.A)} edges)"


def gauge_norm(B: Gauge, x) -> float:
    return B.norm(x)


@dataclass(frozen=True)
class CenteringCertificate:
    centered: bool
    r: float
    rho: float              # smallest scale of a translate of B containing V
    t: np.ndarray           # its translation

    @property
    def violation(self):
        """(t, rho) of a strictly smaller covering homothet, if there is one."""
        return None if self.centered else (self.t, self.rho)


def min_covering_homothet(V, B: Gauge) -> tuple[float, np.ndarray]:
    """min over t of max_j ||v_j - t||, as an LP in (t, rho)."""
    V = as_points(V)
    A = B.A
    rows = np.repeat(A, len(V), axis=0)
    offs = np.tile(V, (len(A), 1))
    A_ub = np.column_stack([-rows, -np.ones(len(rows))])
    b_ub = -np.einsum("ij,ij->i", rows, offs)
    res = linprog([0, 0, 1], A_ub=A_ub, b_ub=b_ub, bounds=[(None, None)] * 3, method="highs")
    if res.status != 0:
        raise GeometryError(f"centering LP failed: {res.message}")
    return float(res.x[2]), res.x[:2]


def normed_centering_check(V, B: Gauge, r: float | None = None, tol: Tolerance = DEFAULT_TOL) -> CenteringCertificate:
    """Is V uncoverable by any translate of rho B with rho <= r - eps_opt?"""
    V = as_points(V)
    if r is None:
        r = float(B.norms(V).max())
    rho, t = min_covering_homothet(V, B)
    return CenteringCertificate(rho >= r - tol.eps_opt, r, rho, t)


def normed_center(V, B: Gauge) -> np.ndarray:
    """Translate V by the center of its smallest covering homothet of B."""
    V = as_points(V)
    return V - min_covering_homothet(V, B)[1]


class NormedMultiPlank:
    """Centered multi-plank of a gauge: its inradius is r = max ||v_j||."""

    def __init__(self, V, gauge: Gauge, tol: Tolerance = DEFAULT_TOL):
        V = as_points(V)
        if V.shape[1] != 2:
            raise GeometryError("normed multi-planks are planar")
        self.V = np.ascontiguousarray(V)
        self.gauge = gauge
        self.tol = tol
        self.r = float(gauge.norms(V).max())
        if self.r <= 0:
            raise GeometryError("generating set is the origin")
        self.certificate = normed_centering_check(V, gauge, self.r, tol)
        if not self.certificate.centered:
            raise GeometryError(
                f"not centered: V fits in {self.certificate.rho:.6g} B + {self.certificate.t}")

    @property
    def dim(self) -> int:
        return 2

    @property
    def inradius(self) -> float:
        return self.r

    def margin(self, X) -> np.ndarray:
        return kernels.gauge_plank_margin(self.V, self.gauge.A, X)

    def classify(self, X) -> np.ndarray:
        g = self.margin(X)
        eps = self.tol.eps_geom
        return np.where(g > eps, 1, np.where(g < -eps, -1, 0)).astype(np.int8)

    def __repr__(self):
        return f"NormedMultiPlank(m={len(self.V)}, r={self.r:.6g})"


def normed_contains(P: NormedMultiPlank, x) -> Membership:
    return Membership(int(P.classify(x)[0]))


# ---------------------------------------------------------------------------
# intrinsic inradii


def _check(K: PolytopeBody, k: int):
    if not K.bounded or len(K.b) == 0:
        raise GeometryError("K must be a bounded polygon")
    if K.dim != 2:
        raise GeometryError("normed inradii are planar")
    if k not in (1, 2):
        raise GeometryError("k must be 1 or 2")


def homothet_inradius(K: PolytopeBody, B: Gauge) -> float:
    """Largest r with t + rB inside K: LP <a_i, t> + r h_B(a_i) <= b_i."""
    h = B.support(K.A)
    res = linprog([0, 0, -1], A_ub=np.column_stack([K.A, h]), b_ub=K.b,
                  bounds=[(None, None)] * 2 + [(0, None)], method="highs")
    if res.status != 0:
        raise GeometryError(f"homothet LP failed: {res.message}")
    return float(res.x[2])


def _min_over_angles(f, dirs: np.ndarray) -> float:
    """Minimise f(theta) over [0, pi): grid, candidate directions, then a bounded refinement."""
    thetas = math.pi * np.arange(ANGLE_GRID) / ANGLE_GRID
    vals = np.array([f(t) for t in thetas])
    best = float(vals.min())
    for d in dirs:
        best = min(best, f(math.atan2(d[1], d[0]) % math.pi))
    i = int(np.argmin(vals))
    h = math.pi / ANGLE_GRID
    res = minimize_scalar(f, bounds=(thetas[i] - h, thetas[i] + h), method="bounded",
                          options={"xatol": 1e-12})
    return min(best, float(res.fun))


def _kink_dirs(K: PolytopeBody, B: Gauge) -> np.ndarray:
    N = np.vstack([K.A, B.A])
    return np.vstack([N, N @ np.array([[0, 1], [-1, 0]])])


def normed_lower_intrinsic(K: PolytopeBody, k: int, B: Gauge) -> float:
    _check(K, k)
    if k == 2:
        return homothet_inradius(K, B)

    def f(theta):
        u = np.array([math.cos(theta), math.sin(theta)])
        seg = 1 / B.norm(u) + 1 / B.norm(-u)   # chord of B through 0 along u
        return max_chord(K, u) / seg

    return _min_over_angles(f, _kink_dirs(K, B))


def normed_upper_intrinsic(K: PolytopeBody, k: int, B: Gauge) -> float:
    _check(K, k)
    if k == 2:
        return homothet_inradius(K, B)

    # K + line(u) is the slab of normal n, u perpendicular to n; rB fits iff r w_B(n) <= w_K(n)
    def f(theta):
        n = np.array([[math.cos(theta), math.sin(theta)], [-math.cos(theta), -math.sin(theta)]])
        wK = (K.vertices @ n.T).max(axis=0).sum()
        return float(wK / B.support(n).sum())

    return _min_over_angles(f, _kink_dirs(K, B))


def normed_farthest_escape_check(planks: Sequence[NormedMultiPlank], s,
                                 tol: Tolerance = DEFAULT_TOL) -> EscapeReport:
    """Escape check with the gauge as the distance; all planks must share one gauge."""
    if not planks:
        raise GeometryError("no multi-planks")
    B = planks[0].gauge
    if any(P.gauge is not B for P in planks):
        raise GeometryError("multi-planks use different gauges")
    return _escape([P.V for P in planks], s, B.norms, [P.margin for P in planks], tol.eps_geom)
