"""Two multi-planks from interleaved regular polygons covering the unit disk."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

from ..geom import GeometryError
from ..multiplank import MultiPlank
from ..tolerance import DEFAULT_TOL, Tolerance

BOUNDARY_SHARE = 0.2
POLISH_STARTS = 8


@dataclass(frozen=True)
class SharpnessReport:
    N: int
    r: float
    covers_unit_disk: bool
    samples: int
    witness: np.ndarray | None = None
    min_covering_r: float | None = None


def polygon_pair(N: int, r: float) -> tuple[MultiPlank, MultiPlank]:
    """Multi-planks of N equispaced points on the radius-r circle, the second turned by pi/N."""
    a = 2 * np.pi * np.arange(N) / N
    out = []
    for phase in (0.0, math.pi / N):
        V = r * np.column_stack([np.cos(a + phase), np.sin(a + phase)])
        out.append(MultiPlank.from_points(V))
    return out[0], out[1]


def disk_samples(count: int, seed: int = 42) -> np.ndarray:
    """Area-uniform Halton points of the closed unit disk plus a share on its rim."""
    n_rim = int(count * BOUNDARY_SHARE)
    U = qmc.Halton(d=2, scramble=True, seed=seed).random(count - n_rim)
    rho, t = np.sqrt(U[:, 0]), 2 * np.pi * U[:, 1]
    rim = 2 * np.pi * (np.arange(n_rim) + 0.5) / max(n_rim, 1)
    return np.vstack([np.column_stack([rho * np.cos(t), rho * np.sin(t)]),
                      np.column_stack([np.cos(rim), np.sin(rim)])])


def _uncovered_witness(P1, P2, X, tol: Tolerance):
    eps = tol.eps_geom
    g1 = P1.margin(X)
    rest = np.flatnonzero(g1 < -eps)
    if len(rest) == 0:
        return None
    g2 = P2.margin(X[rest])
    score = np.minimum(-g1[rest], -g2)
    hit = np.flatnonzero(score > eps)
    if len(hit):
        return X[rest[hit[np.argmax(score[hit])]]]

    # near misses: push the best candidates outward with a local search
    def s(x):
        x = x / max(1.0, float(np.linalg.norm(x)))
        return -min(-P1.margin(x)[0], -P2.margin(x)[0])

    for i in np.argsort(-score, kind="stable")[:POLISH_STARTS]:
        res = minimize(s, X[rest[i]], method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 300})
        if -res.fun > eps:
            x = res.x / max(1.0, float(np.linalg.norm(res.x)))
            return x
    return None


def covers_unit_disk(N: int, r: float, budget: int = 100_000, seed: int = 42,
                     tol: Tolerance = DEFAULT_TOL, X: np.ndarray | None = None):
    """(covers, witness) for the pair at radius r, at the given sampling budget."""
    if N < 3:
        raise GeometryError("N must be at least 3")
    if not (0 < r < 1):
        raise GeometryError("r must lie in (0, 1)")
    if X is None:
        X = disk_samples(budget, seed)
    P1, P2 = polygon_pair(N, r)
    w = _uncovered_witness(P1, P2, X, tol)
    return w is None, w


def min_covering_radius(N: int, budget: int = 100_000, seed: int = 42, xtol: float = 1e-6,
                        tol: Tolerance = DEFAULT_TOL) -> float | None:
    """Bisection for the smallest covering r; None if even r close to 1 fails."""
    X = disk_samples(budget, seed)
    lo, hi = 0.25, 0.999
    if not covers_unit_disk(N, hi, X=X, tol=tol)[0]:
        return None
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if covers_unit_disk(N, mid, X=X, tol=tol)[0]:
            hi = mid
        else:
            lo = mid
    return hi


def sharpness_two_multiplanks(N: int, r: float, budget: int = 100_000, seed: int = 42,
                              bisect: bool = False, tol: Tolerance = DEFAULT_TOL) -> SharpnessReport:
    X = disk_samples(budget, seed)
    ok, w = covers_unit_disk(N, r, X=X, tol=tol)
    rmin = min_covering_radius(N, budget, seed, tol=tol) if bisect else None
    return SharpnessReport(N, r, ok, len(X), w, rmin)
