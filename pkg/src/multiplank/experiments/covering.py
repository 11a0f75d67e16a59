"""Sampled covering checks and the covering inequality sum r(V_i) >= r_(k)(K)."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.stats import qmc

from ..geom import GeometryError, PolytopeBody, polygon_area
from ..inradii import lower_intrinsic, upper_intrinsic
from ..multiplank import MultiPlank
from ..tolerance import DEFAULT_TOL, Tolerance

MIN_BUDGET = 1000


class CoverageError(RuntimeError):
    """Raised when an inequality is requested for a covering that was not certified."""


@dataclass
class CoveringInstance:
    K: PolytopeBody
    covers: Sequence
    k: int
    budget: int = 10**4
    seed: int = 42
    tol: Tolerance = DEFAULT_TOL

    def __post_init__(self):
        for C in self.covers:
            if C.dim != self.K.dim:
                raise GeometryError("cover and body differ in dimension")
        if self.budget < MIN_BUDGET:
            raise GeometryError(f"sample budget must be at least {MIN_BUDGET}")


@dataclass(frozen=True)
class CoverageReport:
    coverage_fraction: float
    samples: int
    budget: int
    uncovered_witness: np.ndarray | None = None


@dataclass(frozen=True)
class PantsReport:
    lhs: float
    rhs: float
    holds: bool
    terms: list = field(default_factory=list)


def sample_body(K: PolytopeBody, count: int, seed: int = 42) -> np.ndarray:
    """``count`` scrambled-Halton points of K (rejection from the bounding box)."""
    lo, hi = K.bbox()
    gen = qmc.Halton(d=K.dim, scramble=True, seed=seed)
    out, have = [], 0
    while have < count:
        U = qmc.scale(gen.random(max(2 * (count - have), 64)), lo, hi)
        U = U[K.contains(U, 0.0)]
        out.append(U)
        have += len(U)
    return np.vstack(out)[:count]


def covered_mask(covers: Sequence, X: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Union membership; points on a boundary count as covered."""
    mask = np.zeros(len(X), dtype=bool)
    for C in covers:
        rest = ~mask
        if not rest.any():
            break
        if isinstance(C, MultiPlank):
            hit = C.classify(X[rest]) >= 0
        else:
            hit = C.contains(X[rest], tol.eps_geom)
        mask[np.flatnonzero(rest)[hit]] = True
    return mask


def verify_covering(inst: CoveringInstance) -> CoverageReport:
    X = sample_body(inst.K, inst.budget, inst.seed)
    mask = covered_mask(inst.covers, X, inst.tol)
    miss = np.flatnonzero(~mask)
    witness = X[miss[0]].copy() if len(miss) else None
    return CoverageReport(float(mask.mean()), len(X), inst.budget, witness)


def cover_radius(C, k: int, tol: Tolerance = DEFAULT_TOL) -> float:
    """r(V) for a multi-plank of rank <= k, r^(k)(C) for a convex body."""
    if isinstance(C, MultiPlank):
        if C.rank > k:
            raise GeometryError(f"multi-plank of rank {C.rank} exceeds k = {k}")
        return C.inradius
    return upper_intrinsic(C, k, tol)


def verify_pants_inequality(inst: CoveringInstance, coverage: CoverageReport | None = None) -> PantsReport:
    if coverage is None:
        coverage = verify_covering(inst)
    if coverage.coverage_fraction < 1.0:
        raise CoverageError(f"covering not established: uncovered point {coverage.uncovered_witness}")
    terms = [cover_radius(C, inst.k, inst.tol) for C in inst.covers]
    lhs = float(sum(terms))
    rhs = lower_intrinsic(inst.K, inst.k, inst.tol)
    return PantsReport(lhs, rhs, lhs >= rhs - inst.tol.eps_opt, terms)


def split_polygon(K: PolytopeBody, p, u) -> tuple[PolytopeBody, PolytopeBody]:
    """Cut a polygon by the line through p with normal u into {<x-p,u> <= 0} and the rest."""
    p = np.asarray(p, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    V = K.vertices
    s = (V - p) @ u
    lo, hi = [], []
    for i in range(len(V)):
        j = (i + 1) % len(V)
        if s[i] <= 0:
            lo.append(V[i])
        if s[i] >= 0:
            hi.append(V[i])
        if s[i] * s[j] < 0:
            q = V[i] + (V[j] - V[i]) * s[i] / (s[i] - s[j])
            lo.append(q)
            hi.append(q)
    if len(lo) < 3 or len(hi) < 3:
        raise GeometryError("line does not cut the polygon")
    return PolytopeBody.polygon(lo), PolytopeBody.polygon(hi)


def chord_partition(K: PolytopeBody, chords: int, rng: np.random.Generator,
                    min_area: float = 1e-3) -> list[PolytopeBody]:
    """Split a polygon by ``chords`` random lines, each cutting the currently largest piece."""
    pieces = [K]
    for _ in range(chords):
        pieces.sort(key=lambda C: -polygon_area(C.vertices))
        C = pieces[0]
        for _attempt in range(100):
            w = rng.dirichlet(np.ones(len(C.vertices)))
            t = rng.uniform(0, np.pi)
            try:
                a, b = split_polygon(C, w @ C.vertices, [np.cos(t), np.sin(t)])
            except GeometryError:
                continue
            if min(polygon_area(a.vertices), polygon_area(b.vertices)) >= min_area:
                pieces[0:1] = [a, b]
                break
    return pieces
