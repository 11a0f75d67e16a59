"""Farthest-point (anti-) Delaunay triangulation in the plane and the multi-plank strata.

Every triangle sigma of the triangulation is translated so its circumcenter
sits at the origin, giving S_sigma. Each cell tau of the triangulation owns a
stratum P_tau = intersection over sigma ⊃ tau of (relint T + normal cone of
S_sigma at T), where T is the copy of tau inside S_sigma. Strata of edges and
triangles make up the multi-plank; vertex strata are the shifted anti-Voronoi
cells that form its complement.

Cells are identified by sorted tuples of indices into the generating set.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .geom import GeometryError, affine_basis, affine_rank, circumcenter, convex_hull_2d_indices, polygon_area
from .multiplank import GeneratingSet, MultiPlank
from .tolerance import DEFAULT_TOL, Membership, Tolerance


@dataclass(frozen=True)
class FarthestDelaunay:
    points: np.ndarray
    vertices: list[int]                     # extreme points, counterclockwise
    cells: list[tuple[int, int, int]]       # sorted index triples
    adjacency: dict[tuple[int, int], list[int]] = field(default_factory=dict)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return sorted(self.adjacency)


def _lifted_residual(P: np.ndarray, tri: np.ndarray) -> np.ndarray:
    """Height of the plane through the lifted triangle above each lifted point.

    Points are lifted to the paraboloid z = |p|^2; a triangle is a face of the
    upper hull iff every residual is >= 0, i.e. its circumcircle holds all of P.
    """
    L = np.column_stack([tri, np.ones(3)])
    coef = np.linalg.solve(L, np.einsum("ij,ij->i", tri, tri))
    return P @ coef[:2] + coef[2] - np.einsum("ij,ij->i", P, P)


def _disjoint(t1, t2, pos) -> bool:
    # triangles on points in convex position overlap iff their vertices interleave cyclically
    a = sorted(pos[i] for i in t1)
    b = [pos[i] for i in t2]
    for s, e in ((a[0], a[1]), (a[1], a[2]), (a[2], a[0])):
        if s < e:
            inside = all(s <= x <= e for x in b)
        else:
            inside = all(x >= s or x <= e for x in b)
        if inside:
            return True
    return False


def farthest_delaunay_2d(V, tol: Tolerance = DEFAULT_TOL) -> FarthestDelaunay:
    """Anti-Delaunay triangulation of the extreme points of V.

    Valid triangles are the upper faces of the lifted point set (full-sphere
    property against all of V). Cocircular ties are broken by taking valid
    triangles greedily in lexicographic order of their sorted index triples.
    """
    P = V.points if isinstance(V, GeneratingSet) else np.asarray(V, dtype=np.float64)
    if P.ndim != 2 or P.shape[1] != 2:
        raise GeometryError("farthest_delaunay_2d is planar")
    if affine_rank(P, tol) < 2:
        raise GeometryError("generating set must have rank 2")
    hull = convex_hull_2d_indices(P, tol)
    pos = {v: i for i, v in enumerate(hull)}
    scale = max(1.0, float(np.abs(P).max()))
    band = tol.eps_geom * scale * scale

    valid = []
    for tri in itertools.combinations(sorted(hull), 3):
        T = P[list(tri)]
        if abs((T[1, 0] - T[0, 0]) * (T[2, 1] - T[0, 1]) - (T[1, 1] - T[0, 1]) * (T[2, 0] - T[0, 0])) <= band:
            continue
        if np.all(_lifted_residual(P, T) >= -band):
            valid.append(tri)

    chosen: list[tuple[int, int, int]] = []
    for tri in valid:
        if all(_disjoint(tri, c, pos) for c in chosen):
            chosen.append(tri)
    area = sum(abs(polygon_area(P[list(t)])) for t in chosen)
    if not np.isclose(area, polygon_area(P[hull]), rtol=1e-9, atol=band):
        raise GeometryError("could not assemble an anti-Delaunay triangulation")

    adjacency: dict[tuple[int, int], list[int]] = {}
    for ci, tri in enumerate(chosen):
        for e in itertools.combinations(tri, 2):
            adjacency.setdefault(e, []).append(ci)
    return FarthestDelaunay(P, hull, chosen, adjacency)


def full_sphere_violation(fd: FarthestDelaunay) -> float:
    """Largest amount by which a point of V sticks out of a cell's circumcircle."""
    worst = -np.inf
    for tri in fd.cells:
        T = fd.points[list(tri)]
        c = circumcenter(T)
        r = np.linalg.norm(T[0] - c)
        worst = max(worst, float((np.linalg.norm(fd.points - c, axis=1) - r).max()))
    return worst


# ---------------------------------------------------------------------------
# strata


@dataclass(frozen=True)
class Stratification:
    fd: FarthestDelaunay
    simplices: list[np.ndarray]              # S_sigma, rows ordered as fd.cells[i]
    circumcenters: list[np.ndarray]
    tol: Tolerance = DEFAULT_TOL

    @property
    def cells(self):
        return self.fd.cells

    def strata(self) -> list[tuple[int, ...]]:
        """All cells tau of the triangulation: vertices, edges, triangles."""
        out: list[tuple[int, ...]] = [(v,) for v in sorted(self.fd.vertices)]
        out += self.fd.edges
        out += list(self.fd.cells)
        return out

    def _copies(self, tau):
        """(sigma index, local vertex positions of tau inside S_sigma) for sigma ⊃ tau."""
        for si, tri in enumerate(self.fd.cells):
            if set(tau) <= set(tri):
                yield si, [tri.index(v) for v in tau]


def centered_simplices(fd: FarthestDelaunay, tol: Tolerance = DEFAULT_TOL) -> list[np.ndarray]:
    """Translate each cell so that its circumcenter is the origin; check they do not overlap."""
    out = []
    for tri in fd.cells:
        T = fd.points[list(tri)]
        out.append(T - circumcenter(T, tol))
    for a, b in itertools.combinations(range(len(out)), 2):
        if _triangles_overlap(out[a], out[b], tol.eps_geom * max(1.0, float(np.abs(out[a]).max()))):
            raise GeometryError(f"translated simplices {fd.cells[a]} and {fd.cells[b]} overlap")
    return out


def _triangles_overlap(T1: np.ndarray, T2: np.ndarray, eps: float) -> bool:
    # separating axis test on the edge normals; touching counts as disjoint
    for T in (T1, T2):
        for i in range(3):
            e = T[(i + 1) % 3] - T[i]
            nrm = np.array([e[1], -e[0]]) / np.linalg.norm(e)
            p1, p2 = T1 @ nrm, T2 @ nrm
            if p1.max() <= p2.min() + eps or p2.max() <= p1.min() + eps:
                return False
    return True


def stratify(V, tol: Tolerance = DEFAULT_TOL) -> Stratification:
    fd = farthest_delaunay_2d(V, tol)
    S = centered_simplices(fd, tol)
    cc = [circumcenter(fd.points[list(t)], tol) for t in fd.cells]
    return Stratification(fd, S, cc, tol)


def _ccw(T: np.ndarray) -> np.ndarray:
    a = (T[1, 0] - T[0, 0]) * (T[2, 1] - T[0, 1]) - (T[1, 1] - T[0, 1]) * (T[2, 0] - T[0, 0])
    return T if a > 0 else T[[0, 2, 1]]


def _features(strat: Stratification, X: np.ndarray):
    """Distances from X to every face of every S_sigma: list of (tau, dim, distances)."""
    feats = []
    for si, tri in enumerate(strat.fd.cells):
        T = strat.simplices[si]
        order = [0, 1, 2] if np.allclose(_ccw(T), T) else [0, 2, 1]
        Tc = T[order]
        ids = [tri[i] for i in order]
        inward = []
        for i in range(3):
            a, b = Tc[i], Tc[(i + 1) % 3]
            e = b - a
            L = np.linalg.norm(e)
            nrm = np.array([e[1], -e[0]]) / L       # outward for ccw
            s = (X - a) @ nrm
            t = (X - a) @ e / (L * L)
            inward.append(-s)
            d = np.where((t > 0) & (t < 1) & (s >= 0), s, np.inf)
            feats.append((tuple(sorted((ids[i], ids[(i + 1) % 3]))), 1, d))
        inside = np.min(np.column_stack(inward), axis=1) >= 0
        feats.append((tri, 2, np.where(inside, 0.0, np.inf)))
        for i in range(3):
            feats.append(((ids[i],), 0, np.linalg.norm(X - Tc[i], axis=1)))
    return feats


def nearest_face_strata(strat: Stratification, X) -> list[tuple[int, ...]]:
    """Cell whose face copy in the union of the S_sigma is nearest to each point.

    Ties go to the highest-dimensional face. This agrees with the stratum
    containing the point whenever all S_sigma share the nearest region, but can
    pick a vertex of a distant S_sigma (obtuse cells whose circumcenter lies
    far outside); ``classify_strata`` therefore tests the strata directly.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    feats = _features(strat, X)
    D = np.vstack([f[2] for f in feats])                 # (F, N)
    dims = np.array([f[1] for f in feats])
    dmin = D.min(axis=0)
    eps = strat.tol.eps_geom * max(1.0, float(np.abs(X).max()))
    near = D <= dmin + eps
    score = np.where(near, dims[:, None], -1)
    pick = np.argmax(score, axis=0)
    return [feats[i][0] for i in pick]


def classify_strata(strat: Stratification, X) -> list[tuple[int, ...]]:
    """Vectorised ``classify_stratum``."""
    taus, _ = _classify_with_margin(strat, X)
    return taus


def _classify_with_margin(strat: Stratification, X):
    margins = stratum_margins(strat, X)
    keys = list(margins)
    M = np.vstack([margins[k] for k in keys])
    dims = np.array([len(k) for k in keys])
    best = M.max(axis=0)
    eps = strat.tol.eps_geom
    # strata meet along boundaries; within the band prefer the highest dimension
    score = np.where(M >= best - eps, dims[:, None], -1)
    pick = np.argmax(score, axis=0)
    return [keys[i] for i in pick], M[pick, np.arange(M.shape[1])]


def classify_stratum(strat: Stratification, x) -> tuple[int, ...]:
    """The cell tau whose stratum P_tau contains x (vertex strata included)."""
    return classify_strata(strat, x)[0]


def stratum_margins(strat: Stratification, X) -> dict[tuple[int, ...], np.ndarray]:
    """Direct evaluation of each stratum as an intersection of (relint T + normal cone).

    Positive margin means strictly inside the stratum.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    out: dict[tuple[int, ...], np.ndarray] = {}
    for tau in strat.strata():
        m = np.full(len(X), np.inf)
        for si, loc in strat._copies(tau):
            T = strat.simplices[si]
            if len(tau) == 3:
                Tc = _ccw(T)
                for i in range(3):
                    e = Tc[(i + 1) % 3] - Tc[i]
                    nrm = np.array([e[1], -e[0]]) / np.linalg.norm(e)
                    m = np.minimum(m, -(X - Tc[i]) @ nrm)
            elif len(tau) == 2:
                a, b = T[loc[0]], T[loc[1]]
                c = T[3 - loc[0] - loc[1]]
                e = b - a
                L = np.linalg.norm(e)
                nrm = np.array([e[1], -e[0]]) / L
                if (c - a) @ nrm > 0:
                    nrm = -nrm
                s = (X - a) @ nrm
                t = (X - a) @ e / L
                m = np.minimum(m, np.minimum(s, np.minimum(t, L - t)))
            else:
                v = T[loc[0]]
                for j in range(3):
                    if j == loc[0]:
                        continue
                    e = T[j] - v
                    m = np.minimum(m, -(X - v) @ e / np.linalg.norm(e))
        out[tau] = m
    return out


def contains_via_strata(strat: Stratification | None, P: MultiPlank, x) -> Membership:
    return Membership(int(classify_via_strata(strat, P, x)[0]))


def classify_via_strata(strat: Stratification | None, P: MultiPlank, X) -> np.ndarray:
    """Membership from the stratification: edge and triangle strata are inside P.

    Multi-planks of rank 1 in the plane are handled through their product
    structure (a 1D segment times the orthogonal line).
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if P.dim != 2:
        raise GeometryError("stratification is implemented in the plane only")
    Y = X - P.translation
    eps = P.tol.eps_geom
    if P.rank < 2:
        _, basis = affine_basis(P.V, P.tol)
        t = Y @ basis[0]
        proj = P.V @ basis[0]
        half = (proj.max() - proj.min()) / 2
        g = half - np.abs(t - (proj.max() + proj.min()) / 2)
        return np.where(g > eps, 1, np.where(g < -eps, -1, 0)).astype(np.int8)
    if strat is None:
        strat = stratify(P.gen, P.tol)
    taus, margin = _classify_with_margin(strat, Y)
    dim = np.array([len(t) for t in taus])
    # margin is the depth inside the chosen stratum; thin ones are the band
    return np.where(margin <= eps, 0, np.where(dim >= 2, 1, -1)).astype(np.int8)
