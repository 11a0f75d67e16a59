import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.optimize import minimize

from multiplank.geom import (
    Fan,
    GeometryError,
    PolytopeBody,
    affine_rank,
    as_points,
    chebyshev_ball,
    circumcenter,
    convex_hull_2d,
    dist_to_fan,
    dist_to_polyhedron,
    min_enclosing_ball,
    polygon_area,
)
from multiplank.tolerance import Membership, Tolerance

coords = st.floats(-10, 10, allow_nan=False, allow_infinity=False).map(lambda v: round(v, 6))


def point_sets(n, lo=1, hi=8):
    return st.integers(lo, hi).flatmap(lambda m: arrays(np.float64, (m, n), elements=coords))


def brute_meb(P):
    """Smallest of the candidate balls spanned by 1..n+1 points that contain everything."""
    n = P.shape[1]
    best = (None, math.inf)
    for size in range(1, n + 2):
        for S in itertools.combinations(range(len(P)), size):
            Q = P[list(S)]
            if size == 1:
                c = Q[0]
            else:
                A = Q[1:] - Q[0]
                if np.linalg.matrix_rank(A, tol=1e-9) < size - 1:
                    continue
                lam = np.linalg.solve(2 * A @ A.T, np.einsum("ij,ij->i", A, A))
                c = Q[0] + A.T @ lam
            r = np.linalg.norm(Q - c, axis=1).max()
            if r < best[1] and np.all(np.linalg.norm(P - c, axis=1) <= r * (1 + 1e-12) + 1e-12):
                best = (c, r)
    return best


# -- tolerance ---------------------------------------------------------------


def test_tolerance_ordering_enforced():
    Tolerance(1e-10, 1e-5)
    with pytest.raises(ValueError):
        Tolerance(1e-5, 1e-6)
    with pytest.raises(ValueError):
        Tolerance(0.0, 1e-6)


def test_membership_banding():
    assert Membership.from_margin(1e-3, 1e-9) is Membership.INSIDE
    assert Membership.from_margin(-1e-3, 1e-9) is Membership.OUTSIDE
    assert Membership.from_margin(1e-12, 1e-9) is Membership.BOUNDARY
    assert Membership.BOUNDARY.contained(closed=True)
    assert not Membership.BOUNDARY.contained(closed=False)


def test_as_points_rejects_bad_input():
    with pytest.raises(GeometryError):
        as_points([])
    with pytest.raises(GeometryError):
        as_points([[0, 0], [1, 2, 3]])
    with pytest.raises(GeometryError):
        as_points([[0, np.nan]])


# -- minimum enclosing ball --------------------------------------------------


def test_meb_examples():
    b = min_enclosing_ball([[1, 0], [-1, 0]])
    assert np.allclose(b.center, 0) and b.radius == pytest.approx(1)
    b = min_enclosing_ball([[0.3, 0.7]])
    assert np.allclose(b.center, [0.3, 0.7]) and b.radius == 0
    tri = [[0, 0], [1, 0], [0.5, math.sqrt(3) / 2]]
    # oracle: dense grid minimisation of the max distance, refined
    T = np.array(tri)
    g = np.linspace(0, 1, 201)
    G = np.stack(np.meshgrid(g, g), -1).reshape(-1, 2)
    f = np.linalg.norm(G[:, None] - T[None], axis=2).max(axis=1)
    res = minimize(lambda c: np.linalg.norm(T - c, axis=1).max(), G[np.argmin(f)], method="Nelder-Mead",
                   options={"xatol": 1e-12, "fatol": 1e-14})
    assert min_enclosing_ball(tri).radius == pytest.approx(res.fun, abs=1e-8)
    assert min_enclosing_ball(tri).radius == pytest.approx(1 / math.sqrt(3), abs=1e-12)


def test_meb_errors():
    with pytest.raises(GeometryError):
        min_enclosing_ball([])
    with pytest.raises(GeometryError):
        min_enclosing_ball([[0, 0], [1, 1, 1]])


def test_meb_deterministic_and_order_independent_radius(rng):
    P = rng.normal(size=(40, 3))
    a, b = min_enclosing_ball(P), min_enclosing_ball(P.copy())
    assert np.array_equal(a.center, b.center) and a.radius == b.radius
    c = min_enclosing_ball(P[::-1])
    assert c.radius == pytest.approx(a.radius, abs=1e-12)


@given(point_sets(2))
def test_meb_matches_brute_force_2d(P):
    ball = min_enclosing_ball(P)
    _, r = brute_meb(P)
    assert ball.radius == pytest.approx(r, rel=1e-9, abs=1e-9)
    assert np.all(np.linalg.norm(P - ball.center, axis=1) <= ball.radius + 1e-9)


@given(point_sets(3, hi=6))
def test_meb_matches_brute_force_3d(P):
    assert min_enclosing_ball(P).radius == pytest.approx(brute_meb(P)[1], rel=1e-9, abs=1e-9)


@given(point_sets(2, lo=2), arrays(np.float64, (2,), elements=coords))
def test_meb_monotone_under_insertion(P, q):
    assert min_enclosing_ball(np.vstack([P, q])).radius >= min_enclosing_ball(P).radius - 1e-9


@given(point_sets(2, lo=3))
def test_meb_center_in_hull(P):
    c = min_enclosing_ball(P).center
    H = PolytopeBody.polygon(P)
    scale = max(1.0, float(np.abs(P).max()))
    if len(H.b) < 3:
        # collinear input: the center is the midpoint of the extreme pair
        assert np.linalg.norm(c - H.vertices.mean(axis=0)) <= 1e-9 * scale
    else:
        assert dist_to_polyhedron(c[None], H.A, H.b)[0] <= 1e-9 * scale


# -- chebyshev ball ----------------------------------------------------------


def test_chebyshev_examples():
    b = chebyshev_ball(PolytopeBody.box([-1, -1], [1, 1]))
    assert np.allclose(b.center, 0, atol=1e-9) and b.radius == pytest.approx(1)
    tri = PolytopeBody.polygon([[0, 0], [1, 0], [0.5, math.sqrt(3) / 2]])
    assert chebyshev_ball(tri).radius == pytest.approx(1 / (2 * math.sqrt(3)), abs=1e-9)
    with pytest.raises(GeometryError):
        chebyshev_ball(PolytopeBody.polygon([[0, 0], [1, 1]]))


def test_chebyshev_3d_box():
    b = chebyshev_ball(PolytopeBody.box([0, 0, 0], [2, 4, 6]))
    assert b.radius == pytest.approx(1)


@given(arrays(np.float64, (7, 2), elements=coords))
def test_chebyshev_shrink_grow(P):
    K = PolytopeBody.polygon(P)
    if len(K.b) < 3 or polygon_area(K.vertices) < 1e-2:
        return
    b = chebyshev_ball(K)
    eps = 1e-6
    slack = K.b - K.A @ b.center
    assert np.all(slack >= b.radius - eps)          # shrunk ball inside
    assert np.any(slack < b.radius + eps + 1e-9)    # grown ball pokes out


# -- affine structure --------------------------------------------------------


def test_affine_rank_examples():
    assert affine_rank([[0, 0], [1, 0], [2, 0]]) == 1
    assert affine_rank([[0, 0], [1, 0], [0, 1]]) == 2
    assert affine_rank([[5, 5]]) == 0


def test_circumcenter_examples():
    assert np.allclose(circumcenter([[0, 0], [2, 0], [0, 2]]), [1, 1])
    c = circumcenter([[0, 0], [1, 0], [0.5, math.sqrt(3) / 2]])
    assert np.allclose(c, [0.5, math.sqrt(3) / 6])
    with pytest.raises(GeometryError):
        circumcenter([[0, 0], [1, 1], [2, 2]])
    # a triangle in space: the center lies in its plane
    c3 = circumcenter([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert np.allclose(c3, [1 / 3] * 3)


@given(arrays(np.float64, (3, 2), elements=coords))
def test_circumcenter_equidistant(T):
    if affine_rank(T) < 2 or abs(np.linalg.det(np.c_[T, np.ones(3)])) < 1e-3:
        return
    c = circumcenter(T)
    d = np.linalg.norm(T - c, axis=1)
    assert np.ptp(d) <= 1e-9 * max(1.0, d.max())


# -- hulls -------------------------------------------------------------------


def brute_extreme(P):
    """Points that are not in the convex hull of the others (LP feasibility)."""
    from scipy.optimize import linprog

    keep = []
    for i in range(len(P)):
        Q = np.delete(P, i, axis=0)
        res = linprog(np.zeros(len(Q)), A_eq=np.vstack([Q.T, np.ones(len(Q))]), b_eq=np.append(P[i], 1),
                      bounds=[(0, None)] * len(Q), method="highs")
        if res.status != 0:
            keep.append(i)
    return keep


def test_hull_examples():
    H = convex_hull_2d([[0, 0], [1, 0], [1, 1], [0, 1], [0.5, 0.5]])
    assert len(H) == 4
    H = convex_hull_2d([[0, 0], [1, 0], [2, 0]])
    assert sorted(map(tuple, H)) == [(0.0, 0.0), (2.0, 0.0)]
    t = 2 * np.pi * np.arange(8) / 8
    C = np.c_[np.cos(t), np.sin(t)]
    H = convex_hull_2d(C[::-1])
    ang = np.unwrap(np.arctan2(H[:, 1], H[:, 0]))
    assert len(H) == 8 and np.all(np.diff(ang) > 0)


@given(st.integers(3, 50).flatmap(lambda m: arrays(np.float64, (m, 2), elements=st.integers(-20, 20).map(float))))
def test_hull_matches_brute_force(P):
    P = np.unique(P, axis=0)
    if len(P) < 3 or affine_rank(P) < 2:
        return
    H = convex_hull_2d(P)
    expected = {tuple(P[i]) for i in brute_extreme(P)}
    assert {tuple(h) for h in H} == expected
    assert polygon_area(H) > 0   # counterclockwise


# -- polytopes ---------------------------------------------------------------


def test_polytope_body_consistency(rng):
    K = PolytopeBody.polygon(rng.normal(size=(12, 2)))
    assert np.all(K.A @ K.vertices.T <= K.b[:, None] + 1e-9)
    K3 = PolytopeBody.from_points(rng.normal(size=(12, 3)))
    assert np.all(K3.A @ K3.vertices.T <= K3.b[:, None] + 1e-9)
    assert K3.has_interior() and K3.bounded
    H = PolytopeBody.from_halfspaces([[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]],
                                     [1, 1, 2, 2, 3, 3])
    assert len(H.vertices) == 8
    U = PolytopeBody.from_halfspaces([[1, 0], [0, 1]], [1, 1])
    assert not U.bounded
    with pytest.raises(GeometryError):
        chebyshev_ball(U)


@given(arrays(np.float64, (2,), elements=coords))
def test_dist_to_polyhedron_matches_projection(x):
    K = PolytopeBody.polygon([[0, 0], [2, 0], [3, 1], [1, 2], [-1, 1]])
    d = dist_to_polyhedron(x[None], K.A, K.b)[0]
    res = minimize(lambda y: np.sum((y - x) ** 2), K.vertices.mean(axis=0), method="SLSQP",
                   constraints=[{"type": "ineq", "fun": lambda y: K.b - K.A @ y}],
                   options={"ftol": 1e-14, "maxiter": 500})
    assert d == pytest.approx(math.sqrt(max(res.fun, 0)), abs=1e-6)


def test_dist_to_unbounded_polyhedron():
    A = np.array([[1.0, 0.0]])
    b = np.array([-1.0])
    assert dist_to_polyhedron(np.array([[3.0, 5.0]]), A, b)[0] == pytest.approx(4)
    assert dist_to_polyhedron(np.array([[-3.0, 5.0]]), A, b)[0] == 0


# -- fans --------------------------------------------------------------------


def test_dist_to_fan_examples():
    assert dist_to_fan([0.2, -0.1], Fan((0.2, -0.1), 3)) == 0
    assert dist_to_fan([3, 4], Fan((0, 0), 2, 0.0)) == pytest.approx(4)
    assert dist_to_fan([-1, 0], Fan((0, 0), 3, 0.0)) == pytest.approx(math.sin(math.pi / 3))


def test_fan_validation():
    with pytest.raises(GeometryError):
        Fan((0, 0), 1)
    with pytest.raises(GeometryError):
        Fan((0, 0, 0), 3)
    assert Fan((0, 0), 5).half_angle == pytest.approx(math.pi / 5)
