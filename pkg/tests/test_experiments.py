import math

import numpy as np
import pytest

from multiplank.experiments import (
    BANG_CAP,
    CoverageError,
    CoveringInstance,
    Fan,
    bang_set,
    chord_partition,
    covers_unit_disk,
    fan_half_angle,
    fan_neighborhood_multiplank,
    farthest_escape_check,
    min_covering_radius,
    pizza_best_piece,
    pizza_bound,
    polygon_pair,
    random_fans,
    sample_body,
    sharpness_two_multiplanks,
    split_polygon,
    verify_covering,
    verify_pants_inequality,
)
from multiplank.geom import GeometryError, PolytopeBody, dist_to_fan, polygon_area
from multiplank.inradii import lower_intrinsic, upper_intrinsic
from multiplank.multiplank import MultiPlank, plank_contains, plank_union_multiplank

DISK = PolytopeBody.regular_polygon(256)


def plank(u):
    u = np.asarray(u, dtype=float)
    return MultiPlank.from_points([u, -u])


def random_centered(rng, n):
    return MultiPlank.from_points(rng.normal(size=(int(rng.integers(2, 6)), n)))


# -- Bang sets ---------------------------------------------------------------


def test_bang_examples():
    X = bang_set([[[1, 0], [-1, 0]], [[0, 1], [0, -1]]])
    assert X.points.tolist() == [[1, 1], [1, -1], [-1, 1], [-1, -1]]
    V = np.array([[0.5, 2.0], [3.0, -1.0]])
    assert np.array_equal(bang_set([V]).points, V)


def test_bang_matches_nested_loops(rng):
    sets = [rng.normal(size=(2, 3)) for _ in range(3)]
    want = [a + b + c for a in sets[0] for b in sets[1] for c in sets[2]]
    X = bang_set(sets)
    assert X.size == 8 and np.allclose(X.points, want)


def test_bang_errors():
    with pytest.raises(GeometryError):
        bang_set([np.zeros((1000, 2)), np.zeros((1001, 2))])
    assert BANG_CAP == 10**6
    with pytest.raises(GeometryError):
        bang_set([np.zeros((2, 2)), np.zeros((2, 3))])
    with pytest.raises(GeometryError):
        bang_set([])


# -- farthest-point escape ---------------------------------------------------


def test_escape_single_plank():
    rep = farthest_escape_check([plank([1, 0])], [0, 0])
    assert rep.ok and len(rep.maximizers) == 2
    assert np.allclose(np.abs(rep.margins), 0, atol=1e-12)


def test_escape_orthogonal_planks():
    P1, P2 = plank([1, 0]), plank([0, 1])
    rep = farthest_escape_check([P1, P2], [0.3, -0.2])
    assert rep.ok and len(rep.maximizers) == 1
    assert np.allclose(rep.witness, [-1.3, 1.2])
    assert np.all(rep.margins < 0)


def test_escape_random_sweep(rng):
    for _ in range(100):
        n = int(rng.choice([2, 3]))
        planks = [random_centered(rng, n) for _ in range(int(rng.integers(1, 5)))]
        s = rng.normal(size=n) * 2
        assert farthest_escape_check(planks, s).ok


def test_escape_rejects_translated():
    P = MultiPlank.from_points([[1, 0], [-1, 0]], translation=[1, 0])
    with pytest.raises(GeometryError):
        farthest_escape_check([P], [0, 0])
    with pytest.raises(GeometryError):
        farthest_escape_check([plank([1, 0])], [0, 0, 0])


# -- coverings and the covering inequality -----------------------------------


def test_overlapping_half_planes_cover_disk():
    K = DISK
    left = PolytopeBody.box([-2, -2], [0.1, 2])
    right = PolytopeBody.box([-0.1, -2], [2, 2])
    assert verify_covering(CoveringInstance(K, [left, right], 1)).coverage_fraction == 1.0


def test_thin_plank_leaves_witness():
    K = PolytopeBody.box([0, 0], [1, 1])
    P = MultiPlank.from_points([[0, 0.4], [0, -0.4]], translation=[0, 0.5])
    rep = verify_covering(CoveringInstance(K, [P], 1))
    assert rep.coverage_fraction < 1 and rep.uncovered_witness is not None
    assert abs(rep.uncovered_witness[1] - 0.5) >= 0.4
    with pytest.raises(CoverageError):
        verify_pants_inequality(CoveringInstance(K, [P], 1))


def test_plank_union_covers_sampled_union():
    u = [[1, 0], [0, 1]]
    rng = np.random.default_rng(3)
    X = rng.uniform(-5, 5, (40_000, 2))
    X = X[plank_contains(u[0], X) | plank_contains(u[1], X)]
    assert np.all(plank_union_multiplank(u).classify(X) == 1)


def test_instance_validation():
    with pytest.raises(GeometryError):
        CoveringInstance(DISK, [plank([1, 0, 0])], 1)
    with pytest.raises(GeometryError):
        CoveringInstance(DISK, [plank([1, 0])], 1, budget=10)


def test_square_two_planks_equality():
    K = PolytopeBody.box([0, 0], [1, 1])
    covers = [MultiPlank.from_points([[0, 0.25], [0, -0.25]], translation=[0, y]) for y in (0.25, 0.75)]
    rep = verify_pants_inequality(CoveringInstance(K, covers, 1))
    assert rep.lhs == pytest.approx(0.5) and rep.rhs == pytest.approx(0.5, abs=1e-9) and rep.holds


def test_three_planks_over_disks():
    covers = [plank([0.5 * math.cos(a), 0.5 * math.sin(a)]) for a in np.radians([0, 60, 120])]
    K = PolytopeBody.regular_polygon(64)
    rep = verify_pants_inequality(CoveringInstance(K, covers, 1))
    assert rep.lhs == pytest.approx(1.5) and rep.rhs == pytest.approx(math.cos(math.pi / 64), abs=1e-6) and rep.holds
    rep = verify_pants_inequality(CoveringInstance(K.scale(0.5), covers, 1))
    assert rep.rhs == pytest.approx(0.5 * math.cos(math.pi / 64), abs=1e-6) and rep.holds


def test_rank_check_on_covers():
    K = PolytopeBody.box([0, 0], [1, 1])
    tri = MultiPlank.from_points([[2, 0], [-1, 1.8], [-1, -1.8]], translation=[0.5, 0.5])
    with pytest.raises(GeometryError):
        verify_pants_inequality(CoveringInstance(K, [tri], 1))
    assert verify_pants_inequality(CoveringInstance(K, [tri], 2)).holds


def test_sample_body_stays_inside():
    K = PolytopeBody.polygon([[0, 0], [3, 0], [1, 2]])
    X = sample_body(K, 2000)
    assert X.shape == (2000, 2) and np.all(K.contains(X, 1e-12))
    assert np.array_equal(X, sample_body(K, 2000))


def test_split_polygon():
    K = PolytopeBody.box([0, 0], [1, 1])
    a, b = split_polygon(K, [0.5, 0.5], [1, 0])
    assert polygon_area(a.vertices) == pytest.approx(0.5) and polygon_area(b.vertices) == pytest.approx(0.5)
    with pytest.raises(GeometryError):
        split_polygon(K, [3, 3], [1, 0])


def test_chord_partitions_are_partitions(rng):
    K = PolytopeBody.polygon(rng.normal(size=(9, 2)))
    pieces = chord_partition(K, 3, rng)
    assert len(pieces) == 4
    assert sum(polygon_area(C.vertices) for C in pieces) == pytest.approx(polygon_area(K.vertices))


@pytest.mark.parametrize("k", [1, 2])
def test_square_chord_subadditivity(rng, k):
    K = PolytopeBody.box([0, 0], [1, 1])
    for _ in range(3):
        pieces = chord_partition(K, 1, rng)
        lhs = sum(upper_intrinsic(C, k) for C in pieces)
        assert lhs >= lower_intrinsic(K, k) - 1e-6


# -- pizza -------------------------------------------------------------------


def grid_clearance(fans, h):
    """Independent brute force: dense grid of the unit disk, distances to rays in numpy."""
    g = np.arange(-1, 1 + h / 2, h)
    X = np.stack(np.meshgrid(g, g), -1).reshape(-1, 2)
    X = X[np.linalg.norm(X, axis=1) <= 1]
    f = 1 - np.linalg.norm(X, axis=1)
    for F in fans:
        for t in F.rotation + 2 * np.pi * np.arange(F.m) / F.m:
            d = np.array([math.cos(t), math.sin(t)])
            Y = X - F.apex
            s = np.clip(Y @ d, 0, None)
            f = np.minimum(f, np.linalg.norm(Y - s[:, None] * d, axis=1))
    return float(f.max())


def test_pizza_bound_values():
    assert pizza_bound(2, 1) == 0.5
    s = math.sin(math.pi / 3)
    assert pizza_bound(3, 2) == pytest.approx(s / (2 + s)) and pizza_bound(3, 2) == pytest.approx(0.302169, abs=1e-6)
    vals = [pizza_bound(m, 2) for m in (2, 3, 4, 8, 16)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    with pytest.raises(GeometryError):
        pizza_bound(1, 1)
    with pytest.raises(GeometryError):
        pizza_bound(3, 0)


def test_pizza_examples():
    assert pizza_best_piece([]).radius == pytest.approx(1)
    assert pizza_best_piece([Fan((0, 0), 2, 0.3)]).radius == pytest.approx(0.5, abs=1e-4)
    for m in (3, 4, 6):
        res = pizza_best_piece([Fan((0, 0), m, 0.0)])
        assert res.radius == pytest.approx(pizza_bound(m, 1), abs=1e-4)


def test_pizza_against_grid_oracle(rng):
    h = 2e-3
    for m, N in ((2, 2), (3, 2), (4, 3)):
        fans = random_fans(m, N, rng)
        res = pizza_best_piece(fans)
        oracle = grid_clearance(fans, h)
        assert oracle - 1e-9 <= res.radius <= oracle + h / math.sqrt(2) + 1e-9
        assert res.gap <= 1e-3 and res.radius >= pizza_bound(m, N) - res.gap


def test_pizza_center_is_consistent():
    fans = [Fan((0.2, 0.1), 3, 0.5)]
    res = pizza_best_piece(fans)
    c = res.center
    assert min(1 - np.linalg.norm(c), dist_to_fan(c, fans[0])) == pytest.approx(res.radius, abs=1e-12)


# -- fans --------------------------------------------------------------------


def test_fan_neighborhood_examples():
    P = fan_neighborhood_multiplank(Fan((0, 0), 2, 0.0), 0.3)
    assert np.allclose(sorted(P.V[:, 1]), [-0.3, 0.3]) and np.allclose(P.V[:, 0], 0, atol=1e-15)
    P = fan_neighborhood_multiplank(Fan((0, 0), 3, 0.0), 0.2)
    assert np.allclose(np.linalg.norm(P.V, axis=1), 0.2 / math.sin(math.pi / 3))
    assert P.inradius == pytest.approx(0.2 / math.sin(math.pi / 3), abs=1e-15)
    with pytest.raises(GeometryError):
        fan_neighborhood_multiplank(Fan((0.1, 0), 3), 0.2)
    with pytest.raises(GeometryError):
        fan_neighborhood_multiplank(Fan((0, 0), 3), 0.0)


@pytest.mark.parametrize("m, rbar, rot", [(2, 0.3, 0.0), (3, 0.2, 0.4), (4, 0.5, 1.0), (6, 0.1, 2.0)])
def test_fan_neighborhood_equivalence(rng, m, rbar, rot):
    F = Fan((0, 0), m, rot)
    P = fan_neighborhood_multiplank(F, rbar)
    X = rng.uniform(-3, 3, (10_000, 2))
    d = np.array([dist_to_fan(x, F) for x in X])
    g = P.classify(X)
    clear = np.abs(d - rbar) > 1e-9
    assert np.array_equal(g[clear] == 1, d[clear] < rbar)


def test_fan_half_angle_examples():
    assert fan_half_angle("m_fan", 4) == pytest.approx(math.pi / 4)
    assert fan_half_angle("regular_simplex", 3) == pytest.approx(1.23096, abs=1e-5)
    assert fan_half_angle("coxeter_A", 3) == pytest.approx(math.acos(0.25))
    assert fan_half_angle("coxeter_A", 3) == pytest.approx(1.31812, abs=1e-5)


def test_orbit_matches_closed_form():
    for m in (2, 3, 5, 8):
        # the unit normals of an m-fan's sector walls meet at angle 2 pi / m
        t = 0.37 + 2 * np.pi * np.arange(m) / m
        assert fan_half_angle("orbit", points=np.c_[np.cos(t), np.sin(t)]) == pytest.approx(math.pi / m, abs=1e-9)
    # the vertices of a regular tetrahedron seen from its center
    T = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]])
    assert fan_half_angle("orbit", points=T) == pytest.approx(math.acos(-1 / 3) / 2, abs=1e-12)


def test_fan_half_angle_errors():
    with pytest.raises(GeometryError):
        fan_half_angle("m_fan", 1)
    with pytest.raises(GeometryError):
        fan_half_angle("icosahedral", 3)
    with pytest.raises(GeometryError):
        fan_half_angle("orbit")
    with pytest.raises(GeometryError):
        fan_half_angle("regular_simplex", 2.5)


# -- sharpness ---------------------------------------------------------------


def test_polygon_pair_shape():
    P1, P2 = polygon_pair(10, 0.6)
    assert P1.inradius == pytest.approx(0.6) and P2.inradius == pytest.approx(0.6)
    a1 = np.sort(np.arctan2(P1.V[:, 1], P1.V[:, 0]) % (2 * np.pi))
    a2 = np.sort(np.arctan2(P2.V[:, 1], P2.V[:, 0]) % (2 * np.pi))
    assert np.allclose((a2 - a1) % (2 * np.pi), math.pi / 10)


def test_sharpness_examples():
    ok, witness = covers_unit_disk(3, 0.9)
    assert ok and witness is None
    ok, witness = covers_unit_disk(10, 0.3)
    assert not ok and np.linalg.norm(witness) <= 1
    P1, P2 = polygon_pair(10, 0.3)
    assert P1.margin(witness)[0] < 0 and P2.margin(witness)[0] < 0
    with pytest.raises(GeometryError):
        covers_unit_disk(2, 0.5)
    with pytest.raises(GeometryError):
        covers_unit_disk(5, 1.0)


def test_min_covering_radius_trend():
    r10 = min_covering_radius(10, budget=20_000)
    r20 = min_covering_radius(20, budget=20_000)
    assert r10 > r20 > 0.5
    # the covering threshold for this construction is 1 / (2 cos(pi / 2N))
    assert r10 == pytest.approx(1 / (2 * math.cos(math.pi / 20)), abs=1e-4)
    rep = sharpness_two_multiplanks(10, 0.6, budget=20_000, bisect=False)
    assert rep.covers_unit_disk and rep.min_covering_r is None
