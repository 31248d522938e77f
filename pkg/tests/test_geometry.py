import math

import numpy as np
import pytest

from dynsample import geometry as geo
from dynsample.errors import DegenerateInputError, DimensionError


# ---------------------------------------------------------------------------
# hammersley


def radical_inverse_oracle(i, base):
    # digit-string reversal, independent of the implementation's arithmetic
    digits = []
    while i > 0:
        digits.append(i % base)
        i //= base
    return sum(d * base ** -(k + 1) for k, d in enumerate(digits))


def test_hammersley_single_point_is_origin():
    assert np.array_equal(geo.hammersley(1, 3), np.zeros((1, 3)))


def test_hammersley_first_coordinate_is_i_over_n():
    pts = geo.hammersley(4, 1)
    assert np.array_equal(pts[:, 0], [0.0, 0.25, 0.5, 0.75])


def test_hammersley_4x2_matches_radical_inverse_oracle():
    pts = geo.hammersley(4, 2)
    expected = np.array([[i / 4, radical_inverse_oracle(i, 2)] for i in range(4)])
    assert np.array_equal(pts, expected)
    assert np.array_equal(pts, [[0, 0], [0.25, 0.5], [0.5, 0.25], [0.75, 0.75]])


def test_hammersley_deterministic_and_distinct():
    a = geo.hammersley(50, 4)
    b = geo.hammersley(50, 4)
    assert np.array_equal(a, b)
    assert len({tuple(p) for p in a}) == 50


def test_hammersley_dimension_bounds():
    with pytest.raises(DimensionError):
        geo.hammersley(10, 8)
    with pytest.raises(DimensionError):
        geo.hammersley(10, 0)


def test_hammersley_oracle_higher_bases():
    pts = geo.hammersley(20, 4)
    for i in range(20):
        for j, base in enumerate((2, 3, 5), start=1):
            assert pts[i, j] == pytest.approx(radical_inverse_oracle(i, base), abs=0)


# ---------------------------------------------------------------------------
# corners and face centers


def test_corner_and_face_points_d2():
    pts = geo.corner_and_face_points(2)
    assert pts.shape == (8, 2)
    expected = {(0, 0), (1, 0), (0, 1), (1, 1), (0, 0.5), (1, 0.5), (0.5, 0), (0.5, 1)}
    assert {tuple(p) for p in pts} == expected


def test_corner_and_face_points_d3_count():
    assert geo.corner_and_face_points(3).shape == (14, 3)


def test_corner_and_face_points_d1_degenerate():
    pts = geo.corner_and_face_points(1)
    assert pts.shape == (4, 1)
    assert {tuple(p) for p in geo.dedup_points(pts)} == {(0.0,), (1.0,)}


# ---------------------------------------------------------------------------
# circumcenter


def test_circumcenter_right_triangle():
    c, r = geo.circumcenter(np.array([[0.0, 0], [1, 0], [0, 1]]))
    assert np.allclose(c, [0.5, 0.5])
    assert r == pytest.approx(math.sqrt(0.5))


def test_circumcenter_1d_midpoint():
    c, r = geo.circumcenter(np.array([[0.0], [2.0]]))
    assert c[0] == pytest.approx(1.0)
    assert r == pytest.approx(1.0)


def test_circumcenter_equilateral_matches_linear_system_oracle():
    pts = np.array([[0.0, 0], [2, 0], [1, math.sqrt(3)]])
    c, r = geo.circumcenter(pts)
    # oracle: |c - p_i|^2 equal for all i, solved by hand
    assert np.allclose(c, [1.0, 1.0 / math.sqrt(3)])
    assert r == pytest.approx(2.0 / math.sqrt(3))
    d = np.linalg.norm(pts - c, axis=1)
    assert d.max() - d.min() < 1e-12


def test_circumcenter_degenerate_raises():
    with pytest.raises(DegenerateInputError):
        geo.circumcenter(np.array([[0.0, 0], [1, 1], [2, 2]]))


def test_circumcenter_equidistance_random():
    rng = np.random.default_rng(0)
    for _ in range(200):
        d = int(rng.integers(2, 5))
        pts = rng.random((d + 1, d))
        try:
            c, r = geo.circumcenter(pts)
        except DegenerateInputError:
            continue
        dist = np.linalg.norm(pts - c, axis=1)
        assert (dist.max() - dist.min()) / max(r, 1e-300) < 1e-6


# ---------------------------------------------------------------------------
# convex hull


def test_hull_unit_square():
    h = geo.convex_hull(np.array([[0.0, 0], [1, 0], [0, 1], [1, 1]]))
    assert set(h.vertices) == {0, 1, 2, 3}
    assert h.volume == pytest.approx(1.0)


def test_hull_excludes_interior_point():
    h = geo.convex_hull(np.array([[0.0, 0], [1, 0], [0, 1], [1, 1], [0.5, 0.5]]))
    assert set(h.vertices) == {0, 1, 2, 3}
    assert h.volume == pytest.approx(1.0)


def test_hull_containment_random_3d():
    rng = np.random.default_rng(3)
    pts = rng.random((20, 3))
    h = geo.convex_hull(pts)
    for p in pts:
        assert geo.point_in_hull(p, h, tol=1e-9)


def test_hull_volume_against_facet_orientation_oracle():
    # oracle: a candidate facet (every d-subset) is a hull facet iff all
    # remaining points are on one side; volume by summing signed simplex
    # volumes against an arbitrary origin over the oracle facets
    from itertools import combinations

    rng = np.random.default_rng(11)
    pts = rng.random((12, 3))
    oracle_facets = []
    for tri in combinations(range(12), 3):
        a, b, c = pts[list(tri)]
        n = np.cross(b - a, c - a)
        if np.linalg.norm(n) < 1e-12:
            continue
        side = (pts - a) @ n
        others = np.delete(side, list(tri))
        if np.all(others <= 1e-9) or np.all(others >= -1e-9):
            oracle_facets.append(tri)
    centroid = pts.mean(axis=0)
    vol_oracle = sum(
        abs(np.linalg.det(pts[list(t)] - centroid)) / 6.0 for t in oracle_facets
    )
    h = geo.convex_hull(pts)
    assert h.volume == pytest.approx(vol_oracle, abs=1e-9)


def test_hull_degenerate_collinear_raises():
    with pytest.raises(DegenerateInputError):
        geo.convex_hull(np.array([[0.0, 0], [1, 1], [2, 2], [3, 3]]))


def test_hull_too_few_points_raises():
    with pytest.raises(DegenerateInputError):
        geo.convex_hull(np.array([[0.0, 0], [1, 0]]))


def test_hull_high_dim_containment():
    rng = np.random.default_rng(5)
    for d in (4, 5, 6, 7):
        pts = rng.random((25, d))
        h = geo.convex_hull(pts)
        for p in pts:
            assert geo.point_in_hull(p, h, tol=1e-8)


# ---------------------------------------------------------------------------
# delaunay / voronoi


def test_delaunay_single_triangle():
    sims = geo.delaunay(np.array([[0.0, 0], [1, 0], [0, 1]]))
    assert len(sims) == 1
    assert np.allclose(sims[0].circumcenter, [0.5, 0.5])


def test_delaunay_square_degenerate_split():
    sims = geo.delaunay(np.array([[0.0, 0], [1, 0], [0, 1], [1, 1]]))
    assert len(sims) == 2
    for s in sims:
        assert np.allclose(s.circumcenter, [0.5, 0.5], atol=1e-6)
    # empty-circumcircle: the fourth point is on, not inside, each circumball
    pts = np.array([[0.0, 0], [1, 0], [0, 1], [1, 1]])
    for s in sims:
        other = set(range(4)) - set(s.vertex_indices)
        for o in other:
            dist = np.linalg.norm(pts[o] - s.circumcenter)
            assert dist >= s.circumradius - 1e-6


def test_delaunay_empty_circumcircle_random():
    rng = np.random.default_rng(21)
    for trial in range(20):
        d = 2 if trial % 2 else 3
        n = int(rng.integers(d + 2, 30))
        pts = rng.random((n, d))
        for s in geo.delaunay(pts, rng_seed=trial):
            dist = np.linalg.norm(pts - s.circumcenter, axis=1)
            mask = dist < s.circumradius - 1e-9
            mask[list(s.vertex_indices)] = False
            assert not mask.any()


def test_voronoi_single_vertex():
    vv = geo.voronoi_vertices(np.array([[0.0, 0], [2, 0], [0, 2]]))
    assert len(vv) == 1
    vertex, defining, radius = vv[0]
    assert np.allclose(vertex, [1, 1])
    assert defining == (0, 1, 2)
    assert radius == pytest.approx(math.sqrt(2))


def test_voronoi_outside_hull_vertices_returned():
    # a thin triangle's circumcenter lies far outside the triangle
    vv = geo.voronoi_vertices(np.array([[0.0, 0], [4, 0], [2, 0.1]]))
    assert len(vv) == 1
    assert vv[0][0][1] < -10  # center at (2, -19.95), well below the hull


def test_voronoi_vertex_count_linear_in_2d():
    rng = np.random.default_rng(9)
    for n in (10, 30, 60):
        pts = rng.random((n, 2))
        assert len(geo.voronoi_vertices(pts)) <= 2 * n


# ---------------------------------------------------------------------------
# distances


def test_nearest_distance_tie_lowest_index():
    d, i = geo.nearest_distance(np.array([1.0, 1.0]), np.array([[0.0, 0], [2, 2]]))
    assert d == pytest.approx(math.sqrt(2))
    assert i == 0


def test_nearest_distance_identity():
    d, i = geo.nearest_distance(np.array([0.0, 0.0]), np.array([[0.0, 0.0]]))
    assert (d, i) == (0.0, 0)


def test_nearest_distance_345():
    d, i = geo.nearest_distance(np.array([3.0, 4.0]), np.array([[0.0, 0], [3, 0]]))
    assert d == pytest.approx(4.0)
    assert i == 1


def test_nearest_distance_empty_raises():
    with pytest.raises(ValueError):
        geo.nearest_distance(np.array([0.0]), np.empty((0, 1)))


def test_mean_pairwise_distance_1d_analytic():
    # integral of |x - y| over the unit square is 1/3
    est = geo.mean_pairwise_distance_unit_cube(1, 100_000, rng_seed=0)
    assert abs(est - 1.0 / 3.0) < 0.01


def test_mean_pairwise_distance_deterministic():
    a = geo.mean_pairwise_distance_unit_cube(3, 20_000, rng_seed=5)
    b = geo.mean_pairwise_distance_unit_cube(3, 20_000, rng_seed=5)
    assert a == b


def test_mean_pairwise_distance_rejects_tiny_sample():
    with pytest.raises(ValueError):
        geo.mean_pairwise_distance_unit_cube(2, 100)


# ---------------------------------------------------------------------------
# discrepancy property


def test_hammersley_beats_uniform_discrepancy():
    def grid_discrepancy(pts):
        counts, _, _ = np.histogram2d(
            pts[:, 0], pts[:, 1], bins=16, range=[[0, 1], [0, 1]]
        )
        return np.abs(counts / len(pts) - 1.0 / 256).max()

    d_h = grid_discrepancy(geo.hammersley(64, 2))
    rand = [
        grid_discrepancy(np.random.default_rng(s).random((64, 2))) for s in range(20)
    ]
    assert d_h < np.mean(rand)
