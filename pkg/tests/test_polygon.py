import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lumenlens.polygon import (canonical_ccw, clip_convex, polygon_area, polygon_intersection_area,
                               signed_area)

UNIT = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float)


def ellipse_quad(rng):
    ang = np.sort(rng.uniform(0, 2 * np.pi, 4))
    A = rng.uniform(-0.6, 0.6, (2, 2)) + np.diag([0.5, 0.5])
    return rng.uniform(-0.3, 0.3, 2) + np.column_stack([np.cos(ang), np.sin(ang)]) @ A.T


def inside(pts, poly):
    # sign-agnostic convex containment, independent of the package
    poly = np.asarray(poly)
    s = []
    for k in range(len(poly)):
        a, b = poly[k], poly[(k + 1) % len(poly)]
        s.append((b[0] - a[0]) * (pts[:, 1] - a[1]) - (b[1] - a[1]) * (pts[:, 0] - a[0]))
    s = np.array(s)
    return np.all(s >= 0, axis=0) | np.all(s <= 0, axis=0)


def raster_area(polys, rng, n=1_000_000):
    lo = np.max([p.min(axis=0) for p in polys], axis=0)
    hi = np.min([p.max(axis=0) for p in polys], axis=0)
    if np.any(hi <= lo):
        return 0.0, 0.0
    pts = rng.uniform(lo, hi, (n, 2))
    hit = np.ones(n, dtype=bool)
    for p in polys:
        hit &= inside(pts, p)
    return hit.mean() * np.prod(hi - lo), hit.mean()


def test_unit_square_area():
    assert polygon_area(UNIT) == 1.0
    assert signed_area(UNIT) == 1.0
    assert signed_area(UNIT[::-1]) == -1.0


def test_collinear_area_is_zero():
    assert polygon_area([[0, 0], [1, 1], [2, 2], [3, 3]]) == 0.0
    assert polygon_area([[0, 0], [1, 1]]) == 0.0


def test_random_quad_area_matches_rasterisation():
    rng = np.random.default_rng(3)
    q = ellipse_quad(rng)
    est, _ = raster_area([q], rng)
    assert abs(polygon_area(q) - est) / est < 0.005


def test_bowtie_order_is_repaired():
    a, b, c, d = UNIT
    np.testing.assert_array_equal(canonical_ccw([a, c, b, d]), canonical_ccw(UNIT))
    assert signed_area(canonical_ccw([a, c, b, d])) == pytest.approx(1.0)


def test_identical_square_intersection():
    s = 0.004
    sq = UNIT * s
    assert polygon_intersection_area(sq, sq) == pytest.approx(s * s, rel=1e-12)


def test_disjoint_is_zero():
    assert polygon_intersection_area(UNIT, UNIT + [3, 0]) == 0.0
    assert polygon_intersection_area(UNIT, UNIT + [1, 0]) == 0.0  # shared edge only


@pytest.mark.parametrize("half, expected", [(0.5, 0.25), (1.0, 1.0)])
def test_square_centred_on_corner(half, expected):
    # PD of side s=1 with corner at the origin; spot of side 2*half centred there
    spot = np.array([[-half, -half], [half, -half], [half, half], [-half, half]])
    exact = polygon_intersection_area(spot, UNIT)
    assert exact == pytest.approx(expected, rel=1e-12)
    est, _ = raster_area([spot, UNIT], np.random.default_rng(5))
    assert abs(exact - est) / est < 0.005


def test_clip_against_cw_input_is_tolerated_by_intersection():
    tri = np.array([[0.5, -1], [2, 0.5], [0.5, 2]])
    assert polygon_intersection_area(tri[::-1], UNIT[::-1]) == pytest.approx(
        polygon_intersection_area(tri, UNIT))


def test_clip_convex_empty_result():
    assert clip_convex(UNIT + [5, 5], UNIT).shape == (0, 2)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_intersection_properties(seed):
    rng = np.random.default_rng(seed)
    a, b = ellipse_quad(rng), ellipse_quad(rng)
    ab = polygon_intersection_area(a, b)
    assert ab == pytest.approx(polygon_intersection_area(b, a), abs=1e-12)
    assert -1e-15 <= ab <= min(polygon_area(a), polygon_area(b)) + 1e-12
    assert polygon_intersection_area(a, a) == pytest.approx(polygon_area(a), rel=1e-12)
    # rigid shift changes nothing
    t = rng.uniform(-5, 5, 2)
    assert polygon_intersection_area(a + t, b + t) == pytest.approx(ab, abs=1e-12)
