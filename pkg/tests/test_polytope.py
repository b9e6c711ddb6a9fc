import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bandbounds.algebra import specialize_lambda
from bandbounds.floquet import Period, charpoly
from bandbounds.polytope import (
    CoprimalityError,
    DegeneratePolygonError,
    LatticePolygon,
    area2,
    bounds_report,
    convex_hull,
    diamond,
    minkowski_sum,
    mixed_volume,
    newton_polytope,
)

from conftest import seeded

SQUARE = LatticePolygon.hull_of([(0, 0), (1, 0), (0, 1), (1, 1)])
UNIT_DIAMOND = diamond(1, 1)

points = st.lists(st.tuples(st.integers(-6, 6), st.integers(-6, 6)), min_size=1, max_size=12)


def brute_minkowski(p, r):
    return LatticePolygon.hull_of((a[0] + b[0], a[1] + b[1]) for a in p.vertices for b in r.vertices)


def brute_contains(poly_pts, p):
    # p lies in the hull iff adding it does not change the hull
    return set(convex_hull(list(poly_pts) + [p])) == set(convex_hull(poly_pts))


def test_hull_examples():
    assert newton_polytope([(0, 0), (1, 0), (0, 1), (1, 1)]) == SQUARE
    assert area2(SQUARE) == 2
    single = newton_polytope([(5, 7)])
    assert single.degenerate and single.vertices == ((5, 7),)
    with pytest.raises(ValueError):
        newton_polytope([])


def test_collinear_points_are_dropped():
    assert len(LatticePolygon.hull_of([(0, 0), (1, 0), (2, 0), (2, 2), (0, 2)]).vertices) == 4
    seg = LatticePolygon.hull_of([(0, 0), (1, 1), (3, 3)])
    assert seg.vertices == ((0, 0), (3, 3)) and area2(seg) == 0


def test_minkowski_examples():
    assert minkowski_sum(SQUARE, SQUARE) == LatticePolygon.hull_of([(0, 0), (2, 0), (0, 2), (2, 2)])
    assert minkowski_sum(SQUARE, LatticePolygon.hull_of([(3, -1)])) == SQUARE.translate((3, -1))
    octagon = minkowski_sum(SQUARE, UNIT_DIAMOND)
    expected = [(-1, 0), (0, -1), (1, -1), (2, 0), (2, 1), (1, 2), (0, 2), (-1, 1)]
    assert octagon == LatticePolygon.hull_of(expected) == brute_minkowski(SQUARE, UNIT_DIAMOND)
    assert set(octagon.vertices) == set(expected)


@given(points, points)
def test_minkowski_matches_brute_force(a, b):
    p, r = LatticePolygon.hull_of(a), LatticePolygon.hull_of(b)
    assert minkowski_sum(p, r) == brute_minkowski(p, r)


@given(points)
def test_contains_matches_hull_membership(pts):
    poly = LatticePolygon.hull_of(pts)
    for x in range(-7, 8, 3):
        for y in range(-7, 8, 3):
            assert poly.contains((x, y)) == brute_contains(pts, (x, y))


def test_mixed_volume_examples():
    assert mixed_volume(SQUARE, SQUARE) == 2
    assert mixed_volume(SQUARE, UNIT_DIAMOND) == 4
    assert mixed_volume(diamond(4, 3), diamond(4, 3)) == 48
    assert area2(diamond(4, 3)) == 48
    with pytest.raises(DegeneratePolygonError):
        mixed_volume(LatticePolygon.hull_of([(0, 0), (2, 1)]), SQUARE)


def _random_polygon(r: random.Random) -> LatticePolygon:
    while True:
        p = LatticePolygon.hull_of((r.randint(-5, 5), r.randint(-5, 5)) for _ in range(r.randint(3, 9)))
        if not p.degenerate:
            return p


def test_mixed_volume_self_equals_twice_volume():
    r = random.Random(0)
    for _ in range(100):
        p = _random_polygon(r)
        assert mixed_volume(p, p) == area2(p)


def test_mixed_volume_monotone_and_symmetric():
    r = random.Random(1)
    for _ in range(100):
        inner, other = _random_polygon(r), _random_polygon(r)
        outer = LatticePolygon.hull_of(list(inner.vertices) + [(r.randint(-8, 8), r.randint(-8, 8))])
        assert mixed_volume(inner, other) <= mixed_volume(outer, other)
        assert mixed_volume(inner, other) == mixed_volume(other, inner)


@given(points, points, st.tuples(st.integers(-5, 5), st.integers(-5, 5)))
def test_mixed_volume_translation_invariant(a, b, v):
    p, r = LatticePolygon.hull_of(a), LatticePolygon.hull_of(b)
    if p.degenerate or r.degenerate:
        return
    assert mixed_volume(p.translate(v), r) == mixed_volume(p, r)


@pytest.mark.parametrize("q", [(4, 3), (5, 3)])
def test_newton_polygon_of_specialized_charpoly_is_diamond(q):
    poly = specialize_lambda(charpoly(seeded(*q, seed=1)), 0)
    n = newton_polytope(poly)
    assert n == diamond(*q)
    assert set(n.vertices) == {(q[1], 0), (0, q[0]), (-q[1], 0), (0, -q[0])}
    assert mixed_volume(n, n) == 4 * q[0] * q[1]


@pytest.mark.parametrize(
    "q, expected",
    [((4, 3), (48, 105, 110, 196)), ((5, 3), (60, 132, 156, 256)), ((5, 4), (80, 177, 182, 324)), ((7, 4), (112, 249, 306, 484))],
)
def test_bounds_table(q, expected):
    report = bounds_report(Period(*q))
    assert tuple(v for _, v in report.items()) == expected
    assert bounds_report(Period(q[1], q[0])).bezout_appendix == expected[2]


def test_bounds_geometric_route_agrees():
    p = seeded(4, 3, 2)
    assert bounds_report(p.period, charpoly(p)).bkk_geometric == 48


def test_bounds_require_coprime_periods():
    with pytest.raises(CoprimalityError, match="coprime"):
        bounds_report(Period(4, 6))
