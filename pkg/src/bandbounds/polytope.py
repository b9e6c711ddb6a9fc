"""Lattice polygons: Newton polytopes, Minkowski sums, mixed volumes, bounds.

All geometry is exact integer arithmetic.  Areas are reported doubled
(``area2``) so they stay integral for lattice polygons.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .algebra import LaurentPoly2
from .floquet import Period

Point = tuple[int, int]

__all__ = [
    "LatticePolygon",
    "DegeneratePolygonError",
    "CoprimalityError",
    "BoundsReport",
    "convex_hull",
    "newton_polytope",
    "minkowski_sum",
    "area2",
    "mixed_volume",
    "diamond",
    "bounds_report",
]


class DegeneratePolygonError(ValueError):
    """Mixed volume requested for a polygon contained in a line."""


class CoprimalityError(ValueError):
    """The bounds are only established for coprime periods."""


def _cross(o: Point, a: Point, b: Point) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: Iterable[Point]) -> list[Point]:
    """Andrew's monotone chain; counterclockwise, collinear points dropped."""
    pts = sorted({(int(x), int(y)) for x, y in points})
    if len(pts) <= 2:
        return pts
    lower: list[Point] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 2 and hull[0] == hull[1]:
        return hull[:1]
    return hull


@dataclass(frozen=True)
class LatticePolygon:
    """Convex lattice polygon, vertices counterclockwise without collinear triples.

    One or two vertices encode a point or a segment.
    """

    vertices: tuple[Point, ...]

    @classmethod
    def hull_of(cls, points: Iterable[Point]) -> "LatticePolygon":
        hull = convex_hull(points)
        if not hull:
            raise ValueError("convex hull of an empty point set")
        return cls(_canonical(hull))

    @property
    def degenerate(self) -> bool:
        return len(self.vertices) < 3

    def translate(self, v: Point) -> "LatticePolygon":
        return LatticePolygon(_canonical([(x + v[0], y + v[1]) for x, y in self.vertices]))

    def contains(self, p: Point) -> bool:
        vs = self.vertices
        if len(vs) == 1:
            return tuple(p) == vs[0]
        if len(vs) == 2:
            a, b = vs
            return (
                _cross(a, b, p) == 0
                and min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
                and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
            )
        return all(_cross(vs[i], vs[(i + 1) % len(vs)], p) >= 0 for i in range(len(vs)))

    def __contains__(self, p) -> bool:
        return self.contains(p)


def _canonical(hull: list[Point]) -> tuple[Point, ...]:
    # start at the lowest-then-leftmost vertex so equal polygons compare equal
    if len(hull) < 3:
        return tuple(sorted(hull))
    i = min(range(len(hull)), key=lambda j: (hull[j][1], hull[j][0]))
    return tuple(hull[i:] + hull[:i])


def newton_polytope(support) -> LatticePolygon:
    """Convex hull of a support set (or of a LaurentPoly2's support)."""
    pts = support.support() if isinstance(support, LaurentPoly2) else list(support)
    if not pts:
        raise ValueError("Newton polytope of an empty support (zero polynomial)")
    return LatticePolygon.hull_of(pts)


def minkowski_sum(p: LatticePolygon, r: LatticePolygon) -> LatticePolygon:
    """Minkowski sum by merging the two counterclockwise edge sequences."""
    if p.degenerate or r.degenerate:
        return LatticePolygon.hull_of((a[0] + b[0], a[1] + b[1]) for a in p.vertices for b in r.vertices)
    a, b = list(p.vertices), list(r.vertices)  # both start at lowest-leftmost vertex
    na, nb = len(a), len(b)
    out: list[Point] = []
    i = j = 0
    while i < na or j < nb:
        out.append((a[i % na][0] + b[j % nb][0], a[i % na][1] + b[j % nb][1]))
        ea = (a[(i + 1) % na][0] - a[i % na][0], a[(i + 1) % na][1] - a[i % na][1])
        eb = (b[(j + 1) % nb][0] - b[j % nb][0], b[(j + 1) % nb][1] - b[j % nb][1])
        c = ea[0] * eb[1] - ea[1] * eb[0]
        if c >= 0 and i < na:
            i += 1
        if c <= 0 and j < nb:
            j += 1
    return LatticePolygon.hull_of(out)


def area2(p: LatticePolygon) -> int:
    """Twice the Euclidean area (shoelace); 0 for points and segments."""
    vs = p.vertices
    if len(vs) < 3:
        return 0
    s = 0
    for k in range(len(vs)):
        x0, y0 = vs[k]
        x1, y1 = vs[(k + 1) % len(vs)]
        s += x0 * y1 - x1 * y0
    return abs(s)


def mixed_volume(p: LatticePolygon, r: LatticePolygon) -> int:
    """MV(P, R) = V(P + R) - V(P) - V(R), so that MV(P, P) = 2 V(P)."""
    for poly in (p, r):
        if poly.degenerate:
            raise DegeneratePolygonError(
                f"mixed volume needs two-dimensional polygons; got vertices {poly.vertices}"
            )
    twice = area2(minkowski_sum(p, r)) - area2(p) - area2(r)
    if twice % 2:
        raise ArithmeticError("mixed volume of lattice polygons must be an integer")
    return twice // 2


def diamond(q1: int, q2: int) -> LatticePolygon:
    """Hull of (+-q2, 0) and (0, +-q1): the Newton polygon of the Floquet charpoly."""
    return LatticePolygon.hull_of([(q2, 0), (0, q1), (-q2, 0), (0, -q1)])


@dataclass(frozen=True)
class BoundsReport:
    q1: int
    q2: int
    bkk: int
    bezout_improved: int
    bezout_appendix: int
    bezout_original: int
    bkk_geometric: Optional[int] = field(default=None)

    def as_dict(self) -> dict:
        return {
            "q1": self.q1,
            "q2": self.q2,
            "bkk": self.bkk,
            "bezout_improved": self.bezout_improved,
            "bezout_appendix": self.bezout_appendix,
            "bezout_original": self.bezout_original,
            "bkk_geometric": self.bkk_geometric,
        }

    def items(self):
        return [
            ("bkk", self.bkk),
            ("bezout_improved", self.bezout_improved),
            ("bezout_appendix", self.bezout_appendix),
            ("bezout_original", self.bezout_original),
        ]


def bounds_report(period: Period, charpoly_support=None) -> BoundsReport:
    """Closed-form level-set cardinality bounds for a coprime period.

    When a charpoly (or its support) is given, the BKK bound is also computed
    as MV(N, N) of its actual Newton polygon and must equal ``4 q1 q2``.
    """
    if not period.coprime:
        raise CoprimalityError(
            f"the bounds assume coprime periods; gcd({period.q1}, {period.q2}) != 1"
        )
    q1, q2 = period.q1, period.q2
    hi, lo = period.descending()
    geometric = None
    if charpoly_support is not None:
        n = newton_polytope(charpoly_support)
        geometric = mixed_volume(n, n)
        if geometric != 4 * q1 * q2:
            raise ArithmeticError(f"MV(N, N) = {geometric} differs from 4 q1 q2 = {4 * q1 * q2}")
    return BoundsReport(
        q1=q1,
        q2=q2,
        bkk=4 * q1 * q2,
        bezout_improved=9 * q1 * q2 - 3,
        bezout_appendix=(2 * hi + lo) * (2 * hi + lo - 1),
        bezout_original=4 * (q1 + q2) ** 2,
        bkk_geometric=geometric,
    )
