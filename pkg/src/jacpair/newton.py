"""Supports, Newton polygons, prime degrees and p-type components."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .errors import JacpairError
from .series import Series, Space, as_rat, poly_power_root

NEG_INF = float("-inf")
VERTICAL = "VERTICAL"

Point = tuple[Fraction, Fraction]


def _rat_str(v) -> str:
    return str(as_rat(v))


@dataclass(frozen=True)
class Edge:
    start: Point
    end: Point
    slope: Fraction | str

    def to_dict(self) -> dict:
        s = self.slope if self.slope == VERTICAL else _rat_str(self.slope)
        return {
            "from": [_rat_str(self.start[0]), _rat_str(self.start[1])],
            "to": [_rat_str(self.end[0]), _rat_str(self.end[1])],
            "slope": s,
        }


def edge_slope(a: Point, b: Point) -> Fraction | str:
    dx = b[0] - a[0]
    if dx == 0:
        return VERTICAL
    return Fraction(b[1] - a[1]) / dx


@dataclass(frozen=True)
class NewtonPolygon:
    vertices: tuple[Point, ...]
    edges: tuple[Edge, ...]

    def to_dict(self) -> dict:
        return {
            "vertices": [[_rat_str(x), _rat_str(y)] for x, y in self.vertices],
            "edges": [e.to_dict() for e in self.edges],
        }

    def render(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    def contains(self, pt: Point) -> bool:
        """Closed containment test (counter-clockwise vertex order)."""
        vs = self.vertices
        if len(vs) == 1:
            return pt == vs[0]
        if len(vs) == 2:
            return _cross(vs[0], vs[1], pt) == 0 and _between(vs[0], vs[1], pt)
        for i in range(len(vs)):
            if _cross(vs[i], vs[(i + 1) % len(vs)], pt) < 0:
                return False
        return True

    def find_edge(self, a: Point, b: Point) -> Edge | None:
        for e in self.edges:
            if (e.start, e.end) in ((a, b), (b, a)):
                return e
        return None


def _cross(o: Point, a: Point, b: Point) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _between(a: Point, b: Point, p: Point) -> bool:
    return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])


def convex_hull(points) -> list[Point]:
    """Monotone chain; counter-clockwise, collinear points dropped."""
    pts = sorted(set(points))
    if len(pts) <= 1:
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
    return hull


def newton_polygon(F: Series) -> NewtonPolygon:
    if not F.is_exact:
        raise JacpairError("INFINITE_SUPPORT", "series carries a truncation floor")
    pts = [(Fraction(x), Fraction(y)) for x, y in F.support()]
    pts.append((Fraction(0), Fraction(0)))
    hull = convex_hull(pts)
    if len(hull) == 1:
        edges: list[Edge] = []
    elif len(hull) == 2:
        edges = [Edge(hull[0], hull[1], edge_slope(hull[0], hull[1]))]
    else:
        edges = [
            Edge(hull[i], hull[(i + 1) % len(hull)], edge_slope(hull[i], hull[(i + 1) % len(hull)]))
            for i in range(len(hull))
        ]
    return NewtonPolygon(tuple(hull), tuple(edges))


def edge_part(F: Series, edge) -> Series:
    """Terms of F lying on the closed segment ``edge`` of its Newton polygon.

    ``edge`` is an :class:`Edge` or a pair of points; a degenerate pair
    (both ends equal) selects a single vertex.
    """
    if isinstance(edge, Edge):
        a, b = edge.start, edge.end
    else:
        a, b = edge
    a = (as_rat(a[0]), as_rat(a[1]))
    b = (as_rat(b[0]), as_rat(b[1]))
    poly = newton_polygon(F)
    if a == b:
        if a not in poly.vertices:
            raise JacpairError("EDGE_NOT_FOUND", f"{a} is not a vertex")
    elif poly.find_edge(a, b) is None:
        raise JacpairError("EDGE_NOT_FOUND", f"{a}-{b} is not an edge")
    keep = []
    for c, x, y in F.items():
        p = (x, y)
        if _cross(a, b, p) == 0 and _between(a, b, p):
            keep.append((c, x, y))
    return Series.from_terms(F.space, keep)


# --------------------------------------------------------------------------
# prime degree and components


def _lead_data(F: Series):
    if F.is_zero:
        raise JacpairError("ZERO_SERIES", "prime degree of zero")
    levels = F.y_levels()
    m = max(levels)
    m0 = levels[m].deg_x()
    return levels, m, m0


def prime_degree(F: Series):
    """Smallest p with deg f_i <= deg f_0 + p*i, attained for some i >= 1.

    Returns ``NEG_INF`` when F is a single y-level.
    """
    levels, m, m0 = _lead_data(F)
    best = None
    for y, lv in levels.items():
        if y == m:
            continue
        cand = (lv.deg_x() - m0) / (m - y)
        if best is None or cand > best:
            best = cand
    return NEG_INF if best is None else best


def _component_index(x: Fraction, y: Fraction, m0, m, p) -> Fraction:
    return x - m0 - (m - y) * p


def components(F: Series, p) -> dict[Fraction, Series]:
    """All nonzero p-type components, keyed by the offset r."""
    p = as_rat(p)
    pf = prime_degree(F)
    if pf != NEG_INF and pf > p:
        raise JacpairError("PRIME_DEGREE_EXCEEDED", f"p(F) = {pf} > {p}")
    _, m, m0 = _lead_data(F)
    buckets: dict[Fraction, list] = {}
    for c, x, y in F.items():
        buckets.setdefault(_component_index(x, y, m0, m, p), []).append((c, x, y))
    return {
        r: Series.from_terms(F.space, ts, F.x_floor, F.y_floor) for r, ts in sorted(buckets.items(), reverse=True)
    }


def component(F: Series, p, r) -> Series:
    r = as_rat(r)
    comps = components(F, p)
    if r in comps:
        return comps[r]
    return Series.zero(F.space, F.x_floor, F.y_floor)


@dataclass(frozen=True)
class PrimaryPolynomial:
    priF: Series
    mPrime: int
    d: int
    lead: Fraction
    m0: Fraction

    def to_dict(self) -> dict:
        return {
            "priF": self.priF.to_dict(),
            "mPrime": self.mPrime,
            "d": self.d,
            "lead": str(self.lead),
            "m0": str(self.m0),
        }


def primary_polynomial(F: Series, p) -> PrimaryPolynomial:
    F0 = component(F, p, 0)
    if F0.min_y() < 0:
        raise JacpairError("NOT_POLYNOMIAL", "leading component has negative y-powers")
    levels = F0.y_levels()
    m = max(levels)
    if m.denominator != 1 or any(y.denominator != 1 for y in levels):
        raise JacpairError("NOT_POLYNOMIAL", "fractional y-powers")
    c, m0, _ = max(levels[m].items(), key=lambda t: t[1])
    base = F0.drop_floors().shift(-m0, 0, 1 / c).with_space(Space.P_POLY_Y)
    m_int = int(m)
    for k in range(m_int, 0, -1):
        if m_int % k:
            continue
        root = poly_power_root(base, k)
        if root is not None:
            return PrimaryPolynomial(root, k, m_int // k, c, m0)
    raise AssertionError("k = 1 always succeeds")
