"""Step-one reduction: edge relations, vertex descent, straightening.

A pair (F, G) in P_POLY_Y is pushed by y-shifts and monomial changes of
variables until F's rightmost edge is vertical and the pair has the shape

    F = x^{m/(m+n)} (f + lower x-powers),  G = x^{n/(m+n)} (g + lower x-powers).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import JacpairError
from .newton import VERTICAL, Edge, edge_slope, newton_polygon
from .poisson import AutoLog, AutoStep, apply_auto, bracket
from .series import Series, Space, as_rat, rational_power
from . import univariate as up

POWER_RELATION = "POWER_RELATION"
QJ_RELATION = "QJ_RELATION"
SINGLE_FACTOR_SHIFT = "SINGLE_FACTOR_SHIFT"
MAX_MULTIPLICITY = "MAX_MULTIPLICITY"

Point = tuple[Fraction, Fraction]


def _pt(v) -> Point:
    return (as_rat(v[0]), as_rat(v[1]))


def _slope_pq(edge: Edge) -> tuple[int, int]:
    """Slope of a rising edge as ``(p, q)`` with slope ``q/p`` (p = 0 when vertical)."""
    if edge.slope == VERTICAL:
        return 0, 1
    s = Fraction(edge.slope)
    if s <= 0:
        raise JacpairError("VERTEX_INVALID", f"edge slope {s} is not positive")
    return s.denominator, s.numerator


def _exceeds(p: int, q: int, num, den) -> bool:
    """``q/p > num/den`` on the extended reals (zero denominators mean +inf)."""
    if p == 0:
        return den != 0
    if den == 0:
        return False
    return Fraction(q, p) > Fraction(num) / Fraction(den)


# --------------------------------------------------------------------------
# edges


def descending_edge(F: Series, vertex) -> Edge:
    """The polygon edge running from ``vertex`` down and to the left.

    In counter-clockwise order this is the edge that arrives at ``vertex``.
    """
    v = _pt(vertex)
    poly = newton_polygon(F)
    if v not in poly.vertices:
        raise JacpairError("VERTEX_INVALID", f"{v} is not a vertex of the Newton polygon")
    for e in poly.edges:
        if e.end == v and e.start[1] < v[1] and e.start[0] <= v[0]:
            return e
    raise JacpairError("VERTEX_INVALID", f"no descending edge at {v}")


def _on_line(F: Series, top: Point, p: int, q: int, low_y=None) -> Series:
    keep = []
    for c, x, y in F.items():
        if y > top[1] or (low_y is not None and y < low_y):
            continue
        if q * (top[0] - x) == p * (top[1] - y):
            keep.append((c, x, y))
    return Series.from_terms(F.space, keep)


def edge_polynomial(F: Series, top: Point, p: int, q: int) -> up.Poly:
    """Coefficients of the edge through ``top`` as a polynomial in t = x^{p/q} y."""
    L = _on_line(F, top, p, q)
    out = [Fraction(0)] * (int(top[1]) + 1)
    for c, _, y in L.items():
        if y.denominator != 1 or y < 0:
            raise JacpairError("VERTEX_INVALID", "edge carries non-polynomial y-powers")
        out[int(y)] = c
    return up.trim(out)


@dataclass(frozen=True)
class EdgeRelation:
    case: str
    data: Fraction
    FL: Series
    GL: Series

    def to_dict(self) -> dict:
        key = "exponent" if self.case == POWER_RELATION else "J"
        return {"case": self.case, key: str(self.data), "FL": self.FL.to_dict(), "GL": self.GL.to_dict()}


def _top_coeff(S: Series) -> Fraction:
    lv = S.y_levels()[S.deg_y()]
    return lv.coeff(lv.deg_x(), 0)


def _ratio(F: Series, G: Series) -> Fraction:
    return G.deg_y() / F.deg_y()


def test_edge_relation(F: Series, G: Series, edge) -> EdgeRelation:
    """Decide whether G's matching edge is a power of F's or forms a QJ pair with it."""
    edge = _as_edge(edge)
    top = edge.end if edge.end[1] >= edge.start[1] else edge.start
    low = edge.start if top is edge.end else edge.end
    p, q = _slope_pq(edge)
    r = _ratio(F, G)
    FL = _on_line(F, top, p, q, low[1])
    GL = _on_line(G, (top[0] * r, top[1] * r), p, q)
    if FL.is_zero or GL.is_zero:
        raise JacpairError("NO_RELATION", "an edge part is empty")

    a, b = r.numerator, r.denominator
    if GL**b == FL**a and rational_power(_top_coeff(FL), r) == _top_coeff(GL):
        return EdgeRelation(POWER_RELATION, r, FL, GL)

    br = bracket(FL, GL)
    if br.support() == [(0, 0)]:
        return EdgeRelation(QJ_RELATION, br.coeff(0, 0), FL, GL)
    raise JacpairError(
        "NO_RELATION",
        "edge parts are neither powers nor a QJ pair",
        bracket=br.to_dict(),
    )


# --------------------------------------------------------------------------
# vertex descent


@dataclass(frozen=True)
class Descent:
    kind: str
    F: Series
    G: Series | None
    log: AutoLog
    alpha0: Fraction
    vertex: Point
    multiplicity: int
    ties: int = 1

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "alpha0": str(self.alpha0),
            "vertex": [str(self.vertex[0]), str(self.vertex[1])],
            "multiplicity": self.multiplicity,
            "ties": self.ties,
            "autoLog": self.log.to_list(),
        }


def _order_key(a: Fraction):
    return (a.numerator, a.denominator)


def _as_edge(edge) -> Edge:
    if isinstance(edge, Edge):
        return edge
    a, b = _pt(edge[0]), _pt(edge[1])
    low, top = (a, b) if a[1] <= b[1] else (b, a)
    return Edge(low, top, edge_slope(low, top))


def descend_vertex(F: Series, G: Series | None, vertex, edge=None, choice: int = 0) -> Descent:
    """Shift y to expose a lower vertex on the edge below ``vertex``.

    With ``G`` given the slope condition on the edge is checked first; with
    ``G = None`` only F's edge is used.  ``edge`` overrides the edge found by
    :func:`descending_edge`.  When several roots share the maximal
    multiplicity they are ordered by (numerator, denominator) and ``choice``
    picks one; ``Descent.ties`` reports how many there were.
    """
    v = _pt(vertex)
    m0, m = v
    if not (0 < m0 < m and m >= 2):
        raise JacpairError("VERTEX_INVALID", f"vertex {v} needs 0 < m0 < m, m >= 2")
    edge = descending_edge(F, v) if edge is None else _as_edge(edge)
    p, q = _slope_pq(edge)
    if G is not None:
        r = _ratio(F, G)
        n0, n = m0 * r, m * r
        if not _exceeds(p, q, m + n - 1, m0 + n0 - 1):
            raise JacpairError("VERTEX_INVALID", "edge slope does not exceed the critical slope")
    phi = edge_polynomial(F, v, p, q)
    e = Fraction(-p, q)
    mi = int(m)

    def shifted(alpha: Fraction) -> tuple[Series, Series | None, AutoLog]:
        if alpha == 0:
            return F, G, AutoLog()
        step = AutoStep.shift(alpha, e)
        log = AutoLog((step,))
        return apply_auto(log, F), (apply_auto(log, G) if G is not None else None), log

    root = up.single_root(phi)
    if root is not None:
        if root == 0:
            raise JacpairError("VERTEX_INVALID", "edge part is a monomial")
        F2, G2, log = shifted(root)
        return Descent(SINGLE_FACTOR_SHIFT, F2, G2, log, root, v, mi, 1)

    sqf = up.squarefree_decomposition(phi)
    top_mult = max(k for _, k in sqf)
    cands = []
    for g, k in sqf:
        if k == top_mult:
            cands.extend(up.rational_roots(g))
    if not cands:
        raise JacpairError("IRRATIONAL_ROOT", "no rational root of maximal multiplicity", multiplicity=top_mult)
    cands.sort(key=_order_key)
    if not 0 <= choice < len(cands):
        raise JacpairError("VERTEX_INVALID", f"choice {choice} out of range for {len(cands)} tied roots")
    alpha = cands[choice]
    F2, G2, log = shifted(alpha)
    new_v = (m0 - (m - top_mult) * Fraction(p, q), Fraction(top_mult))
    if top_mult == 1:
        raise JacpairError(
            "DIVISIBILITY_CONTRADICTION",
            "descent reached a vertex of height 1",
            vertex=[str(new_v[0]), str(new_v[1])],
        )
    if not (0 < new_v[0] < new_v[1] < m):
        raise JacpairError("VERTEX_INVALID", f"new vertex {new_v} violates 0 < m0 < m")
    return Descent(MAX_MULTIPLICITY, F2, G2, log, alpha, new_v, top_mult, len(cands))


# --------------------------------------------------------------------------
# straightening


def straighten(F: Series, G: Series, edge) -> tuple[Series, Series, AutoLog]:
    """Make an edge of slope q/p vertical by ``x^i y^j -> x^{(qi - pj)/(q-p)} y^j``."""
    if isinstance(edge, Edge):
        p, q = _slope_pq(edge)
    else:
        s = as_rat(edge)
        p, q = s.denominator, s.numerator
    if p == 0:
        return F, G, AutoLog()
    if not q > p >= 0:
        raise JacpairError("VERTEX_INVALID", f"straightening needs q > p >= 0, got {q}/{p}")
    log = AutoLog((AutoStep.monomial(p, q),))
    return apply_auto(log, F), apply_auto(log, G), log


# --------------------------------------------------------------------------
# normalized pairs


def _poly_of_level(S: Series) -> up.Poly:
    out = []
    for c, _, y in S.items():
        k = int(y)
        while len(out) <= k:
            out.append(Fraction(0))
        out[k] = c
    return up.trim(out)


def _poly_series(a: up.Poly) -> Series:
    return Series.from_terms(Space.P_POLY_Y, [(c, 0, k) for k, c in enumerate(a) if c])


@dataclass(frozen=True)
class NormalizedPair:
    F: Series
    G: Series
    m: int
    n: int
    f: up.Poly
    g: up.Poly
    J: Fraction
    N: int
    tailDepth: int

    @property
    def a(self) -> Fraction:
        return Fraction(self.m, self.m + self.n)

    @property
    def b(self) -> Fraction:
        return Fraction(self.n, self.m + self.n)

    def tails(self) -> tuple[dict[int, up.Poly], dict[int, up.Poly]]:
        """``{i: f_i}`` and ``{i: g_i}`` keyed by level i (x-power shifted by -i/N)."""

        def split(S: Series, top: Fraction) -> dict[int, up.Poly]:
            out: dict[int, up.Poly] = {}
            for x, lv in S.x_levels().items():
                i = (top - x) * self.N
                if i > 0:
                    out[int(i)] = _poly_of_level(lv)
            return out

        return split(self.F, self.a), split(self.G, self.b)

    def to_dict(self) -> dict:
        return {
            "F": self.F.to_dict(),
            "G": self.G.to_dict(),
            "m": self.m,
            "n": self.n,
            "f": [str(c) for c in self.f],
            "g": [str(c) for c in self.g],
            "J": str(self.J),
            "N": self.N,
            "tailDepth": self.tailDepth,
        }

    @staticmethod
    def from_dict(d: dict) -> "NormalizedPair":
        try:
            F = Series.from_dict(d["F"], Space.P_POLY_Y)
            G = Series.from_dict(d["G"], Space.P_POLY_Y)
        except (KeyError, TypeError) as exc:
            raise JacpairError("MALFORMED", f"bad NormalizedPair: {exc}") from exc
        return NormalizedPair.from_pair(F, G, d.get("N"))

    @staticmethod
    def from_pair(F: Series, G: Series, N: int | None = None) -> "NormalizedPair":
        """Read off m, n, f, g, J and check every invariant of the normalized shape."""
        F = F.with_space(Space.P_POLY_Y)
        G = G.with_space(Space.P_POLY_Y)
        if F.is_zero or G.is_zero:
            raise JacpairError("NOT_NORMALIZED", "F and G must be nonzero")
        a, b = F.deg_x(), G.deg_x()
        f = _poly_of_level(F.x_levels()[a])
        g = _poly_of_level(G.x_levels()[b])
        m, n = up.degree(f), up.degree(g)
        if not (2 <= m < n) or n % m == 0:
            raise JacpairError("NOT_NORMALIZED", f"need 2 <= m < n with m not dividing n, got ({m}, {n})")
        if F.x_floor is not None and F.x_floor > a or G.x_floor is not None and G.x_floor > b:
            raise JacpairError("NOT_NORMALIZED", "floors cut into the leading terms")
        if a != Fraction(m, m + n) or b != Fraction(n, m + n):
            raise JacpairError("NOT_NORMALIZED", f"leading x-powers {a}, {b} do not match m/(m+n), n/(m+n)")
        if f[-1] != 1 or g[-1] != 1:
            raise JacpairError("NOT_NORMALIZED", "f and g must be monic")
        if f[m - 1] != 0:
            raise JacpairError("NOT_NORMALIZED", "f must have vanishing subleading coefficient")
        w = up.sub(
            [c * a for c in up.mul(f, up.deriv(g))],
            [c * b for c in up.mul(up.deriv(f), g)],
        )
        if len(w) != 1:
            raise JacpairError("NOT_NORMALIZED", "top bracket of f and g is not a nonzero constant")
        grid = math.lcm(F.N, G.N, (m + n))
        if N is None:
            N = grid
        elif N % grid:
            raise JacpairError("NOT_NORMALIZED", f"N = {N} does not carry exponents with denominator {grid}")
        depth = 0
        for S, top in ((F, a), (G, b)):
            for _, x, _ in S.items():
                depth = max(depth, int((top - x) * N))
        return NormalizedPair(F, G, m, n, f, g, w[0], int(N), depth)


def _finish(F: Series, G: Series, log: AutoLog) -> tuple[NormalizedPair, AutoLog, dict]:
    """Straightened pair: shift away c1 and scale f, g to monic."""
    a = F.deg_x()
    f = _poly_of_level(F.x_levels()[a])
    m = up.degree(f)
    c1 = f[m - 1] / f[m]
    if c1 != 0:
        step = AutoStep.shift(-c1 / m, 0)
        F, G = step.apply(F), step.apply(G)
        log = log.then(step)
    lf = F.x_levels()[F.deg_x()]
    lg = G.x_levels()[G.deg_x()]
    sf = lf.coeff(0, lf.deg_y())
    sg = lg.coeff(0, lg.deg_y())
    pair = NormalizedPair.from_pair(F.scale(1 / sf), G.scale(1 / sg))
    return pair, log, {"scaleF": str(sf), "scaleG": str(sg)}


_RECOVERABLE = ("NO_RELATION", "VERTEX_INVALID", "IRRATIONAL_ROOT", "DIVISIBILITY_CONTRADICTION")


def reduce_to_normal_form(F: Series, G: Series, maxSteps: int = 64) -> tuple[NormalizedPair, AutoLog, dict]:
    """Run vertex descent and straightening until the normalized shape appears.

    Returns the normalized pair, the automorphism log (input to output, before
    the constant rescaling of F and G) and a diagnostics dict recording each
    step's polygon and the rescaling constants.  Tied maximal-multiplicity
    roots are tried in order; a branch that dead-ends is abandoned and
    recorded under ``"abandoned"``.
    """
    F = F.with_space(Space.P_POLY_Y)
    G = G.with_space(Space.P_POLY_Y)
    if not (F.is_exact and G.is_exact):
        raise JacpairError("INFINITE_SUPPORT", "reduction needs exact polynomials")
    m = F.deg_y()
    v = (F.y_levels()[m].deg_x(), m)
    if not 0 < v[0] < v[1]:
        raise JacpairError("VERTEX_INVALID", f"top vertex {v} needs 0 < m0 < m")
    budget = [maxSteps]
    abandoned: list[dict] = []
    pair, log, steps, extra = _search(F, G, v, AutoLog(), [], budget, abandoned)
    return pair, log, {"steps": steps, "abandoned": abandoned, **extra}


def _search(F, G, v, log, steps, budget, abandoned):
    reshifts = 0
    while True:
        if budget[0] <= 0:
            raise JacpairError("STEP_LIMIT", "step budget exhausted", steps=steps)
        budget[0] -= 1
        edge = descending_edge(F, v)
        rel = test_edge_relation(F, G, edge)
        entry = {
            "vertex": [str(v[0]), str(v[1])],
            "polygon": newton_polygon(F).to_dict(),
            "edge": edge.to_dict(),
            "relation": rel.case,
        }
        steps = steps + [entry]
        if rel.case == QJ_RELATION:
            F, G, slog = straighten(F, G, edge)
            pair, log, extra = _finish(F, G, log.then(*slog.steps))
            return pair, log, steps, extra
        res = descend_vertex(F, G, v)
        entry["descent"] = res.to_dict()
        if res.kind == SINGLE_FACTOR_SHIFT:
            F, G = res.F, res.G
            log = log.then(*res.log.steps)
            reshifts += 1
            if reshifts > math.lcm(F.N, G.N) * int(v[1]):
                raise JacpairError("STEP_LIMIT", "too many single-factor shifts at one vertex", steps=steps)
            continue
        first_err = None
        for k in range(res.ties):
            alt = res if k == 0 else descend_vertex(F, G, v, choice=k)
            try:
                return _search(alt.F, alt.G, alt.vertex, log.then(*alt.log.steps), steps, budget, abandoned)
            except JacpairError as exc:
                if exc.code not in _RECOVERABLE or res.ties == 1:
                    raise
                abandoned.append({"vertex": entry["vertex"], "alpha0": str(alt.alpha0), "error": exc.code})
                first_err = first_err or exc
        raise first_err


__all__ = [
    "POWER_RELATION",
    "QJ_RELATION",
    "SINGLE_FACTOR_SHIFT",
    "MAX_MULTIPLICITY",
    "EdgeRelation",
    "Descent",
    "NormalizedPair",
    "descending_edge",
    "edge_polynomial",
    "test_edge_relation",
    "descend_vertex",
    "straighten",
    "reduce_to_normal_form",
]
