from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from jacpair.errors import JacpairError
from jacpair.newton import (
    NEG_INF, VERTICAL, component, components, edge_part, newton_polygon, prime_degree,
    primary_polynomial,
)
from jacpair.series import Series, Space, fractional_power

from conftest import B, S


def pts(poly):
    return {(Fraction(a), Fraction(b)) for a, b in poly.vertices}


def test_polygon_four_points():
    P = newton_polygon(S("y^3 + x^2*y + x"))
    assert pts(P) == {(0, 0), (0, 3), (2, 1), (1, 0)}
    assert len(P.edges) == 4


def test_polygon_segment():
    P = newton_polygon(S("x^2"))
    assert pts(P) == {(0, 0), (2, 0)}


def test_polygon_top_vertex():
    P = newton_polygon(S("x^2*y^4 + x*y^2 + 2*x*y"))
    assert (2, 4) in pts(P)


def test_polygon_rejects_floors():
    with pytest.raises(JacpairError) as e:
        newton_polygon(S("x").with_floors(-1))
    assert e.value.code == "INFINITE_SUPPORT"


def test_polygon_json():
    d = newton_polygon(S("y^3 + x^2*y + x")).to_dict()
    assert set(d) == {"vertices", "edges"}
    assert all(isinstance(v, str) for pt in d["vertices"] for v in pt)
    assert any(e["slope"] == VERTICAL for e in d["edges"])


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _inside(poly_pts, p):
    n = len(poly_pts)
    if n == 1:
        return p == poly_pts[0]
    if n == 2:
        a, b = poly_pts
        return _cross(a, b, p) == 0 and min(a, b) <= p <= max(a, b)
    return all(_cross(poly_pts[i], poly_pts[(i + 1) % n], p) >= 0 for i in range(n))


@pytest.mark.parametrize(
    "text",
    ["y^3 + x^2*y + x", "x^2*y^4 + 2*x^(3/2)*y^2 + x + x^(1/2)*y", "x^3*y^2 + x^2*y + 5", "x^4*y^6 + 3*x^3*y^4 + 3*x^2*y^2 + x"],
)
def test_polygon_convex_and_minimal(text):
    F = S(text)
    P = newton_polygon(F)
    verts = [tuple(map(Fraction, v)) for v in P.vertices]
    support = [(Fraction(x), Fraction(y)) for x, y in F.support()] + [(Fraction(0), Fraction(0))]
    assert all(_inside(verts, p) for p in support)
    for i in range(len(verts)):
        fewer = verts[:i] + verts[i + 1:]
        assert not all(_inside(fewer, p) for p in support)


def test_prime_degree_examples():
    assert prime_degree(B("x^2*y^4 + x*y^2 + 2*x*y + y^(-2)")) == Fraction(-1, 3)
    assert prime_degree(B("x*y^2 + 2*x^(5/8)*y")) == Fraction(-3, 8)
    assert prime_degree(B("x^4*y^6 + 3*x^3*y^4 + 3*x^2*y^2 + x")) == Fraction(-1, 2)
    assert prime_degree(B("x^7*y^3")) == NEG_INF


def test_component_examples():
    F = B("x^2*y^4 + x*y^2 + 2*x*y + y^(-2)")
    assert component(F, Fraction(-1, 3), 0) == B("x^2*y^4 + 2*x*y + y^(-2)")
    assert component(F, Fraction(-1, 3), Fraction(1, 2)).is_zero
    total = sum(components(F, Fraction(-1, 3)).values(), Series.zero(Space.B_DESC_Y))
    assert total == F


def test_component_prime_degree_exceeded():
    with pytest.raises(JacpairError) as e:
        component(B("x^2*y^4 + x*y^2 + 2*x*y + y^(-2)"), Fraction(-1), 0)
    assert e.value.code == "PRIME_DEGREE_EXCEEDED"


def test_primary_polynomial_examples():
    pp = primary_polynomial(B("x*y^2 + 2*x^(5/8)*y"), Fraction(-3, 8))
    assert pp.priF.drop_floors() == S("y^2 + 2*x^(-3/8)*y").with_space(pp.priF.space)
    assert (pp.mPrime, pp.d) == (1, 2)
    F = B("x^3*y^4 + 4*x^2*y^3 + 6*x*y^2 + 4*y + x^(-1)")
    pp = primary_polynomial(F, -1)
    assert pp.priF == S("y + x^(-1)").with_space(pp.priF.space)
    assert (pp.mPrime, pp.d) == (4, 1)
    pp = primary_polynomial(B("x^2*y^6"), -1)
    assert pp.priF == S("y").with_space(pp.priF.space) and pp.mPrime == 6


def test_primary_polynomial_negative_y():
    with pytest.raises(JacpairError) as e:
        primary_polynomial(B("x^2*y^4 + x*y^2 + 2*x*y + y^(-2)"), Fraction(-1, 3))
    assert e.value.code == "NOT_POLYNOMIAL"


def test_edge_part_examples():
    F = S("y^3 + x^2*y + x")
    assert edge_part(F, ((0, 3), (2, 1))) == S("y^3 + x^2*y")
    assert edge_part(F, ((2, 1), (2, 1))) == S("x^2*y")
    G = S("x^(2/5)*y^2 + x^(2/5) + x^(-1/5)*y")
    assert edge_part(G, ((Fraction(2, 5), 0), (Fraction(2, 5), 2))) == S("x^(2/5)*y^2 + x^(2/5)")
    with pytest.raises(JacpairError) as e:
        edge_part(F, ((0, 0), (2, 1)))
    assert e.value.code == "EDGE_NOT_FOUND"


def test_product_prime_degree_counterexample():
    F = B("y^2 + x^2*y + x^3*y + x^5")
    G = fractional_power(B("y + x^3"), -1, 1, depth=10)
    assert (F * G).agrees(B("y + x^2"))
    assert prime_degree((F * G).drop_floors()) == 2
    assert prime_degree(F) == 3


# -- properties -------------------------------------------------------------

small = st.fractions(min_value=-3, max_value=3, max_denominator=2).filter(lambda v: v != 0)


@st.composite
def monic_poly(draw):
    m = draw(st.integers(1, 4))
    items = [(Fraction(1), Fraction(draw(st.integers(0, 3))), m)]
    for j in range(m):
        if draw(st.booleans()):
            items.append((draw(small), Fraction(draw(st.integers(-3, 3))), j))
    return Series.from_terms(Space.B_DESC_Y, items)


@settings(max_examples=60, deadline=None)
@given(monic_poly(), st.fractions(min_value=0, max_value=2, max_denominator=3))
def test_components_partition(F, extra):
    p = prime_degree(F)
    if p == NEG_INF:
        return
    comps = components(F, p + extra)
    assert all(r <= 0 for r in comps)
    assert sum(comps.values(), Series.zero(Space.B_DESC_Y)) == F


@settings(max_examples=40, deadline=None)
@given(monic_poly(), st.sampled_from([(1, 2), (2, 3), (-1, 1), (3, 2)]))
def test_prime_degree_power_invariant(F, ab):
    a, b = ab
    p = prime_degree(F)
    if p == NEG_INF:
        return
    R = fractional_power(F, a, b, depth=6)
    # the top rows of R fix its prime degree when the floor is deep enough
    m = R.deg_y()
    known = {y: lv for y, lv in R.y_levels().items() if R.y_floor is None or y >= R.y_floor}
    m0 = known[m].deg_x()
    assert all(lv.deg_x() <= m0 + p * (m - y) for y, lv in known.items())


@settings(max_examples=40, deadline=None)
@given(monic_poly(), monic_poly())
def test_product_prime_degree_polynomials(F, G):
    pf, pg = prime_degree(F), prime_degree(G)
    pfg = prime_degree(F * G)
    assert pfg == max(pf, pg)


def test_zeroth_component_of_power():
    F = B("x^2*y^4 + 2*x^(3/2)*y^2 + x + x^(1/2)*y")
    p = prime_degree(F)
    pp = primary_polynomial(F, p)
    m, m0 = 4, Fraction(2)
    for l in (pp.d, 2 * pp.d):
        R = fractional_power(F, l, m, depth=10)
        lhs = component(R, p, 0)
        rhs = fractional_power(pp.priF.with_space(Space.B_DESC_Y), l, pp.d, depth=10).shift(m0 * l / m, 0)
        assert lhs.agrees(rhs)
