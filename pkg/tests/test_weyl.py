from fractions import Fraction
from math import factorial

import pytest
from hypothesis import assume, given, settings, strategies as st

from jacpair.errors import JacpairError
from jacpair.poisson import bracket
from jacpair.series import Series, Space
from jacpair.weyl import (
    UV, W, WeylSeries, commutator, dixmier_vertex_solve, from_poisson, from_w_form, normal_product,
    partial_w, partial_w_v, to_poisson, to_w_form, vertex_bracket_check, vertex_closed_form,
    weyl_fractional_power, weyl_inverse, weyl_trace,
)

P = Space.P_POLY_Y


def Wy(text, **kw):
    return WeylSeries.parse(text, **kw)


# -- normal ordering ---------------------------------------------------------

@pytest.mark.parametrize("a,b,want", [
    ("v", "u", "u*v + 1"),
    ("v^2", "u", "u*v^2 + 2*v"),
    ("v^2", "u^2", "u^2*v^2 + 4*u*v + 2"),
])
def test_product_law_examples(a, b, want):
    assert normal_product(Wy(a), Wy(b)) == Wy(want)


@pytest.mark.parametrize("i,j", [(1, 1), (2, 3), (3, 2), (4, 4), (5, 1)])
def test_product_law_general(i, j):
    # v^i u^j = sum_s s! C(i,s) C(j,s) u^(j-s) v^(i-s)
    from math import comb
    want = WeylSeries.from_terms(UV, [(factorial(s) * comb(i, s) * comb(j, s), j - s, i - s) for s in range(min(i, j) + 1)])
    assert normal_product(Wy(f"v^{i}"), Wy(f"u^{j}")) == want


def test_product_rejects_w_form():
    with pytest.raises(JacpairError) as e:
        normal_product(to_w_form(Wy("u*v")), Wy("u"))
    assert e.value.code == "REPRESENTATION_MISMATCH"


def test_commutator_vu():
    assert commutator(Wy("v"), Wy("u")) == WeylSeries.const(1)


# -- inverse and roots -------------------------------------------------------

def test_inverse_of_u():
    assert weyl_inverse(Wy("u")).agrees(Wy("u^(-1)"))


def test_inverse_of_uv_depth4():
    H = weyl_inverse(Wy("u*v"), 4)
    want = WeylSeries.from_terms(UV, [(factorial(s), -1 - s, -1 - s) for s in range(4)])
    assert H.agrees(want)
    assert H.u_floor == -4
    assert normal_product(Wy("u*v"), H, 4).agrees(WeylSeries.const(1))


def test_inverse_zero_rejected():
    with pytest.raises(JacpairError) as e:
        weyl_inverse(WeylSeries.zero())
    assert e.value.code == "NOT_INVERTIBLE"


def test_power_identity_and_square_root():
    F = Wy("u^2*v^2 + u*v + 3*u")
    assert weyl_fractional_power(F, 1, 1) == F
    E = weyl_fractional_power(F, 1, 2, 8)
    assert E.top_level() == Wy("u*v")
    assert normal_product(E, E, 8).agrees(F)


def test_power_bad_exponent():
    with pytest.raises(JacpairError) as e:
        weyl_fractional_power(Wy("u^2*v + u"), 1, 2)
    assert e.value.code == "BAD_EXPONENT"


# -- w = uv ------------------------------------------------------------------

def test_w_form_examples():
    assert to_w_form(Wy("u*v")) == Wy("w", rep=W)
    assert to_w_form(Wy("u^2*v^2")) == Wy("w^2 - w", rep=W)
    with pytest.raises(JacpairError) as e:
        to_w_form(Wy("u^(1/2)*v"))
    assert e.value.code == "FRACTIONAL_U_IN_W_FORM"


def test_w_commutation():
    # w^i u^j = u^j (w + j)^i, checked through UV form
    for i, j in [(1, 1), (2, 1), (2, 3)]:
        lhs = normal_product(from_w_form(Wy(f"w^{i}", rep=W)), Wy(f"u^{j}"))
        rhs = normal_product(Wy(f"u^{j}"), from_w_form(to_w_form(normal_product(Wy("u*v") + WeylSeries.const(j), WeylSeries.const(1)) ** i)))
        assert lhs == rhs


# -- traces and derivations --------------------------------------------------

def test_trace_examples():
    assert weyl_trace(Wy("u^(-1)*v^(-1)")) == 1
    assert weyl_trace(Wy("u^2*v^2")) == 0
    vu = normal_product(Wy("v^(-1)"), Wy("u^(-1)"), 6)
    assert weyl_trace(vu) == 1
    assert weyl_trace(to_w_form(vu.with_floors(-6, -6))) == 1


def test_trace_below_floor():
    with pytest.raises(JacpairError) as e:
        weyl_trace(Wy("u^2").with_floors(0, 0))
    assert e.value.code == "BELOW_FLOOR"


def test_derivation_examples():
    assert partial_w(Wy("u*v")) == WeylSeries.const(1)
    assert partial_w(Wy("v")) == Wy("u^(-1)")
    assert partial_w(Wy("w", rep=W)) == WeylSeries.const(1, W)
    got = partial_w_v(Wy("u^(1/2)"), 2)
    assert got.agrees(Wy("1/2*u^(-1/2)*v^(-1) + 1/8*u^(-3/2)*v^(-2)"))
    assert partial_w_v(Wy("v")).is_zero
    assert partial_w_v(Wy("u")) == Wy("v^(-1)")


def test_poisson_correspondence_round_trip():
    F = Wy("u^2*v^3 - 3*u*v + 2")
    assert from_poisson(to_poisson(F)) == F
    assert to_poisson(Wy("u*v")).agrees(Series.from_terms(P, [(-1, 1, 1)]))


# -- vertex analysis ---------------------------------------------------------

def test_vertex_examples():
    s = dixmier_vertex_solve(2, 1)
    assert (s.alpha, s.beta) == (1, 0)
    s = dixmier_vertex_solve(3, 2)
    assert (s.alpha, s.beta) == (3, 1)
    # the 2x2 rows for (3, 2): alpha + 2 beta = 5, 2 alpha + 3 beta = 9
    assert s.alpha + 2 * s.beta == 5 and 2 * s.alpha + 3 * s.beta == 9


def test_vertex_grid():
    for m0 in range(2, 11):
        for m in range(1, m0):
            s = dixmier_vertex_solve(m0, m)
            assert (s.alpha, s.beta) == (Fraction(m0 * m, 2), Fraction((1 - m0) * (1 - m), 2))
            assert vertex_closed_form(m0, m) == (s.alpha, s.beta)


def test_vertex_precondition():
    with pytest.raises(JacpairError) as e:
        dixmier_vertex_solve(2, 2)
    assert e.value.code == "PRECONDITION_FAILED"


@pytest.mark.parametrize("m0,m", [(2, 1), (3, 2), (5, 2)])
def test_vertex_bracket_check(m0, m):
    v = vertex_bracket_check(m0, m, 8)
    assert v.ok, v.details


def test_vertex_wrong_alpha():
    al = dixmier_vertex_solve(3, 2).alpha
    v = vertex_bracket_check(3, 2, 8, alpha=al + 1)
    assert not v.ok


# -- properties --------------------------------------------------------------

coef = st.integers(-3, 3).filter(bool).map(Fraction)


@st.composite
def weyl_poly(draw, max_terms=4, lo=0, hi=3):
    n = draw(st.integers(1, max_terms))
    terms = [(draw(coef), draw(st.integers(lo, hi)), draw(st.integers(lo, hi))) for _ in range(n)]
    return WeylSeries.from_terms(UV, terms)


@st.composite
def laurent_weyl(draw):
    # mixed signs so the product can reach u^-1 v^-1
    return draw(weyl_poly(max_terms=3, lo=-2, hi=2)).with_floors(-8, -8)


@settings(max_examples=100, deadline=None)
@given(laurent_weyl(), laurent_weyl())
def test_trace_cyclic(H, K):
    assert weyl_trace(normal_product(H, K, 8)) == weyl_trace(normal_product(K, H, 8))


@settings(max_examples=40, deadline=None)
@given(weyl_poly(3), weyl_poly(3), weyl_poly(3))
def test_associative(A, B, C):
    assert normal_product(normal_product(A, B), C) == normal_product(A, normal_product(B, C))


@settings(max_examples=50, deadline=None)
@given(weyl_poly(5, lo=-2, hi=3))
def test_w_form_round_trip(F):
    F = F.with_floors(None, -6)
    assert from_w_form(to_w_form(F)).agrees(F)


@settings(max_examples=50, deadline=None)
@given(weyl_poly(4))
def test_w_form_round_trip_polynomial(F):
    assert from_w_form(to_w_form(F)) == F


@settings(max_examples=40, deadline=None)
@given(weyl_poly(3), weyl_poly(3))
def test_leibniz_derivations(A, B):
    AB = normal_product(A, B)
    for D in (partial_w, partial_w_v):
        lhs = D(AB, 8)
        rhs = normal_product(D(A, 8), B, 8) + normal_product(A, D(B, 8), 8)
        assert lhs.agrees(rhs)


@st.composite
def homogeneous(draw):
    d = draw(st.integers(1, 4))
    n = draw(st.integers(1, 3))
    terms = []
    for _ in range(n):
        i = draw(st.integers(0, d))
        terms.append((draw(coef), i, d - i))
    return WeylSeries.from_terms(UV, terms)


@settings(max_examples=50, deadline=None)
@given(homogeneous(), homogeneous())
def test_top_degree_matches_poisson(F, G):
    assume(not F.is_zero and not G.is_zero)
    dF = max(u + v for _, u, v in F.items())
    dG = max(u + v for _, u, v in G.items())
    C = commutator(F, G)
    top = WeylSeries.from_terms(UV, [(c, u, v) for c, u, v in C.items() if u + v == dF + dG - 2])
    assert to_poisson(top) == bracket(to_poisson(F), to_poisson(G))


@pytest.mark.parametrize("F", ["u^2*v^2 + u", "u^3*v^2 + u*v + 2*u^2"])
@pytest.mark.parametrize("a,b", [(1, 1), (2, 1), (1, 2), (3, 2), (-1, 2), (-3, 2)])
def test_trace_power_times_derivative_vanishes(F, a, b):
    F = Wy(F)
    E = weyl_fractional_power(F, a, b, 10)
    assert weyl_trace(normal_product(E, partial_w(F), 10)) == 0


@st.composite
def monic_leading(draw):
    lead = WeylSeries.monomial(1, 4, draw(st.integers(0, 3)))
    return lead + draw(weyl_poly(3, lo=0, hi=3))


@settings(max_examples=30, deadline=None)
@given(monic_leading(), st.integers(-2, 3), st.integers(1, 3))
def test_powers_commute(F, a, b):
    Fa = weyl_fractional_power(F, a, 1, 6)
    Fb = weyl_fractional_power(F, b, 1, 6)
    assert commutator(Fa, Fb, 6).is_zero


@settings(max_examples=30, deadline=None)
@given(monic_leading())
def test_inverse_property(F):
    H = weyl_inverse(F, 6)
    assert normal_product(F, H, 6).agrees(WeylSeries.const(1))
    assert normal_product(H, F, 6).agrees(WeylSeries.const(1))
