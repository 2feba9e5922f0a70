"""Shared helpers: sympy conversions used as an independent oracle."""

from __future__ import annotations

from fractions import Fraction

import sympy as sp

from jacpair.series import Series, Space, from_text

X, Y = sp.symbols("x y", positive=True)


def to_sympy(S: Series):
    return sum((sp.Rational(c.numerator, c.denominator) * X ** sp.Rational(x.numerator, x.denominator)
                * Y ** sp.Rational(y.numerator, y.denominator) for c, x, y in S.items()), sp.Integer(0))


def from_sympy(expr, space: Space = Space.P_POLY_Y) -> Series:
    expr = sp.expand(expr)
    items = []
    for term in sp.Add.make_args(expr):
        if term == 0:
            continue
        c, rest = term.as_coeff_Mul()
        pw = rest.as_powers_dict()
        ex = Fraction(str(pw.get(X, 0)))
        ey = Fraction(str(pw.get(Y, 0)))
        items.append((Fraction(str(c)), ex, ey))
    return Series.from_terms(space, items)


def S(text: str, space: Space = Space.P_POLY_Y) -> Series:
    return from_text(text, space)


def B(text: str) -> Series:
    return from_text(text, Space.B_DESC_Y)
