"""Dense univariate polynomials over Q (coefficient lists, lowest degree first).

Only what the reduction steps need: gcd, square-free decomposition and
rational roots.
"""

from __future__ import annotations

import math
from fractions import Fraction

Poly = list[Fraction]


def trim(a) -> Poly:
    a = [Fraction(c) for c in a]
    while a and a[-1] == 0:
        a.pop()
    return a


def degree(a: Poly) -> int:
    return len(trim(a)) - 1


def add(a: Poly, b: Poly) -> Poly:
    n = max(len(a), len(b))
    return trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def sub(a: Poly, b: Poly) -> Poly:
    return add(a, [-c for c in b])


def mul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return trim(out)


def deriv(a: Poly) -> Poly:
    return trim([i * a[i] for i in range(1, len(a))])


def divmod_poly(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    a = trim(a)
    b = trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    while len(r) >= len(b) and r:
        k = len(r) - len(b)
        c = r[-1] / b[-1]
        q[k] = c
        for i, bc in enumerate(b):
            r[i + k] -= c * bc
        r = trim(r)
    return trim(q), r


def monic(a: Poly) -> Poly:
    a = trim(a)
    return [c / a[-1] for c in a] if a else a


def gcd(a: Poly, b: Poly) -> Poly:
    a, b = trim(a), trim(b)
    while b:
        a, b = b, divmod_poly(a, b)[1]
    return monic(a)


def evaluate(a: Poly, t) -> Fraction:
    acc = Fraction(0)
    for c in reversed(a):
        acc = acc * t + c
    return acc


def squarefree_decomposition(a: Poly) -> list[tuple[Poly, int]]:
    """Yun's algorithm: monic pairwise coprime square-free factors with multiplicity."""
    a = monic(a)
    if len(a) <= 1:
        return []
    out = []
    b = gcd(a, deriv(a))
    c = divmod_poly(a, b)[0]
    d = sub(divmod_poly(deriv(a), b)[0], deriv(c))
    i = 1
    while len(c) > 1:
        g = gcd(c, d)
        if len(g) > 1:
            out.append((g, i))
        c = divmod_poly(c, g)[0]
        d = sub(divmod_poly(d, g)[0], deriv(c))
        i += 1
    return out


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    i = 1
    while i * i <= n:
        if n % i == 0:
            small.append(i)
            if i * i != n:
                large.append(n // i)
        i += 1
    return small + large[::-1]


def rational_roots(a: Poly) -> list[Fraction]:
    """Distinct rational roots, ascending."""
    a = trim(a)
    roots = set()
    while a and a[0] == 0:
        roots.add(Fraction(0))
        a = a[1:]
    if len(a) <= 1:
        return sorted(roots)
    den = math.lcm(*(c.denominator for c in a))
    ints = [int(c * den) for c in a]
    for pn in _divisors(ints[0]):
        for qd in _divisors(ints[-1]):
            for s in (1, -1):
                t = Fraction(s * pn, qd)
                if t not in roots and evaluate(a, t) == 0:
                    roots.add(t)
    return sorted(roots)


def single_root(a: Poly) -> Fraction | None:
    """If monic ``a`` of degree m equals (t - r)^m, return r."""
    a = monic(a)
    m = len(a) - 1
    if m < 1:
        return None
    r = -a[m - 1] / m
    p = [Fraction(1)]
    for _ in range(m):
        p = mul(p, [-r, Fraction(1)])
    return r if p == a else None
