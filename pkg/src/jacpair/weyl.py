"""Weyl algebra elements with u-before-v normal ordering.

Elements live in the completion where ``u`` may carry rational exponents and
each u-level is a Laurent series in ``v^-1``; the relation is ``[v, u] = 1``.
Two storage forms are supported: ``UV_STANDARD`` keys terms by
``(u-exponent, v-exponent)`` and ``W_FORM`` keys them by
``(u-exponent, w-exponent)`` with ``w = uv`` written to the right of ``u``.

Floors follow the same convention as :mod:`jacpair.series`: a term whose
u-exponent is below ``u_floor`` or whose second exponent is below ``v_floor``
is unknown.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .errors import JacpairError
from .series import Series, Space, _max_floor, as_rat, binom, from_text, rational_root
from .verdict import Verdict

UV = "UV_STANDARD"
W = "W_FORM"
_SPACE_NAME = {UV: "Weyl-UV", W: "Weyl-W"}
_REP_OF = {v: k for k, v in _SPACE_NAME.items()}

DEFAULT_DEPTH = 12


def _fact(n: int) -> int:
    return math.factorial(n)


def _as_int(v, what: str) -> int:
    v = as_rat(v)
    if v.denominator != 1:
        raise JacpairError("MALFORMED", f"{what} exponent {v} must be an integer")
    return int(v)


class WeylSeries:
    """Immutable truncated element; see the module docstring."""

    __slots__ = ("rep", "terms", "u_floor", "v_floor")

    def __init__(self, rep: str, terms: dict, u_floor=None, v_floor=None):
        if rep not in (UV, W):
            raise JacpairError("MALFORMED", f"unknown representation {rep!r}")
        object.__setattr__(self, "rep", rep)
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "u_floor", None if u_floor is None else as_rat(u_floor))
        object.__setattr__(self, "v_floor", None if v_floor is None else int(math.ceil(as_rat(v_floor))))

    def __setattr__(self, name, value):
        raise AttributeError("WeylSeries is immutable")

    # construction ------------------------------------------------------
    @classmethod
    def from_terms(cls, rep: str, items: Iterable, u_floor=None, v_floor=None) -> "WeylSeries":
        uf = None if u_floor is None else as_rat(u_floor)
        vf = None if v_floor is None else int(math.ceil(as_rat(v_floor)))
        acc: dict[tuple[Fraction, int], Fraction] = {}
        for c, u, v in items:
            u = as_rat(u)
            v = _as_int(v, "v" if rep == UV else "w")
            if (uf is not None and u < uf) or (vf is not None and v < vf):
                continue
            key = (u, v)
            acc[key] = acc.get(key, Fraction(0)) + as_rat(c)
        return cls(rep, {k: c for k, c in acc.items() if c != 0}, uf, vf)

    @classmethod
    def zero(cls, rep: str = UV, u_floor=None, v_floor=None) -> "WeylSeries":
        return cls(rep, {}, u_floor, v_floor)

    @classmethod
    def const(cls, c, rep: str = UV) -> "WeylSeries":
        return cls.from_terms(rep, [(c, 0, 0)])

    @classmethod
    def monomial(cls, c, u, v, rep: str = UV) -> "WeylSeries":
        return cls.from_terms(rep, [(c, u, v)])

    @classmethod
    def parse(cls, text: str, rep: str = UV, u_floor=None, v_floor=None) -> "WeylSeries":
        """Parse ``"u^2*v^2 + 4*u*v + 2"`` (use ``w`` instead of ``v`` in W form)."""
        other = "v" if rep == UV else "w"
        bad = "w" if rep == UV else "v"
        if bad in text:
            raise JacpairError("MALFORMED", f"{bad!r} does not belong in {rep}")
        S = from_text(text.replace("u", "x").replace(other, "y"), Space.B_DESC_Y)
        u_floor = S.x_floor if u_floor is None else u_floor
        v_floor = S.y_floor if v_floor is None else v_floor
        return cls.from_terms(rep, [(c, x, y) for c, x, y in S.items()], u_floor, v_floor)

    # inspection --------------------------------------------------------
    @property
    def N(self) -> int:
        n = 1
        for u, _ in self.terms:
            n = math.lcm(n, u.denominator)
        if self.u_floor is not None:
            n = math.lcm(n, self.u_floor.denominator)
        return n

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_exact(self) -> bool:
        return self.u_floor is None and self.v_floor is None

    def items(self) -> list[tuple[Fraction, Fraction, int]]:
        """``(c, u, v)`` sorted by u descending then v descending."""
        return [(self.terms[k], k[0], k[1]) for k in sorted(self.terms, key=lambda k: (-k[0], -k[1]))]

    def __len__(self) -> int:
        return len(self.terms)

    def coeff(self, u=0, v=0) -> Fraction:
        u = as_rat(u)
        v = as_rat(v)
        if v.denominator != 1:
            return Fraction(0)
        return self.terms.get((u, int(v)), Fraction(0))

    def is_known(self, u=0, v=0) -> bool:
        u = as_rat(u)
        v = as_rat(v)
        if self.u_floor is not None and u < self.u_floor:
            return False
        return self.v_floor is None or v >= self.v_floor

    def known_coeff(self, u=0, v=0) -> Fraction:
        if not self.is_known(u, v):
            raise JacpairError("BELOW_FLOOR", f"coefficient at ({u}, {v}) is below the floor")
        return self.coeff(u, v)

    def deg_u(self) -> Fraction | None:
        return max((u for u, _ in self.terms), default=None)

    def deg_v(self) -> int | None:
        return max((v for _, v in self.terms), default=None)

    def _top_u(self):
        return _max_floor(self.deg_u(), self.u_floor)

    def _top_v(self):
        return _max_floor(self.deg_v(), self.v_floor)

    def top_level(self) -> "WeylSeries":
        """Terms at the largest u-exponent."""
        d = self.deg_u()
        return WeylSeries(self.rep, {k: c for k, c in self.terms.items() if k[0] == d}, None, self.v_floor)

    def with_floors(self, u_floor=None, v_floor=None) -> "WeylSeries":
        uf = _max_floor(self.u_floor, None if u_floor is None else as_rat(u_floor))
        vf = _max_floor(self.v_floor, None if v_floor is None else int(math.ceil(as_rat(v_floor))))
        return WeylSeries.from_terms(self.rep, self.items(), uf, vf)

    def drop_floors(self) -> "WeylSeries":
        return WeylSeries(self.rep, self.terms, None, None)

    # linear structure --------------------------------------------------
    def _same(self, other: "WeylSeries"):
        if self.rep != other.rep:
            raise JacpairError("REPRESENTATION_MISMATCH", f"{self.rep} vs {other.rep}")

    def _lift(self, other) -> "WeylSeries":
        if isinstance(other, WeylSeries):
            self._same(other)
            return other
        return WeylSeries.const(other, self.rep)

    def __add__(self, other) -> "WeylSeries":
        other = self._lift(other)
        uf = _max_floor(self.u_floor, other.u_floor)
        vf = _max_floor(self.v_floor, other.v_floor)
        return WeylSeries.from_terms(self.rep, self.items() + other.items(), uf, vf)

    __radd__ = __add__

    def __neg__(self) -> "WeylSeries":
        return WeylSeries(self.rep, {k: -c for k, c in self.terms.items()}, self.u_floor, self.v_floor)

    def __sub__(self, other) -> "WeylSeries":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "WeylSeries":
        return self._lift(other) - self

    def scale(self, c) -> "WeylSeries":
        c = as_rat(c)
        if c == 0:
            return WeylSeries(self.rep, {}, self.u_floor, self.v_floor)
        return WeylSeries(self.rep, {k: c * v for k, v in self.terms.items()}, self.u_floor, self.v_floor)

    def __mul__(self, other) -> "WeylSeries":
        if isinstance(other, WeylSeries):
            return normal_product(self, other)
        return self.scale(other)

    def __rmul__(self, other) -> "WeylSeries":
        return self.scale(other)

    def __pow__(self, k: int) -> "WeylSeries":
        if k < 0:
            return weyl_inverse(self) ** (-k)
        out = WeylSeries.const(1, self.rep)
        for _ in range(k):
            out = out * self
        return out

    # comparison --------------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = WeylSeries.const(other, self.rep)
        if not isinstance(other, WeylSeries):
            return NotImplemented
        return (self.rep, self.terms, self.u_floor, self.v_floor) == (
            other.rep,
            other.terms,
            other.u_floor,
            other.v_floor,
        )

    def __hash__(self):
        return hash((self.rep, frozenset(self.terms.items()), self.u_floor, self.v_floor))

    def agrees(self, other) -> bool:
        """Equal on the region both sides know."""
        other = self._lift(other)
        uf = _max_floor(self.u_floor, other.u_floor)
        vf = _max_floor(self.v_floor, other.v_floor)
        diff = (self.drop_floors() - other.drop_floors()).with_floors(uf, vf)
        return diff.is_zero

    # serialisation -----------------------------------------------------
    def to_dict(self) -> dict:
        key = "v" if self.rep == UV else "w"
        return {
            "space": _SPACE_NAME[self.rep],
            "N": self.N,
            "uFloor": None if self.u_floor is None else str(self.u_floor),
            "vFloor" if self.rep == UV else "wFloor": self.v_floor,
            "terms": [{"c": str(c), "u": str(u), key: v} for c, u, v in self.items()],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "WeylSeries":
        try:
            rep = _REP_OF[d["space"]]
            key = "v" if rep == UV else "w"
            items = [(as_rat(t["c"]), as_rat(t["u"]), as_rat(t[key])) for t in d["terms"]]
            uf = d.get("uFloor")
            vf = d.get("vFloor" if rep == UV else "wFloor")
        except (KeyError, TypeError, ValueError) as exc:
            raise JacpairError("MALFORMED", f"bad Weyl JSON: {exc}") from exc
        return cls.from_terms(rep, items, None if uf is None else as_rat(uf), vf)

    def __str__(self) -> str:
        name = "v" if self.rep == UV else "w"
        parts = []
        for c, u, v in self.items():
            mon = []
            if u != 0:
                mon.append("u" if u == 1 else f"u^{_fmt(u)}")
            if v != 0:
                mon.append(name if v == 1 else f"{name}^{_fmt(Fraction(v))}")
            body = "*".join(mon)
            mag = abs(c)
            term = str(mag) if not body else (body if mag == 1 else f"{mag}*{body}")
            parts.append(("-" if c < 0 else "+", term))
        if not parts:
            s = "0"
        else:
            s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
            for sg, t in parts[1:]:
                s += f" {sg} {t}"
        if self.u_floor is not None:
            s += f" + O(u^{_fmt(self.u_floor)})"
        if self.v_floor is not None:
            s += f" + O({name}^{_fmt(Fraction(self.v_floor))})"
        return s

    def __repr__(self) -> str:
        return f"WeylSeries<{self.rep}>({self})"


def _fmt(e: Fraction) -> str:
    if e.denominator == 1:
        return str(e.numerator) if e >= 0 else f"({e})"
    return f"({e})"


def _depth_floor(tops: list, depth: int):
    """u floor keeping ``depth`` unit levels below the largest of ``tops``."""
    return max(tops) - depth + 1 if tops else None


def _product_floors(F: WeylSeries, G: WeylSeries):
    uf = None
    vf = None
    if F.u_floor is not None and G._top_u() is not None:
        uf = _max_floor(uf, F.u_floor + G._top_u())
    if G.u_floor is not None and F._top_u() is not None:
        uf = _max_floor(uf, G.u_floor + F._top_u())
    if F.v_floor is not None and G._top_v() is not None:
        vf = _max_floor(vf, F.v_floor + G._top_v())
    if G.v_floor is not None and F._top_v() is not None:
        vf = _max_floor(vf, G.v_floor + F._top_v())
    return uf, vf


# --------------------------------------------------------------------------
# products


def normal_product(F: WeylSeries, G: WeylSeries, depth: int = DEFAULT_DEPTH, u_floor=None) -> WeylSeries:
    """Product written back in standard form, exact above the derived floors.

    When an infinite reordering sum meets no floor, a u floor is placed
    ``depth`` unit levels under the top of the product (UV form) or the
    w-series is cut ``depth`` steps under its top (W form).  ``u_floor``
    raises the output u floor further.
    """
    F._same(G)
    if (F.is_zero and F.is_exact) or (G.is_zero and G.is_exact):
        return WeylSeries.zero(F.rep)
    uf, vf = _product_floors(F, G)
    if u_floor is not None:
        uf = _max_floor(uf, as_rat(u_floor))
    if F.rep == UV:
        return _product_uv(F, G, uf, vf, depth)
    return _product_w(F, G, uf, vf, depth)


def _product_uv(F, G, uf, vf, depth):
    fi = F.items()
    gi = G.items()
    if uf is None and vf is None:
        inf = [a + b for _, a, i in fi for _, b, _ in gi if i < 0 and not (b.denominator == 1 and b >= 0)]
        uf = _depth_floor(inf, depth)
    out: dict[tuple[Fraction, int], Fraction] = {}
    for c1, a, i in fi:
        for c2, b, j in gi:
            s = 0
            coef = c1 * c2
            while coef != 0:
                uu = a + b - s
                vv = i + j - s
                if (uf is not None and uu < uf) or (vf is not None and vv < vf):
                    break
                key = (uu, vv)
                out[key] = out.get(key, Fraction(0)) + coef
                # s! C(i,s) C(b,s) -> (s+1)! C(i,s+1) C(b,s+1)
                coef = coef * (i - s) * (b - s) / (s + 1)
                s += 1
    return WeylSeries(UV, {k: c for k, c in out.items() if c != 0}, uf, vf)


def _shift_w(k: int, b: Fraction, wf, limit=None) -> list[tuple[Fraction, int]]:
    """Terms of ``(w + b)^k`` at or above ``wf`` (``limit`` caps the count)."""
    out = []
    s = 0
    while True:
        if wf is not None and k - s < wf:
            break
        if limit is not None and s >= limit:
            break
        c = binom(Fraction(k), s) * b**s
        if c == 0 and (k >= 0 and s > k or b == 0 and s > 0):
            break
        if c != 0:
            out.append((c, k - s))
        s += 1
    return out


def _product_w(F, G, uf, vf, depth):
    fi = F.items()
    gi = G.items()
    if vf is None:
        inf = [k + l for _, _, k in fi for _, b, l in gi if k < 0 and b != 0]
        vf = _depth_floor(inf, depth)
    out: dict[tuple[Fraction, int], Fraction] = {}
    for c1, a, k in fi:
        for c2, b, l in gi:
            uu = a + b
            if uf is not None and uu < uf:
                continue
            for c, e in _shift_w(k, b, None if vf is None else vf - l):
                key = (uu, e + l)
                out[key] = out.get(key, Fraction(0)) + c1 * c2 * c
    return WeylSeries(W, {k: c for k, c in out.items() if c != 0}, uf, vf)


def commutator(F: WeylSeries, G: WeylSeries, depth: int = DEFAULT_DEPTH) -> WeylSeries:
    return normal_product(F, G, depth) - normal_product(G, F, depth)


# --------------------------------------------------------------------------
# inverse and fractional powers


def _leading_monomial(F: WeylSeries, code: str) -> tuple[Fraction, Fraction, int]:
    if F.is_zero:
        raise JacpairError(code, "zero has no inverse or root")
    top = F.top_level()
    if F.u_floor is not None and F.deg_u() < F.u_floor:
        raise JacpairError(code, "leading level is below the floor")
    if len(top) != 1:
        raise JacpairError(code, "leading u-level must be a single monomial", level=str(top))
    (c, u, v), = top.items()
    if F.v_floor is not None and v < F.v_floor:
        raise JacpairError(code, "leading monomial is below the v floor")
    return c, u, v


def weyl_inverse(F: WeylSeries, depth: int = DEFAULT_DEPTH) -> WeylSeries:
    """``H`` with ``F H = H F = 1`` above the returned floors.

    Writes ``F = L (1 - E)`` with ``L`` the leading monomial and sums the
    geometric series in ``E``; every term of ``E`` lies strictly lower in u,
    so the sum is finite above the u floor.  The result keeps ``depth`` unit
    u-levels below its top ``u^-alpha`` unless the input floor is tighter.
    """
    if F.rep != UV:
        raise JacpairError("REPRESENTATION_MISMATCH", "weyl_inverse works in UV_STANDARD form")
    c, alpha, m = _leading_monomial(F, "NOT_INVERTIBLE")
    target = -alpha - depth + 1
    vf_in = F.v_floor
    Fk = F.with_floors() if vf_in is None else WeylSeries(UV, F.terms, F.u_floor, None)
    if Fk.u_floor is not None:
        target = max(target, Fk.u_floor - 2 * alpha)
    Linv = normal_product(
        WeylSeries.monomial(1 / c, 0, -m), WeylSeries.monomial(1, -alpha, 0), depth, u_floor=target
    )
    E = WeylSeries.const(1) - normal_product(Linv, Fk, depth, u_floor=target + alpha)
    E = E.with_floors(target + alpha)
    S = WeylSeries.const(1).with_floors(E.u_floor)
    P = WeylSeries.const(1)
    while True:
        P = normal_product(P, E, depth, u_floor=E.u_floor)
        S = S + P
        if P.is_zero:
            break
    H = normal_product(S, Linv, depth, u_floor=target)
    if vf_in is not None:
        vt = H._top_v()
        vf = vf_in + 2 * vt
        if vf_in + vt > 0:
            raise JacpairError("NOT_INVERTIBLE", "v floor of the input is too high to bound the inverse")
        H = H.with_floors(None, vf)
    return H


def _int_power(F: WeylSeries, a: int, depth: int) -> WeylSeries:
    if a < 0:
        F = weyl_inverse(F, depth)
        a = -a
    out = WeylSeries.const(1)
    for _ in range(a):
        out = normal_product(out, F, depth)
    return out


def weyl_fractional_power(F: WeylSeries, a: int, b: int = 1, depth: int = DEFAULT_DEPTH) -> WeylSeries:
    """``E`` with ``E^b = F^a`` and leading monomial the positive b-th root.

    Lower u-levels of ``E`` are fixed one at a time: at the top u-level the
    product is commutative, so the leading part of ``E^b - F^a`` determines
    the next level by division through ``b e_0^(b-1)``.
    """
    if F.rep != UV:
        raise JacpairError("REPRESENTATION_MISMATCH", "weyl_fractional_power works in UV_STANDARD form")
    a = int(a)
    b = int(b)
    if b <= 0:
        raise JacpairError("BAD_EXPONENT", "denominator must be positive")
    c, alpha, m = _leading_monomial(F, "BAD_EXPONENT")
    if (a * m) % b:
        raise JacpairError("BAD_EXPONENT", f"{b} does not divide {a}*{m}")
    if a == 0:
        return WeylSeries.const(1)
    G = _int_power(F, a, depth + 1)
    if b == 1:
        return G
    g0, A, K = _leading_monomial(G, "BAD_EXPONENT")
    e0 = rational_root(g0, b)
    if e0 is None or (b % 2 == 0 and e0 < 0):
        raise JacpairError("BAD_EXPONENT", f"leading coefficient {g0} has no rational {b}-th root")
    gam = A / b
    k0 = K // b
    uf = gam - depth + 1
    if G.u_floor is not None:
        uf = max(uf, G.u_floor - (b - 1) * gam)
    vf = None
    if G.v_floor is not None:
        vf = G.v_floor - (b - 1) * k0
    lead_c = b * e0 ** (b - 1)
    lead_u = (b - 1) * gam
    lead_v = (b - 1) * k0
    E = WeylSeries.monomial(e0, gam, k0)
    work_uf = uf + lead_u
    for _ in range(100000):
        Eb = E
        for k in range(2, b + 1):
            # the remaining b - k factors still lift u by (b - k) * gam
            Eb = normal_product(Eb, E, depth, u_floor=work_uf - (b - k) * gam)
        R = (G - Eb).with_floors(work_uf, None if vf is None else vf + lead_v)
        if R.is_zero:
            break
        level = R.top_level()
        corr = [(cc / lead_c, u - lead_u, v - lead_v) for cc, u, v in level.items()]
        E = E + WeylSeries.from_terms(UV, corr)
    else:  # pragma: no cover - the loop above always converges
        raise JacpairError("BAD_EXPONENT", "root iteration did not settle")
    return E.with_floors(uf, vf)


# --------------------------------------------------------------------------
# w = uv


def _falling(j: int) -> dict[int, Fraction]:
    """Coefficients of ``w (w-1) ... (w-j+1)``."""
    poly = {0: Fraction(1)}
    for t in range(j):
        nxt: dict[int, Fraction] = {}
        for e, c in poly.items():
            nxt[e + 1] = nxt.get(e + 1, Fraction(0)) + c
            nxt[e] = nxt.get(e, Fraction(0)) - t * c
        poly = nxt
    return {e: c for e, c in poly.items() if c != 0}


def _inv_rising(jp: int, count: int) -> dict[int, Fraction]:
    """First ``count`` terms of ``1/((w+1)(w+2)...(w+jp))`` in descending w."""
    ser = [Fraction(0)] * count
    ser[0] = Fraction(1)
    for k in range(1, jp + 1):
        # multiply by 1/(1 + k/w) = sum (-k)^t w^-t
        nxt = [Fraction(0)] * count
        for i, c in enumerate(ser):
            if c == 0:
                continue
            p = Fraction(1)
            for t in range(count - i):
                nxt[i + t] += c * p
                p *= -k
        ser = nxt
    return {-jp - i: c for i, c in enumerate(ser) if c != 0}


def _phi(j: int, wf) -> dict[int, Fraction]:
    """``u^-j v^j`` (integer j) in W form, cut at ``wf``."""
    if j >= 0:
        return _falling(j)
    count = (-j) - wf + 1 if wf is not None else 0
    return _inv_rising(-j, max(count, 0))


def to_w_form(F: WeylSeries, depth: int = DEFAULT_DEPTH) -> WeylSeries:
    """Rewrite ``u^i v^j = u^(i-j) w(w-1)...(w-j+1)`` (reciprocal rising product for j < 0)."""
    if F.rep == W:
        return F
    if any(u.denominator != 1 for u, _ in F.terms) or (F.u_floor is not None and F.u_floor.denominator != 1):
        raise JacpairError("FRACTIONAL_U_IN_W_FORM", "W form needs integer u-exponents")
    return _to_w(F, depth)


def _to_w(F: WeylSeries, depth: int) -> WeylSeries:
    wf = F.v_floor
    uf = None
    if F.u_floor is not None:
        if wf is None:
            raise JacpairError("UNBOUNDED_FLOOR", "a u floor needs a v floor to convert to W form")
        uf = F.u_floor - wf
    if wf is None:
        neg = [j for _, _, j in F.items() if j < 0]
        wf = _depth_floor(neg, depth)
    out: dict[tuple[Fraction, int], Fraction] = {}
    for c, i, j in F.items():
        a = i - j
        if uf is not None and a < uf:
            continue
        for e, cc in _phi(j, wf).items():
            if wf is not None and e < wf:
                continue
            out[(a, e)] = out.get((a, e), Fraction(0)) + c * cc
    return WeylSeries(W, {k: c for k, c in out.items() if c != 0}, uf, wf)


def from_w_form(F: WeylSeries, depth: int = DEFAULT_DEPTH) -> WeylSeries:
    """Inverse of :func:`to_w_form`, peeling the top w-term of each u-level."""
    if F.rep == UV:
        return F
    return _from_w(F, depth)


def _from_w(F: WeylSeries, depth: int) -> WeylSeries:
    wf = F.v_floor
    if wf is None:
        neg = [k for _, _, k in F.items() if k < 0]
        wf = _depth_floor(neg, depth)
    uf = None
    if F.u_floor is not None:
        uf = F.u_floor + F._top_v()
    levels: dict[Fraction, dict[int, Fraction]] = {}
    for c, a, k in F.items():
        if wf is not None and k < wf:
            continue
        levels.setdefault(a, {})[k] = c
    out = []
    for a, lv in levels.items():
        lv = dict(lv)
        while lv:
            k = max(lv)
            c = lv.pop(k)
            if c == 0:
                continue
            out.append((c, a + k, k))
            for e, cc in _phi(k, wf).items():
                if e == k or (wf is not None and e < wf):
                    continue
                nv = lv.get(e, Fraction(0)) - c * cc
                if nv:
                    lv[e] = nv
                else:
                    lv.pop(e, None)
    return WeylSeries.from_terms(UV, out, uf, wf)


def weyl_trace(F: WeylSeries) -> Fraction:
    """Coefficient of ``u^-1 v^-1`` (equivalently ``u^0 w^-1``)."""
    if F.rep == UV:
        return F.known_coeff(-1, -1)
    return F.known_coeff(0, -1)


# --------------------------------------------------------------------------
# derivations


def _deriv_coeffs(e: Fraction):
    """Yield ``(i, (-1)^(i+1) (i-1)! C(e, i))`` for i = 1, 2, ...; stops when zero forever."""
    i = 1
    while True:
        b = binom(e, i)
        if b == 0 and e.denominator == 1 and 0 <= e < i:
            return
        yield i, (-1) ** (i + 1) * _fact(i - 1) * b
        i += 1


def _apply_uv_derivation(F: WeylSeries, on_u: bool, depth: int) -> WeylSeries:
    uf = None if F.u_floor is None else F.u_floor - 1
    vf = None if F.v_floor is None else F.v_floor - 1
    if uf is None and vf is None:
        inf = [u - 1 for _, u, v in F.items() if not _finite((u if on_u else Fraction(v)))]
        uf = _depth_floor(inf, depth)
    out = []
    for c, u, v in F.items():
        e = u if on_u else Fraction(v)
        for i, k in _deriv_coeffs(e):
            nu, nv = u - i, v - i
            if (uf is not None and nu < uf) or (vf is not None and nv < vf):
                break
            if k:
                out.append((c * k, nu, nv))
    return WeylSeries.from_terms(UV, out, uf, vf)


def _finite(e: Fraction) -> bool:
    return e.denominator == 1 and e >= 0


def partial_w(F: WeylSeries, depth: int = DEFAULT_DEPTH) -> WeylSeries:
    """Derivation with ``u -> 0`` and ``v -> u^-1`` (``d/dw`` in W form)."""
    if F.rep == W:
        out = [(c * k, a, k - 1) for c, a, k in F.items() if k != 0]
        return WeylSeries.from_terms(W, out, F.u_floor, None if F.v_floor is None else F.v_floor - 1)
    # d(u^a v^j) = u^a d(v^j), and d(v^j) = sum c_i u^-i v^(j-i)
    return _apply_uv_derivation(F, on_u=False, depth=depth)


def partial_w_v(F: WeylSeries, depth: int = DEFAULT_DEPTH) -> WeylSeries:
    """Derivation with ``u -> v^-1`` and ``v -> 0``."""
    if F.rep == W:
        return to_w_form(_apply_uv_derivation(from_w_form(F, depth), on_u=True, depth=depth), depth)
    return _apply_uv_derivation(F, on_u=True, depth=depth)


# --------------------------------------------------------------------------
# correspondence with the commutative side (u -> -x, v -> y)


def to_poisson(F: WeylSeries, space: Space = Space.P_POLY_Y) -> Series:
    if F.rep != UV:
        F = from_w_form(F)
    out = []
    for c, u, v in F.items():
        if u.denominator != 1:
            raise JacpairError("PRECONDITION_FAILED", "u -> -x needs integer u-exponents")
        out.append((c * (-1) ** int(u), u, Fraction(v)))
    return Series.from_terms(space, out, F.u_floor, F.v_floor)


def from_poisson(S: Series) -> WeylSeries:
    out = []
    for c, x, y in S.items():
        if x.denominator != 1:
            raise JacpairError("PRECONDITION_FAILED", "x -> -u needs integer x-exponents")
        out.append((c * (-1) ** int(x), x, y))
    return WeylSeries.from_terms(UV, out, S.x_floor, S.y_floor)


# --------------------------------------------------------------------------
# the vertex analysis


@dataclass(frozen=True)
class VertexSolution:
    m0: int
    m: int
    alpha: Fraction
    beta: Fraction

    def to_dict(self) -> dict:
        return {"m0": self.m0, "m": self.m, "alpha": str(self.alpha), "beta": str(self.beta)}


def vertex_closed_form(m0: int, m: int) -> tuple[Fraction, Fraction]:
    return Fraction(m0 * m, 2), Fraction((1 - m0) * (1 - m), 2)


def dixmier_vertex_solve(m0: int, m: int) -> VertexSolution:
    """Solve the two trace conditions for (alpha, beta) by Cramer's rule.

    The rows are ``(m-1) alpha + m beta = (2 m0 - 1) C(m,2)`` and
    ``(m0-1) alpha + m0 beta = (2 m - 1) C(m0,2)``.
    """
    m0 = int(m0)
    m = int(m)
    if not m0 > m > 0:
        raise JacpairError("PRECONDITION_FAILED", "need m0 > m > 0")
    a11, a12, r1 = m - 1, m, Fraction((2 * m0 - 1) * m * (m - 1), 2)
    a21, a22, r2 = m0 - 1, m0, Fraction((2 * m - 1) * m0 * (m0 - 1), 2)
    det = a11 * a22 - a12 * a21
    if det == 0:
        raise JacpairError("SINGULAR_SYSTEM", f"determinant vanishes at ({m0}, {m})")
    alpha = (r1 * a22 - a12 * r2) / det
    beta = (a11 * r2 - r1 * a21) / det
    if (alpha, beta) != vertex_closed_form(m0, m):
        raise JacpairError("SINGULAR_SYSTEM", "solution disagrees with the closed form", alpha=str(alpha), beta=str(beta))
    return VertexSolution(m0, m, alpha, beta)


def _wpoly_mul(p: dict, q: dict, wf) -> dict:
    out: dict[int, Fraction] = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = e1 + e2
            if wf is not None and e < wf:
                continue
            out[e] = out.get(e, Fraction(0)) + c1 * c2
    return {e: c for e, c in out.items() if c != 0}


def _wpoly_div(num: dict, den: dict, wf: int) -> dict:
    """Descending-w quotient ``num / den`` down to ``wf``."""
    top = max(den)
    lead = den[top]
    rem = dict(num)
    out: dict[int, Fraction] = {}
    while rem:
        k = max(rem)
        q = k - top
        if q < wf:
            break
        c = rem.pop(k) / lead
        if c == 0:
            continue
        out[q] = c
        for e, d in den.items():
            if e == top:
                continue
            t = q + e
            v = rem.get(t, Fraction(0)) - c * d
            if v:
                rem[t] = v
            else:
                rem.pop(t, None)
    return out


def _wpoly_shift(p: dict, b: Fraction, wf) -> dict:
    out: dict[int, Fraction] = {}
    for k, c in p.items():
        for cc, e in _shift_w(k, b, wf):
            out[e] = out.get(e, Fraction(0)) + c * cc
    return {e: c for e, c in out.items() if c != 0}


def vertex_bracket_check(m0: int, m: int, depth: int = 8, alpha=None) -> Verdict:
    """Check the leading parts of a Dixmier pair at the vertex ``(m0, m)``.

    ``F0 = u^a f(w)`` with ``a = m0 - m`` comes from
    ``u^m0 v^m + alpha u^(m0-1) v^(m-1)`` and ``R0 = r(w) u^-a`` with
    ``f r = (w + (m0-m+1)/2)/(m - m0)``.  The check confirms the telescoped
    bracket ``(fr)(w-a) - (fr)(w)`` is 1 and that both traces
    ``tr(R0 d_w F0)`` and ``tr(F0 d^v_w R0)`` vanish above the floor.
    Passing ``alpha`` overrides the solved value (used for negative controls).
    """
    sol = dixmier_vertex_solve(m0, m)
    al = sol.alpha if alpha is None else as_rat(alpha)
    a = m0 - m
    f = _falling(m)
    for e, c in _falling(m - 1).items():
        f[e] = f.get(e, Fraction(0)) + al * c
    f = {e: c for e, c in f.items() if c != 0}
    K = Fraction(1, m - m0)
    P = {1: K, 0: K * Fraction(m0 - m + 1, 2)}
    P = {e: c for e, c in P.items() if c != 0}
    wf_r = (1 - m) - depth + 1
    r = _wpoly_div(P, f, wf_r)
    fr_floor = wf_r + m
    fr = _wpoly_mul(f, r, fr_floor)
    tele = _wpoly_shift(fr, Fraction(-a), fr_floor)
    for e, c in fr.items():
        tele[e] = tele.get(e, Fraction(0)) - c
    tele = {e: c for e, c in tele.items() if c != 0}
    tele_ok = tele == {0: Fraction(1)} and fr_floor <= 0

    F0 = WeylSeries.from_terms(W, [(c, a, e) for e, c in f.items()])
    # r(w) u^-a = u^-a r(w - a)
    R0 = WeylSeries.from_terms(W, [(c, -a, e) for e, c in _wpoly_shift(r, Fraction(-a), wf_r).items()], None, wf_r)
    br = normal_product(F0, R0, depth) - normal_product(R0, F0, depth)
    bracket_ok = br.agrees(WeylSeries.const(1, W)) and br.is_known(0, 0) and br.is_known(0, -1)

    t1_series = normal_product(R0, partial_w(F0), depth)
    F0_uv = from_w_form(F0, depth)
    R0_uv = from_w_form(R0, depth)
    t2_series = normal_product(F0_uv, partial_w_v(R0_uv, depth), depth)
    details = {
        "m0": m0,
        "m": m,
        "alpha": str(al),
        "beta": str(sol.beta),
        "f": {str(e): str(c) for e, c in sorted(f.items(), reverse=True)},
        "fr": {str(e): str(c) for e, c in sorted(fr.items(), reverse=True)},
        "frFloor": fr_floor,
        "telescoping": {str(e): str(c) for e, c in sorted(tele.items(), reverse=True)},
        "bracket": str(br),
    }
    try:
        t1 = weyl_trace(t1_series)
        t2 = weyl_trace(t2_series)
    except JacpairError as exc:
        details["error"] = exc.code
        return Verdict(False, details)
    details["traceRdF"] = str(t1)
    details["traceFdR"] = str(t2)
    ok = tele_ok and bracket_ok and t1 == 0 and t2 == 0
    return Verdict(ok, details)
