"""Truncated two-variable Puiseux-Laurent series with exact rational data.

A :class:`Series` stores finitely many terms ``c * x^a * y^b`` together
with two floors.  Anything with x-exponent below ``x_floor`` or y-exponent
below ``y_floor`` is *unknown*, not zero; ``None`` means the series is exact
in that direction.  Every operation derives the weakest floor it can
guarantee, so equality is always "equal above the common floor".

Exponents are kept as integers over per-series denominators (``N`` for x,
``M`` for y) so that the hot loops work on ints.
"""

from __future__ import annotations

import contextvars
import json
import math
import re
from enum import Enum
from fractions import Fraction
from typing import Iterable, Iterator

from .errors import JacpairError

Rat = Fraction

DEFAULT_N_CAP = 2**20
N_CAP: contextvars.ContextVar[int] = contextvars.ContextVar("N_CAP", default=DEFAULT_N_CAP)


class Space(str, Enum):
    A_X = "A"  # series in x alone, descending x
    B_DESC_Y = "B"  # descending powers of y over x-series
    P_POLY_Y = "P"  # polynomials in y, descending powers of x^(1/N)


def as_rat(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, str):
        return Fraction(v.strip())
    return Fraction(v)


def _ceil(fr: Fraction) -> int:
    return -((-fr.numerator) // fr.denominator)


def _max_floor(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return max(a, b)


def iroot(n: int, k: int) -> int | None:
    """Exact integer k-th root of n >= 0, or None."""
    if n < 0:
        raise ValueError("negative radicand")
    if n < 2:
        return n
    r = math.isqrt(n) if k == 2 else int(round(n ** (1.0 / k)))
    # float guess may be off for big n: Newton polish
    if k != 2:
        r = max(r, 1)
        for _ in range(200):
            nr = ((k - 1) * r + n // r ** (k - 1)) // k
            if abs(nr - r) <= 1:
                break
            r = nr
        for cand in (r - 1, r, r + 1):
            if cand >= 0 and cand**k == n:
                return cand
        return None
    return r if r * r == n else None


def rational_root(c: Fraction, b: int) -> Fraction | None:
    """Exact b-th root of a rational number, or None when irrational."""
    c = as_rat(c)
    if b == 1:
        return c
    if c < 0:
        if b % 2 == 0:
            return None
        r = rational_root(-c, b)
        return None if r is None else -r
    num = iroot(c.numerator, b)
    den = iroot(c.denominator, b)
    if num is None or den is None:
        return None
    return Fraction(num, den)


def rational_power(c: Fraction, beta: Fraction) -> Fraction | None:
    r = rational_root(c, beta.denominator)
    if r is None:
        return None
    if r == 0 and beta.numerator < 0:
        return None
    return r**beta.numerator


def binom(a: Fraction, s: int) -> Fraction:
    """Generalized binomial coefficient C(a, s) for rational a."""
    out = Fraction(1)
    for i in range(s):
        out = out * (a - i) / (i + 1)
    return out


class Series:
    """Immutable truncated series; see the module docstring."""

    __slots__ = ("space", "N", "M", "terms", "x_floor", "y_floor")

    def __init__(
        self,
        space: Space,
        terms: dict[tuple[int, int], Fraction] | None = None,
        N: int = 1,
        M: int = 1,
        x_floor: Fraction | None = None,
        y_floor: Fraction | None = None,
    ):
        space = Space(space)
        if N > N_CAP.get():
            raise JacpairError("N_OVERFLOW", f"denominator {N} exceeds cap {N_CAP.get()}")
        xf = None if x_floor is None else as_rat(x_floor)
        yf = None if y_floor is None else as_rat(y_floor)
        xt = None if xf is None else _ceil(xf * N)
        yt = None if yf is None else _ceil(yf * M)
        clean: dict[tuple[int, int], Fraction] = {}
        for (a, b), c in (terms or {}).items():
            if not c:
                continue
            if xt is not None and a < xt:
                continue
            if yt is not None and b < yt:
                continue
            if space is Space.P_POLY_Y and b < 0:
                raise JacpairError("NEGATIVE_Y", "P_POLY_Y series must be polynomial in y")
            if space is Space.A_X and b != 0:
                raise JacpairError("Y_IN_X_SERIES", "A_X series cannot contain y")
            clean[(a, b)] = c if isinstance(c, Fraction) else Fraction(c)
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "x_floor", xf)
        object.__setattr__(self, "y_floor", yf)

    def __setattr__(self, name, value):
        raise AttributeError("Series is immutable")

    # construction ----------------------------------------------------
    @classmethod
    def from_terms(
        cls,
        space: Space,
        items: Iterable[tuple],
        x_floor=None,
        y_floor=None,
    ) -> "Series":
        """Build from ``(c, x, y)`` triples with arbitrary rational exponents."""
        triples = [(as_rat(c), as_rat(x), as_rat(y)) for c, x, y in items]
        N = 1
        M = 1
        for _, x, y in triples:
            N = math.lcm(N, x.denominator)
            M = math.lcm(M, y.denominator)
        terms: dict[tuple[int, int], Fraction] = {}
        for c, x, y in triples:
            key = (int(x * N), int(y * M))
            terms[key] = terms.get(key, Fraction(0)) + c
        return cls(space, terms, N, M, x_floor, y_floor)

    @classmethod
    def zero(cls, space: Space, x_floor=None, y_floor=None) -> "Series":
        return cls(space, {}, 1, 1, x_floor, y_floor)

    @classmethod
    def const(cls, c, space: Space) -> "Series":
        return cls(space, {(0, 0): as_rat(c)})

    @classmethod
    def one(cls, space: Space) -> "Series":
        return cls.const(1, space)

    @classmethod
    def monomial(cls, c, x, y, space: Space) -> "Series":
        return cls.from_terms(space, [(c, x, y)])

    @classmethod
    def var(cls, name: str, space: Space) -> "Series":
        return cls.monomial(1, 1, 0, space) if name == "x" else cls.monomial(1, 0, 1, space)

    # inspection ------------------------------------------------------
    def items(self) -> Iterator[tuple[Fraction, Fraction, Fraction]]:
        """Yield ``(c, x, y)`` sorted by x descending then y descending."""
        for (a, b) in sorted(self.terms, key=lambda k: (-k[0], -k[1])):
            yield self.terms[(a, b)], Fraction(a, self.N), Fraction(b, self.M)

    def sorted_items(self) -> list[tuple[Fraction, Fraction, Fraction]]:
        return sorted(self.items(), key=lambda t: (-t[1], -t[2]))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_exact(self) -> bool:
        return self.x_floor is None and self.y_floor is None

    def __len__(self) -> int:
        return len(self.terms)

    def coeff(self, x=0, y=0) -> Fraction:
        x = as_rat(x)
        y = as_rat(y)
        if (x * self.N).denominator != 1 or (y * self.M).denominator != 1:
            return Fraction(0)
        return self.terms.get((int(x * self.N), int(y * self.M)), Fraction(0))

    def is_known(self, x=0, y=0) -> bool:
        x = as_rat(x)
        y = as_rat(y)
        if self.x_floor is not None and x < self.x_floor:
            return False
        if self.y_floor is not None and y < self.y_floor:
            return False
        return True

    def known_coeff(self, x=0, y=0) -> Fraction:
        if not self.is_known(x, y):
            raise JacpairError("BELOW_FLOOR", f"coefficient of x^{x} y^{y} is below the floor")
        return self.coeff(x, y)

    def deg_x(self) -> Fraction | None:
        if not self.terms:
            return None
        return Fraction(max(a for a, _ in self.terms), self.N)

    def min_x(self) -> Fraction | None:
        if not self.terms:
            return None
        return Fraction(min(a for a, _ in self.terms), self.N)

    def deg_y(self) -> Fraction | None:
        if not self.terms:
            return None
        return Fraction(max(b for _, b in self.terms), self.M)

    def min_y(self) -> Fraction | None:
        if not self.terms:
            return None
        return Fraction(min(b for _, b in self.terms), self.M)

    def support(self) -> list[tuple[Fraction, Fraction]]:
        return [(x, y) for _, x, y in self.items()]

    def _known_max_x(self):
        d = self.deg_x()
        return _max_floor(d, self.x_floor)

    def _known_max_y(self):
        d = self.deg_y()
        return _max_floor(d, self.y_floor)

    # structural helpers ---------------------------------------------
    def _rescaled(self, N: int, M: int) -> dict[tuple[int, int], Fraction]:
        fx = N // self.N
        fy = M // self.M
        if fx == 1 and fy == 1:
            return self.terms
        return {(a * fx, b * fy): c for (a, b), c in self.terms.items()}

    def with_floors(self, x_floor=None, y_floor=None) -> "Series":
        """Raise the floors (never lowers them)."""
        xf = _max_floor(self.x_floor, None if x_floor is None else as_rat(x_floor))
        yf = _max_floor(self.y_floor, None if y_floor is None else as_rat(y_floor))
        return Series(self.space, self.terms, self.N, self.M, xf, yf)

    def drop_floors(self) -> "Series":
        """Declare the stored terms exact (caller asserts nothing is missing)."""
        return Series(self.space, self.terms, self.N, self.M, None, None)

    def with_space(self, space: Space) -> "Series":
        return Series(space, self.terms, self.N, self.M, self.x_floor, self.y_floor)

    def reduced(self) -> "Series":
        """Same series with the smallest denominators N and M."""
        gx = 0
        gy = 0
        for a, b in self.terms:
            gx = math.gcd(gx, a)
            gy = math.gcd(gy, b)
        nx = math.gcd(gx, self.N) if gx else self.N
        ny = math.gcd(gy, self.M) if gy else self.M
        if nx == 1 and ny == 1:
            return self
        terms = {(a // nx, b // ny): c for (a, b), c in self.terms.items()}
        return Series(self.space, terms, self.N // nx, self.M // ny, self.x_floor, self.y_floor)

    def _check_space(self, other: "Series"):
        if self.space is not other.space:
            raise JacpairError("SPACE_MISMATCH", f"{self.space.name} vs {other.space.name}")

    def _lift(self, other) -> "Series":
        if isinstance(other, Series):
            self._check_space(other)
            return other
        return Series.const(as_rat(other), self.space)

    # arithmetic ------------------------------------------------------
    def __add__(self, other) -> "Series":
        other = self._lift(other)
        N = math.lcm(self.N, other.N)
        M = math.lcm(self.M, other.M)
        terms = dict(self._rescaled(N, M))
        for k, c in other._rescaled(N, M).items():
            v = terms.get(k)
            terms[k] = c if v is None else v + c
        return Series(
            self.space,
            terms,
            N,
            M,
            _max_floor(self.x_floor, other.x_floor),
            _max_floor(self.y_floor, other.y_floor),
        )

    __radd__ = __add__

    def __neg__(self) -> "Series":
        return Series(
            self.space,
            {k: -c for k, c in self.terms.items()},
            self.N,
            self.M,
            self.x_floor,
            self.y_floor,
        )

    def __sub__(self, other) -> "Series":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "Series":
        return (-self) + other

    def scale(self, c) -> "Series":
        c = as_rat(c)
        if c == 0:
            return Series(self.space, {}, 1, 1, self.x_floor, self.y_floor)
        return Series(
            self.space,
            {k: v * c for k, v in self.terms.items()},
            self.N,
            self.M,
            self.x_floor,
            self.y_floor,
        )

    def __mul__(self, other) -> "Series":
        if not isinstance(other, Series):
            return self.scale(other)
        self._check_space(other)
        return _mul(self, other)

    def __rmul__(self, other) -> "Series":
        return self.scale(other)

    def __truediv__(self, other) -> "Series":
        if isinstance(other, Series):
            raise TypeError("use invert() for series division")
        return self.scale(1 / as_rat(other))

    def __pow__(self, k: int) -> "Series":
        if not isinstance(k, int) or k < 0:
            raise ValueError("use fractional_power for non-natural exponents")
        out = Series.one(self.space)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def shift(self, x=0, y=0, c=1) -> "Series":
        """Multiply by the monomial ``c x^x y^y``."""
        x = as_rat(x)
        y = as_rat(y)
        c = as_rat(c)
        N = math.lcm(self.N, x.denominator)
        M = math.lcm(self.M, y.denominator)
        dx = int(x * N)
        dy = int(y * M)
        terms = {(a + dx, b + dy): v * c for (a, b), v in self._rescaled(N, M).items()}
        return Series(
            self.space,
            terms,
            N,
            M,
            None if self.x_floor is None else self.x_floor + x,
            None if self.y_floor is None else self.y_floor + y,
        )

    def partial(self, var: str) -> "Series":
        if var in ("x", "X"):
            terms = {(a - self.N, b): c * Fraction(a, self.N) for (a, b), c in self.terms.items()}
            xf = None if self.x_floor is None else self.x_floor - 1
            return Series(self.space, terms, self.N, self.M, xf, self.y_floor)
        if var in ("y", "Y"):
            terms = {(a, b - self.M): c * Fraction(b, self.M) for (a, b), c in self.terms.items()}
            yf = None if self.y_floor is None else self.y_floor - 1
            return Series(self.space, terms, self.N, self.M, self.x_floor, yf)
        raise ValueError(f"unknown variable {var!r}")

    def dx(self) -> "Series":
        return self.partial("x")

    def dy(self) -> "Series":
        return self.partial("y")

    # level views -----------------------------------------------------
    def y_levels(self) -> dict[Fraction, "Series"]:
        """Coefficients of each power of y, as x-series carrying the x floor."""
        buckets: dict[int, dict[tuple[int, int], Fraction]] = {}
        for (a, b), c in self.terms.items():
            buckets.setdefault(b, {})[(a, 0)] = c
        return {
            Fraction(b, self.M): Series(Space.A_X, t, self.N, 1, self.x_floor, None)
            for b, t in buckets.items()
        }

    def x_levels(self) -> dict[Fraction, "Series"]:
        """Coefficients of each power of x, as y-only series in the same space."""
        buckets: dict[int, dict[tuple[int, int], Fraction]] = {}
        for (a, b), c in self.terms.items():
            buckets.setdefault(a, {})[(0, b)] = c
        return {
            Fraction(a, self.N): Series(self.space, t, 1, self.M, None, self.y_floor)
            for a, t in buckets.items()
        }

    @classmethod
    def from_y_levels(cls, space: Space, levels: dict, x_floor=None, y_floor=None) -> "Series":
        out = Series.zero(space)
        for y, coef in levels.items():
            if coef.is_zero:
                continue
            out = out + coef.drop_floors().with_space(space).shift(0, y)
            x_floor = _max_floor(x_floor, coef.x_floor)
        return out.with_floors(x_floor, y_floor)

    # comparison ------------------------------------------------------
    def _canonical(self):
        return (
            self.space,
            frozenset(self.items()),
            self.x_floor,
            self.y_floor,
        )

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Series.const(other, self.space)
        if not isinstance(other, Series):
            return NotImplemented
        return self._canonical() == other._canonical()

    def __hash__(self):
        return hash(self._canonical())

    def agrees(self, other) -> bool:
        """True when the two series coincide wherever both are known."""
        return (self - other).is_zero

    def agrees_to(self, other, x_floor=None, y_floor=None) -> bool:
        """Agreement plus a guarantee that the comparison reached the given floors."""
        d = self - other
        if x_floor is not None and d.x_floor is not None and d.x_floor > as_rat(x_floor):
            return False
        if y_floor is not None and d.y_floor is not None and d.y_floor > as_rat(y_floor):
            return False
        return d.is_zero

    # serialization ---------------------------------------------------
    def to_dict(self) -> dict:
        def rat_json(v):
            return None if v is None else str(v)

        def y_json(v):
            if v is None:
                return None
            return int(v) if v.denominator == 1 else str(v)

        return {
            "space": self.space.value,
            "N": self.N,
            "xFloor": rat_json(self.x_floor),
            "yFloor": y_json(self.y_floor),
            "terms": [{"c": str(c), "x": str(x), "y": y_json(y)} for c, x, y in self.sorted_items()],
        }

    def render(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict, space_override: Space | None = None) -> "Series":
        try:
            space = space_override or Space(d["space"])
            N = int(d.get("N", 1))
            items = [(as_rat(t["c"]), as_rat(t["x"]), as_rat(t["y"])) for t in d["terms"]]
            xf = d.get("xFloor")
            yf = d.get("yFloor")
        except (KeyError, TypeError, ValueError) as exc:
            raise JacpairError("MALFORMED", f"bad series JSON: {exc}") from exc
        M = 1
        for _, x, y in items:
            N = math.lcm(N, x.denominator)
            M = math.lcm(M, y.denominator)
        terms: dict[tuple[int, int], Fraction] = {}
        for c, x, y in items:
            terms[(int(x * N), int(y * M))] = c
        return cls(space, terms, N, M, None if xf is None else as_rat(xf), None if yf is None else as_rat(yf))

    @classmethod
    def parse(cls, text: str) -> "Series":
        return cls.from_dict(json.loads(text))

    def __str__(self) -> str:
        return to_text(self)

    def __repr__(self) -> str:
        return f"Series<{self.space.name}>({to_text(self)})"


def _mul(F: Series, G: Series) -> Series:
    if (F.is_zero and F.is_exact) or (G.is_zero and G.is_exact):
        return Series.zero(F.space)
    xf = None
    yf = None
    if F.x_floor is not None:
        xf = _max_floor(xf, F.x_floor + G._known_max_x())
    if G.x_floor is not None:
        xf = _max_floor(xf, G.x_floor + F._known_max_x())
    if F.y_floor is not None:
        yf = _max_floor(yf, F.y_floor + G._known_max_y())
    if G.y_floor is not None:
        yf = _max_floor(yf, G.y_floor + F._known_max_y())
    N = math.lcm(F.N, G.N)
    M = math.lcm(F.M, G.M)
    ft = F._rescaled(N, M)
    gt = G._rescaled(N, M)
    if len(ft) < len(gt):
        ft, gt = gt, ft
    xt = None if xf is None else _ceil(xf * N)
    yt = None if yf is None else _ceil(yf * M)
    gl = sorted(gt.items(), key=lambda kv: -kv[0][0])
    out: dict[tuple[int, int], Fraction] = {}
    get = out.get
    for (a, b), c in ft.items():
        for (a2, b2), c2 in gl:
            xa = a + a2
            if xt is not None and xa < xt:
                break
            yb = b + b2
            if yt is not None and yb < yt:
                continue
            k = (xa, yb)
            v = get(k)
            out[k] = c * c2 if v is None else v + c * c2
    return Series(F.space, out, N, M, xf, yf)


# --------------------------------------------------------------------------
# powers


def _miller(c: list, beta: Fraction, D: int, one):
    """Coefficients g_0..g_{D-1} of (1 + sum_j c_j t^j)^beta.

    Uses k g_k = sum_j ((beta+1) j - k) c_j g_{k-j}; ``None`` stands for zero.
    """
    g = [one]
    for k in range(1, D):
        acc = None
        for j in range(1, k + 1):
            cj = c[j] if j < len(c) else None
            if cj is None or g[k - j] is None:
                continue
            w = (beta + 1) * j - k
            if w == 0:
                continue
            term = (cj * g[k - j]) * w
            acc = term if acc is None else acc + term
        g.append(None if acc is None else acc * Fraction(1, k))
    return g


def _levels_needed(depth, target, new_top, unit):
    """Number of expansion levels: from ``depth`` or from a floor target."""
    if target is None:
        return depth
    # enough levels that the last one sits at or below the target
    return max(1, _ceil((new_top - as_rat(target)) / unit) + 1)


def _power_x_series(F: Series, beta: Fraction, depth: int, err: str, target=None) -> Series:
    """Power of a series expanded in descending x (spaces A_X and P_POLY_Y)."""
    levels: dict[int, dict[int, Fraction]] = {}
    for (a, b), c in F.terms.items():
        levels.setdefault(a, {})[b] = c
    top = max(levels)
    lead = levels[top]
    if set(lead) != {0}:
        raise JacpairError(err, "leading x-coefficient is not a nonzero constant")
    c0 = lead[0]
    lead_pow = rational_power(c0, beta)
    if lead_pow is None:
        raise JacpairError(err, f"no rational {beta}-power of leading coefficient {c0}")
    N = F.N
    e = Fraction(top, N)
    new_top = beta * e
    space = F.space
    if len(levels) == 1 and F.x_floor is None:
        return Series.monomial(lead_pow, new_top, 0, space)
    # expansion step: gcd of the gaps for exact input, the 1/N grid otherwise
    g = 0
    for a in levels:
        g = math.gcd(g, top - a)
    if F.x_floor is not None:
        g = 1
    unit = Fraction(g, N)
    D = _levels_needed(depth, target, new_top, unit)
    if F.x_floor is not None:
        D = min(D, (top - _ceil(F.x_floor * N)) // g + 1)
    if D < 1:
        raise JacpairError("BELOW_FLOOR", "input too truncated for a power")
    cs: list = [None] * D
    for a, lv in levels.items():
        j = (top - a) // g
        if 0 < j < D:
            cs[j] = Series(space, {(0, b): v / c0 for b, v in lv.items()}, 1, F.M)
    gs = _miller(cs, beta, D, Series.one(space))
    out_terms = []
    for k, gk in enumerate(gs):
        if gk is None:
            continue
        for c, _, y in gk.items():
            out_terms.append((c * lead_pow, new_top - k * unit, y))
    return Series.from_terms(space, out_terms, x_floor=new_top - (D - 1) * unit)


def _power_b(F: Series, beta: Fraction, depth: int, err: str, target=None) -> Series:
    levels = F.y_levels()
    m = max(levels)
    f0 = levels[m]
    f0_terms = list(f0.items())
    if len(f0_terms) == 1 and f0.x_floor is None:
        c0, e0, _ = f0_terms[0]
        f0inv = Series.from_terms(Space.A_X, [(1 / c0, -e0, 0)])
        lead_pow = rational_power(c0, beta)
        if lead_pow is None:
            raise JacpairError(err, f"no rational {beta}-power of leading coefficient {c0}")
        f0pow = Series.from_terms(Space.A_X, [(lead_pow, beta * e0, 0)])
    else:
        f0inv = _power_x_series(f0, Fraction(-1), depth, err)
        f0pow = _power_x_series(f0, beta, depth, err)
    new_top = beta * m
    if len(levels) == 1 and F.y_floor is None:
        return Series.from_y_levels(Space.B_DESC_Y, {new_top: f0pow})
    # gcd of rational gaps on the 1/M grid
    gi = 0
    for y in levels:
        gi = math.gcd(gi, int((m - y) * F.M))
    if F.y_floor is not None:
        gi = 1
    unit = Fraction(gi, F.M)
    D = _levels_needed(depth, target, new_top, unit)
    if F.y_floor is not None:
        D = min(D, int((m - F.y_floor) / unit) + 1)
    if D < 1:
        raise JacpairError("BELOW_FLOOR", "input too truncated for a power")
    cs: list = [None] * D
    for y, lv in levels.items():
        j = int((m - y) / unit)
        if 0 < j < D:
            cs[j] = lv * f0inv
    gs = _miller(cs, beta, D, Series.one(Space.A_X))
    out_levels = {}
    for k, gk in enumerate(gs):
        if gk is None:
            continue
        out_levels[new_top - k * unit] = f0pow * gk
    xf = f0pow.x_floor
    for lv in out_levels.values():
        xf = _max_floor(xf, lv.x_floor)
    return Series.from_y_levels(
        Space.B_DESC_Y, out_levels, x_floor=xf, y_floor=new_top - (D - 1) * unit
    )


def fractional_power(F: Series, a: int, b: int = 1, depth: int = 12) -> Series:
    """The series E with E^b = F^a, expanded in the direction of F's space.

    ``depth`` counts expansion steps: levels of y for B_DESC_Y and steps of
    ``x^(-1/N)`` for the x-ordered spaces.
    """
    if b == 0:
        raise JacpairError("BAD_EXPONENT", "zero denominator")
    beta = Fraction(a, b)
    return power(F, beta, depth)


def power(F: Series, beta, depth: int = 12, err: str = "BAD_LEADING", target=None) -> Series:
    """``F**beta`` for rational beta.

    ``target`` (optional) asks for enough levels to reach that floor: a y
    floor for B_DESC_Y, an x floor otherwise.
    """
    beta = as_rat(beta)
    if F.is_zero:
        if beta > 0 and F.is_exact:
            return F
        raise JacpairError(err, "zero has no leading term")
    if beta.denominator == 1 and beta >= 0 and F.is_exact:
        return F ** int(beta)
    if beta == 1:
        return F
    if F.space is Space.B_DESC_Y:
        return _power_b(F, beta, depth, err, target)
    return _power_x_series(F, beta, depth, err, target)


def invert(F: Series, depth: int = 12, target=None) -> Series:
    return power(F, Fraction(-1), depth, err="NOT_INVERTIBLE", target=target)


def add(F: Series, G: Series) -> Series:
    return F + G


def mul(F: Series, G: Series) -> Series:
    return F * G


def partial(F: Series, var: str) -> Series:
    return F.partial(var)


def leading_term(F: Series) -> tuple[Fraction, Fraction, Fraction]:
    """Leading ``(c, x, y)`` in the space's expansion order."""
    if F.is_zero:
        raise JacpairError("NOT_INVERTIBLE", "zero series")
    if F.space is Space.B_DESC_Y:
        return max(F.items(), key=lambda t: (t[2], t[1]))
    return max(F.items(), key=lambda t: (t[1], t[2]))


# --------------------------------------------------------------------------
# exact polynomial roots


def laurent_divexact(num: Series, den: Series) -> Series | None:
    """Exact quotient of finite x-Laurent polynomials (A_X), or None."""
    if den.is_zero:
        raise ZeroDivisionError("division by zero polynomial")
    if num.is_zero:
        return Series.zero(Space.A_X)
    dc, dx, _ = max(den.items(), key=lambda t: t[1])
    dmin = den.min_x()
    low = num.min_x() - dmin
    q_items = []
    rem = num
    guard = 0
    while not rem.is_zero:
        rc, rx, _ = max(rem.items(), key=lambda t: t[1])
        ex = rx - dx
        if ex < low:
            return None
        t = Series.from_terms(Space.A_X, [(rc / dc, ex, 0)])
        q_items.append((rc / dc, ex, 0))
        rem = rem - t * den
        guard += 1
        if guard > 100000:
            return None
    return Series.from_terms(Space.A_X, q_items)


def laurent_root(h: Series, k: int) -> Series | None:
    """Exact k-th root of a finite x-Laurent polynomial, or None."""
    if h.is_zero:
        return h
    if k == 1:
        return h
    top = max(a for a, _ in h.terms)
    bottom = min(a for a, _ in h.terms)
    span = top - bottom
    if span % k:
        return None
    try:
        r = _power_x_series(h.with_space(Space.A_X), Fraction(1, k), span // k + 1, "BAD_LEADING")
    except JacpairError:
        return None
    r = r.drop_floors()
    if (r**k) == h.with_space(Space.A_X).drop_floors():
        return r
    return None


def poly_power_root(H: Series, k: int) -> Series | None:
    """Exact ``H1`` with ``H1**k == H`` for H polynomial in y over x-Laurent, else None."""
    if not H.is_exact:
        raise JacpairError("NOT_EXACT", "poly_power_root needs an exact input")
    if k < 1:
        raise ValueError("k must be positive")
    if H.is_zero or k == 1:
        return H
    space = H.space
    lv = H.y_levels()
    ymin = min(lv)
    ymax = max(lv)
    if ymin.denominator != 1 or ymax.denominator != 1:
        return None
    if ymin % k or ymax % k:
        return None
    d = int(ymax - ymin)
    r = d // k
    a0 = laurent_root(lv[ymax], k)
    if a0 is None:
        return None
    div = (a0 ** (k - 1)).scale(k)
    acc = [a0]
    for j in range(1, r + 1):
        S = Series.from_y_levels(Space.B_DESC_Y, {Fraction(r - i): acc[i] for i in range(j)})
        Sk = S**k
        # S is built with exponents shifted down by ymin
        target = lv.get(ymax - j, Series.zero(Space.A_X))
        have = Sk.y_levels().get(Fraction(d - j), Series.zero(Space.A_X))
        diff = target - have
        aj = laurent_divexact(diff, div)
        if aj is None:
            return None
        acc.append(aj)
    shift = ymin / k
    root = Series.from_y_levels(Space.B_DESC_Y, {Fraction(r - i) + shift: acc[i] for i in range(r + 1)})
    if space is not Space.B_DESC_Y:
        if space is Space.P_POLY_Y and shift < 0:
            return None
        root = root.with_space(space)
    if (root**k) == H:
        return root
    return None


# --------------------------------------------------------------------------
# text form


_TERM_RE = re.compile(
    r"""\s*(?P<sign>[+-])?\s*
    (?P<coef>\d+(?:/\d+)?)?\s*\*?\s*
    (?P<mons>(?:[xy](?:\s*\^\s*(?:\(\s*-?\d+(?:/\d+)?\s*\)|-?\d+))?\s*\*?\s*)*)""",
    re.X,
)
_FLOOR_RE = re.compile(r"\+?O\(([xy])\^\(?(-?\d+(?:/\d+)?)\)?\)")
_MON_RE = re.compile(r"([xy])(?:\s*\^\s*(?:\(\s*(-?\d+(?:/\d+)?)\s*\)|(-?\d+)))?")


def from_text(text: str, space: Space = Space.P_POLY_Y, x_floor=None, y_floor=None) -> Series:
    """Parse a sum of monomials such as ``"x^2*y^4 + 2*x^(5/8)*y - 1/2"``.

    Trailing ``O(x^a)`` / ``O(y^b)`` terms, as written by :func:`to_text`,
    set the floors.
    """
    s = text.replace(" ", "")
    for var, e in _FLOOR_RE.findall(s):
        if var == "x":
            x_floor = as_rat(e)
        else:
            y_floor = as_rat(e)
    s = _FLOOR_RE.sub("", s)
    if not s:
        raise JacpairError("MALFORMED", "empty expression")
    items = []
    pos = 0
    while pos < len(s):
        m = _TERM_RE.match(s, pos)
        if not m or m.end() == pos:
            raise JacpairError("MALFORMED", f"cannot parse {text!r} at {pos}")
        sign = -1 if m.group("sign") == "-" else 1
        coef = as_rat(m.group("coef")) if m.group("coef") else Fraction(1)
        mons = m.group("mons") or ""
        if not m.group("coef") and not mons:
            raise JacpairError("MALFORMED", f"cannot parse {text!r} at {pos}")
        ex = Fraction(0)
        ey = Fraction(0)
        for var, e1, e2 in _MON_RE.findall(mons):
            e = as_rat(e1 or e2 or 1)
            if var == "x":
                ex += e
            else:
                ey += e
        items.append((sign * coef, ex, ey))
        pos = m.end()
    return Series.from_terms(space, items, x_floor, y_floor)


def _fmt_exp(e: Fraction) -> str:
    if e.denominator == 1:
        return str(e.numerator) if e >= 0 else f"({e})"
    return f"({e})"


def to_text(F: Series) -> str:
    parts = []
    for c, x, y in F.sorted_items():
        mon = []
        if x != 0:
            mon.append("x" if x == 1 else f"x^{_fmt_exp(x)}")
        if y != 0:
            mon.append("y" if y == 1 else f"y^{_fmt_exp(y)}")
        mag = abs(c)
        body = "*".join(mon)
        if not body:
            term = str(mag)
        elif mag == 1:
            term = body
        else:
            term = f"{mag}*{body}"
        parts.append(("-" if c < 0 else "+", term))
    if not parts:
        s = "0"
    else:
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sg, t in parts[1:]:
            s += f" {sg} {t}"
    tails = []
    if F.x_floor is not None:
        tails.append(f"O(x^{_fmt_exp(F.x_floor)})")
    if F.y_floor is not None:
        tails.append(f"O(y^{_fmt_exp(F.y_floor)})")
    if tails:
        s += " + " + " + ".join(tails)
    return s
