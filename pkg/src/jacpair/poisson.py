"""Poisson bracket, trace, Jacobian-element tests and bracket-preserving maps."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import JacpairError
from .series import Series, Space, _max_floor, as_rat, binom, power
from .univariate import rational_roots
from .verdict import Verdict


def bracket(F: Series, G: Series) -> Series:
    """``F_x G_y - F_y G_x``."""
    F._check_space(G)
    return F.dx() * G.dy() - F.dy() * G.dx()


def trace(F: Series) -> Fraction:
    """Coefficient of ``(xy)^-1``."""
    return F.known_coeff(-1, -1)


# --------------------------------------------------------------------------
# e^{ad_H}


def check_generator(H: Series) -> None:
    """Reject generators whose exponential is not an automorphism we can compute."""
    for c, x, y in H.items():
        if x > 1:
            raise JacpairError("BAD_GENERATOR", f"x-degree {x} > 1")
        if x == 1:
            if y == 1:
                # e^{ad_{xy}} scales x^i y^j by e^{j-i}: not rational
                raise JacpairError("BAD_GENERATOR", "xy term gives transcendental scaling")
            if y != 0:
                raise JacpairError("BAD_GENERATOR", f"x-degree-1 part contains y^{y}")
    if H.x_floor is not None and H.x_floor > 1:
        raise JacpairError("BAD_GENERATOR", "generator floor above x^1")


def _grid(*series: Series) -> int:
    return math.lcm(*(s.N for s in series))


def exp_ad(H: Series, P: Series, depth: int = 64, x_floor=None) -> Series:
    """``sum ad_H^i(P)/i!``.

    Iteration stops once a term vanishes (above ``x_floor`` when given).  If
    ``depth`` iterations are not enough, the result's x floor is raised past
    every term that the omitted iterations could touch.
    """
    check_generator(H)
    if H.is_zero and H.is_exact:
        return P
    target = None if x_floor is None else as_rat(x_floor)
    out = P if target is None else P.with_floors(target)
    term = out
    top_h = _max_floor(H.deg_x(), H.x_floor)
    for i in range(1, depth + 1):
        term = bracket(H, term).scale(Fraction(1, i))
        if target is not None:
            term = term.with_floors(target)
        if term.is_zero:
            return out + term
        out = out + term
    nxt_top = term.deg_x() + top_h - 1
    step = Fraction(1, _grid(out, H, term))
    return out.with_floors(nxt_top + step)


# --------------------------------------------------------------------------
# substitutions


def shift_y(F: Series, lam, e, depth: int = 12) -> Series:
    """Substitute ``y -> y + lam * x^e`` (e <= 0)."""
    lam = as_rat(lam)
    e = as_rat(e)
    if e > 0:
        raise JacpairError("BAD_GENERATOR", "shift exponent must be <= 0")
    if lam == 0:
        return F
    xf, yf = F.x_floor, F.y_floor
    trunc_y = None
    items = list(F.items())
    for c, x, y in items:
        natural = y.denominator == 1 and y >= 0
        if natural or yf is not None or (e < 0 and xf is not None):
            continue
        cand = y - depth
        trunc_y = cand if trunc_y is None else max(trunc_y, cand)
    yf_out = _max_floor(yf, trunc_y)
    out = []
    for c, x, y in items:
        s = 0
        coef = Fraction(1)
        while True:
            ny = y - s
            nx = x + s * e
            if yf_out is not None and ny < yf_out:
                break
            if e < 0 and xf is not None and nx < xf:
                break
            b = binom(y, s)
            if b == 0:
                break
            out.append((c * b * coef, nx, ny))
            s += 1
            coef *= lam
    return Series.from_terms(F.space, out, xf, yf_out)


def z_c(F: Series, c, depth: int = 12) -> Series:
    """``(x, y) -> (x, y - c/x)``."""
    return shift_y(F, -as_rat(c), -1, depth)


def monomial_change(F: Series, p: int, q: int) -> Series:
    """``x^i y^j -> x^((q i - p j)/(q - p)) y^j``."""
    if not p < q:
        raise JacpairError("BAD_GENERATOR", "monomial change needs p < q")
    k = q - p
    out = [(c, (q * x - p * y) / k, y) for c, x, y in F.items()]
    xf = F.x_floor
    new_xf = None
    if xf is not None:
        if p == 0:
            new_xf = xf
        elif p > 0:
            low = F.y_floor if F.y_floor is not None else (Fraction(0) if F.space is Space.P_POLY_Y else None)
            if low is None:
                raise JacpairError("UNBOUNDED_FLOOR", "no lower bound on y under the x floor")
            new_xf = (q * xf - p * low) / k
        else:
            if F.space is Space.P_POLY_Y:
                raise JacpairError("UNBOUNDED_FLOOR", "no upper bound on y under the x floor")
            high = F._known_max_y()
            new_xf = (q * xf - p * high) / k
    return Series.from_terms(F.space, out, new_xf, F.y_floor)


# --------------------------------------------------------------------------
# automorphism log


@dataclass(frozen=True)
class AutoStep:
    kind: str  # "expAd" | "zc" | "monomial" | "shiftY"
    H: Series | None = None
    c: Fraction | None = None
    p: int | None = None
    q: int | None = None
    lam: Fraction | None = None
    e: Fraction | None = None

    @staticmethod
    def exp_ad(H: Series) -> "AutoStep":
        check_generator(H)
        return AutoStep("expAd", H=H)

    @staticmethod
    def zc(c) -> "AutoStep":
        return AutoStep("zc", c=as_rat(c))

    @staticmethod
    def monomial(p: int, q: int) -> "AutoStep":
        if not p < q:
            raise JacpairError("BAD_GENERATOR", "monomial change needs p < q")
        return AutoStep("monomial", p=int(p), q=int(q))

    @staticmethod
    def shift(lam, e) -> "AutoStep":
        return AutoStep("shiftY", lam=as_rat(lam), e=as_rat(e))

    def inverse(self) -> "AutoStep":
        if self.kind == "expAd":
            return AutoStep("expAd", H=-self.H)
        if self.kind == "zc":
            return AutoStep("zc", c=-self.c)
        if self.kind == "shiftY":
            return AutoStep("shiftY", lam=-self.lam, e=self.e)
        return AutoStep("monomial", p=-self.p, q=self.q - self.p)

    def apply(self, F: Series, depth: int = 12, x_floor=None) -> Series:
        if self.kind == "expAd":
            H = self.H.with_space(F.space) if self.H.space is not F.space else self.H
            return exp_ad(H, F, 64 if x_floor is not None else depth, x_floor)
        if self.kind == "zc":
            return z_c(F, self.c, depth)
        if self.kind == "shiftY":
            return shift_y(F, self.lam, self.e, depth)
        return monomial_change(F, self.p, self.q)

    def jacobian_factor(self) -> Fraction:
        """Factor by which the step scales a bracket."""
        if self.kind == "monomial":
            return Fraction(self.q, self.q - self.p)
        return Fraction(1)

    def to_dict(self) -> dict:
        if self.kind == "expAd":
            return {"kind": "expAd", "H": self.H.to_dict()}
        if self.kind == "zc":
            return {"kind": "zc", "c": str(self.c)}
        if self.kind == "shiftY":
            return {"kind": "shiftY", "lambda": str(self.lam), "e": str(self.e)}
        return {"kind": "monomial", "p": self.p, "q": self.q}

    @staticmethod
    def from_dict(d: dict) -> "AutoStep":
        try:
            kind = d["kind"]
            if kind == "expAd":
                return AutoStep.exp_ad(Series.from_dict(d["H"]))
            if kind == "zc":
                return AutoStep.zc(d["c"])
            if kind == "shiftY":
                return AutoStep.shift(d["lambda"], d["e"])
            if kind == "monomial":
                return AutoStep.monomial(int(d["p"]), int(d["q"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise JacpairError("MALFORMED", f"bad AutoStep: {exc}") from exc
        raise JacpairError("MALFORMED", f"unknown step kind {d.get('kind')!r}")


@dataclass(frozen=True)
class AutoLog:
    steps: tuple[AutoStep, ...] = ()

    def then(self, *steps: AutoStep) -> "AutoLog":
        return AutoLog(self.steps + tuple(steps))

    def inverse(self) -> "AutoLog":
        return AutoLog(tuple(s.inverse() for s in reversed(self.steps)))

    def jacobian_factor(self) -> Fraction:
        f = Fraction(1)
        for s in self.steps:
            f *= s.jacobian_factor()
        return f

    def to_list(self) -> list:
        return [s.to_dict() for s in self.steps]

    @staticmethod
    def from_list(items: list) -> "AutoLog":
        if not isinstance(items, list):
            raise JacpairError("MALFORMED", "AutoLog JSON must be a list")
        return AutoLog(tuple(AutoStep.from_dict(d) for d in items))

    def __len__(self) -> int:
        return len(self.steps)


def apply_auto(log: AutoLog, F: Series, depth: int = 12, x_floor=None) -> Series:
    for step in log.steps:
        F = step.apply(F, depth, x_floor)
    return F


# --------------------------------------------------------------------------
# Jacobian element tests


def _as_b(F: Series) -> Series:
    return F if F.space is Space.B_DESC_Y else F.with_space(Space.B_DESC_Y)


def _lead_coeff_roots(F: Series) -> list[Fraction]:
    levels = F.y_levels()
    f0 = levels[max(levels)]
    if not f0.is_exact or any(x.denominator != 1 for _, x, _ in f0.items()):
        return []
    lo = int(f0.min_x())
    hi = int(f0.deg_x())
    poly = [Fraction(0)] * (hi - lo + 1)
    for c, x, _ in f0.items():
        poly[int(x) - lo] = c
    return [r for r in rational_roots(poly) if r != 0]


def default_grid(F: Series) -> tuple[list[Fraction], list[Fraction]]:
    m = _as_b(F).deg_y()
    a_vals = [Fraction(1), Fraction(-1)]
    if m:
        a_vals += [1 / m, -1 / m] + [(1 - m - i) / m for i in range(4)]
    seen = []
    for a in a_vals:
        if a != 0 and a not in seen:
            seen.append(a)
    return seen, [Fraction(0)] + _lead_coeff_roots(_as_b(F))


def _trace_of_power(F: Series, a: Fraction, depth: int) -> Fraction:
    c0 = max(F.y_levels().items())[1]
    lead = max(c0.items(), key=lambda t: t[1])[0]
    # trace vanishing is scale invariant; normalising keeps roots rational
    G = F.scale(1 / lead)
    last = None
    for d in (depth, 2 * depth, 4 * depth):
        try:
            return trace(power(G, a, d, target=-1))
        except JacpairError as exc:
            if exc.code != "BELOW_FLOOR":
                raise
            last = exc
    raise last


def is_jacobian_candidate(F: Series, aSamples=None, cSamples=None, depth: int = 12) -> Verdict:
    """Necessary condition: tr((F - c)^a) = 0 on a sample grid."""
    F = _as_b(F)
    if F.is_exact and all(y == 0 and x == 0 for _, x, y in F.items()):
        return Verdict(False, {"reason": "constant"})
    da, dc = default_grid(F)
    a_list = [as_rat(a) for a in aSamples] if aSamples is not None else da
    c_list = [as_rat(c) for c in cSamples] if cSamples is not None else dc
    skipped = []
    checked = 0
    for a in a_list:
        for c in c_list:
            Fc = F - c
            if Fc.is_zero:
                continue
            try:
                t = _trace_of_power(Fc, a, depth)
            except JacpairError as exc:
                skipped.append({"a": str(a), "c": str(c), "code": exc.code})
                continue
            checked += 1
            if t != 0:
                return Verdict(False, {"witness": {"a": str(a), "c": str(c)}, "trace": str(t)})
    return Verdict(True, {"checked": checked, "skipped": skipped})


def integrate_x(b: Series) -> Series:
    """Antiderivative in x; raises on an x^-1 term."""
    out = []
    for c, x, y in b.items():
        if x == -1:
            raise JacpairError("OBSTRUCTION", "x^-1 term has no antiderivative")
        out.append((c / (x + 1), x + 1, y))
    xf = None if b.x_floor is None else b.x_floor + 1
    return Series.from_terms(b.space, out, xf, b.y_floor)


def construct_partner(F: Series, depth: int = 12) -> Series:
    """G with [F, G] = 1 built from the expansion of y in powers of F."""
    from .expansion import expand_y_in_F

    F = _as_b(F)
    m = F.deg_y()
    if m is None or m < 1 or m.denominator != 1:
        raise JacpairError("PRECONDITION_FAILED", "construct_partner needs deg_y F >= 1")
    m = int(m)
    bbar = expand_y_in_F(F, depth).coeffs
    y_target = 1 - m - depth
    phi_inv = power(F, Fraction(-1, m), depth, target=y_target - (1 - m))
    base = power(F, Fraction(1 - m, m), depth, target=y_target)
    G = Series.zero(Space.B_DESC_Y)
    cur = base
    for i, bb in enumerate(bbar):
        if i != 1:
            if bb.is_known(-1, 0) and bb.coeff(-1, 0) != 0:
                raise JacpairError("OBSTRUCTION", f"x^-1 appears in coefficient {i}", index=i)
            bi = integrate_x(bb).scale(-Fraction(1 - i, m))
            G = G + bi.with_space(Space.B_DESC_Y) * cur
        cur = (cur * phi_inv).with_floors(None, y_target)
    return G.with_floors(None, y_target)


def _laurent_t(s: Series) -> Series:
    if s.space is not Space.A_X:
        s = s.with_space(Space.A_X)
    return s


def residue_pullback_check(F: Series, G: Series, u: Series, v: Series, depth: int = 12) -> Verdict:
    """Compare res_t(F dG/dt) with J res_t(u dv/dt) for x = u(t), y = v(t).

    ``u`` and ``v`` are one-variable series in ``t`` stored in the x slot
    (space A_X).  F and G must be polynomial in y.
    """
    J = bracket(F, G)
    if not J.is_exact or any(x != 0 or y != 0 for _, x, y in J.items()):
        raise JacpairError("PRECONDITION_FAILED", "[F, G] is not a constant")
    J0 = J.coeff(0, 0)
    FG = F * G.dx()
    lvl = FG.x_levels().get(Fraction(-1))
    if lvl is not None and not lvl.is_zero:
        raise JacpairError("PRECONDITION_FAILED", "res_x(F dG/dx) is nonzero")
    u = _laurent_t(u)
    v = _laurent_t(v)

    def subst(S: Series) -> Series:
        acc = Series.zero(Space.A_X)
        vpow: dict[int, Series] = {}
        for c, x, y in S.items():
            if y.denominator != 1 or y < 0:
                raise JacpairError("PRECONDITION_FAILED", "substitution needs polynomial y")
            if x.denominator != 1:
                raise JacpairError("PRECONDITION_FAILED", "substitution needs integral x-powers")
            j = int(y)
            if j not in vpow:
                vpow[j] = v ** j
            ux = power(u, x, depth) if x < 0 else u ** int(x)
            acc = acc + (ux * vpow[j]).scale(c)
        return acc

    Ft = subst(F)
    Gt = subst(G)
    lhs_series = Ft * Gt.dx()
    rhs_series = u * v.dx()
    lhs = lhs_series.known_coeff(-1, 0)
    rhs = J0 * rhs_series.known_coeff(-1, 0)
    return Verdict(lhs == rhs, {"lhs": str(lhs), "rhs": str(rhs), "J": str(J0)})
