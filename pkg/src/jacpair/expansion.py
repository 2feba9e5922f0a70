"""Expansions in fractional powers of F, the b_i calculus, R_0 and the edge ODE."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import JacpairError
from .newton import NEG_INF, component, primary_polynomial, prime_degree
from .poisson import bracket
from .series import Series, Space, as_rat, invert, power, to_text
from .verdict import Verdict

B = Space.B_DESC_Y


def _as_b(F: Series) -> Series:
    return F if F.space is B else F.with_space(B)


@dataclass(frozen=True)
class ExpansionCoeffs:
    kind: str  # "G_IN_F" | "Y_IN_F"
    m: int
    n: Fraction
    coeffs: tuple[Series, ...]
    y_floor: Fraction

    def to_dict(self) -> dict:
        n = int(self.n) if self.n.denominator == 1 else str(self.n)
        return {"kind": self.kind, "m": self.m, "n": n, "coeffs": [c.to_dict() for c in self.coeffs]}

    def __getitem__(self, i: int) -> Series:
        return self.coeffs[i]

    def __len__(self) -> int:
        return len(self.coeffs)


def _degree_m(F: Series) -> int:
    m = F.deg_y()
    if m is None or m < 1 or m.denominator != 1:
        raise JacpairError("PRECONDITION_FAILED", "expansion needs deg_y F a positive integer")
    if any(y.denominator != 1 for _, _, y in F.items()):
        raise JacpairError("PRECONDITION_FAILED", "expansion needs integral y-powers in F")
    levels = F.y_levels()
    c, _, _ = max(levels[m].items(), key=lambda t: t[1])
    if c != 1:
        raise JacpairError("NONMONIC", f"leading coefficient {c} is not 1")
    return int(m)


def _expand(F: Series, T: Series, top: Fraction, count: int, depth: int):
    """Coefficients t_0..t_{count-1} of T = sum t_i F^{(top - i)/m}."""
    m = _degree_m(F)
    y_floor = top - count + 1
    cur = power(F, top / m, depth, target=y_floor)
    phi_inv = power(F, Fraction(-1, m), depth, target=y_floor - top)
    R = T.with_floors(None, y_floor)
    out = []
    for i in range(count):
        level = top - i
        lead = cur.y_levels().get(level)
        lv = R.y_levels().get(level, Series.zero(Space.A_X, R.x_floor))
        if lead is None or lead.is_zero:
            raise JacpairError("BELOW_FLOOR", "leading level of a power is unknown")
        if len(lead) == 1 and lead.is_exact:
            c, x, _ = next(lead.items())
            b = lv.shift(-x, 0, 1 / c)
        else:
            b = lv * invert(lead, depth)
        out.append(b)
        if not b.is_zero:
            R = R - (b.with_space(B) * cur).with_floors(None, y_floor)
        cur = (cur * phi_inv).with_floors(None, y_floor)
    return m, out, y_floor


def expand_G_in_F(F: Series, G: Series, depth: int = 12) -> ExpansionCoeffs:
    """b_0..b_depth with G = sum b_i F^{(n-i)/m}."""
    F, G = _as_b(F), _as_b(G)
    n = G.deg_y()
    m, coeffs, yf = _expand(F, G, n, depth + 1, depth)
    return ExpansionCoeffs("G_IN_F", m, n, tuple(coeffs), yf)


def expand_y_in_F(F: Series, depth: int = 12) -> ExpansionCoeffs:
    """bbar_0..bbar_depth with y = sum bbar_i F^{(1-i)/m}."""
    F = _as_b(F)
    y = Series.var("y", B)
    m, coeffs, yf = _expand(F, y, Fraction(1), depth + 1, depth)
    return ExpansionCoeffs("Y_IN_F", m, Fraction(1), tuple(coeffs), yf)


def reexpand(ec: ExpansionCoeffs, F: Series, depth: int = 12) -> Series:
    F = _as_b(F)
    acc = Series.zero(B)
    for i, b in enumerate(ec.coeffs):
        if b.is_zero and b.is_exact:
            continue
        P = power(F, (ec.n - i) / ec.m, depth, target=ec.y_floor)
        acc = acc + b.with_space(B) * P
    return acc.with_floors(None, ec.y_floor)


# --------------------------------------------------------------------------
# closed-form coefficients


def _level(S: Series, y) -> Series:
    return S.y_levels().get(as_rat(y), Series.zero(Space.A_X, S.x_floor))


def coeff_closed_form(F: Series, l: int, i: int, depth: int = 12) -> Series:
    """c_{l,i} in y^l = sum c_{l,i} F^{(l-i)/m} from the residue formulas."""
    F = _as_b(F)
    m = _degree_m(F)
    if i != l:
        P = power(F, Fraction(i - l, m), depth, target=-l)
        return _level(P, -l).scale(Fraction(-l, i - l))
    if l == 0:
        return Series.one(Space.A_X)
    # the y-exponent here is -l-1; the residue pairing needs the extra -1
    Q = power(F, -1, depth, target=-l - 1 - m) * F.dy()
    return _level(Q, -l - 1).scale(Fraction(1, m))


def coeff_of_F_power(F: Series, l: int, k: int, i: int, depth: int = 12) -> Series:
    """Coefficient of F^{(k+l-i)/m} in y^l F^{k/m}.

    The closed form is cross-checked against a direct expansion by
    subtraction; a disagreement raises ``COEFF_MISMATCH``.
    """
    F = _as_b(F)
    m = _degree_m(F)
    if m + k == 0:
        raise JacpairError("DEGENERATE", "m = -k")
    value = coeff_closed_form(F, l, i, depth)
    top = Fraction(k + l)
    T = Series.monomial(1, 0, l, B) * power(F, Fraction(k, m), depth, target=top - i - depth)
    _, cs, _ = _expand(F, T, top, i + 1, depth)
    if not value.agrees(cs[i]):
        raise JacpairError(
            "COEFF_MISMATCH", f"closed form {to_text(value)} vs expansion {to_text(cs[i])}"
        )
    return value


# --------------------------------------------------------------------------
# the b-derivative law


def bracket_constant(F: Series, G: Series) -> Fraction | None:
    """The bracket if it is a nonzero constant (above the floors), else None."""
    J = bracket(_as_b(F), _as_b(G))
    if any(x != 0 or y != 0 for _, x, y in J.items()):
        return None
    if not J.is_known(0, 0):
        return None
    c = J.coeff(0, 0)
    return c if c != 0 else None


def _is_const(b: Series) -> bool:
    return all(x == 0 for _, x, _ in b.items()) and (b.x_floor is None or b.x_floor <= 0)


def check_b_derivative_law(F: Series, G: Series, depth: int = 12) -> Verdict:
    F, G = _as_b(F), _as_b(G)
    J = bracket_constant(F, G)
    if J is None:
        raise JacpairError("NOT_QJ_PAIR", "[F, G] is not a nonzero constant")
    m = _degree_m(F)
    n = G.deg_y()
    s = m + n - 1
    if s < 0 or s.denominator != 1:
        return Verdict(False, {"reason": "m + n < 1", "J": str(J)})
    s = int(s)
    bs = expand_G_in_F(F, G, depth + s)
    bbar = expand_y_in_F(F, depth)
    bad = []
    for i in range(min(s, len(bs))):
        if not _is_const(bs[i]):
            bad.append({"i": i, "law": "constant"})
    for i in range(depth + 1):
        lhs = bs[i + s].dx()
        rhs = bbar[i].scale(-Fraction(1 - i) * J / m)
        if not lhs.agrees(rhs):
            bad.append({"i": i + s, "law": "derivative", "residual": to_text(lhs - rhs)})
    f0 = F.y_levels()[Fraction(m)]
    if not bbar[0].agrees(power(f0, Fraction(-1, m), depth)):
        bad.append({"i": 0, "law": "bbar0"})
    return Verdict(not bad, {"J": str(J), "m": m, "n": str(n), "failures": bad})


# --------------------------------------------------------------------------
# R_0


@dataclass(frozen=True)
class R0Result:
    R0: Series
    J: Fraction
    p: Fraction
    mu: Fraction
    d: int
    priF: Series
    degree_ok: bool

    def to_dict(self) -> dict:
        return {
            "R0": self.R0.to_dict(),
            "J": str(self.J),
            "p": str(self.p),
            "mu": str(self.mu),
            "d": self.d,
            "priF": self.priF.to_dict(),
            "degreeOk": self.degree_ok,
        }


def compute_R0(F: Series, G: Series, depth: int = 12) -> R0Result:
    F, G = _as_b(F), _as_b(G)
    J = bracket_constant(F, G)
    if J is None:
        raise JacpairError("NOT_QJ_PAIR", "[F, G] is not a nonzero constant")
    m = _degree_m(F)
    n = G.deg_y()
    if m + n < 2:
        raise JacpairError("PRECONDITION_FAILED", "R_0 needs m + n >= 2")
    p = prime_degree(F)
    if p == NEG_INF:
        raise JacpairError("PRECONDITION_FAILED", "F has no finite prime degree")
    f0 = F.y_levels()[Fraction(m)]
    m0 = f0.deg_x()
    slope = p + m0 / m
    if slope == 0:
        raise JacpairError("MU_DEGENERATE", "p = -m0/m")
    mu = m + n - (1 + p) / slope
    pp = primary_polynomial(F, p)
    d = pp.d
    priF = pp.priF.with_space(B)
    s = int(m + n - 1)
    y_floor = 1 - m - depth
    need_b = mu.denominator == 1 and mu >= 0
    bs = expand_G_in_F(F, G, max(int(mu), 0) + 1) if need_b else None
    bbar = expand_y_in_F(F, depth)

    R0 = Series.zero(B)
    if need_b and mu < s:
        b_mu = bs[int(mu)]
        ex = m0 * (n - mu) / m
        R0 = R0 + b_mu.with_space(B) * power(priF, (n - mu) / d, depth, target=y_floor).shift(ex, 0)
    cur = power(priF, Fraction(1 - m, d), depth, target=y_floor)
    step = power(priF, Fraction(-1, d), depth, target=y_floor - (1 - m))
    for i in range(depth + 1):
        sigma = i * slope - m0 / m
        if 1 + sigma == 0:
            # limit convention: the coefficient is b'_mu
            b_mu = bs[int(mu)] if bs is not None else Series.zero(Space.A_X)
            k = b_mu.known_coeff(0, 0)
        else:
            k = -J / m * Fraction(1 - i) / (1 + sigma) * bbar[i].known_coeff(sigma, 0)
        if k:
            R0 = R0 + cur.shift(1 - m0 + i * p, 0, k)
        cur = (cur * step).with_floors(None, y_floor)
    R0 = R0.with_floors(None, y_floor)
    F0 = component(F, p, 0)
    check = bracket(F0, R0)
    if not check.agrees(Series.const(J, B)):
        raise JacpairError("R0_CHECK_FAILED", "[F<0>, R0] differs from J", residual=to_text(check - J))
    deg = R0.deg_y()
    degree_ok = deg in ((1 + p) / slope - m, Fraction(1 - m))
    return R0Result(R0, J, p, mu, d, pp.priF, degree_ok)


# --------------------------------------------------------------------------
# edge ODE


def edge_ode_alphas(a: int, pPrime: int, q: int, m, m0, mPrime: int, J) -> tuple[Fraction, Fraction, Series]:
    m, m0, J = as_rat(m), as_rat(m0), as_rat(J)
    a2 = pPrime * m + m0 * q
    a1 = -a * a2 - mPrime * (pPrime + q)
    a3 = Series.monomial(q * J, 1 - m0, 0, B)
    return a1, a2, a3


def check_edge_ode(
    priF: Series, P: Series, a: int, pPrime: int, q: int, m, m0, mPrime: int, J, depth: int = 12
) -> Verdict:
    """Check a1 P dF/dy + a2 F dP/dy = a3 F^{a+1} exactly."""
    Fb, Pb = _as_b(priF), _as_b(P)
    a1, a2, a3 = edge_ode_alphas(a, pPrime, q, m, m0, mPrime, J)
    lhs = Pb * Fb.dy() * a1 + Fb * Pb.dy() * a2
    rhs = a3 * (Fb ** (a + 1) if a + 1 >= 0 else power(Fb, a + 1, depth))
    res = lhs - rhs
    details = {
        "alpha1": str(a1),
        "alpha2": str(a2),
        "alpha3": to_text(a3),
        "residual": to_text(res),
    }
    if Pb.is_zero:
        details["degenerateP"] = True
    return Verdict(res.is_zero, details)
