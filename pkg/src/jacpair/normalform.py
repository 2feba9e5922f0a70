"""Step-two normalization: peel tails until F = H^a f(K), G = H^b g(K).

The peel at level i removes the x^{-i/N} tails of a normalized pair with one
``e^{ad_Q}`` (and, at i = N, a ``z_c``).  Replaying the inverse log on x and
y gives H and K with [H, K] = 1.  The alpha-decomposition splits H and K into
quasi-homogeneous components, and :func:`solve_Q_nu` recovers the generator
linking the first nonzero component to the zeroth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import JacpairError
from .poisson import AutoLog, AutoStep, apply_auto, bracket
from .reduction import NormalizedPair, _poly_of_level
from .series import Series, Space, _max_floor, power
from .verdict import Verdict
from . import univariate as up

P = Space.P_POLY_Y


# --------------------------------------------------------------------------
# level access


def _level(S: Series, top: Fraction, j: int, N: int) -> up.Poly:
    x = top - Fraction(j, N)
    if S.x_floor is not None and x < S.x_floor:
        raise JacpairError("DEPTH_INSUFFICIENT", f"level {j} lies below the floor")
    lv = S.x_levels().get(x)
    return [] if lv is None else _poly_of_level(lv)


def _truncate(pair: NormalizedPair, D: int) -> tuple[Series, Series]:
    N = pair.N
    return (
        pair.F.with_floors(pair.a - Fraction(D, N)),
        pair.G.with_floors(pair.b - Fraction(D, N)),
    )


def _integrate_y(a: up.Poly) -> up.Poly:
    return up.trim([Fraction(0)] + [c / (k + 1) for k, c in enumerate(a)])


def _x_poly(coef_x: Fraction, a: up.Poly) -> Series:
    return Series.from_terms(P, [(c, coef_x, k) for k, c in enumerate(a) if c])


@dataclass(frozen=True)
class PeelResult:
    i: int
    kind: str  # "none" | "expAd" | "zc"
    Q: Series
    c: Fraction | None
    steps: tuple
    F: Series
    G: Series
    hbar: up.Poly | None = None
    kbar: up.Poly | None = None
    ktilde: up.Poly | None = None

    def to_dict(self) -> dict:
        d = {"i": self.i, "kind": self.kind, "Q": self.Q.to_dict()}
        if self.c is not None:
            d["c"] = str(self.c)
        return d


def _clean_below(F: Series, G: Series, pair: NormalizedPair, i: int) -> None:
    for j in range(1, i):
        if _level(F, pair.a, j, pair.N) or _level(G, pair.b, j, pair.N):
            raise JacpairError("LEVEL_NOT_CLEAN", f"level {j} < {i} still carries a tail", level=j)


def peel_step(
    pair: NormalizedPair,
    i: int,
    F: Series | None = None,
    G: Series | None = None,
    depth: int | None = None,
) -> PeelResult:
    """Remove the level-i tails of (F, G) (defaults: the pair itself).

    Exact inputs are first truncated ``depth`` levels below the top (default
    ``max(12, i)``); truncated inputs keep their floors.
    """
    if i < 1:
        raise JacpairError("BAD_LEVEL", "levels start at 1")
    F = pair.F if F is None else F
    G = pair.G if G is None else G
    if F.x_floor is None or G.x_floor is None:
        D = max(12, i) if depth is None else depth
        F = F.with_floors(pair.a - Fraction(D, pair.N))
        G = G.with_floors(pair.b - Fraction(D, pair.N))
    _clean_below(F, G, pair, i)
    m, n, N, J = pair.m, pair.n, pair.N, pair.J
    f, g = pair.f, pair.g
    fp, gp = up.deriv(f), up.deriv(g)
    fi = _level(F, pair.a, i, N)
    gi = _level(G, pair.b, i, N)
    if not fi and not gi:
        return PeelResult(i, "none", Series.zero(P), None, (), F, G)

    def sc(a, c):
        return [Fraction(c) * v for v in a]

    if i != N:
        hbar = sc(up.sub(up.mul(fi, gp), up.mul(fp, gi)), 1 / J)
        kbar = sc(up.sub(sc(up.mul(f, gi), m), sc(up.mul(fi, g), n)), 1 / ((m + n) * J))
        ident = up.add(sc(hbar, 1 - Fraction(i, N)), up.deriv(kbar))
        fi_chk = up.add(sc(up.mul(hbar, f), Fraction(m, m + n)), up.mul(fp, kbar))
        gi_chk = up.add(sc(up.mul(hbar, g), Fraction(n, m + n)), up.mul(gp, kbar))
        if ident or up.sub(fi_chk, fi) or up.sub(gi_chk, gi):
            raise JacpairError("NOT_QJ_PAIR", f"level {i} tails violate the bracket identities", level=i)
        Q = _x_poly(1 - Fraction(i, N), sc(kbar, Fraction(-N, N - i)))
        steps = (AutoStep.exp_ad(Q),)
        kind, c, ktilde = "expAd", None, None
    else:
        w = up.sub(sc(up.mul(f, gi), m), sc(up.mul(fi, g), n))
        if len(w) > 1:
            raise JacpairError("NOT_QJ_PAIR", "level N bracket residue is not constant", level=i)
        c = (w[0] if w else Fraction(0)) / ((m + n) * J)
        q, r = up.divmod_poly(up.sub(gi, sc(gp, c)), g)
        if r:
            raise JacpairError("COPRIMALITY_VIOLATED", "g does not divide g_N - c g'", level=i)
        ktilde = sc(q, Fraction(m + n, n))
        if up.sub(up.sub(fi, sc(fp, c)), sc(up.mul(f, ktilde), Fraction(m, m + n))):
            raise JacpairError("NOT_QJ_PAIR", "level N tails of f and g disagree", level=i)
        Q = _x_poly(Fraction(0), _integrate_y(ktilde))
        steps = tuple(s for s in ((AutoStep.exp_ad(Q) if not Q.is_zero else None), (AutoStep.zc(c) if c else None)) if s)
        kind, hbar, kbar = "zc", None, None
    log = AutoLog(steps)
    F2 = apply_auto(log, F, x_floor=F.x_floor)
    G2 = apply_auto(log, G, x_floor=G.x_floor)
    if _level(F2, pair.a, i, N) or _level(G2, pair.b, i, N):
        raise JacpairError("PEEL_FAILED", f"level {i} survived its peel step", level=i)
    return PeelResult(i, kind, Q, c, steps, F2, G2, hbar, kbar, ktilde)


# --------------------------------------------------------------------------
# H and K


@dataclass
class HKResult:
    H: Series
    K: Series
    log: AutoLog
    depth: int
    N: int
    pair: NormalizedPair | None = None
    peels: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "H": self.H.to_dict(),
            "K": self.K.to_dict(),
            "autoLog": self.log.to_list(),
            "depth": self.depth,
            "N": self.N,
            "peels": [p.to_dict() for p in self.peels],
        }


def hk_from_log(log: AutoLog, N: int, depth: int) -> tuple[Series, Series]:
    """``(sigma(x), sigma(y))`` for sigma the inverse of ``log``."""
    inv = log.inverse()
    xf = 1 - Fraction(depth, N)
    yf = -Fraction(depth, N)
    H = apply_auto(inv, Series.var("x", P).with_floors(xf), x_floor=xf)
    K = apply_auto(inv, Series.var("y", P).with_floors(yf), x_floor=yf)
    return H, K


def normalize_to_HK(pair: NormalizedPair, depth: int = 12) -> HKResult:
    """Peel levels 1..depth, then read H and K off the inverse log."""
    F, G = _truncate(pair, depth)
    log = AutoLog()
    peels = []
    for i in range(1, depth + 1):
        res = peel_step(pair, i, F, G)
        F, G = res.F, res.G
        log = log.then(*res.steps)
        peels.append(res)
    H, K = hk_from_log(log, pair.N, depth)
    return HKResult(H, K, log, depth, pair.N, pair, peels)


def compose_poly(a: up.Poly, K: Series) -> Series:
    """``a(K)`` by Horner's rule."""
    out = Series.zero(P)
    for c in reversed(a):
        out = out * K + c
    return out


def hk_residuals(pair: NormalizedPair, hk: HKResult) -> Verdict:
    """[H,K] - 1 and F - H^a f(K), G - H^b g(K), each to its floor."""
    N, D = hk.N, hk.depth
    one = bracket(hk.H, hk.K) - 1
    fl_f = pair.a - Fraction(D, N)
    fl_g = pair.b - Fraction(D, N)
    rf = pair.F.with_floors(fl_f) - power(hk.H, pair.a, target=fl_f) * compose_poly(pair.f, hk.K)
    rg = pair.G.with_floors(fl_g) - power(hk.H, pair.b, target=fl_g) * compose_poly(pair.g, hk.K)
    ok = one.is_zero and rf.is_zero and rg.is_zero
    return Verdict(
        ok,
        {
            "bracketResidual": one.to_dict(),
            "FResidual": rf.to_dict(),
            "GResidual": rg.to_dict(),
        },
    )


def check_polynomiality(pair: NormalizedPair, hk: HKResult, depth: int | None = None) -> Verdict:
    """H K_x and H K_y against (mF G_v - nG F_v)/((m+n)J) to the floor."""
    H, K = hk.H, hk.K
    if depth is not None and depth < hk.depth:
        xf = -Fraction(depth, hk.N)
        H = H.with_floors(1 + xf)
        K = K.with_floors(xf)
    F, G = pair.F, pair.G
    m, n, J = pair.m, pair.n, pair.J
    scale = 1 / ((m + n) * J)
    out = {}
    ok = True
    for v in ("x", "y"):
        lhs = H * K.partial(v)
        rhs = (F * G.partial(v)).scale(m) - (G * F.partial(v)).scale(n)
        rhs = rhs.scale(scale)
        res = lhs - rhs
        neg = rhs.min_y() is not None and rhs.min_y() < 0
        ok = ok and res.is_zero and not neg
        out[f"residual_{v}"] = res.to_dict()
        out[f"negativeY_{v}"] = neg
    return Verdict(ok, out)


# --------------------------------------------------------------------------
# alpha decomposition


@dataclass
class AlphaDecomposition:
    alpha: Fraction
    beta: int
    componentsH: dict
    componentsK: dict
    gamma: Fraction | None = None
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "alpha": str(self.alpha),
            "beta": self.beta,
            "componentsH": {str(k): v.to_dict() for k, v in self.componentsH.items()},
            "componentsK": {str(k): v.to_dict() for k, v in self.componentsK.items()},
            **({"gamma": str(self.gamma)} if self.gamma is not None else {}),
            **self.details,
        }

    def H(self, i) -> Series:
        return self.componentsH.get(Fraction(i), Series.zero(P))

    def K(self, i) -> Series:
        return self.componentsK.get(Fraction(i), Series.zero(P))


def _gamma_from_hk(H: Series, K: Series, N: int) -> Fraction | None:
    best = None
    for S, top, off in ((H, Fraction(1), 0), (K, Fraction(0), 1)):
        for x, lv in S.x_levels().items():
            level = (top - x) * N
            if level <= 0:
                continue
            cand = (lv.deg_y() - off) / level
            best = cand if best is None or cand > best else best
    return best


def _gamma_from_peels(hk: HKResult) -> tuple[Fraction | None, int]:
    """Minimal gamma with deg Q_i <= 1 + i gamma, deg f_i <= m + i gamma, deg g_i <= n + i gamma.

    Returns the bound over the data at hand and the number of levels it needs.
    """
    pair = hk.pair
    ftails, gtails = pair.tails()
    best = None

    def bump(v):
        nonlocal best
        best = v if best is None or v > best else best

    for i, a in ftails.items():
        if a:
            bump(Fraction(up.degree(a) - pair.m, i))
    for i, a in gtails.items():
        if a:
            bump(Fraction(up.degree(a) - pair.n, i))
    for p in hk.peels:
        if not p.Q.is_zero:
            bump((p.Q.deg_y() - 1) / p.i)
    m1 = max(ftails, default=0)
    m2 = max(gtails, default=0)
    return best, pair.N + m1 + m2


def _alpha_dot(pair: NormalizedPair) -> Fraction | None:
    best = None
    for _, x, y in pair.F.items():
        if y > pair.m:
            cand = (pair.a - x) / (y - pair.m)
            best = cand if best is None or cand < best else best
    return best


def split_components(H: Series, K: Series, alpha: Fraction) -> tuple[dict, dict]:
    """Group terms of H and K by alpha-type component index."""
    ch: dict[Fraction, list] = {}
    ck: dict[Fraction, list] = {}
    for c, x, y in H.items():
        i = (1 - x) / alpha - y
        ch.setdefault(i, []).append((c, x, y))
    for c, x, y in K.items():
        i = 1 + (-x) / alpha - y
        ck.setdefault(i, []).append((c, x, y))
    for d in (ch, ck):
        if any(i < 0 for i in d):
            raise JacpairError("SHAPE_VIOLATED", "a term falls in a negative component")
    comps_h = {i: Series.from_terms(P, ts, H.x_floor) for i, ts in sorted(ch.items())}
    comps_k = {i: Series.from_terms(P, ts, K.x_floor) for i, ts in sorted(ck.items())}
    return comps_h, comps_k


def alpha_decompose(hk: HKResult) -> AlphaDecomposition:
    N = hk.N
    g_hk = _gamma_from_hk(hk.H, hk.K, N)
    if g_hk is None or g_hk <= 0:
        raise JacpairError("NO_TAIL", "H and K carry no y-growing tail; the leading degree is undefined")
    details: dict = {"gammaFromHK": str(g_hk)}
    gamma = g_hk
    if hk.pair is not None and hk.peels:
        g_p, needed = _gamma_from_peels(hk)
        if g_p is not None:
            details["gammaFromPeels"] = str(g_p)
        exact = hk.pair.F.is_exact and hk.pair.G.is_exact
        if exact and hk.depth < needed:
            lo = g_hk if g_p is None else max(g_hk, g_p)
            raise JacpairError(
                "DEPTH_INSUFFICIENT",
                f"alpha needs {needed} peeled levels, have {hk.depth}",
                alphaInterval=["0", str(1 / (lo * N))],
            )
        if g_p is not None and g_p > gamma:
            gamma = g_p
        details["gammaAgree"] = g_p is None or g_p == g_hk
    alpha = 1 / (gamma * N)
    comps_h, comps_k = split_components(hk.H, hk.K, alpha)
    beta = math.lcm(*(Fraction(i).denominator for i in list(comps_h) + list(comps_k)))
    if hk.K.coeff(0, 0) != 0:
        raise JacpairError("SHAPE_VIOLATED", "K carries a constant term")
    if hk.pair is not None:
        ad = _alpha_dot(hk.pair)
        if ad is not None:
            details["alphaDot"] = str(ad)
            details["alphaLeAlphaDot"] = alpha <= ad
    return AlphaDecomposition(alpha, beta, comps_h, comps_k, gamma, details)


def reassemble(decomp: AlphaDecomposition) -> tuple[Series, Series]:
    H = Series.zero(P)
    K = Series.zero(P)
    for S in decomp.componentsH.values():
        H = H + S
    for S in decomp.componentsK.values():
        K = K + S
    return H, K


def r1_observable(decomp: AlphaDecomposition, nu) -> Verdict:
    """``(1 - nu) H<0> K<nu> + H<nu> K<0>`` and whether it is free of negative y-powers."""
    nu = Fraction(nu)
    R1 = (decomp.H(0) * decomp.K(nu)).scale(1 - nu) + decomp.H(nu) * decomp.K(0)
    neg = R1.min_y() is not None and R1.min_y() < 0
    return Verdict(not neg, {"R1": R1.to_dict()})


# --------------------------------------------------------------------------
# Q_nu


def _floor_of(*ss: Series):
    xf = None
    for s in ss:
        xf = _max_floor(xf, s.x_floor)
    return xf


def solve_Q_nu(decomp: AlphaDecomposition, nu) -> Series:
    """The unique Q with [Q, H<0>] = H<nu> and [Q, K<0>] = K<nu> (shape-normalized)."""
    nu = Fraction(nu)
    a = decomp.alpha
    if nu <= 0:
        raise JacpairError("BAD_LEVEL", "nu must be positive")
    for i in set(decomp.componentsH) | set(decomp.componentsK):
        if 0 < i < nu and not (decomp.H(i).is_zero and decomp.K(i).is_zero):
            raise JacpairError("NU_NOT_MINIMAL", f"component {i} < {nu} is nonzero")
    H0, K0 = decomp.H(0), decomp.K(0)
    Hn, Kn = decomp.H(nu), decomp.K(nu)
    xf = _floor_of(H0, K0, Hn, Kn)
    if Hn.is_zero and Kn.is_zero:
        return Series.zero(P, xf)
    # j runs over nu + k; coefficient of x^{1 - j a} y^{j - nu} in H<nu>
    jmax = None if xf is None else (1 - xf) / a
    h0 = {}
    for c, x, y in H0.items():
        h0[y] = c  # H<0> term x^{1 - y a} y^y
    q: dict[Fraction, Fraction] = {nu - 1: Fraction(0)}
    k = 0
    while True:
        j = nu + k
        if jmax is not None and j > jmax:
            break
        if jmax is None and k > 64:
            raise JacpairError("DEPTH_INSUFFICIENT", "exact components need a floor")
        # coefficient match in [Q, H<0>] = H<nu>; the i = 0 term is -(1+j-nu) q_j
        acc = Hn.coeff(1 - j * a, j - nu)
        for i, hc in h0.items():
            if i < 1:
                continue
            qj = q.get(j - i)
            if not qj:
                continue
            w = (1 - i * a) * (1 + j - i - nu) - i * (1 - (j - i) * a)
            acc += w * hc * qj
        q[j] = -acc / (1 + j - nu)
        k += 1
    Q = Series.from_terms(P, [(c, 1 - j * a, 1 + j - nu) for j, c in q.items() if c], xf)
    expo = 1 + a * (1 - nu)
    Kbar = Kn - bracket(Q, K0)
    if expo == 0:
        lam = decomp.K(nu).coeff(-1, 0)
        if lam != 0:
            raise JacpairError(
                "NORMALIZATION_AMBIGUOUS",
                "Coeff(K, x^-1) is nonzero; a y - lambda/x shift is needed first",
                **{"lambda": str(lam)},
            )
    else:
        lam = Kbar.coeff(a * (1 - nu), 0)
        if lam:
            corr = power(H0, expo, target=xf).scale(lam / expo)
            Q = Q + corr
    okH = (bracket(Q, H0) - Hn).is_zero
    okK = (bracket(Q, K0) - Kn).is_zero
    lhs = Q.dy() * Series.var("y", P)
    rhs = Q.scale(expo) - Series.var("x", P) * Q.dx()
    okY = (lhs.scale(a) - rhs).is_zero
    okX = Q.is_zero or Q.deg_x() < 1
    if not (okH and okK and okY and okX):
        raise JacpairError(
            "Q_NU_CHECK_FAILED",
            "recovered Q_nu does not satisfy its defining equations",
            H=okH,
            K=okK,
            dyConsistency=okY,
            degX=okX,
        )
    return Q


__all__ = [
    "PeelResult",
    "HKResult",
    "AlphaDecomposition",
    "peel_step",
    "normalize_to_HK",
    "hk_from_log",
    "hk_residuals",
    "check_polynomiality",
    "alpha_decompose",
    "split_components",
    "reassemble",
    "r1_observable",
    "solve_Q_nu",
    "compose_poly",
]
