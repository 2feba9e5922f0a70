"""Batch harness: run operations over fixture files and report verdicts.

Usage::

    jacpair corpus                      # every shipped fixture, every op
    jacpair bracket fixtures/pairs      # one op over a file or directory
    jacpair verify                      # the identity-verifier programs

Exit status is 0 when every verdict passes, 1 when any fails and 2 when the
input cannot be read.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .errors import JacpairError
from .series import DEFAULT_N_CAP, N_CAP, Series, Space, from_text, to_text

OPS = ("bracket", "newton", "prime-degree", "components", "expand", "r0", "reduce", "normalize", "weyl")
KINDS = ("SERIES", "PAIR", "NORMALIZED_PAIR", "WEYL")
DEFAULT_OPS = {
    "SERIES": ("newton", "prime-degree", "components", "expand"),
    "PAIR": ("bracket", "newton", "prime-degree", "components", "expand", "r0", "reduce"),
    "NORMALIZED_PAIR": ("normalize",),
    "WEYL": ("weyl",),
}
PROVENANCE = ("paper", "trivial", "derived")
SUBDIRS = ("series", "pairs", "weyl")


class MalformedInput(Exception):
    pass


@dataclass
class Fixture:
    id: str
    kind: str
    payload: dict
    ops: tuple
    expected: list = field(default_factory=list)
    source: str = ""


# --------------------------------------------------------------------------
# loading


def default_fixture_dir() -> Path:
    local = Path("fixtures")
    if local.is_dir():
        return local
    return Path(__file__).resolve().parents[2] / "fixtures"


def _fixture_files(paths: list[str]) -> list[Path]:
    files: list[Path] = []
    for p in paths:
        path = Path(p)
        if path.is_dir():
            files.extend(sorted(path.rglob("*.json")))
        elif path.is_file():
            files.append(path)
        else:
            raise MalformedInput(f"no such fixture path: {p}")
    return files


def _check_expected(fid: str, items) -> list:
    if items is None:
        return []
    if not isinstance(items, list):
        raise MalformedInput(f"{fid}: expected must be a list")
    for e in items:
        if not isinstance(e, dict) or not {"op", "key", "value", "provenance"} <= e.keys():
            raise MalformedInput(f"{fid}: expected entries need op, key, value, provenance")
        if e["provenance"] not in PROVENANCE:
            raise MalformedInput(f"{fid}: unknown provenance {e['provenance']!r}")
        if e["provenance"] == "paper" and not e.get("citation"):
            raise MalformedInput(f"{fid}: paper provenance needs a citation")
    return items


def parse_fixture(d, source: str = "") -> Fixture:
    if not isinstance(d, dict):
        raise MalformedInput(f"{source}: fixture must be an object")
    try:
        fid, kind, payload = d["id"], d["kind"], d["payload"]
    except KeyError as exc:
        raise MalformedInput(f"{source}: missing field {exc}") from None
    if kind not in KINDS:
        raise MalformedInput(f"{fid}: unknown kind {kind!r}")
    if not isinstance(payload, dict):
        raise MalformedInput(f"{fid}: payload must be an object")
    ops = tuple(d.get("ops", DEFAULT_OPS[kind]))
    for op in ops:
        if op not in OPS:
            raise MalformedInput(f"{fid}: unknown op {op!r}")
    fx = Fixture(fid, kind, payload, ops, _check_expected(fid, d.get("expected")), source)
    _validate_payload(fx)
    return fx


def load_fixtures(paths: list[str]) -> list[Fixture]:
    out: list[Fixture] = []
    for f in _fixture_files(paths):
        try:
            data = json.loads(f.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise MalformedInput(f"{f}: {exc}") from None
        for d in data if isinstance(data, list) else [data]:
            out.append(parse_fixture(d, str(f)))
    seen = set()
    for fx in out:
        if fx.id in seen:
            raise MalformedInput(f"duplicate fixture id {fx.id}")
        seen.add(fx.id)
    return sorted(out, key=lambda fx: fx.id)


# --------------------------------------------------------------------------
# payload decoding


def _series(v, space: Space = Space.P_POLY_Y) -> Series:
    if isinstance(v, str):
        return from_text(v, space)
    if isinstance(v, dict):
        return Series.from_dict(v)
    raise JacpairError("MALFORMED", f"cannot read a series from {type(v).__name__}")


def _weyl(v, rep=None):
    from . import weyl

    if isinstance(v, dict):
        return weyl.WeylSeries.from_dict(v)
    return weyl.WeylSeries.parse(v, rep or weyl.UV)


def _validate_payload(fx: Fixture) -> None:
    p = fx.payload
    try:
        if fx.kind in ("SERIES", "PAIR"):
            space = Space(p.get("space", "P"))
            _series(p["F"], space)
            if fx.kind == "PAIR":
                _series(p["G"], space)
        elif fx.kind == "NORMALIZED_PAIR":
            from .reduction import NormalizedPair

            NormalizedPair.from_dict(p)
        else:
            _weyl_case(p)
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(f"{fx.id}: bad payload: {exc}") from None
    except JacpairError as exc:
        # a payload that cannot live in its declared space is malformed input
        raise MalformedInput(f"{fx.id}: {exc}") from None


def _weyl_case(p: dict) -> str:
    case = p["case"]
    if case == "vertex":
        int(p["m0"]), int(p["m"])
    elif case in ("product", "commutator"):
        _weyl(p["F"], p.get("rep")), _weyl(p["G"], p.get("rep"))
    elif case in ("trace", "wform", "inverse"):
        _weyl(p["F"], p.get("rep"))
    elif case == "power":
        _weyl(p["F"], p.get("rep")), int(p["a"]), int(p.get("b", 1))
    else:
        raise ValueError(f"unknown weyl case {case!r}")
    return case


# --------------------------------------------------------------------------
# operations


def _txt(S) -> str:
    return to_text(S) if isinstance(S, Series) else str(S)


def _floors(**named) -> dict:
    out = {}
    for name, S in named.items():
        if isinstance(S, Series):
            out[name] = {
                "xFloor": None if S.x_floor is None else str(S.x_floor),
                "yFloor": None if S.y_floor is None else str(S.y_floor),
            }
        else:
            out[name] = {"uFloor": _opt(S.u_floor), "vFloor": _opt(S.v_floor)}
    return out


def _opt(v):
    return None if v is None else str(v)


def _pd_str(p) -> str:
    return "-inf" if isinstance(p, float) else str(p)


def _pair(fx: Fixture):
    space = Space(fx.payload.get("space", "P"))
    F = _series(fx.payload["F"], space)
    G = _series(fx.payload["G"], space) if "G" in fx.payload else None
    return F, G


def op_bracket(fx, depth):
    from .poisson import bracket

    F, G = _pair(fx)
    br = bracket(F, G)
    const = str(br.coeff(0, 0)) if br.support() == [(0, 0)] else None
    return True, {"bracket": _txt(br), "constant": const}, _floors(bracket=br)


def op_newton(fx, depth):
    from .newton import newton_polygon

    F, _ = _pair(fx)
    return True, {"polygon": newton_polygon(F).to_dict()}, {}


def op_prime_degree(fx, depth):
    from .newton import prime_degree

    F, _ = _pair(fx)
    return True, {"p": _pd_str(prime_degree(F))}, {}


def op_components(fx, depth):
    from .newton import NEG_INF, components, prime_degree

    F, _ = _pair(fx)
    p = prime_degree(F)
    if p == NEG_INF:
        return True, {"p": "-inf", "components": {}}, {}
    comps = components(F, p)
    return True, {"p": str(p), "components": {str(r): _txt(S) for r, S in comps.items()}}, {}


def op_expand(fx, depth):
    from .expansion import expand_G_in_F, expand_y_in_F, reexpand

    F, G = _pair(fx)
    if G is None:
        ec = expand_y_in_F(F, depth)
        target = Series.var("y", Space.B_DESC_Y)
    else:
        ec = expand_G_in_F(F, G, depth)
        target = G.with_space(Space.B_DESC_Y)
    back = reexpand(ec, F, depth)
    ok = back.agrees(target)
    values = {"kind": ec.kind, "m": ec.m, "n": str(ec.n), "coeffs": [_txt(c) for c in ec.coeffs]}
    return ok, values, _floors(reexpanded=back)


def op_r0(fx, depth):
    from .expansion import compute_R0

    F, G = _pair(fx)
    r = compute_R0(F, G, depth)
    values = {
        "R0": _txt(r.R0),
        "J": str(r.J),
        "p": str(r.p),
        "mu": str(r.mu),
        "d": r.d,
        "priF": _txt(r.priF),
        "degreeOk": r.degree_ok,
    }
    return True, values, _floors(R0=r.R0)


def op_reduce(fx, depth):
    from .reduction import reduce_to_normal_form

    F, G = _pair(fx)
    pair, log, diag = reduce_to_normal_form(F, G)
    values = {
        "normalizedPair": pair.to_dict(),
        "F": _txt(pair.F),
        "G": _txt(pair.G),
        "m": pair.m,
        "n": pair.n,
        "J": str(pair.J),
        "autoLog": log.to_list(),
        "diagnostics": diag,
    }
    return True, values, {}


def op_normalize(fx, depth):
    from .normalform import alpha_decompose, check_polynomiality, hk_residuals, normalize_to_HK
    from .reduction import NormalizedPair

    pair = NormalizedPair.from_dict(fx.payload)
    hk = normalize_to_HK(pair, depth)
    res = hk_residuals(pair, hk)
    poly = check_polynomiality(pair, hk)
    values = {"H": _txt(hk.H), "K": _txt(hk.K), "autoLog": hk.log.to_list()}
    try:
        dec = alpha_decompose(hk)
        values["alpha"] = str(dec.alpha)
        values["components"] = {
            "H": {str(i): _txt(S) for i, S in sorted(dec.componentsH.items())},
            "K": {str(i): _txt(S) for i, S in sorted(dec.componentsK.items())},
        }
    except JacpairError as exc:
        values["alpha"] = None
        values["alphaError"] = exc.code
    values["verdicts"] = {"residuals": res.to_dict()["verdict"], "polynomiality": poly.to_dict()["verdict"]}
    return res.ok and poly.ok, values, _floors(H=hk.H, K=hk.K)


def op_weyl(fx, depth):
    from . import weyl

    p = fx.payload
    case = _weyl_case(p)
    if case == "vertex":
        m0, m = int(p["m0"]), int(p["m"])
        d = int(p.get("depth", 8))
        sol = weyl.dixmier_vertex_solve(m0, m) if m0 > m > 0 else None
        v = weyl.vertex_bracket_check(m0, m, d, p.get("alpha"))
        values = {"solution": sol.to_dict() if sol else None, "check": v.to_dict()}
        return v.ok, values, {}
    F = _weyl(p["F"], p.get("rep"))
    if case == "product":
        out = weyl.normal_product(F, _weyl(p["G"], p.get("rep")), depth)
        return True, {"product": str(out)}, _floors(product=out)
    if case == "commutator":
        out = weyl.commutator(F, _weyl(p["G"], p.get("rep")), depth)
        return True, {"commutator": str(out)}, _floors(commutator=out)
    if case == "trace":
        return True, {"trace": str(weyl.weyl_trace(F))}, {}
    if case == "inverse":
        inv = weyl.weyl_inverse(F, depth)
        one = weyl.normal_product(F, inv, depth)
        ok = one.agrees(weyl.WeylSeries.const(1, F.rep))
        return ok, {"inverse": str(inv), "check": str(one)}, _floors(inverse=inv)
    if case == "power":
        a, b = int(p["a"]), int(p.get("b", 1))
        R = weyl.weyl_fractional_power(F, a, b, depth)
        back = R ** b
        ok = back.agrees(F ** a) if a >= 0 else True
        return ok, {"power": str(R)}, _floors(power=R)
    # wform
    Wf = weyl.to_w_form(F, depth) if F.rep == weyl.UV else F
    back = weyl.from_w_form(Wf, depth)
    again = weyl.to_w_form(back, depth)
    ok = again.agrees(Wf)
    return ok, {"wForm": str(Wf), "uvForm": str(back)}, _floors(wForm=Wf)


OP_FUNCS = {
    "bracket": op_bracket,
    "newton": op_newton,
    "prime-degree": op_prime_degree,
    "components": op_components,
    "expand": op_expand,
    "r0": op_r0,
    "reduce": op_reduce,
    "normalize": op_normalize,
    "weyl": op_weyl,
}

SERIES_KEYS = {"bracket", "R0", "F", "G", "H", "K", "priF"}


# --------------------------------------------------------------------------
# expected values


def _lookup(values: dict, key: str):
    cur = values
    for part in key.split("."):
        if isinstance(cur, dict) and part in cur:
            cur = cur[part]
        elif isinstance(cur, list) and part.isdigit() and int(part) < len(cur):
            cur = cur[int(part)]
        else:
            raise KeyError(key)
    return cur


WEYL_KEYS = {"product", "commutator", "inverse", "power", "wForm", "uvForm"}


def _same(key: str, got, want, fx: Fixture) -> bool:
    leaf = key.split(".")[-1]
    if fx.kind == "WEYL" and leaf in WEYL_KEYS and isinstance(got, str) and isinstance(want, str):
        from . import weyl

        rep = weyl.W if leaf == "wForm" else weyl.UV
        try:
            return weyl.WeylSeries.parse(got, rep).agrees(weyl.WeylSeries.parse(want, rep))
        except JacpairError:
            return got == want
    series_like = leaf in SERIES_KEYS or key.startswith("components.") or key.startswith("coeffs.")
    if series_like and isinstance(got, str) and isinstance(want, str):
        space = Space.B_DESC_Y
        try:
            a, b = from_text(got, space), from_text(want, space)
        except JacpairError:
            return got == want
        return a.agrees(b)
    return json.dumps(got, sort_keys=True) == json.dumps(want, sort_keys=True)


def _compare(fx: Fixture, op: str, values: dict) -> list[dict]:
    out = []
    for e in fx.expected:
        if e["op"] != op:
            continue
        try:
            got = _lookup(values, e["key"])
            ok = _same(e["key"], got, e["value"], fx)
        except KeyError:
            got, ok = None, False
        out.append({"key": e["key"], "ok": ok, "provenance": e["provenance"], "expected": e["value"], "got": got})
    return out


# --------------------------------------------------------------------------
# running


def run_one(fx: Fixture, op: str, depth: int, n_cap: int) -> dict:
    token = N_CAP.set(n_cap)
    start = time.perf_counter()
    try:
        ok, values, floors = OP_FUNCS[op](fx, depth)
        checks = _compare(fx, op, values)
        ok = ok and all(c["ok"] for c in checks)
        if checks:
            values = {**values, "expectedChecks": checks}
    except JacpairError as exc:
        ok, values, floors = False, {"error": exc.code, "message": str(exc)}, {}
    finally:
        N_CAP.reset(token)
    ms = round((time.perf_counter() - start) * 1000, 3)
    return {
        "fixtureId": fx.id,
        "op": op,
        "verdict": "pass" if ok else "fail",
        "values": _jsonable(values),
        "floors": floors,
        "timingMs": ms,
    }


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _run_task(args):
    return run_one(*args)


def run_verify() -> list[dict]:
    from . import verifier

    progs = {
        "f1": verifier.verify_f1,
        "r-coefficients": verifier.verify_r_coefficients,
        "tilde-r": verifier.verify_tilde_r,
    }
    out = []
    for name, fn in progs.items():
        start = time.perf_counter()
        try:
            v = fn()
            rec = {"verdict": "pass" if v.ok else "fail", "values": _jsonable(v.details)}
        except JacpairError as exc:
            rec = {"verdict": "fail", "values": {"error": exc.code, "message": str(exc)}}
        rec.update({"fixtureId": f"verifier/{name}", "op": "verify", "floors": {}})
        rec["timingMs"] = round((time.perf_counter() - start) * 1000, 3)
        out.append({k: rec[k] for k in ("fixtureId", "op", "verdict", "values", "floors", "timingMs")})
    return out


def run(command: str, fixtures: list[Fixture], depth: int, n_cap: int, jobs: int) -> list[dict]:
    tasks = []
    for fx in fixtures:
        ops = fx.ops if command == "corpus" else ((command,) if command in fx.ops or _applies(command, fx) else ())
        tasks.extend((fx, op, depth, n_cap) for op in ops)
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            reports = list(ex.map(_run_task, tasks))
    else:
        reports = [_run_task(t) for t in tasks]
    if command in ("corpus", "verify"):
        reports.extend(run_verify())
    return sorted(reports, key=lambda r: (r["fixtureId"], r["op"]))


def _applies(op: str, fx: Fixture) -> bool:
    if op in ("newton", "prime-degree", "components", "expand"):
        return fx.kind in ("SERIES", "PAIR")
    if op in ("bracket", "r0", "reduce"):
        return fx.kind == "PAIR"
    if op == "normalize":
        return fx.kind == "NORMALIZED_PAIR"
    return fx.kind == "WEYL"


def render_text(reports: list[dict]) -> str:
    lines = []
    for r in reports:
        vals = r["values"]
        brief = ", ".join(
            f"{k}={v}" for k, v in vals.items() if isinstance(v, (str, int, bool)) and len(str(v)) <= 60
        )
        lines.append(f"{r['verdict'].upper():4}  {r['fixtureId']}  [{r['op']}]  {brief}")
    passed = sum(r["verdict"] == "pass" for r in reports)
    lines.append(f"{passed}/{len(reports)} passed")
    return "\n".join(lines)


def _env_jobs(default: int) -> int:
    env = os.environ.get("JACPAIR_JOBS")
    if env is None:
        return default
    try:
        return max(1, int(env))
    except ValueError:
        raise MalformedInput(f"JACPAIR_JOBS must be an integer, got {env!r}") from None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="jacpair", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=OPS + ("verify", "corpus"))
    ap.add_argument("paths", nargs="*", help="fixture files or directories (default: shipped fixtures)")
    ap.add_argument("--depth", type=int, default=12, help="truncation depth (default 12)")
    ap.add_argument("--n-cap", type=int, default=DEFAULT_N_CAP, help="cap on exponent denominators (default 2^20)")
    fmt = ap.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json")
    fmt.add_argument("--text", dest="fmt", action="store_const", const="text")
    ap.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="worker processes (JACPAIR_JOBS overrides)")
    ap.set_defaults(fmt="json")
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        if args.depth < 1 or args.n_cap < 1:
            raise MalformedInput("--depth and --n-cap must be positive")
        jobs = _env_jobs(max(1, args.jobs))
        if args.command == "verify" and not args.paths:
            fixtures = []
        else:
            fixtures = load_fixtures(args.paths or [str(default_fixture_dir())])
    except MalformedInput as exc:
        print(f"malformed input: {exc}", file=sys.stderr)
        return 2
    reports = run(args.command, fixtures, args.depth, args.n_cap, jobs)
    if args.fmt == "text":
        print(render_text(reports))
    else:
        print(json.dumps(reports, indent=2, sort_keys=True))
    return 0 if all(r["verdict"] == "pass" for r in reports) else 1


if __name__ == "__main__":
    sys.exit(main())
