"""Command-line front end: ``maxcurve <command> ...``.

Every command prints JSON (or a derived table with ``--format table``).
Exit codes: 0 success, 1 a check failed, 2 usage error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Optional

from . import __version__, curves, gf, invariants, orders

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# --- output helpers -------------------------------------------------------------

def _dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_default)


def _default(o):
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    if hasattr(o, "to_json"):
        return o.to_json()
    if hasattr(o, "item"):
        return o.item()
    raise TypeError(f"not serializable: {type(o).__name__}")


def _flatten(d: Any, prefix: str = "") -> list[tuple[str, Any]]:
    if isinstance(d, dict):
        out = []
        for k in sorted(d):
            out += _flatten(d[k], f"{prefix}.{k}" if prefix else str(k))
        return out
    return [(prefix, d)]


def _table(obj: Any) -> str:
    if isinstance(obj, dict) and isinstance(obj.get("checks"), list):
        rows = [(c["id"], c["status"], json.dumps(c["computed"], default=_default)[:60])
                for c in obj["checks"]]
        w = max(len(r[0]) for r in rows) if rows else 2
        return "\n".join(f"{i:<{w}}  {s:<11}  {v}" for i, s, v in rows)
    rows = _flatten(json.loads(_dumps(obj)))
    w = max((len(k) for k, _ in rows), default=0)
    return "\n".join(f"{k:<{w}}  {json.dumps(v)}" for k, v in rows)


def _emit(args, obj: Any) -> None:
    if isinstance(obj, dict) and not getattr(args, "no_timestamp", False):
        obj = dict(obj)
        obj["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    print(_table(obj) if args.format == "table" else _dumps(obj))


def _parse_a(q: int, text: Optional[str]) -> Optional[int]:
    if text is None:
        return None
    spec = gf.field_for_q(q)
    try:
        return spec.from_hex(text)
    except (ValueError, gf.FieldError) as exc:
        raise UsageError(f"bad --a {text!r}: {exc}") from None


# --- verification report ----------------------------------------------------------

def _check(cid: str, anchor: str, inputs: dict, expected: Any, computed: Any,
           asserted: bool = True) -> dict:
    exp = json.loads(_dumps(expected))
    comp = json.loads(_dumps(computed))
    if not asserted:
        status = "report-only"
    else:
        status = "pass" if exp == comp else "fail"
    return {"id": cid, "anchor": anchor, "inputs": inputs, "expected": exp,
            "computed": comp, "status": status}


def _suite(q: int, a: Optional[int]) -> list[Callable[[], list[dict]]]:
    """Independent check groups for one q; each returns a list of check records."""
    g = q * (q - 3) // 6
    inp = {"q": q}

    def counts():
        am = curves.make_curve("as-max", q, a)
        method = "both" if q <= 27 else "structured"
        r = curves.count_points(am, method)
        out = [_check("count.as-max", "maximal point count, genus q(q-3)/6",
                      {**inp, "a": am.a_hex, "method": method},
                      {"total": invariants.hw_max_count(q, g), "maximal": True},
                      {"total": r.total, "maximal": r.maximal})]
        if q <= 27:
            h = curves.count_points(curves.make_curve("hermitian", q), "both")
            out.append(_check("count.hermitian", "Hermitian point count q^3 + 1",
                               {**inp, "method": "both"}, q ** 3 + 1, h.total))
        fr = curves.fiber_report(am)
        out.append(_check("count.fibers", "x is unramified with full rational fibers",
                          inp, {"all_fibers_q_over_3": True, "unramified": True},
                          {"all_fibers_q_over_3": fr["all_fibers_q_over_3"],
                           "unramified": fr["unramified"]}))
        return out

    def bounds():
        sp = invariants.genus_spectrum(q)
        out = [
            _check("bounds.spectrum", "largest maximal genera", inp,
                   [q * (q - 1) // 2, (q - 1) ** 2 // 4, (q * q - q + 4) // 6],
                   [sp.g1, sp.g2, sp.g3]),
            _check("bounds.castelnuovo_extremal", "c(q+1, 4) equals q(q-3)/6", inp, g,
                   invariants.castelnuovo(q + 1, 4).c),
            _check("bounds.dimension_window", "admissible dimension of |(q+1)P0|", inp,
                   [3, 4], invariants.dimension_window(q)),
            _check("bounds.n3_consistency", "numeric side of the N = 3 case", inp, True,
                   invariants.n3_consistency(q)["ok"]),
        ]
        if 2 * (q + 1) > 2 * g - 2:
            out.append(_check("bounds.rr_dim", "dim |2(q+1)P0| in the non-special range", inp,
                              2 * (q + 1) - g, invariants.rr_dim(2 * (q + 1), g)))
        return out

    def semigroups():
        H0 = invariants.semigroup((q // 3, q + 1))
        base = invariants.semigroup((q - 2, q, q + 1))
        out = [
            _check("semigroup.P0", "semigroup <q/3, q+1> has genus q(q-3)/6", inp, g, H0.genus),
            _check("semigroup.N3_base", "genus of <q-2, q, q+1>", inp, (q * q - q) // 6,
                   base.genus),
        ]
        if q <= 27:
            comps = invariants.enumerate_completions(base, g)
            ok = all(invariants.is_semigroup(T) for T in comps)
            out.append(_check("semigroup.completions_closed", "completions pass closure re-check",
                              inp, True, ok))
            out.append(_check("semigroup.completions_count", "number of completions of the N = 3 "
                              "semigroup", inp, 7, len(comps), asserted=q == 9))
        return out

    def identities():
        am = curves.make_curve("as-max", q, a)
        fi = curves.frobenius_identity_check(am)
        hy = curves.hasse_y_closed_forms(am)
        return [
            _check("identity.frobenius", "y^(q^2) - y expressed through Dy, D^3y", inp,
                   {"identity_holds": True, "divisible": True},
                   {"identity_holds": fi["identity_holds"],
                    "divisible": fi["divisible_by_x^(q^2)-x"]}),
            _check("identity.hasse_closed_forms", "Dy, D^2y, D^3y, D^(3^i)y closed forms", inp,
                   True, all(hy["closed_forms_match"].values()) and hy["series_oracle_ok"]),
            _check("identity.v_P0_Dy", "valuation of Dy at infinity", inp, -q * q // 3,
                   hy["v_P0_Dy"]),
        ]

    def maps():
        am = curves.make_curve("as-max", q, a)
        s = am.spec
        cov = curves.covering_check(q, am.a)
        alt = next(v for v in range(s.order - 1, 0, -1)
                   if v != am.a and s.pow(v, q - 1) == s.minus_one)
        iso = curves.isomorphism_check(q, am.a, alt)
        G, ap = curves.to_artin_schreier_form(curves.as_max_normal_form(am), q)
        back = G == curves.make_curve("as-max", q, ap).F
        return [
            _check("maps.covering", "Hermitian model covers as-max with fibers of size 3", inp,
                   {"surjective": True, "all_fibers_size_3": True},
                   {"surjective": cov["surjective"], "all_fibers_size_3": cov["all_fibers_size_3"]}),
            _check("maps.isomorphism", "different admissible a give isomorphic curves",
                   {**inp, "a1": s.hex(am.a), "a2": s.hex(alt)}, True, iso["bijective"]),
            _check("maps.normal_form", "normal form round trip", inp, True, back),
        ]

    def order_checks():
        am = curves.make_curve("as-max", q, a)
        if 2 * am.spec.k > 12:
            return [_check("orders.skipped", "order searches need F_{q^4}", inp, None,
                           "fields beyond F_{3^12} are not supported", asserted=False)]
        out = []
        gen = orders.generic_orders(am)
        out.append(_check("orders.generic", "generic order sequence", inp,
                          [0, 1, 2, 3, q], list(gen.orders)))
        fro = orders.frobenius_orders(am, gen.orders)
        out.append(_check("orders.frobenius", "Frobenius order sequence", inp,
                          [0, 1, 2, q], list(fro.orders)))
        if q <= 27:
            cl = orders.classify_rational_points(am, gen.orders, nonrational_samples=10)
            hist = cl.to_json()["histogram"]
            p0 = cl.infinity.j_orders
            out.append(_check("orders.P0", "orders at infinity from <q/3, q+1>", inp,
                              [0, 1, (q + 3) // 3, (2 * q + 3) // 3, q + 1], list(p0)))
            out.append(_check("orders.affine_histogram", "orders at affine rational points",
                              inp, {"0,1,2,3," + str(q + 1): q ** 3 // 3}, {
                                  k: v for k, v in hist.items()
                                  if k != ",".join(map(str, p0))}))
            n1 = sorted({r.pole_numbers[1] for r in cl.affine})
            out.append(_check("orders.n1_all_rational_points",
                              "first pole number n_1 at every rational point (q = 9 claim)",
                              inp, [q // 3], sorted(set(n1) | {cl.infinity.pole_numbers[1]}),
                              asserted=False))
            out.append(_check("orders.nonrational_jN", "j_N = q at non-rational points", inp,
                              [q], sorted({r.j_orders[-1] for r in cl.nonrational})))
            b = orders.sv_budget(am, cl, fro.orders)
            out.append(_check("orders.deg_R", "degree of the ramification divisor", inp,
                              orders.deg_R([0, 1, 2, 3, q], g, q), b.deg_R))
            out.append(_check("orders.deg_S", "degree of the Frobenius divisor", inp,
                              orders.deg_S([0, 1, 2, q], g, q), b.deg_S))
            out.append(_check("orders.sv_budget", "weights and budgets are consistent", inp,
                              True, b.ok))
            out.append(_check("orders.sv_residuals", "budget residuals", inp, None,
                              {"R": b.R_residual, "S": b.S_residual}, asserted=False))
        return out

    return [counts, bounds, semigroups, identities, maps, order_checks]


def build_report(q: int, a: Optional[int] = None, threads: Optional[int] = None,
                 timings: bool = True) -> dict:
    spec = gf.field_for_q(q)
    if a is None:
        a = gf.find_special_a(spec).v
    groups = _suite(q, a)
    threads = threads or int(os.environ.get("MAXCURVE_THREADS", "1") or 1)
    times: dict[str, float] = {}

    def run(fn):
        t0 = time.perf_counter()
        res = fn()
        times[fn.__name__] = round(time.perf_counter() - t0, 3)
        return res

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(run, groups))
    else:
        results = [run(fn) for fn in groups]
    checks = sorted((c for r in results for c in r), key=lambda c: c["id"])
    rep = {
        "version": __version__,
        "field": spec.to_json(),
        "q": q,
        "a": spec.hex(a),
        "checks": checks,
        "summary": {s: sum(c["status"] == s for c in checks)
                    for s in ("pass", "fail", "report-only")},
    }
    if timings:
        rep["timings"] = dict(sorted(times.items()))
    return rep


def _cache_key(q: int, a: Optional[int]) -> str:
    blob = json.dumps({"q": q, "a": a, "version": __version__}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:20]


# --- commands ---------------------------------------------------------------------

def cmd_count(args) -> int:
    a = _parse_a(args.q, args.a)
    curve = curves.make_curve(args.family, args.q, a)
    try:
        rep = curves.count_points(curve, args.method)
    except curves.CountMismatchError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_FAIL
    if args.points_out:
        curves.write_points_csv(curve, args.points_out)
    out = rep.to_json()
    out["field"] = curve.spec.to_json()
    _emit(args, out)
    return EXIT_OK if rep.methods_agree else EXIT_FAIL


def cmd_bounds(args) -> int:
    out = invariants.genus_spectrum(args.q).to_json()
    out["dimension_window"] = invariants.dimension_window(args.q)
    _emit(args, out)
    return EXIT_OK


def cmd_castelnuovo(args) -> int:
    r = invariants.castelnuovo(args.d, args.r)
    _emit(args, {"d": r.d, "r": r.r, "eps": r.eps, "c": r.c})
    return EXIT_OK


def cmd_semigroup(args) -> int:
    try:
        gens = [int(t) for t in args.gens.replace(",", " ").split()]
    except ValueError:
        raise UsageError(f"--gens must be integers, got {args.gens!r}") from None
    S = invariants.semigroup(gens)
    out = S.to_json()
    out["minimal_generators"] = list(invariants.minimal_generators(S))
    _emit(args, out)
    return EXIT_OK


def cmd_completions(args) -> int:
    q = args.q
    gf.log3(q)
    if q < 9:
        raise UsageError("--q must be a power of 3, at least 9")
    base = invariants.semigroup((q - 2, q, q + 1))
    g = q * (q - 3) // 6
    comps = invariants.enumerate_completions(base, g)
    _emit(args, {
        "q": q,
        "base": base.to_json(),
        "target_genus": g,
        "count": len(comps),
        "all_closed": all(invariants.is_semigroup(T) for T in comps),
        "completions": [{"generators": list(T.generators),
                         "added": list(invariants.added_gaps(base, T))} for T in comps],
    })
    return EXIT_OK


def cmd_orders(args) -> int:
    curve = curves.make_curve(args.family, args.q, _parse_a(args.q, args.a))
    gen = orders.generic_orders(curve)
    out: dict[str, Any] = {"curve": curve.describe(), "eps": list(gen.orders)}
    fro = orders.frobenius_orders(curve, gen.orders)
    out["nu"] = list(fro.orders)
    if curve.family == "as-max":
        pts = curves.rational_points(curve)
        if not args.all_points:
            step = max(1, len(pts) // args.sample)
            pts = pts[::step][:args.sample]
        cl = orders.classify_rational_points(curve, gen.orders, points=pts,
                                             nonrational_samples=args.nonrational)
        out["classification"] = cl.to_json(curve.spec, points=args.points)
        if args.all_points:
            out["sv_budget"] = orders.sv_budget(curve, cl, fro.orders).to_json()
    else:
        out["P0"] = orders.semigroup_route_P0(curve).to_json()
    _emit(args, out)
    return EXIT_OK


def cmd_identities(args) -> int:
    curve = curves.make_curve("as-max", args.q, _parse_a(args.q, args.a))
    fi = curves.frobenius_identity_check(curve)
    hy = curves.hasse_y_closed_forms(curve)
    ok = fi["identity_holds"] and all(hy["closed_forms_match"].values()) and hy["series_oracle_ok"]
    _emit(args, {"frobenius_identity": fi, "hasse_y": hy, "ok": ok})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_report(args) -> int:
    a = _parse_a(args.q, args.a)
    rep = None
    cached = None
    if args.cache_dir:
        cached = Path(args.cache_dir) / f"report-{_cache_key(args.q, a)}.json"
        if cached.exists():
            rep = json.loads(cached.read_text())
    if rep is None:
        rep = build_report(args.q, a, timings=not args.no_timestamp)
        if not args.no_timestamp:
            rep["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
        if cached is not None:
            cached.parent.mkdir(parents=True, exist_ok=True)
            cached.write_text(_dumps(rep) + "\n")
    text = _dumps(rep) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    if args.format == "table":
        print(_table(rep))
    elif not args.out:
        print(text, end="")
    return EXIT_FAIL if rep["summary"]["fail"] else EXIT_OK


# --- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="maxcurve", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "table"), default="json")
    common.add_argument("--no-timestamp", action="store_true",
                        help="omit timestamps and timings so output is byte-stable")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("count", parents=[common], help="count F_{q^2}-rational points")
    c.add_argument("--family", required=True, choices=curves.FAMILIES + ("hermitian-affine",))
    c.add_argument("--q", type=int, required=True)
    c.add_argument("--a", help="coefficient a as hex digit string")
    c.add_argument("--method", choices=("brute", "structured", "both"), default="both")
    c.add_argument("--points-out", help="write rational points as CSV")
    c.set_defaults(func=cmd_count)

    b = sub.add_parser("bounds", parents=[common], help="genus spectrum and dimension window")
    b.add_argument("--q", type=int, required=True)
    b.set_defaults(func=cmd_bounds)

    k = sub.add_parser("castelnuovo", parents=[common], help="Castelnuovo number c(d, r)")
    k.add_argument("--d", type=int, required=True)
    k.add_argument("--r", type=int, required=True)
    k.set_defaults(func=cmd_castelnuovo)

    s = sub.add_parser("semigroup", parents=[common], help="genus and gaps of <gens>")
    s.add_argument("--gens", required=True, help="e.g. '3,10'")
    s.set_defaults(func=cmd_semigroup)

    m = sub.add_parser("completions", parents=[common],
                       help="semigroups of genus q(q-3)/6 containing <q-2, q, q+1>")
    m.add_argument("--q", type=int, required=True)
    m.set_defaults(func=cmd_completions)

    o = sub.add_parser("orders", parents=[common], help="order sequences and budgets")
    o.add_argument("--family", default="as-max", choices=curves.FAMILIES)
    o.add_argument("--q", type=int, required=True)
    o.add_argument("--a")
    grp = o.add_mutually_exclusive_group()
    grp.add_argument("--all-points", action="store_true")
    grp.add_argument("--sample", type=int, default=50)
    o.add_argument("--nonrational", type=int, default=10,
                   help="number of sampled points over F_{q^4}")
    o.add_argument("--points", action="store_true", help="include per-point records")
    o.set_defaults(func=cmd_orders)

    i = sub.add_parser("identities", parents=[common], help="derivative closed forms")
    i.add_argument("--q", type=int, required=True)
    i.add_argument("--a")
    i.set_defaults(func=cmd_identities)

    r = sub.add_parser("report", parents=[common], help="run every check for one q")
    r.add_argument("--q", type=int, required=True)
    r.add_argument("--a")
    r.add_argument("--out", help="write the report JSON here")
    r.add_argument("--cache-dir", help="reuse/store reports under content-addressed names")
    r.set_defaults(func=cmd_report)
    return p


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"maxcurve: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (curves.CurveError, invariants.InvariantError, gf.FieldError) as exc:
        print(f"maxcurve: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (orders.OrderAlarm, curves.IdentityCheckError) as exc:
        print(f"maxcurve: check failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
