"""Acceptance criteria 1-10, each printing one PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``.  Set MAXCURVE_OPTIN=1
to add the brute-force cross-check at q = 81 to criterion 10.
"""
import inspect
import time
from functools import lru_cache

import pytest

from conftest import optin_enabled
from maxcurve import gf
from maxcurve.curves import (
    as_max_normal_form,
    count_points,
    covering_check,
    frobenius_identity_check,
    hasse_y_closed_forms,
    isomorphism_check,
    make_curve,
    normal_form_extract,
    solve_a,
    to_artin_schreier_form,
)
from maxcurve.invariants import (
    castelnuovo,
    dimension_window,
    enumerate_completions,
    genus_spectrum,
    is_semigroup,
    n3_consistency,
    rr_dim,
    semigroup,
)
from maxcurve.orders import (
    classify_rational_points,
    frobenius_orders,
    generic_orders,
    sv_budget,
)


def verdict(capsys, label, ok, detail):
    with capsys.disabled():
        print(f"\n[acceptance] criterion {label}: {'PASS' if ok else 'FAIL'} ({detail})")


@lru_cache(maxsize=None)
def scan(q):
    c = make_curve("as-max", q)
    t0 = time.perf_counter()
    gen = generic_orders(c)
    fro = frobenius_orders(c, gen.orders)
    cl = classify_rational_points(c, gen.orders, nonrational_samples=20)
    return c, gen, fro, cl, time.perf_counter() - t0


# 1 ------------------------------------------------------------------------------

def test_criterion_1_point_counts(capsys):
    cases = [("as-max", 3, 10), ("as-max", 9, 244), ("as-max", 27, 6562),
             ("hermitian", 9, 730), ("hermitian", 27, 19684)]
    rows, ok = [], True
    for fam, q, want in cases:
        c = make_curve(fam, q)
        t0 = time.perf_counter()
        r = count_points(c, "both")
        dt = time.perf_counter() - t0
        hw = q * q + 1 + 2 * q * c.genus
        good = r.total == want == hw and r.methods_agree and r.maximal and dt < 5
        ok &= good
        rows.append(f"{fam} q={q}: {r.total} in {dt:.2f}s")
    verdict(capsys, 1, ok, "; ".join(rows))
    assert ok


# 2 ------------------------------------------------------------------------------

def test_criterion_2_genus_cross_checks(capsys):
    got = {g: semigroup(g).genus for g in [(3, 10), (9, 28), (7, 9, 10), (25, 27, 28)]}
    want = {(3, 10): 9 * 6 // 6, (9, 28): 27 * 24 // 6, (7, 9, 10): (81 - 9) // 6,
            (25, 27, 28): 117}
    ok = got == want
    verdict(capsys, 2, ok, ", ".join(f"<{','.join(map(str, k))}>={v}" for k, v in got.items()))
    assert ok


# 3 ------------------------------------------------------------------------------

def test_criterion_3_completions(capsys):
    t0 = time.perf_counter()
    comps = enumerate_completions(semigroup((7, 9, 10)), 9)
    dt = time.perf_counter() - t0
    closed = all(is_semigroup(T) for T in comps)
    ok = len(comps) == 7 and closed and dt < 10
    verdict(capsys, 3, ok, f"{len(comps)} completions at q=9, closure re-check {closed}, "
                           f"{dt:.2f}s")
    assert ok


@pytest.mark.xfail(strict=True, reason="exhaustive search finds 215 completions at q=27, "
                                        "confirmed by an independent single-step oracle")
def test_criterion_3_stretch_q27(capsys):
    t0 = time.perf_counter()
    comps = enumerate_completions(semigroup((25, 27, 28)), 108)
    dt = time.perf_counter() - t0
    ok = len(comps) == 7 and dt < 600
    verdict(capsys, "3 (stretch, q=27)", ok, f"{len(comps)} completions in {dt:.2f}s, "
                                             "7 were expected")
    assert ok


# 4 ------------------------------------------------------------------------------

def test_criterion_4_bounds(capsys):
    s9, s27 = genus_spectrum(9), genus_spectrum(27)
    checks = {
        "spectrum(9)": (s9.g1, s9.g2, s9.g3) == (36, 16, 12),
        "spectrum(27)": (s27.g1, s27.g2, s27.g3) == (351, 169, 117),
        "c(10,4)=9": castelnuovo(10, 4).c == 9,
        "c(28,4)=108": castelnuovo(28, 4).c == 108,
        "extremal": all(castelnuovo(q + 1, 4).c == q * (q - 3) // 6 for q in (9, 27, 81)),
        "window": all(dimension_window(q) == [3, 4] for q in (9, 27, 81)),
        "rr_dim(20,9)=11": rr_dim(20, 9) == 11,
        "N=3 consistency": all(n3_consistency(q)["ok"] for q in (9, 27, 81, 243)),
    }
    ok = all(checks.values())
    verdict(capsys, 4, ok, ", ".join(k for k, v in checks.items() if v) + " hold")
    assert ok


# 5 ------------------------------------------------------------------------------

def test_criterion_5_identities(capsys):
    ok, rows = True, []
    for q in (9, 27):
        c = make_curve("as-max", q)
        t0 = time.perf_counter()
        fi = frobenius_identity_check(c)
        hy = hasse_y_closed_forms(c, n_points=20)
        dt = time.perf_counter() - t0
        s, a = c.spec, c.a
        forms = hy["closed_forms"]
        exact = (forms["Dy"] == {str(q): s.hex(a)} and forms["D^2y"] == {}
                 and forms["D^3y"] == {str(3 * q): s.hex(s.neg(s.pow(a, 3)))}
                 and all(forms[f"D^{3 ** i}y"] == {} for i in range(2, gf.log3(q))))
        good = (fi["identity_holds"] and fi["divisible_by_x^(q^2)-x"] and exact
                and all(hy["closed_forms_match"].values()) and hy["series_oracle_ok"]
                and hy["series_points_checked"] >= 20 and hy["v_P0_Dy"] == -q * q // 3
                and dt < 60)
        ok &= good
        rows.append(f"q={q}: identity {fi['identity_holds']}, v_P0(Dy)={hy['v_P0_Dy']}, "
                    f"{dt:.2f}s")
    verdict(capsys, 5, ok, "; ".join(rows))
    assert ok


# 6 ------------------------------------------------------------------------------

def test_criterion_6_maps(capsys):
    ok, rows = True, []
    for q in (9, 27):
        cov = covering_check(q)
        good = cov["surjective"] and cov["all_fibers_size_3"]
        s = gf.field_for_q(q)
        adm = [v for v in range(1, s.order) if s.pow(v, q - 1) == s.minus_one]
        iso = isomorphism_check(q, adm[0], adm[-1])
        good &= iso["bijective"] and adm[0] != adm[-1]
        c = make_curve("as-max", q)
        nf = normal_form_extract(as_max_normal_form(c), q)
        a = solve_a(nf.A[1].c[0], nf.A[3].c[0], s)
        G, a_prime = to_artin_schreier_form(as_max_normal_form(c), q)
        good &= a.v in (c.a, s.neg(c.a)) and G == make_curve("as-max", q, a_prime).F
        ok &= good
        rows.append(f"q={q}: covering {cov['surjective']}, iso {iso['bijective']}, "
                    f"round trip a'={s.hex(a_prime)}")
    verdict(capsys, 6, ok, "; ".join(rows))
    assert ok


# 7 ------------------------------------------------------------------------------

def test_criterion_7_orders(capsys):
    c27, gen27, fro27, cl27, dt27 = scan(27)
    c9, gen9, fro9, cl9, _ = scan(9)
    affine27 = {r.j_orders for r in cl27.affine}
    n1_affine9 = sorted({r.pole_numbers[1] for r in cl9.affine})
    checks = {
        "q=27 affine": affine27 == {(0, 1, 2, 3, 28)},
        "q=27 P0": cl27.infinity.j_orders == (0, 1, 10, 19, 28),
        "q=27 scan < 120s": dt27 < 120,
        "j_N=q off F_{q^2}": all(r.j_orders[-1] == q
                                 for q, cl in ((9, cl9), (27, cl27)) for r in cl.nonrational),
        "generic": gen9.orders == (0, 1, 2, 3, 9) and gen27.orders == (0, 1, 2, 3, 27),
        "Frobenius": fro9.orders == (0, 1, 2, 9) and fro27.orders == (0, 1, 2, 27),
    }
    ok = all(checks.values())
    hist9 = {",".join(map(str, k)): v for k, v in sorted(cl9.histogram.items())}
    verdict(capsys, 7, ok, f"q=27 scan {dt27:.1f}s; q=9 histogram {hist9}; q=9 n_1 is "
                           f"{n1_affine9} at affine points and {cl9.infinity.pole_numbers[1]} "
                           "at infinity, so n_1 = 3 does not hold at every rational point")
    assert ok, {k: v for k, v in checks.items() if not v}


# 8 ------------------------------------------------------------------------------

def test_criterion_8_budgets(capsys):
    rows, ok = [], True
    for q, want_R, want_S in ((9, 290, 1042), (27, 7202, None)):
        c, gen, fro, cl, _ = scan(q)
        b = sv_budget(c, cl, fro.orders)
        good = b.deg_R == want_R and (want_S is None or b.deg_S == want_S) and b.ok
        ok &= good
        rows.append(f"q={q}: deg R={b.deg_R} (used {b.affine_weight_sum}+{b.p0_weight_lower}), "
                    f"deg S={b.deg_S} (lower sum {b.S_lower_sum})")
    verdict(capsys, 8, ok, "; ".join(rows))
    assert ok


# 9 ------------------------------------------------------------------------------

def test_criterion_9_property_suites(capsys):
    import test_properties as props
    ran, failed = [], []
    for name, fn in sorted(inspect.getmembers(props, inspect.isfunction)):
        if not name.startswith("test_"):
            continue
        st = getattr(fn, "_hypothesis_internal_use_settings", None)
        if st is not None and st.max_examples < 1000:
            failed.append(f"{name} has only {st.max_examples} examples")
            continue
        try:
            fn()
            ran.append(name)
        except Exception as exc:  # report every failing law, not only the first
            failed.append(f"{name}: {exc!r}")
    ok = not failed
    verdict(capsys, 9, ok, f"{len(ran)} suites green at >= 1000 cases"
            if ok else "; ".join(failed))
    assert ok


# 10 -----------------------------------------------------------------------------

def test_criterion_10_q81_structured(capsys):
    c = make_curve("as-max", 81)
    t0 = time.perf_counter()
    r = count_points(c, "structured")
    dt = time.perf_counter() - t0
    ok = r.total == 1 + 81 ** 3 // 3 == 177148 and r.maximal and dt < 60
    verdict(capsys, 10, ok, f"total {r.total} in {dt:.2f}s")
    assert ok


@pytest.mark.optin
@pytest.mark.skipif(not optin_enabled(), reason="set MAXCURVE_OPTIN=1 for the 43M-pair brute force")
def test_criterion_10_q81_brute_force(capsys):
    c = make_curve("as-max", 81)
    t0 = time.perf_counter()
    r = count_points(c, "both")
    dt = time.perf_counter() - t0
    ok = r.total == 177148 and r.methods_agree
    verdict(capsys, "10 (brute force)", ok, f"methods agree {r.methods_agree} in {dt:.1f}s")
    assert ok
