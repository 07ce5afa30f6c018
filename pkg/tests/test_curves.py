import csv

import numpy as np
import pytest

from maxcurve import gf
from maxcurve.algebra import BiPoly, series_solve
from maxcurve.curves import (
    CurveError,
    NoValidAError,
    ShapeError,
    as_max_normal_form,
    count_brute,
    count_points,
    count_structured,
    covering_check,
    extension_points,
    fiber_report,
    frobenius_identity_check,
    hasse_y,
    hasse_y_closed_forms,
    isomorphism_check,
    make_curve,
    normal_form_extract,
    rational_points,
    solve_a,
    to_artin_schreier_form,
    write_points_csv,
)


def naive_count(curve):
    s = curve.spec
    return sum(1 for x in range(s.order) for y in range(s.order) if curve.F.eval_int(x, y) == 0)


@pytest.mark.parametrize("family,q", [("as-max", 3), ("as-max", 9), ("hermitian", 3),
                                      ("hermitian", 9), ("hermitian-as-model", 3)])
def test_counts_match_double_loop(family, q):
    c = make_curve(family, q)
    assert count_points(c).affine == naive_count(c)


@pytest.mark.parametrize("family,q,total", [
    ("as-max", 3, 10), ("as-max", 9, 244), ("as-max", 27, 6562),
    ("hermitian", 9, 730), ("hermitian", 27, 19684), ("hermitian-as-model", 9, 730),
])
def test_maximal_totals(family, q, total):
    r = count_points(make_curve(family, q))
    assert r.total == total
    assert r.maximal
    assert r.methods_agree and set(r.methods) == {"brute", "structured"}


def test_as_max_total_formula():
    for q in (3, 9, 27):
        c = make_curve("as-max", q)
        assert count_structured(c)[0] + 1 == 1 + q ** 3 // 3 == q * q + 1 + 2 * q * c.genus


def test_fiber_histograms_agree():
    c = make_curve("as-max", 9)
    assert count_brute(c)[1] == count_structured(c)[1] == {3: 81}


def test_points_are_on_curve_and_sorted():
    c = make_curve("as-max", 9)
    pts = rational_points(c)
    assert pts == sorted(pts)
    assert all(c.F.eval_int(x, y) == 0 for x, y in pts)


def test_counts_independent_of_a():
    s = gf.field_for_q(9)
    admissible = [v for v in range(1, s.order) if s.pow(v, 8) == s.minus_one]
    assert len(admissible) == 8
    reports = [count_points(make_curve("as-max", 9, a)).to_json() for a in admissible]
    for r in reports:
        r.pop("a")
    assert all(r == reports[0] for r in reports)


def test_bad_curve_requests():
    with pytest.raises(CurveError):
        make_curve("elliptic", 9)
    with pytest.raises(CurveError):
        make_curve("as-max", 10)
    with pytest.raises(CurveError):
        make_curve("as-max", 9, 1)  # 1^(q-1) = 1


def test_alias_family():
    assert make_curve("hermitian-affine", 9) == make_curve("hermitian", 9)


def test_fiber_report():
    r = fiber_report(make_curve("as-max", 27))
    assert r["fiber_histogram"] == {"9": 729}
    assert r["unramified"] and r["all_fibers_q_over_3"]
    assert r["kernel_size"] == 9 and r["kernel_in_Fq"]


def test_points_csv(tmp_path):
    c = make_curve("as-max", 9)
    path = tmp_path / "pts.csv"
    assert write_points_csv(c, path) == 243
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["x0", "y0"] and len(rows) == 244
    s = c.spec
    x, y = s.from_hex(rows[5][0]), s.from_hex(rows[5][1])
    assert c.F.eval_int(x, y) == 0


# --- identities ----------------------------------------------------------------

def test_hasse_y_closed_forms_frozen():
    c = make_curve("as-max", 9)
    s, a = c.spec, c.a
    x = lambda n, coef: BiPoly.monomial(s, n, 0, coef).to_unipoly()  # noqa: E731
    assert hasse_y(c, 1) == x(9, a)
    assert hasse_y(c, 2).is_zero()
    assert hasse_y(c, 3) == x(27, s.neg(s.pow(a, 3)))
    # D^q y = -a (x^(q^2) - x), D^(q+1) y = a
    assert hasse_y(c, 9) == x(81, s.neg(a)) + x(1, a)
    assert hasse_y(c, 10) == x(0, a)


def test_hasse_y_against_series_coefficients():
    c = make_curve("as-max", 27)
    for x0, y0 in rational_points(c)[::700]:
        ys = series_solve(c.F, x0, y0, 30)
        for k in range(1, 30):
            assert ys.c[k] == hasse_y(c, k).eval_int(x0)


@pytest.mark.parametrize("q", [9, 27])
def test_closed_forms_report(q):
    r = hasse_y_closed_forms(make_curve("as-max", q))
    assert all(r["closed_forms_match"].values())
    assert r["series_oracle_ok"] and r["series_points_checked"] >= 20
    assert r["v_P0_Dy"] == -q * q // 3


@pytest.mark.parametrize("q", [9, 27])
def test_frobenius_identity(q):
    r = frobenius_identity_check(make_curve("as-max", q))
    assert r["identity_holds"] and r["divisible_by_x^(q^2)-x"]


def test_frobenius_identity_pointwise_over_extension():
    c = make_curve("as-max", 9)
    r = frobenius_identity_check(c)
    big = gf.mk_field(3, 8)
    emb = gf.embedding(c.spec, big)
    pts, _ = extension_points(c, big, emb)
    terms = {int(k): emb(c.spec.from_hex(v)) for k, v in r["lhs_terms"].items()}
    rng = np.random.default_rng(2)
    for i in rng.choice(len(pts), 60, replace=False):
        x0, y0 = int(pts[i, 0]), int(pts[i, 1])
        want = big.sub(big.pow(y0, 81), y0)
        got = 0
        for n, coef in terms.items():
            got = big.add(got, big.mul(coef, big.pow(x0, n)))
        assert got == want


# --- maps between models ---------------------------------------------------------

@pytest.mark.parametrize("q", [9, 27])
def test_covering(q):
    r = covering_check(q)
    assert r["surjective"] and r["all_fibers_size_3"] and r["fibers_are_prime_translates"]
    assert r["hermitian_affine_points"] == 3 * r["as_max_affine_points"] == q ** 3
    assert r["L_identity_holds"]


def test_isomorphism_direction():
    s = gf.field_for_q(9)
    a1, a2 = [v for v in range(1, s.order) if s.pow(v, 8) == s.minus_one][:2]
    r = isomorphism_check(9, a1, a2)
    assert r["bijective"] and r["alpha_norm_is_ratio"]
    alpha = s.from_hex(r["alpha"])
    c1, c2 = make_curve("as-max", 9, a1), make_curve("as-max", 9, a2)
    for x0, y0 in rational_points(c1):
        assert c2.F.eval_int(s.mul(alpha, x0), y0) == 0


def test_normal_form_roundtrip():
    for q in (9, 27):
        c = make_curve("as-max", q)
        s = c.spec
        nf = normal_form_extract(as_max_normal_form(c), q)
        assert nf.degree_bounds_ok and nf.top_constant and nf.non_power_vanish
        assert nf.powers_constant and nf.B_all_zero and nf.power_relation
        A1, A3 = nf.A[1].c[0], nf.A[3].c[0]
        a = solve_a(A1, A3, s)
        assert a * a == s.element(s.div(A3, s.pow(A1, 3)))
        assert a ** (q - 1) == s.element(s.minus_one)
        G, a_prime = to_artin_schreier_form(as_max_normal_form(c), q)
        assert a_prime in (c.a, s.neg(c.a))
        assert G == make_curve("as-max", q, a_prime).F


def test_normal_form_rejects_bad_shapes():
    c = make_curve("as-max", 9)
    s = c.spec
    F = as_max_normal_form(c)
    with pytest.raises(ShapeError):
        normal_form_extract(F - BiPoly.monomial(s, 10, 0), 9)
    nf = normal_form_extract(F + BiPoly.monomial(s, 0, 2), 9)
    assert not nf.non_power_vanish
    nf = normal_form_extract(F + BiPoly.monomial(s, 3, 0), 9)
    assert not nf.B_all_zero
    with pytest.raises(ShapeError):
        to_artin_schreier_form(F + BiPoly.monomial(s, 3, 0), 9)


def test_solve_a_without_solution():
    s = gf.field_for_q(9)
    # a non-square ratio has no square root at all
    nonsquare = next(v for v in range(1, s.order) if s.pow(v, (s.order - 1) // 2) != 1)
    with pytest.raises(NoValidAError):
        solve_a(1, nonsquare, s)
