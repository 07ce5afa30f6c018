import random
from math import comb

import numpy as np
import pytest

from maxcurve import gf
from maxcurve.algebra import (
    AlgebraError,
    BiPoly,
    NotOnCurveError,
    RankDeficiencyError,
    SingularPointError,
    TruncSeries,
    UniPoly,
    det_int,
    hasse_deriv,
    lucas_binom,
    power_mod_curve,
    rank_profile,
    reduce_y_powers,
    series_det,
    series_solve,
    substitute_series,
    vdet,
)
from maxcurve.curves import make_curve, rational_points

F9 = gf.field_for_q(3)
F81 = gf.field_for_q(9)


def test_lucas_against_binomial_mod_p():
    for n in range(60):
        for k in range(n + 2):
            assert lucas_binom(n, k, 3) == comb(n, k) % 3


def test_unipoly_arithmetic_and_divmod():
    s = F81
    rng = random.Random(3)
    for _ in range(20):
        f = UniPoly(s, [rng.randrange(s.order) for _ in range(7)])
        g = UniPoly(s, [rng.randrange(s.order) for _ in range(3)] + [1])
        qt, r = f.divmod(g)
        assert qt * g + r == f
        assert r.degree < g.degree
        x0 = rng.randrange(s.order)
        assert (f * g).eval_int(x0) == s.mul(f.eval_int(x0), g.eval_int(x0))


def test_frobenius_power_of_unipoly():
    s = F81
    f = UniPoly(s, [5, 0, 7, 1])
    assert f.frobenius_power(1) == f ** 3


def test_hasse_deriv_of_monomials():
    s = F81
    x10 = UniPoly.monomial(s, 10)
    assert hasse_deriv(x10, 1) == UniPoly.monomial(s, 9, 1)
    assert hasse_deriv(x10, 3).is_zero()  # C(10,3) = 120 = 0 mod 3
    assert hasse_deriv(x10, 9) == UniPoly.monomial(s, 1, 1)
    assert hasse_deriv(x10, 10) == UniPoly.monomial(s, 0, 1)


def test_hasse_deriv_series_loses_precision():
    s = F81
    t = TruncSeries(s, 10, [1, 2, 3, 4])
    d = hasse_deriv(t, 2)
    assert d.M == 8
    assert d.c[:2] == [3, s.from_int(3 * 4)]


def test_bipoly_basic():
    s = F81
    x = BiPoly.monomial(s, 1, 0)
    y = BiPoly.monomial(s, 0, 1)
    f = (x + y) ** 3
    assert f == x ** 3 + y ** 3
    assert f.deg_x == 3 and f.deg_y == 3
    assert f.diff_x().is_zero()
    assert (x * y).pole_order(3, 10) == 13
    assert f.eval_int(2, 5) == s.add(s.pow(2, 3), s.pow(5, 3))


def test_bipoly_veval_matches_scalar():
    c = make_curve("as-max", 9)
    s = c.spec
    rng = np.random.default_rng(5)
    xs = rng.integers(0, s.order, 50)
    ys = rng.integers(0, s.order, 50)
    v = c.F.veval(xs, ys)
    for i in range(50):
        assert v[i] == c.F.eval_int(int(xs[i]), int(ys[i]))


def test_reduce_y_powers_frozen():
    c = make_curve("as-max", 9)
    s, a = c.spec, c.a
    x, y = BiPoly.monomial(s, 1, 0), BiPoly.monomial(s, 0, 1)
    # y^3 = a x^10 - y on the curve
    assert reduce_y_powers(c.F, y ** 3) == x ** 10 * a - y
    # y^9 = a^3 x^30 - a x^10 + y
    want = x ** 30 * s.pow(a, 3) - x ** 10 * a + y
    assert reduce_y_powers(c.F, y ** 9) == want
    assert power_mod_curve(c.F, y, 9) == want


def test_reduction_agrees_on_points():
    c = make_curve("as-max", 9)
    s = c.spec
    g = BiPoly.monomial(s, 2, 5) + BiPoly.monomial(s, 0, 4)
    r = reduce_y_powers(c.F, g)
    assert r.deg_y < c.F.deg_y
    for x0, y0 in rational_points(c)[:40]:
        assert r.eval_int(x0, y0) == g.eval_int(x0, y0)


def test_series_solve_residual_and_linear_term():
    c = make_curve("as-max", 9)
    s = c.spec
    for x0, y0 in rational_points(c)[:30]:
        ys = series_solve(c.F, x0, y0, 25)
        assert ys.c[0] == y0
        assert ys.c[1] == s.mul(c.a, s.pow(x0, 9))
        assert substitute_series(c.F, x0, ys).order() is None


def test_series_solve_errors():
    c = make_curve("as-max", 9)
    with pytest.raises(NotOnCurveError):
        series_solve(c.F, 0, 1, 10)
    s = F9
    x, y = BiPoly.monomial(s, 1, 0), BiPoly.monomial(s, 0, 1)
    cusp = y ** 2 - x ** 3
    with pytest.raises(SingularPointError):
        series_solve(cusp, 0, 0, 5)


def test_rank_profile_examples():
    s = F81
    rows = [TruncSeries(s, 6, [1, 1]), TruncSeries(s, 6, [1, 0, 0, 1]), TruncSeries(s, 6, [0, 1])]
    # span of 1+t, 1+t^3, t contains 1, t, t^3 - t
    assert rank_profile(rows) == (0, 1, 3)
    with pytest.raises(RankDeficiencyError):
        rank_profile([TruncSeries(s, 4, [1]), TruncSeries(s, 4, [2])])


def test_rank_profile_at_rational_point():
    c = make_curve("as-max", 9)
    s = c.spec
    x0, y0 = rational_points(c)[7]
    M = 24
    ys = series_solve(c.F, x0, y0, M)
    xs = TruncSeries(s, M, [x0, 1])
    one = TruncSeries.const(s, M, 1)
    assert rank_profile([one, xs, xs * xs, xs ** 3, ys]) == (0, 1, 2, 3, 10)


def _laplace(spec, mat):
    n = len(mat)
    if n == 1:
        return mat[0][0]
    acc = 0
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in mat[1:]]
        term = spec.mul(mat[0][j], _laplace(spec, minor))
        acc = spec.add(acc, term) if j % 2 == 0 else spec.sub(acc, term)
    return acc


def test_determinants_agree():
    s = F81
    rng = random.Random(11)
    for n in (1, 2, 3, 4):
        for _ in range(10):
            mat = [[rng.randrange(s.order) for _ in range(n)] for _ in range(n)]
            want = _laplace(s, mat)
            assert det_int(s, mat) == want
            arr = [[np.array([v, 0]) for v in row] for row in mat]
            assert int(vdet(s, arr)[0]) == want
            smat = [[TruncSeries(s, 3, [v]) for v in row] for row in mat]
            assert series_det(smat).c[0] == want


def test_series_det_order():
    s = F81
    t = TruncSeries(s, 8, [0, 1])
    one = TruncSeries.const(s, 8, 1)
    z = TruncSeries(s, 8, [])
    mat = [[one, t], [z, t * t]]
    assert series_det(mat).order() == 2
    with pytest.raises(AlgebraError):
        series_det([[one, t]])
