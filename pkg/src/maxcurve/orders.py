"""Order sequences of the linear series |(q+1)P0| on the built-in curves.

At an affine point the local parameter is t = x - x0 (dF/dy = 1 there), and
the (D,P)-orders are the vanishing orders of the span of the expanded basis
functions.  The point at infinity is handled through its pole numbers.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from . import gf
from .algebra import (
    BiPoly,
    RankDeficiencyError,
    TruncSeries,
    hasse_deriv,
    lucas_binom,
    rank_profile,
    series_det,
    series_solve,
    vdet,
)
from .curves import CurveModel, extension_points, hasse_y, rational_points
from .invariants import NumericalSemigroup, is_semigroup, semigroup

log = __import__("logging").getLogger(__name__)


class OrderAlarm(RuntimeError):
    """A computed order pattern contradicts an asserted structural fact."""


class SearchExhausted(RuntimeError):
    pass


def default_precision(q: int) -> int:
    return 2 * q + 6


def frame_basis(curve: CurveModel) -> list[tuple[int, int]]:
    """Monomials x^i y^j spanning L((q+1)P0), by increasing pole order."""
    bound = curve.q + 1
    out = []
    for j in range(bound // curve.pole_y + 1):
        for i in range((bound - j * curve.pole_y) // curve.pole_x + 1):
            out.append((i, j))
    out.sort(key=lambda m: (m[0] * curve.pole_x + m[1] * curve.pole_y, m))
    if len(out) != curve.N + 1:
        raise OrderAlarm(f"basis has {len(out)} functions, expected N+1 = {curve.N + 1}")
    return out


@dataclass
class LocalFrame:
    point: tuple[int, int]
    basis: list[tuple[int, int]]
    series: list[TruncSeries]
    M: int


def local_frame(curve: CurveModel, x0: int, y0: int, M: Optional[int] = None,
                F: Optional[BiPoly] = None) -> LocalFrame:
    """Expansions of the basis functions in t = x - x0 at the affine point (x0, y0).

    ``F`` overrides the defining polynomial (used for points over extensions).
    """
    F = F if F is not None else curve.F
    s = F.spec
    M = M or default_precision(curve.q)
    ys = series_solve(F, x0, y0, M)
    xs = TruncSeries(s, M, [x0, 1])
    basis = frame_basis(curve)
    series = []
    xpow = {0: TruncSeries.const(s, M, 1)}
    ypow = {0: TruncSeries.const(s, M, 1), 1: ys}
    for i, j in basis:
        for k in range(1, i + 1):
            if k not in xpow:
                xpow[k] = xpow[k - 1] * xs
        if j not in ypow:
            ypow[j] = ys ** j
        series.append(xpow[i] if j == 0 else (ypow[j] if i == 0 else xpow[i] * ypow[j]))
    return LocalFrame(point=(x0, y0), basis=basis, series=series, M=M)


@dataclass
class OrderReport:
    point: tuple
    j_orders: tuple[int, ...]
    pole_numbers: Optional[tuple[int, ...]]
    weight: Optional[int]
    rational: bool
    kind: str = "affine"

    def to_json(self, spec=None) -> dict:
        pt = self.point
        if spec is not None and self.kind == "affine":
            pt = [spec.hex(pt[0]), spec.hex(pt[1])]
        return {"point": pt, "kind": self.kind, "j_orders": list(self.j_orders),
                "pole_numbers": None if self.pole_numbers is None else list(self.pole_numbers),
                "weight": self.weight, "rational": self.rational}


def _profile(curve: CurveModel, x0: int, y0: int, M: int, F=None) -> tuple[LocalFrame, tuple]:
    for _ in range(4):
        frame = local_frame(curve, x0, y0, M, F=F)
        try:
            return frame, rank_profile(frame.series)
        except RankDeficiencyError:
            M *= 2
    raise RankDeficiencyError(f"orders not resolved below precision {M}")


def j_orders_at(curve: CurveModel, x0: int, y0: int, M: Optional[int] = None,
                eps: Optional[Sequence[int]] = None) -> OrderReport:
    """(D,P)-orders at an affine rational point; optionally the Wronskian weight too."""
    q = curve.q
    M = M or default_precision(q)
    frame, j = _profile(curve, x0, y0, M)
    if j[1] != 1:
        raise OrderAlarm(f"j_1 = {j[1]} at {(x0, y0)}")
    if j[-1] != q + 1:
        raise OrderAlarm(f"j_N = {j[-1]} != q+1 at the rational point {(x0, y0)}")
    nN = q + 1
    poles = tuple(nN - j[len(j) - 1 - i] for i in range(len(j)))
    weight = wronskian_weight(frame, eps) if eps is not None else None
    return OrderReport(point=(x0, y0), j_orders=j, pole_numbers=poles, weight=weight,
                       rational=True)


def wronskian_weight(frame: LocalFrame, eps: Sequence[int]) -> Optional[int]:
    """Vanishing order at the point of det(D^eps_i f_j), grown adaptively in precision."""
    rows_full = [[hasse_deriv(f, e) for f in frame.series] for e in eps]
    cap = min(r.M for row in rows_full for r in row)
    m = 4
    while True:
        m = min(m, cap)
        det = series_det([[e.truncate(m) for e in row] for row in rows_full])
        o = det.order()
        if o is not None or m == cap:
            return o
        m *= 2


def semigroup_route_P0(curve: CurveModel) -> OrderReport:
    """Orders at the place at infinity from its pole numbers <pole_x, pole_y>."""
    H = semigroup((curve.pole_x, curve.pole_y))
    if H.genus != curve.genus:
        raise OrderAlarm(f"genus of <{curve.pole_x},{curve.pole_y}> is {H.genus}, "
                         f"curve genus is {curve.genus}")
    N = curve.N
    n = tuple(H.first(N + 1))
    if n[-1] != curve.q + 1:
        raise OrderAlarm(f"n_N = {n[-1]} at P0, expected q+1")
    j = tuple(n[N] - n[N - i] for i in range(N + 1))
    return OrderReport(point="P0", j_orders=j, pole_numbers=n, weight=None, rational=True,
                       kind="infinity")


def recovered_semigroup(report: OrderReport) -> NumericalSemigroup:
    gens = [n for n in report.pole_numbers if n > 0]
    return semigroup(gens)


# --- generic and Frobenius orders --------------------------------------------

@dataclass
class _Ext:
    big: gf.FieldSpec
    embed: object
    F: BiPoly
    points: np.ndarray  # nonrational points first


@lru_cache(maxsize=8)
def _extension(curve: CurveModel) -> _Ext:
    """Points over the smallest of F_{q^4}, F_{q^6} that carries non-rational points.

    Over F_{q^4} the Hermitian curve has no points beyond its F_{q^2}-rational ones.
    """
    s = curve.spec
    q2 = curve.q ** 2
    for d in (2, 3):
        if d * s.k > 12:
            break
        big = gf.mk_field(s.p, d * s.k)
        embed = gf.embedding(s, big)
        pts, _ = extension_points(curve, big, embed)
        rational = big.vpow(pts[:, 0], q2) == pts[:, 0]
        rational &= big.vpow(pts[:, 1], q2) == pts[:, 1]
        if not rational.all():
            break
    order = np.argsort(rational, kind="stable")
    return _Ext(big=big, embed=embed, F=curve.F.map_coeffs(big, embed), points=pts[order])


@dataclass
class Entry:
    """A Wronskian entry: poly(x, y) ** power (power is 1 or a Frobenius power)."""

    poly: BiPoly
    power: int = 1


def _deriv_entry(curve: CurveModel, mono: tuple[int, int], k: int) -> BiPoly:
    s = curve.spec
    i, j = mono
    if j == 0:
        b = lucas_binom(i, k, s.p)
        return BiPoly.monomial(s, i - k, 0, s.from_int(b)) if b else BiPoly(s)
    if (i, j) == (0, 1):
        if k == 0:
            return BiPoly.monomial(s, 0, 1)
        return BiPoly.from_unipoly(hasse_y(curve, k))
    raise NotImplementedError("frame monomials must be powers of x or y itself")


@dataclass
class Certificate:
    nonzero: bool
    pole_bound: int
    points_used: int
    reason: str


def _certify(curve: CurveModel, rows: list[list[Entry]]) -> Certificate:
    """Decide whether the determinant is nonzero as a function on the curve.

    Nonzero: exhibit a point where it does not vanish.  Zero: it is a
    polynomial in x, y with poles only at P0, so vanishing at more distinct
    affine points than its pole-order bound forces it to be zero.
    """
    if any(all(e.poly.is_zero() for e in row) for row in rows):
        return Certificate(False, -1, 0, "zero row")
    bound = 0
    for row in rows:
        bound += max(e.power * e.poly.pole_order(curve.pole_x, curve.pole_y)
                     for e in row if not e.poly.is_zero())
    ext = _extension(curve)
    big = ext.big
    embedded = [[Entry(e.poly.map_coeffs(big, ext.embed), e.power) for e in row] for row in rows]
    pts = ext.points
    used = 0
    chunk = 2048
    while used <= bound:
        if used >= len(pts):
            raise SearchExhausted(f"{len(pts)} extension points cannot certify pole bound {bound}")
        block = pts[used:used + chunk]
        xs, ys = block[:, 0], block[:, 1]
        mat = []
        for row in embedded:
            vals = []
            for e in row:
                v = e.poly.veval(xs, ys)
                if e.power != 1:
                    v = big.vpow(v, e.power)
                vals.append(v)
            mat.append(vals)
        d = vdet(big, mat)
        if np.any(d != 0):
            return Certificate(True, bound, used + int(np.argmax(d != 0)) + 1, "nonzero value")
        used += len(block)
    return Certificate(False, bound, used, "vanishes at more points than the pole bound")


def _wronskian_rows(curve: CurveModel, orders: Sequence[int]) -> list[list[Entry]]:
    basis = frame_basis(curve)
    return [[Entry(_deriv_entry(curve, m, k)) for m in basis] for k in orders]


@dataclass
class OrderSearch:
    orders: tuple[int, ...]
    certificate: Certificate
    rejected: list[tuple[tuple[int, ...], str]] = field(default_factory=list)


def generic_orders(curve: CurveModel) -> OrderSearch:
    """Lexicographically first (eps_i) with det(D^eps_i f_j) not identically zero."""
    N = curve.N
    rejected = []
    for tail in itertools.combinations(range(1, curve.q + 2), N):
        eps = (0,) + tail
        cert = _certify(curve, _wronskian_rows(curve, eps))
        if cert.nonzero:
            return OrderSearch(eps, cert, rejected)
        if cert.reason != "zero row":
            rejected.append((eps, cert.reason))
    raise SearchExhausted("no nonvanishing Wronskian with eps_N <= q+1")


def frobenius_orders(curve: CurveModel, eps: Optional[Sequence[int]] = None) -> OrderSearch:
    """Lexicographically first (nu_i), a subsequence of eps with nu_0 = 0, such that
    det(f_j^(q^2); D^nu_0 f_j; ...; D^nu_(N-1) f_j) is not identically zero."""
    if eps is None:
        eps = generic_orders(curve).orders
    N = curve.N
    basis = frame_basis(curve)
    q2 = curve.q ** 2
    frob_row = [Entry(BiPoly.monomial(curve.spec, i, j), q2) for i, j in basis]
    rejected = []
    for tail in itertools.combinations(eps[1:], N - 1):
        nu = (0,) + tail
        rows = [frob_row] + _wronskian_rows(curve, nu)
        cert = _certify(curve, rows)
        if cert.nonzero:
            return OrderSearch(nu, cert, rejected)
        rejected.append((nu, cert.reason))
    raise SearchExhausted("no nonvanishing Frobenius Wronskian")


# --- scans ---------------------------------------------------------------------

@dataclass
class Classification:
    q: int
    eps: tuple[int, ...]
    affine: list[OrderReport]
    infinity: OrderReport
    histogram: dict[tuple[int, ...], int]
    allowed: list[tuple[int, ...]]
    nonrational: list[OrderReport] = field(default_factory=list)

    def to_json(self, spec=None, points: bool = False) -> dict:
        d = {
            "q": self.q,
            "eps": list(self.eps),
            "histogram": {",".join(map(str, k)): v for k, v in sorted(self.histogram.items())},
            "P0": self.infinity.to_json(),
            "allowed_patterns": [list(a) for a in self.allowed],
            "weights": sorted({r.weight for r in self.affine}),
            "nonrational_patterns": sorted({",".join(map(str, r.j_orders))
                                            for r in self.nonrational}),
            "nonrational_samples": len(self.nonrational),
        }
        if points:
            d["points"] = [r.to_json(spec) for r in self.affine]
        return d


def allowed_patterns(q: int) -> list[tuple[int, ...]]:
    return [(0, 1, 2, 3, q + 1), (0, 1, (q + 3) // 3, (2 * q + 3) // 3, q + 1)]


def classify_rational_points(curve: CurveModel, eps: Optional[Sequence[int]] = None,
                             points: Optional[Sequence[tuple[int, int]]] = None,
                             nonrational_samples: int = 0, seed: int = 0) -> Classification:
    if curve.family != "as-max":
        raise OrderAlarm("classification is stated for the as-max family")
    q = curve.q
    if eps is None:
        eps = generic_orders(curve).orders
    pts = rational_points(curve) if points is None else list(points)
    reports = [j_orders_at(curve, x0, y0, eps=eps) for x0, y0 in pts]
    p0 = semigroup_route_P0(curve)
    allowed = allowed_patterns(q)
    hist: dict[tuple[int, ...], int] = {}
    for r in reports + [p0]:
        if r.j_orders not in allowed:
            raise OrderAlarm(f"unexpected order pattern {r.j_orders} at {r.point}")
        hist[r.j_orders] = hist.get(r.j_orders, 0) + 1
    nonrat = sample_nonrational(curve, nonrational_samples, seed) if nonrational_samples else []
    return Classification(q=q, eps=tuple(eps), affine=reports, infinity=p0, histogram=hist,
                          allowed=allowed, nonrational=nonrat)


def sample_nonrational(curve: CurveModel, n: int, seed: int = 0) -> list[OrderReport]:
    """j-orders at n points with coordinates in F_{q^4} but not both in F_{q^2}."""
    ext = _extension(curve)
    big = ext.big
    q2 = curve.q ** 2
    pts = ext.points
    mask = big.vpow(pts[:, 0], q2) != pts[:, 0]
    cand = pts[mask]
    rng = random.Random(seed)
    picks = rng.sample(range(len(cand)), min(n, len(cand)))
    out = []
    for i in sorted(picks):
        x0, y0 = int(cand[i, 0]), int(cand[i, 1])
        _, j = _profile(curve, x0, y0, default_precision(curve.q), F=ext.F)
        out.append(OrderReport(point=(x0, y0), j_orders=j, pole_numbers=None, weight=None,
                               rational=False))
    return out


# --- Stohr-Voloch budgets --------------------------------------------------------

@dataclass
class SvBudget:
    q: int
    genus: int
    eps: tuple[int, ...]
    nu: tuple[int, ...]
    deg_R: int
    deg_S: int
    affine_weight_sum: int
    p0_weight_lower: int
    R_residual: int
    S_lower_sum: int
    S_residual: int
    weights_positive: bool
    weights_dominate_order_excess: bool
    histogram: dict

    @property
    def ok(self) -> bool:
        return (self.weights_positive and self.weights_dominate_order_excess
                and self.R_residual >= 0 and self.S_residual >= 0)

    def to_json(self) -> dict:
        d = dict(self.__dict__)
        d["eps"], d["nu"] = list(self.eps), list(self.nu)
        d["ok"] = self.ok
        return d


def deg_R(eps: Sequence[int], g: int, q: int) -> int:
    N = len(eps) - 1
    return sum(eps) * (2 * g - 2) + (N + 1) * (q + 1)


def deg_S(nu: Sequence[int], g: int, q: int) -> int:
    N = len(nu)
    return sum(nu) * (2 * g - 2) + (q * q + N) * (q + 1)


def sv_budget(curve: CurveModel, classification: Classification, nu: Sequence[int]) -> SvBudget:
    q, g = curve.q, curve.genus
    eps = classification.eps
    dR = deg_R(eps, g, q)
    dS = deg_S(nu, g, q)

    def excess(j):
        return sum(ji - ei for ji, ei in zip(j, eps))

    def s_lower(j):
        return sum(j[i] - nu[i - 1] for i in range(1, len(j)))

    aff = classification.affine
    weights_positive = all(r.weight is not None and r.weight >= 1 for r in aff)
    dominate = all(r.weight is not None and r.weight >= excess(r.j_orders) >= 1 for r in aff)
    wsum = sum(r.weight or 0 for r in aff)
    p0 = excess(classification.infinity.j_orders)
    s_sum = sum(s_lower(r.j_orders) for r in aff) + s_lower(classification.infinity.j_orders)
    return SvBudget(q=q, genus=g, eps=tuple(eps), nu=tuple(nu), deg_R=dR, deg_S=dS,
                    affine_weight_sum=wsum, p0_weight_lower=p0, R_residual=dR - wsum - p0,
                    S_lower_sum=s_sum, S_residual=dS - s_sum, weights_positive=weights_positive,
                    weights_dominate_order_excess=dominate,
                    histogram={",".join(map(str, k)): v
                               for k, v in sorted(classification.histogram.items())})
