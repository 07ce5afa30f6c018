"""Polynomials, truncated power series and Hasse derivatives over a FieldSpec.

Coefficients are stored as field encodings (ints) together with the owning
:class:`~maxcurve.gf.FieldSpec`; ``coeff()`` accessors hand out
:class:`~maxcurve.gf.FieldElement` objects.
"""
from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Iterable, Mapping, Sequence, Union

from .gf import FieldElement, FieldError, FieldSpec


class AlgebraError(ValueError):
    pass


class SingularPointError(AlgebraError):
    pass


class NotOnCurveError(AlgebraError):
    pass


class RankDeficiencyError(AlgebraError):
    pass


def lucas_binom(n: int, k: int, p: int) -> int:
    """C(n, k) mod p as the product of binomials of base-p digits."""
    if k < 0 or k > n:
        return 0
    r = 1
    while k:
        nd, kd = n % p, k % p
        if kd > nd:
            return 0
        r = r * _small_binom(nd, kd) % p
        n //= p
        k //= p
    return r


@lru_cache(maxsize=None)
def _small_binom(n: int, k: int) -> int:
    num = den = 1
    for i in range(k):
        num *= n - i
        den *= i + 1
    return num // den


def _as_int(spec: FieldSpec, c) -> int:
    if isinstance(c, FieldElement):
        if c.spec != spec:
            raise FieldError("coefficient from a different field")
        return c.v
    return int(c)


# --- univariate --------------------------------------------------------------

class UniPoly:
    """Dense univariate polynomial, constant term first, no trailing zeros."""

    __slots__ = ("spec", "c")

    def __init__(self, spec: FieldSpec, coeffs: Iterable = ()):
        c = [_as_int(spec, v) for v in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.spec = spec
        self.c = tuple(c)

    @classmethod
    def monomial(cls, spec: FieldSpec, n: int, coeff: int = 1) -> "UniPoly":
        return cls(spec, [0] * n + [coeff])

    @classmethod
    def x(cls, spec: FieldSpec) -> "UniPoly":
        return cls(spec, [0, 1])

    @property
    def degree(self) -> int:
        return len(self.c) - 1

    def is_zero(self) -> bool:
        return not self.c

    def coeff(self, i: int) -> FieldElement:
        return FieldElement(self.spec, self.c[i] if i < len(self.c) else 0)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, UniPoly) and self.spec == other.spec and self.c == other.c

    def __hash__(self) -> int:
        return hash(self.c)

    def __repr__(self) -> str:
        terms = [f"{self.spec.hex(v)}*x^{i}" for i, v in enumerate(self.c) if v]
        return "UniPoly(" + (" + ".join(terms) or "0") + ")"

    def __add__(self, other: "UniPoly") -> "UniPoly":
        s = self.spec
        a, b = self.c, other.c
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, v in enumerate(b):
            out[i] = s.add(out[i], v)
        return UniPoly(s, out)

    def __neg__(self) -> "UniPoly":
        return UniPoly(self.spec, [self.spec.neg(v) for v in self.c])

    def __sub__(self, other: "UniPoly") -> "UniPoly":
        return self + (-other)

    def __mul__(self, other) -> "UniPoly":
        s = self.spec
        if not isinstance(other, UniPoly):
            k = _as_int(s, other)
            return UniPoly(s, [s.mul(k, v) for v in self.c])
        if not self.c or not other.c:
            return UniPoly(s)
        out = [0] * (len(self.c) + len(other.c) - 1)
        add, mul = s.add, s.mul
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(other.c):
                    if b:
                        out[i + j] = add(out[i + j], mul(a, b))
        return UniPoly(s, out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "UniPoly":
        r = UniPoly(self.spec, [1])
        base = self
        while e:
            if e & 1:
                r = r * base
            base = base * base
            e >>= 1
        return r

    def frobenius_power(self, m: int) -> "UniPoly":
        """self^(p^m), computed coefficientwise."""
        s = self.spec
        pm = s.p ** m
        out = [0] * (self.degree * pm + 1) if self.c else []
        for i, v in enumerate(self.c):
            out[i * pm] = s.pow(v, pm)
        return UniPoly(s, out)

    def __call__(self, x) -> FieldElement:
        return FieldElement(self.spec, self.eval_int(_as_int(self.spec, x)))

    def eval_int(self, x: int) -> int:
        s = self.spec
        acc = 0
        for v in reversed(self.c):
            acc = s.add(s.mul(acc, x), v)
        return acc

    def divmod(self, other: "UniPoly") -> tuple["UniPoly", "UniPoly"]:
        s = self.spec
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.c)
        dq = other.degree
        inv_lead = s.inv(other.c[-1])
        quo = [0] * max(0, len(r) - dq)
        for i in range(len(r) - 1, dq - 1, -1):
            if r[i] == 0:
                continue
            f = s.mul(r[i], inv_lead)
            quo[i - dq] = f
            for j, b in enumerate(other.c):
                if b:
                    r[i - dq + j] = s.sub(r[i - dq + j], s.mul(f, b))
        return UniPoly(s, quo), UniPoly(s, r[:dq])

    def shift_series(self, x0: int, M: int) -> "TruncSeries":
        """Expansion of self(x0 + t) to precision M."""
        s = self.spec
        out = [0] * M
        # Taylor coefficients are the Hasse derivatives at x0
        for k in range(min(M, len(self.c))):
            out[k] = hasse_deriv(self, k).eval_int(x0)
        return TruncSeries(s, M, out)


# --- bivariate ---------------------------------------------------------------

Monomial = tuple[int, int]


class BiPoly:
    """Sparse polynomial in x, y; ``terms[(i, j)]`` is the coefficient of x^i y^j."""

    __slots__ = ("spec", "terms")

    def __init__(self, spec: FieldSpec, terms: Mapping[Monomial, object] | None = None):
        self.spec = spec
        self.terms = {m: _as_int(spec, v) for m, v in (terms or {}).items()}
        self.terms = {m: v for m, v in self.terms.items() if v}

    @classmethod
    def _raw(cls, spec: FieldSpec, terms: dict[Monomial, int]) -> "BiPoly":
        obj = cls.__new__(cls)
        obj.spec = spec
        obj.terms = {m: v for m, v in terms.items() if v}
        return obj

    @classmethod
    def from_unipoly(cls, f: UniPoly, ydeg: int = 0) -> "BiPoly":
        return cls._raw(f.spec, {(i, ydeg): v for i, v in enumerate(f.c)})

    @classmethod
    def monomial(cls, spec: FieldSpec, i: int, j: int, coeff: int = 1) -> "BiPoly":
        return cls._raw(spec, {(i, j): coeff})

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def deg_x(self) -> int:
        return max((i for i, _ in self.terms), default=-1)

    @property
    def deg_y(self) -> int:
        return max((j for _, j in self.terms), default=-1)

    def coeff(self, i: int, j: int) -> FieldElement:
        return FieldElement(self.spec, self.terms.get((i, j), 0))

    def y_coeffs(self) -> list[UniPoly]:
        """[A_0(x), A_1(x), ...] with self = sum A_j(x) y^j."""
        out: list[list[int]] = [[] for _ in range(self.deg_y + 1)]
        for (i, j), v in self.terms.items():
            row = out[j]
            if len(row) <= i:
                row.extend([0] * (i + 1 - len(row)))
            row[i] = v
        return [UniPoly(self.spec, r) for r in out]

    def is_y_free(self) -> bool:
        return all(j == 0 for _, j in self.terms)

    def to_unipoly(self) -> UniPoly:
        if not self.is_y_free():
            raise AlgebraError("polynomial still depends on y")
        return self.y_coeffs()[0] if self.terms else UniPoly(self.spec)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, BiPoly) and self.spec == other.spec and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        parts = [f"{self.spec.hex(v)}*x^{i}*y^{j}" for (i, j), v in sorted(self.terms.items())]
        return "BiPoly(" + (" + ".join(parts) or "0") + ")"

    def __add__(self, other: "BiPoly") -> "BiPoly":
        s = self.spec
        out = dict(self.terms)
        for m, v in other.terms.items():
            out[m] = s.add(out.get(m, 0), v)
        return BiPoly._raw(s, out)

    def __neg__(self) -> "BiPoly":
        return BiPoly._raw(self.spec, {m: self.spec.neg(v) for m, v in self.terms.items()})

    def __sub__(self, other: "BiPoly") -> "BiPoly":
        return self + (-other)

    def __mul__(self, other) -> "BiPoly":
        s = self.spec
        if not isinstance(other, BiPoly):
            k = _as_int(s, other)
            return BiPoly._raw(s, {m: s.mul(k, v) for m, v in self.terms.items()})
        out: dict[Monomial, int] = {}
        add, mul = s.add, s.mul
        for (i1, j1), a in self.terms.items():
            for (i2, j2), b in other.terms.items():
                m = (i1 + i2, j1 + j2)
                out[m] = add(out.get(m, 0), mul(a, b))
        return BiPoly._raw(s, out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "BiPoly":
        r = BiPoly._raw(self.spec, {(0, 0): 1})
        base = self
        while e:
            if e & 1:
                r = r * base
            base = base * base
            e >>= 1
        return r

    def frobenius_power(self, m: int) -> "BiPoly":
        s = self.spec
        pm = s.p ** m
        return BiPoly._raw(s, {(i * pm, j * pm): s.pow(v, pm) for (i, j), v in self.terms.items()})

    def map_coeffs(self, spec: FieldSpec, fn) -> "BiPoly":
        return BiPoly._raw(spec, {m: fn(v) for m, v in self.terms.items()})

    def diff_x(self) -> "BiPoly":
        s = self.spec
        return BiPoly._raw(s, {(i - 1, j): s.mul(s.from_int(i), v)
                               for (i, j), v in self.terms.items() if i % s.p})

    def diff_y(self) -> "BiPoly":
        s = self.spec
        return BiPoly._raw(s, {(i, j - 1): s.mul(s.from_int(j), v)
                               for (i, j), v in self.terms.items() if j % s.p})

    def eval_int(self, x: int, y: int) -> int:
        s = self.spec
        acc = 0
        for (i, j), v in self.terms.items():
            acc = s.add(acc, s.mul(v, s.mul(s.pow(x, i), s.pow(y, j))))
        return acc

    def __call__(self, x, y) -> FieldElement:
        s = self.spec
        return FieldElement(s, self.eval_int(_as_int(s, x), _as_int(s, y)))

    def veval(self, xs, ys):
        """Vectorized evaluation at broadcastable arrays of encodings."""
        import numpy as np

        s = self.spec
        xs = np.asarray(xs, dtype=np.int64)
        ys = np.asarray(ys, dtype=np.int64)
        acc = np.zeros(np.broadcast_shapes(xs.shape, ys.shape), dtype=np.int64)
        for (i, j), v in self.terms.items():
            term = s.vmul(s.vpow(xs, i), s.vpow(ys, j))
            acc = s.vadd(acc, s.vmul(term, v))
        return acc

    def pole_order(self, pole_x: int, pole_y: int) -> int:
        """Upper bound for the pole order at the place at infinity."""
        return max((i * pole_x + j * pole_y for i, j in self.terms), default=-1)


# --- truncated power series --------------------------------------------------

class TruncSeries:
    """sum c_i t^i mod t^M, stored as a length-M list of encodings."""

    __slots__ = ("spec", "M", "c")

    def __init__(self, spec: FieldSpec, M: int, coeffs: Iterable = ()):
        if M < 0:
            raise AlgebraError("precision must be nonnegative")
        c = [_as_int(spec, v) for v in coeffs][:M]
        c.extend([0] * (M - len(c)))
        self.spec = spec
        self.M = M
        self.c = c

    @classmethod
    def const(cls, spec: FieldSpec, M: int, v: int) -> "TruncSeries":
        return cls(spec, M, [v])

    def coeff(self, i: int) -> FieldElement:
        return FieldElement(self.spec, self.c[i])

    def order(self) -> int | None:
        """Index of the first nonzero coefficient, None when zero to precision."""
        for i, v in enumerate(self.c):
            if v:
                return i
        return None

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, TruncSeries) and self.spec == other.spec
                and self.M == other.M and self.c == other.c)

    def __repr__(self) -> str:
        return f"TruncSeries(M={self.M}, {[self.spec.hex(v) for v in self.c]})"

    def truncate(self, M: int) -> "TruncSeries":
        return TruncSeries(self.spec, min(M, self.M), self.c)

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        s = self.spec
        M = min(self.M, other.M)
        return TruncSeries(s, M, [s.add(a, b) for a, b in zip(self.c[:M], other.c[:M])])

    def __neg__(self) -> "TruncSeries":
        return TruncSeries(self.spec, self.M, [self.spec.neg(v) for v in self.c])

    def __sub__(self, other: "TruncSeries") -> "TruncSeries":
        return self + (-other)

    def __mul__(self, other) -> "TruncSeries":
        s = self.spec
        if not isinstance(other, TruncSeries):
            k = _as_int(s, other)
            return TruncSeries(s, self.M, [s.mul(k, v) for v in self.c])
        M = min(self.M, other.M)
        out = [0] * M
        add, mul = s.add, s.mul
        b = other.c
        for i in range(M):
            a = self.c[i]
            if a:
                for j in range(M - i):
                    if b[j]:
                        out[i + j] = add(out[i + j], mul(a, b[j]))
        return TruncSeries(s, M, out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "TruncSeries":
        r = TruncSeries.const(self.spec, self.M, 1)
        base = self
        while e:
            if e & 1:
                r = r * base
            base = base * base
            e >>= 1
        return r


# --- Hasse derivatives -------------------------------------------------------

Differentiable = Union[UniPoly, TruncSeries]


def hasse_deriv(f: Differentiable, i: int) -> Differentiable:
    """D^i x^n = C(n, i) x^(n-i).  A series loses i digits of precision."""
    if i < 0:
        raise AlgebraError("negative derivative order")
    s = f.spec
    p = s.p
    if isinstance(f, UniPoly):
        out = []
        for n in range(i, len(f.c)):
            b = lucas_binom(n, i, p)
            out.append(s.mul(s.from_int(b), f.c[n]) if b else 0)
        return UniPoly(s, out)
    if isinstance(f, TruncSeries):
        M = max(0, f.M - i)
        out = []
        for n in range(i, f.M):
            b = lucas_binom(n, i, p)
            out.append(s.mul(s.from_int(b), f.c[n]) if b else 0)
        return TruncSeries(s, M, out)
    raise TypeError(f"cannot differentiate {type(f).__name__}")


# --- lifting y(t) on F(x0 + t, y) = 0 ---------------------------------------

def _is_p_power(j: int, p: int) -> int | None:
    e = 0
    while j > 1 and j % p == 0:
        j //= p
        e += 1
    return e if j == 1 and e > 0 else None


def series_solve(F: BiPoly, x0, y0, M: int) -> TruncSeries:
    """y(t) with y(0) = y0 and F(x0 + t, y(t)) = 0 mod t^M.

    Coefficient n is fixed by the linear equation F_y(x0, y0) c_n = -[t^n] F(x0+t, y_{<n}).
    Powers y^(p^m) are read off coefficientwise, all other powers are kept
    online by convolution.
    """
    s = F.spec
    x0 = _as_int(s, x0)
    y0 = _as_int(s, y0)
    if F.eval_int(x0, y0) != 0:
        raise NotOnCurveError("F(x0, y0) != 0")
    fy = F.diff_y().eval_int(x0, y0)
    if fy == 0:
        raise SingularPointError("dF/dy vanishes at the base point")
    inv_fy = s.inv(fy)
    add, mul = s.add, s.mul
    p = s.p

    # G_j(t) = sum_i c_ij (x0 + t)^i, kept sparse
    G: dict[int, list[int]] = {}
    for (i, j), v in F.terms.items():
        g = G.setdefault(j, [0] * M)
        for m in range(min(i, M - 1) + 1):
            b = lucas_binom(i, m, p)
            if b:
                g[m] = add(g[m], mul(v, mul(s.from_int(b), s.pow(x0, i - m))))
    Gs = {j: [(m, v) for m, v in enumerate(g) if v] for j, g in G.items()}
    ydegs = sorted(j for j in Gs if j > 0)
    maxj = max(ydegs, default=0)

    y = [0] * M
    y[0] = y0
    P: dict[int, list[int]] = {0: [1] + [0] * (M - 1)}
    frob: dict[int, int] = {}
    for j in range(1, maxj + 1):
        P[j] = [0] * M
        P[j][0] = s.pow(y0, j)
        e = _is_p_power(j, p)
        if e is not None:
            frob[j] = e
    # correction of [t^n] y^j by its dependence on c_n: j y0^(j-1)
    dcoef = {j: mul(s.from_int(j), s.pow(y0, j - 1)) for j in range(1, maxj + 1)}

    def power_coeff(j: int, n: int) -> int:
        if j == 1:
            return y[n]
        e = frob.get(j)
        if e is not None:
            pe = p ** e
            return s.pow(y[n // pe], pe) if n % pe == 0 else 0
        prev = P[j - 1]
        acc = 0
        for i in range(n + 1):
            if y[i] and prev[n - i]:
                acc = add(acc, mul(y[i], prev[n - i]))
        return acc

    for n in range(1, M):
        for j in range(1, maxj + 1):
            P[j][n] = power_coeff(j, n)
        val = 0
        for j, g in Gs.items():
            pj = P[j]
            for m, v in g:
                if m > n:
                    break
                if pj[n - m]:
                    val = add(val, mul(v, pj[n - m]))
        cn = s.neg(mul(val, inv_fy))
        y[n] = cn
        if cn:
            for j in range(1, maxj + 1):
                P[j][n] = add(P[j][n], mul(dcoef[j], cn))
    return TruncSeries(s, M, y)


def substitute_series(f: BiPoly, x0: int, ys: TruncSeries) -> TruncSeries:
    """f(x0 + t, y(t)) to the precision of ys; plain evaluation, used as an oracle."""
    s = f.spec
    M = ys.M
    xs = TruncSeries(s, M, [x0, 1])
    total = TruncSeries(s, M)
    for (i, j), v in f.terms.items():
        total = total + (xs ** i) * (ys ** j) * v
    return total


# --- reduction modulo a curve that is monic in y -----------------------------

def reduce_y_powers(F: BiPoly, g: BiPoly) -> BiPoly:
    """Canonical representative of g modulo F with y-degree below deg_y F.

    F must have a top y-term c y^e with c a nonzero constant; y^e is then
    replaced by -(F - c y^e)/c until no term reaches y^e.
    """
    s = F.spec
    e = F.deg_y
    if e <= 0:
        raise AlgebraError("F does not involve y")
    top = [(i, v) for (i, j), v in F.terms.items() if j == e]
    if len(top) != 1 or top[0][0] != 0:
        raise AlgebraError("malformed F: top y-coefficient must be a nonzero constant")
    minus_inv = s.neg(s.inv(top[0][1]))
    repl = [(i, j, s.mul(minus_inv, v)) for (i, j), v in F.terms.items() if j < e]

    buckets: dict[int, dict[int, int]] = {}
    for (i, j), v in g.terms.items():
        buckets.setdefault(j, {})[i] = v
    add, mul = s.add, s.mul
    # each substitution strictly lowers the y-degree, so highest-first terminates
    while True:
        high = [j for j in buckets if j >= e and buckets[j]]
        if not high:
            break
        j = max(high)
        row = buckets.pop(j)
        for i, v in row.items():
            for ri, rj, rv in repl:
                tj = j - e + rj
                b = buckets.setdefault(tj, {})
                ti = i + ri
                b[ti] = add(b.get(ti, 0), mul(v, rv))
    out = {(i, j): v for j, row in buckets.items() for i, v in row.items() if v}
    return BiPoly._raw(s, out)


def power_mod_curve(F: BiPoly, g: BiPoly, e: int) -> BiPoly:
    """g^e reduced modulo F; p-power steps use coefficientwise Frobenius."""
    s = F.spec
    p = s.p
    digits = []
    while e:
        e, d = divmod(e, p)
        digits.append(d)
    result = BiPoly._raw(s, {(0, 0): 1})
    for d in reversed(digits):
        result = reduce_y_powers(F, result.frobenius_power(1))
        for _ in range(d):
            result = reduce_y_powers(F, result * g)
    return result


# --- linear algebra over series ---------------------------------------------

def rank_profile(rows: Sequence[TruncSeries]) -> tuple[int, ...]:
    """Pivot columns of the echelon form, i.e. the vanishing orders of the span."""
    if not rows:
        return ()
    s = rows[0].spec
    M = rows[0].M
    if any(r.M != M for r in rows):
        raise AlgebraError("rows must share one precision")
    if len(rows) > M:
        raise RankDeficiencyError("more rows than columns")
    mat = [list(r.c) for r in rows]
    add, mul, neg, inv = s.add, s.mul, s.neg, s.inv
    pivots = []
    remaining = list(range(len(mat)))
    for col in range(M):
        if not remaining:
            break
        piv = next((r for r in remaining if mat[r][col]), None)
        if piv is None:
            continue
        remaining.remove(piv)
        pivots.append(col)
        prow = mat[piv]
        pinv = inv(prow[col])
        for r in remaining:
            row = mat[r]
            if row[col]:
                f = neg(mul(row[col], pinv))
                for c in range(col, M):
                    if prow[c]:
                        row[c] = add(row[c], mul(f, prow[c]))
    if remaining:
        raise RankDeficiencyError(
            f"only {len(pivots)} pivots for {len(rows)} rows below precision {M}")
    return tuple(pivots)


def series_det(mat: Sequence[Sequence[TruncSeries]]) -> TruncSeries:
    """Determinant by Laplace expansion along rows with minor caching."""
    n = len(mat)
    if any(len(r) != n for r in mat):
        raise AlgebraError("matrix is not square")
    if n == 0:
        raise AlgebraError("empty matrix")
    s = mat[0][0].spec
    M = min(e.M for r in mat for e in r)
    m = [[e.truncate(M) for e in r] for r in mat]
    cache: dict[tuple[int, tuple[int, ...]], TruncSeries] = {}

    def minor(row: int, cols: tuple[int, ...]) -> TruncSeries:
        if row == n:
            return TruncSeries.const(s, M, 1)
        key = (row, cols)
        if key in cache:
            return cache[key]
        acc = TruncSeries(s, M)
        for idx, c in enumerate(cols):
            e = m[row][c]
            if e.order() is None:
                continue
            term = e * minor(row + 1, cols[:idx] + cols[idx + 1:])
            acc = acc - term if idx % 2 else acc + term
        cache[key] = acc
        return acc

    return minor(0, tuple(range(n)))


def det_int(spec: FieldSpec, mat: Sequence[Sequence[int]]) -> int:
    """Determinant of a square matrix of field encodings (Gaussian elimination)."""
    a = [list(r) for r in mat]
    n = len(a)
    det = 1
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c]), None)
        if piv is None:
            return 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = spec.neg(det)
        det = spec.mul(det, a[c][c])
        inv = spec.inv(a[c][c])
        for r in range(c + 1, n):
            if a[r][c]:
                f = spec.neg(spec.mul(a[r][c], inv))
                for k in range(c, n):
                    a[r][k] = spec.add(a[r][k], spec.mul(f, a[c][k]))
    return det


def vdet(spec: FieldSpec, mat):
    """Leibniz determinant of a square matrix of numpy arrays (pointwise)."""
    import numpy as np

    n = len(mat)
    acc = None
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = np.asarray(mat[0][perm[0]], dtype=np.int64)
        for r in range(1, n):
            term = spec.vmul(term, mat[r][perm[r]])
        if inversions % 2:
            term = spec.vneg(term)
        acc = term if acc is None else spec.vadd(acc, term)
    return acc
