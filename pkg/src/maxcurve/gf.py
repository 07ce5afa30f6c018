"""Finite fields F_{p^k} for small p^k, with the subfield pair F_q < F_{q^2}.

Elements are encoded as integers ``v = d_0 + d_1 p + ... + d_{k-1} p^{k-1}``
where ``d_i`` is the coefficient of ``u^i`` in the polynomial basis (``u`` a
root of the modulus).  The hot paths (counting, series lifting, Wronskian
evaluation) work directly on these integers through the table-driven methods
of :class:`FieldSpec`; :class:`FieldElement` is the user-facing wrapper.

Enumeration order of elements is the integer order of the encoding, so the
constant digit is the fastest-moving one.
"""
from __future__ import annotations

import functools
import itertools
from typing import Callable, Iterator, Sequence

import numpy as np

MAX_DEGREE = 12


class FieldError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# --- dense polynomials over F_p, coefficient lists constant term first -----

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _fp_mod(a: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    a = _trim([c % p for c in a])
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for i, mc in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mc) % p
        _trim(a)
    return a


def _fp_mulmod(a: Sequence[int], b: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] += x * y
    return _fp_mod(prod, m, p)


def _fp_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _fp_mod(a, b, p)
    return a


def is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """Ben-Or test: no irreducible factor of degree <= k/2."""
    k = len(modulus) - 1
    if k <= 0 or modulus[-1] % p == 0:
        return False
    if k == 1:
        return True
    m = list(modulus)
    x = [0, 1]
    h = x
    for _ in range(k // 2):
        # h <- h^p mod m
        r = [1]
        base, e = h, p
        while e:
            if e & 1:
                r = _fp_mulmod(r, base, m, p)
            base = _fp_mulmod(base, base, m, p)
            e >>= 1
        h = r
        diff = list(h) + [0] * max(0, 2 - len(h))
        diff[1] = (diff[1] - 1) % p
        g = _fp_gcd(m, _trim(diff), p)
        if len(g) > 1:
            return False
    return True


# --- the field --------------------------------------------------------------

class FieldSpec:
    """An explicit model of F_{p^k}.  Immutable once built; share freely."""

    def __init__(self, p: int, k: int, modulus: Sequence[int]):
        self.p = p
        self.k = k
        self.modulus = tuple(modulus)
        self.t = k // 2 if k % 2 == 0 else None
        self.order = p ** k
        self._build_tables()

    # -- construction helpers
    def _bootstrap_mul(self, a: int, b: int) -> int:
        return self._encode_list(_fp_mulmod(self._digits_of(a), self._digits_of(b),
                                            self.modulus, self.p))

    def _digits_of(self, v: int) -> list[int]:
        out = []
        for _ in range(self.k):
            v, d = divmod(v, self.p)
            out.append(d)
        return out

    def _encode_list(self, digits: Sequence[int]) -> int:
        v = 0
        for d in reversed(list(digits) + [0] * (self.k - len(digits))):
            v = v * self.p + d
        return v

    def _slow_pow(self, a: int, e: int) -> int:
        r, base = 1, a
        while e:
            if e & 1:
                r = self._bootstrap_mul(r, base)
            base = self._bootstrap_mul(base, base)
            e >>= 1
        return r

    def _build_tables(self) -> None:
        p, k, n = self.p, self.k, self.order
        pw = p ** np.arange(k, dtype=np.int64)
        self._pw = pw
        allv = np.arange(n, dtype=np.int64)
        digits = (allv[:, None] // pw[None, :]) % p
        self._digits = digits

        # primitive element: smallest encoding of multiplicative order n - 1
        factors = _prime_factors(n - 1)
        g = None
        for cand in range(1, n):
            if all(self._slow_pow(cand, (n - 1) // r) != 1 for r in factors):
                g = cand
                break
        if n == 2:
            g = 1
        assert g is not None
        self.generator = g

        # multiplication by a fixed element is F_p-linear: digits @ M mod p
        def mul_matrix(c: int) -> np.ndarray:
            rows = [self._digits_of(self._bootstrap_mul(c, p ** i)) for i in range(k)]
            return np.array(rows, dtype=np.int64)

        block = max(1, int(np.ceil(np.sqrt(n - 1))))
        first = [1]
        for _ in range(block - 1):
            first.append(self._bootstrap_mul(first[-1], g))
        step = mul_matrix(self._slow_pow(g, block))
        cur = np.array([self._digits_of(v) for v in first], dtype=np.int64)
        chunks = []
        total = 0
        while total < n - 1:
            chunks.append(cur @ pw)
            total += len(cur)
            cur = (cur @ step) % p
        exp = np.concatenate(chunks)[: n - 1]
        log = np.zeros(n, dtype=np.int64)
        log[exp] = np.arange(n - 1, dtype=np.int64)
        if len(set(exp.tolist())) != n - 1:
            raise FieldError("generator search failed: modulus not irreducible?")
        self._exp_np = np.concatenate([exp, exp])
        self._log_np = log
        self._exp = self._exp_np.tolist()
        self._log = log.tolist()

        # addition by splitting the digit string into two halves
        h = (k + 1) // 2
        H = p ** h
        self._H = H
        hv = np.arange(H, dtype=np.int64)
        hpw = p ** np.arange(h, dtype=np.int64)
        hd = (hv[:, None] // hpw[None, :]) % p
        add_tab = (((hd[:, None, :] + hd[None, :, :]) % p) @ hpw).reshape(-1)
        neg_tab = (((-hd) % p) @ hpw)
        self._add_np = add_tab
        self._hneg_np = neg_tab
        self._neg_np = (((-digits) % p) @ pw)
        if n <= 729:
            full = (((digits[:, None, :] + digits[None, :, :]) % p) @ pw).reshape(-1)
            self._add_full = full.tolist()
        else:
            self._add_full = None
        self._add_half = add_tab.tolist()
        self._neg = self._neg_np.tolist()
        self.one = 1
        self.zero = 0
        self.minus_one = self._neg[1]

    # -- identity / serialization
    def __repr__(self) -> str:
        return f"FieldSpec(p={self.p}, k={self.k}, modulus={list(self.modulus)})"

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, FieldSpec) and self.p == other.p and self.k == other.k
                and self.modulus == other.modulus)

    def __hash__(self) -> int:
        return hash((self.p, self.k, self.modulus))

    @property
    def q(self) -> int:
        if self.t is None:
            raise FieldError(f"F_{self.p}^{self.k} does not model F_(q^2): odd degree")
        return self.p ** self.t

    @property
    def spec_id(self) -> str:
        return f"F{self.p}^{self.k}:" + "".join(str(c) for c in self.modulus)

    def to_json(self) -> dict:
        return {"p": self.p, "k": self.k, "modulus": list(self.modulus), "t": self.t}

    # -- scalar kernel on encoded integers
    def add(self, a: int, b: int) -> int:
        if self._add_full is not None:
            return self._add_full[a * self.order + b]
        H = self._H
        a1, a0 = divmod(a, H)
        b1, b0 = divmod(b, H)
        tab = self._add_half
        return tab[a1 * H + b1] * H + tab[a0 * H + b0]

    def neg(self, a: int) -> int:
        return self._neg[a]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self._neg[b])

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in " + repr(self))
        return self._exp[(self.order - 1 - self._log[a]) % (self.order - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inv(a), -e
        if a == 0:
            return 1 if e == 0 else 0
        return self._exp[(self._log[a] * e) % (self.order - 1)]

    def pow_sqm(self, a: int, e: int) -> int:
        """Square-and-multiply; reference path for :meth:`pow`."""
        if e < 0:
            a, e = self.inv(a), -e
        r, base = 1, a
        while e:
            if e & 1:
                r = self.mul(r, base)
            base = self.mul(base, base)
            e >>= 1
        return r

    def from_int(self, c: int) -> int:
        """Image of the integer c in the prime field."""
        return c % self.p

    def digits(self, a: int) -> tuple[int, ...]:
        return tuple(int(d) for d in self._digits[a])

    def encode(self, digits: Sequence[int]) -> int:
        if len(digits) > self.k or any(not 0 <= d < self.p for d in digits):
            raise FieldError(f"bad digit sequence {digits!r} for {self!r}")
        return self._encode_list(digits)

    def hex(self, a: int) -> str:
        return "".join("0123456789abcdefghijklmnopqrstuvwxyz"[d] for d in self.digits(a))

    def from_hex(self, s: str) -> int:
        return self.encode(["0123456789abcdefghijklmnopqrstuvwxyz".index(ch) for ch in s.lower()])

    def in_subfield(self, a: int, degree: int) -> bool:
        return self.pow(a, self.p ** degree) == a

    # -- vectorized kernel on numpy int64 arrays
    def vadd(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        H = self._H
        a1, a0 = np.divmod(a, H)
        b1, b0 = np.divmod(b, H)
        tab = self._add_np
        return tab[a1 * H + b1] * H + tab[a0 * H + b0]

    def vneg(self, a: np.ndarray) -> np.ndarray:
        return self._neg_np[a]

    def vsub(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return self.vadd(a, self._neg_np[b])

    def vmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
        out = self._exp_np[self._log_np[a] + self._log_np[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def vpow(self, a: np.ndarray, e: int) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if e == 0:
            return np.ones_like(a)
        if e < 0:
            raise FieldError("vpow takes nonnegative exponents")
        out = self._exp_np[(self._log_np[a] * (e % (self.order - 1))) % (self.order - 1)]
        return np.where(a == 0, 0, out)

    def vdigits(self, a: np.ndarray) -> np.ndarray:
        return self._digits[a]

    def vencode(self, digits: np.ndarray) -> np.ndarray:
        return (digits % self.p) @ self._pw

    # -- elements
    def __call__(self, value: int | Sequence[int] | "FieldElement") -> "FieldElement":
        if isinstance(value, FieldElement):
            if value.spec != self:
                raise FieldError("element belongs to a different field")
            return value
        if isinstance(value, int):
            return FieldElement(self, self.from_int(value))
        return FieldElement(self, self.encode(value))

    def element(self, v: int) -> "FieldElement":
        if not 0 <= v < self.order:
            raise FieldError(f"encoding {v} out of range for {self!r}")
        return FieldElement(self, v)

    def elements(self) -> Iterator["FieldElement"]:
        for v in range(self.order):
            yield FieldElement(self, v)


class FieldElement:
    """Immutable element of a :class:`FieldSpec`."""

    __slots__ = ("spec", "v")

    def __init__(self, spec: FieldSpec, v: int):
        self.spec = spec
        self.v = v

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.spec.digits(self.v)

    @property
    def spec_id(self) -> str:
        return self.spec.spec_id

    def _other(self, other: object) -> int:
        if isinstance(other, FieldElement):
            if other.spec is not self.spec and other.spec != self.spec:
                raise FieldError("operands live in different fields")
            return other.v
        if isinstance(other, int):
            return self.spec.from_int(other)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.spec, self.spec.add(self.v, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.spec, self.spec.sub(self.v, o))

    def __rsub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.spec, self.spec.sub(o, self.v))

    def __neg__(self):
        return FieldElement(self.spec, self.spec.neg(self.v))

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.spec, self.spec.mul(self.v, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.spec, self.spec.div(self.v, o))

    def __pow__(self, e: int):
        return FieldElement(self.spec, self.spec.pow_sqm(self.v, e))

    def inv(self) -> "FieldElement":
        return FieldElement(self.spec, self.spec.inv(self.v))

    def __eq__(self, other: object) -> bool:
        if isinstance(other, FieldElement):
            return self.spec == other.spec and self.v == other.v
        if isinstance(other, int):
            return self.v == self.spec.from_int(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.spec.spec_id, self.v))

    def __bool__(self) -> bool:
        return self.v != 0

    def __repr__(self) -> str:
        return f"<{self.spec.hex(self.v)} in F{self.spec.p}^{self.spec.k}>"


# --- public operations ------------------------------------------------------

@functools.lru_cache(maxsize=None)
def mk_field(p: int, k: int) -> FieldSpec:
    """Build F_{p^k} with the first irreducible modulus in enumeration order."""
    if not is_prime(p):
        raise FieldError(f"{p} is not prime")
    if not 1 <= k <= MAX_DEGREE:
        raise FieldError(f"degree {k} outside 1..{MAX_DEGREE}")
    for tail in itertools.product(range(p), repeat=k):
        low = tail[::-1]  # low[i] is the coefficient of x^i; low[0] moves fastest
        modulus = list(low) + [1]
        if is_irreducible(modulus, p):
            return FieldSpec(p, k, modulus)
    raise FieldError(f"no irreducible of degree {k} over F_{p}")  # pragma: no cover


def field_for_q(q: int) -> FieldSpec:
    """F_{q^2} for q = 3^t."""
    t = log3(q)
    return mk_field(3, 2 * t)


def log3(q: int) -> int:
    t, r = 0, q
    while r > 1 and r % 3 == 0:
        r //= 3
        t += 1
    if r != 1 or t == 0:
        raise FieldError(f"q={q} is not a positive power of 3")
    return t


def _check_q2(spec: FieldSpec) -> int:
    if spec.t is None:
        raise FieldError(f"{spec!r} has odd degree; no F_q subfield of index 2")
    return spec.q


def frobenius_q(x: FieldElement) -> FieldElement:
    q = _check_q2(x.spec)
    return FieldElement(x.spec, x.spec.pow(x.v, q))


def norm_to_Fq(x: FieldElement) -> FieldElement:
    q = _check_q2(x.spec)
    return FieldElement(x.spec, x.spec.pow(x.v, q + 1))


def trace_to_Fq(x: FieldElement) -> FieldElement:
    q = _check_q2(x.spec)
    s = x.spec
    return FieldElement(s, s.add(x.v, s.pow(x.v, q)))


def find_special_a(spec: FieldSpec) -> FieldElement:
    """First element with a^(q-1) = -1; it also satisfies a^q = -a."""
    q = _check_q2(spec)
    if q % 2 == 0:
        raise FieldError("q must be odd")
    for v in range(1, spec.order):
        if spec.pow(v, q - 1) == spec.minus_one:
            return FieldElement(spec, v)
    raise FieldError("no element with a^(q-1) = -1")  # pragma: no cover


def embedding(small: FieldSpec, big: FieldSpec) -> Callable[[int], int]:
    """Field embedding small -> big on encodings, sending u to the first root of
    the small modulus in big."""
    if small.p != big.p or big.k % small.k:
        raise FieldError(f"{small!r} does not embed in {big!r}")
    if small.k == 1:
        return lambda v: v
    root = None
    for r in range(big.order):
        acc = 0
        for c in reversed(small.modulus):
            acc = big.add(big.mul(acc, r), c)
        if acc == 0:
            root = r
            break
    assert root is not None
    powers = [big.pow(root, i) for i in range(small.k)]
    table = []
    for v in range(small.order):
        acc = 0
        for d, pw in zip(small.digits(v), powers):
            for _ in range(d):
                acc = big.add(acc, pw)
        table.append(acc)
    return table.__getitem__


# --- F_p-linear algebra on F_{p^k} viewed as an F_p-vector space ----------

class FpLinearMap:
    """An F_p-linear endomorphism of F_{p^k}, with kernel and solver.

    Row reduction of [A | I] gives E with E A = R in reduced echelon form, so
    A x = b is consistent iff (E b) vanishes below the rank.
    """

    def __init__(self, spec: FieldSpec, fn: Callable[[int], int]):
        self.spec = spec
        p, k = spec.p, spec.k
        cols = [spec.digits(fn(p ** i)) for i in range(k)]
        A = np.array(cols, dtype=np.int64).T  # A[:, i] = digits of fn(u^i)
        aug = np.concatenate([A, np.eye(k, dtype=np.int64)], axis=1) % p
        pivots: list[int] = []
        r = 0
        for c in range(k):
            rows = [i for i in range(r, k) if aug[i, c] % p]
            if not rows:
                continue
            aug[[r, rows[0]]] = aug[[rows[0], r]]
            aug[r] = (aug[r] * pow(int(aug[r, c]), p - 2, p)) % p
            for i in range(k):
                if i != r and aug[i, c]:
                    aug[i] = (aug[i] - aug[i, c] * aug[r]) % p
            pivots.append(c)
            r += 1
        self.rank = r
        self.pivots = pivots
        self._R = aug[:, :k]
        self._E = aug[:, k:]
        free = [c for c in range(k) if c not in pivots]
        basis = []
        for f in free:
            vec = np.zeros(k, dtype=np.int64)
            vec[f] = 1
            for i, pc in enumerate(pivots):
                vec[pc] = (-self._R[i, f]) % p
            basis.append(int(vec @ spec._pw))
        self.kernel_basis = basis

    def kernel(self) -> list[int]:
        """All kernel elements, sorted by encoding."""
        s = self.spec
        out = {0}
        for b in self.kernel_basis:
            new = set()
            for v in out:
                acc = v
                for _ in range(s.p):
                    new.add(acc)
                    acc = s.add(acc, b)
            out = new
        return sorted(out)

    def solve_many(self, rhs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized: (consistent mask, particular solutions) for each rhs."""
        s = self.spec
        c = (s.vdigits(np.asarray(rhs, dtype=np.int64)) @ self._E.T) % s.p
        ok = np.all(c[:, self.rank:] == 0, axis=1)
        sol = np.zeros((len(c), s.k), dtype=np.int64)
        for i, pc in enumerate(self.pivots):
            sol[:, pc] = c[:, i]
        return ok, s.vencode(sol)

    def solve(self, rhs: int) -> int | None:
        ok, sol = self.solve_many(np.array([rhs]))
        return int(sol[0]) if ok[0] else None
