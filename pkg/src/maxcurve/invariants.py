"""Genus bounds, Castelnuovo numbers and numerical semigroups.

Integer arithmetic only.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from functools import reduce


class InvariantError(ValueError):
    pass


def hw_max_count(q: int, g: int) -> int:
    """Number of rational points of a maximal curve of genus g over F_{q^2}."""
    if q < 2 or g < 0:
        raise InvariantError("need q >= 2 and g >= 0")
    return q * q + 1 + 2 * q * g


@dataclass(frozen=True)
class BoundsReport:
    q: int
    g1: int
    g2: int
    g3: int

    def hw_count(self, g: int) -> int:
        return hw_max_count(self.q, g)

    def to_json(self) -> dict:
        return {"q": self.q, "g1": self.g1, "g2": self.g2, "g3": self.g3,
                "hw_counts": {"g1": self.hw_count(self.g1), "g2": self.hw_count(self.g2),
                              "g3": self.hw_count(self.g3)}}


def genus_spectrum(q: int) -> BoundsReport:
    return BoundsReport(q=q, g1=q * (q - 1) // 2, g2=(q - 1) ** 2 // 4, g3=(q * q - q + 4) // 6)


@dataclass(frozen=True)
class CastelnuovoResult:
    d: int
    r: int
    eps: int
    c: int


def castelnuovo(d: int, r: int) -> CastelnuovoResult:
    """c(d, r) = (d-1-eps)/(2(r-1)) * (d-r+eps), eps = (d-1) mod (r-1)."""
    if r < 2 or d < r:
        raise InvariantError(f"castelnuovo needs r >= 2 and d >= r, got d={d}, r={r}")
    eps = (d - 1) % (r - 1)
    num = (d - 1 - eps) * (d - r + eps)
    den = 2 * (r - 1)
    if num % den:
        raise InvariantError("Castelnuovo number is not an integer")  # pragma: no cover
    c = num // den
    assert c >= 0
    return CastelnuovoResult(d=d, r=r, eps=eps, c=c)


def dimension_window(q: int, g: int | None = None) -> list[int]:
    """Admissible dimensions N of |(q+1)P0| for a maximal curve of genus g (default q(q-3)/6)."""
    if g is None:
        g = q * (q - 3) // 6
    out = []
    if g == q * (q - 1) // 2:
        out.append(2)
    for N in range(3, q + 1):
        if castelnuovo(q + 1, N).c >= g:
            out.append(N)
    return out


def rr_dim(deg: int, g: int) -> int:
    """Projective dimension of a complete series of degree deg > 2g - 2."""
    if deg <= 2 * g - 2:
        raise InvariantError(f"degree {deg} is not in the non-special range (> {2 * g - 2})")
    return deg - g


# --- numerical semigroups ----------------------------------------------------

@dataclass(frozen=True)
class NumericalSemigroup:
    generators: tuple[int, ...]
    conductor: int
    gaps: tuple[int, ...]
    elements_mask: int = field(repr=False)  # bit i set iff i in S, for i < conductor

    @property
    def genus(self) -> int:
        return len(self.gaps)

    def __contains__(self, n: int) -> bool:
        return n >= self.conductor or (n >= 0 and bool(self.elements_mask >> n & 1))

    def elements(self, upto: int) -> list[int]:
        return [n for n in range(upto + 1) if n in self]

    def first(self, k: int) -> list[int]:
        out, n = [], 0
        while len(out) < k:
            if n in self:
                out.append(n)
            n += 1
        return out

    def to_json(self) -> dict:
        return {"generators": list(self.generators), "genus": self.genus,
                "conductor": self.conductor, "gaps": list(self.gaps)}


def _from_mask(mask: int, bound: int, generators: tuple[int, ...]) -> NumericalSemigroup:
    gaps = tuple(n for n in range(bound) if not mask >> n & 1)
    conductor = gaps[-1] + 1 if gaps else 0
    mask &= (1 << conductor) - 1
    return NumericalSemigroup(generators=generators, conductor=conductor, gaps=gaps,
                              elements_mask=mask)


def _close(mask: int, g: int, full: int) -> int:
    """Smallest superset of mask (containing 0) closed under adding g, truncated to full."""
    while True:
        new = (mask | (mask << g)) & full
        if new == mask:
            return mask
        mask = new


def semigroup(generators) -> NumericalSemigroup:
    gens = tuple(sorted(set(int(g) for g in generators)))
    if not gens or gens[0] <= 0:
        raise InvariantError("generators must be positive integers")
    if reduce(gcd, gens) != 1:
        raise InvariantError("gcd of generators must be 1 (otherwise the genus is infinite)")
    bound = max(gens) * min(gens) + 1
    full = (1 << bound) - 1
    mask = 1
    for g in gens:
        mask = _close(mask, g, full)
    return _from_mask(mask, bound, gens)


def is_semigroup(S: NumericalSemigroup) -> bool:
    """Independent re-check: 0 in S and a + b in S for all members a, b below the conductor."""
    c = S.conductor
    members = [n for n in range(c + 1) if n in S]
    if 0 not in S:
        return False
    for i, a in enumerate(members):
        for b in members[i:]:
            if a + b < c and (a + b) not in S:
                return False
    # every integer >= conductor is a member by construction; check the boundary
    return c == 0 or (c - 1) not in S


def minimal_generators(S: NumericalSemigroup) -> tuple[int, ...]:
    members = [n for n in range(1, S.conductor + max(S.first(2)[1], 1) + 1) if n in S]
    gens = []
    for n in members:
        if not any((n - g) in S and n - g > 0 for g in gens):
            gens.append(n)
    return tuple(gens)


def enumerate_completions(base: NumericalSemigroup, target_genus: int) -> list[NumericalSemigroup]:
    """All numerical semigroups T containing base with genus(T) = target_genus.

    Gaps are decided in increasing order (add or exclude); adding gamma takes
    the closure of T under +gamma, and a branch dies once an excluded gap is
    forced in or too many gaps have been filled.
    """
    if target_genus >= base.genus:
        raise InvariantError("target genus must be below the genus of the base semigroup")
    if target_genus < 0:
        return []
    need = base.genus - target_genus
    gaps = list(base.gaps)
    bound = base.conductor
    full = (1 << bound) - 1
    found: list[int] = []

    def count_added(mask: int) -> int:
        return bin(mask).count("1") - bin(base.elements_mask).count("1")

    def rec(mask: int, idx: int, excluded: int) -> None:
        added = count_added(mask)
        if added > need:
            return
        if added == need:
            found.append(mask)
            return
        # next undecided gap
        while idx < len(gaps) and (mask >> gaps[idx] & 1):
            idx += 1
        if idx == len(gaps):
            return
        g = gaps[idx]
        remaining_free = sum(1 for h in gaps[idx:] if not mask >> h & 1 and not excluded >> h & 1)
        if added + remaining_free < need:
            return
        new = _close(mask, g, full)
        # the closure of a semigroup under +g is again closed under all sums
        if not new & excluded:
            rec(new, idx + 1, excluded)
        rec(mask, idx + 1, excluded | (1 << g))

    rec(base.elements_mask, 0, 0)
    out = []
    for mask in sorted(set(found), key=lambda m: tuple(h for h in gaps if m >> h & 1)):
        S = _from_mask(mask, bound, ())
        out.append(NumericalSemigroup(generators=minimal_generators(S), conductor=S.conductor,
                                      gaps=S.gaps, elements_mask=S.elements_mask))
    return out


def added_gaps(base: NumericalSemigroup, T: NumericalSemigroup) -> tuple[int, ...]:
    return tuple(g for g in base.gaps if g in T)


# --- the N = 3 consistency checks ----------------------------------------------

def n3_consistency(q: int) -> dict:
    """Numeric side of the N = 3 analysis for q = 3^t >= 9 and g = q(q-3)/6."""
    if q < 9:
        raise InvariantError("stated for q >= 9")
    g = q * (q - 3) // 6
    lhs = (q + 1) * (q * q - 5 * q - 2)
    rhs = (2 * g - 2) * (4 * q - 1)
    n_rat = hw_max_count(q, g)
    nu1, nu2 = 1, q
    deg_S = (nu1 + nu2) * (2 * g - 2) + (q * q + 3) * (q + 1)
    # eps2 >= 4 forces deg S >= 5 #X, which is the inequality lhs >= rhs
    eps2_ge_4_possible = deg_S >= 5 * n_rat
    assert eps2_ge_4_possible == (lhs >= rhs)
    orders = sorted({a + b for a in (0, 1, 3, q) for b in (0, 1, 3, q)})
    return {
        "q": q,
        "g": g,
        "inequality_lhs": lhs,
        "inequality_rhs": rhs,
        "eps2_below_4": lhs < rhs,
        "twoD_orders": orders,
        "twoD_order_count": len(orders),
        "dim_2D_lower_bound": len(orders) - 1,
        "deg_S": deg_S,
        "n_rational": n_rat,
        "eps2_3_consistent": deg_S >= 4 * n_rat,
        "ok": lhs < rhs and len(orders) >= 10 and deg_S >= 4 * n_rat,
    }


# name used by the published API listing
section3_consistency = n3_consistency
