"""Dirichlet characters mod d via the cyclic decomposition of (Z/dZ)*.

Representation
--------------
(Z/dZ)* is split into cyclic components, one set per prime power of d:

  * odd p^e: a single component of order phi(p^e), generated by the
    smallest primitive root that works mod p^2 (and hence mod every
    p^e, which keeps generators consistent when a character is reduced
    to its conductor);
  * 2^1: nothing; 2^2: the component <-1> of order 2; 2^e, e >= 3: the
    pair <-1> x <5> of orders 2 and 2^(e-2).

A character is the tuple of its exponents on those generators, so its
value at n is the root of unity with rational angle
sum_j exponents[j] * dlog_j(n) / order_j.  Discrete logs are tabulated
once per modulus (d capped at 10^6) and characters evaluate in O(1).
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .arith import factorize
from .sieve import ArithmeticTable

MAX_ENUM_MODULUS = 10**6


@dataclass(frozen=True)
class _Component:
    prime: int
    local_modulus: int  # p^e this component came from
    order: int


def _smallest_primitive_root(p: int) -> int:
    """Smallest g that generates (Z/pZ)* and (Z/p^2Z)*."""
    if p == 2:
        return 1
    qs = [q for q, _ in factorize(p - 1).factors]
    g = 2
    while True:
        if all(pow(g, (p - 1) // q, p) != 1 for q in qs):
            if pow(g, p - 1, p * p) != 1:
                return g
        g += 1


class UnitGroup:
    """Component structure and discrete-log table for (Z/dZ)*."""

    def __init__(self, d: int):
        if not 1 <= d <= MAX_ENUM_MODULUS:
            raise ValueError(f"modulus must be in [1, {MAX_ENUM_MODULUS}]")
        self.d = d
        self.components: list[_Component] = []
        local_dlogs: list[np.ndarray] = []

        for p, e in factorize(d).factors:
            pe = p**e
            if p == 2:
                if e == 1:
                    continue
                if e == 2:
                    table = np.full(4, -1, dtype=np.int64)
                    table[1], table[3] = 0, 1
                    self.components.append(_Component(2, 4, 2))
                    local_dlogs.append(table)
                    continue
                # e >= 3: n = (-1)^s * 5^t
                order5 = pe // 4
                ts = np.full(pe, -1, dtype=np.int64)
                ss = np.full(pe, -1, dtype=np.int64)
                v = 1
                for t in range(order5):
                    ss[v], ts[v] = 0, t
                    ss[pe - v], ts[pe - v] = 1, t
                    v = v * 5 % pe
                self.components.append(_Component(2, pe, 2))
                local_dlogs.append(ss)
                self.components.append(_Component(2, pe, order5))
                local_dlogs.append(ts)
            else:
                order = pe // p * (p - 1)
                g = _smallest_primitive_root(p)
                table = np.full(pe, -1, dtype=np.int64)
                v = 1
                for t in range(order):
                    table[v] = t
                    v = v * g % pe
                self.components.append(_Component(p, pe, order))
                local_dlogs.append(table)

        self.phi = 1
        for comp in self.components:
            self.phi *= comp.order

        # dlog matrix over all residues mod d; -1 rows mark non-units.
        # is_unit needs the direct gcd test: a 2^1 factor of d contributes
        # no cyclic component but still excludes even residues.
        n = np.arange(d, dtype=np.int64)
        ncomp = len(self.components)
        self.is_unit = np.gcd(n, d) == 1 if d > 1 else np.ones(1, dtype=bool)
        self.dlog = np.full((d, ncomp), -1, dtype=np.int64)
        for j, comp_table in enumerate(zip(self.components, local_dlogs)):
            comp, table = comp_table
            self.dlog[:, j] = table[n % comp.local_modulus]
        self.dlog[~self.is_unit] = -1


@lru_cache(maxsize=256)
def unit_group(d: int) -> UnitGroup:
    return UnitGroup(d)


@dataclass(frozen=True)
class Character:
    """A Dirichlet character mod `modulus`, pinned by component exponents."""

    modulus: int
    exponents: tuple[int, ...]

    @property
    def group(self) -> UnitGroup:
        return unit_group(self.modulus)

    @property
    def is_principal(self) -> bool:
        return all(a == 0 for a in self.exponents)

    def angle(self, n: int) -> Fraction | None:
        """Exact angle of chi(n) as a fraction of a full turn, None if chi(n)=0."""
        g = self.group
        r = n % self.modulus
        if not g.is_unit[r]:
            return None
        theta = Fraction(0)
        for a, comp, t in zip(self.exponents, g.components, g.dlog[r]):
            theta += Fraction(a * int(t), comp.order)
        return theta % 1

    def value(self, n: int) -> complex:
        theta = self.angle(n)
        if theta is None:
            return 0j
        return cmath.exp(2j * cmath.pi * float(theta))

    def values_array(self) -> np.ndarray:
        """chi on all residues 0..d-1 as a complex vector."""
        g = self.group
        theta = np.zeros(self.modulus, dtype=np.float64)
        for j, (a, comp) in enumerate(zip(self.exponents, g.components)):
            theta += (a / comp.order) * g.dlog[:, j]
        out = np.exp(2j * np.pi * theta)
        out[~g.is_unit] = 0.0
        return out


def enumerate_characters(d: int) -> list[Character]:
    """All phi(d) characters mod d, principal first, deterministic order."""
    if d < 1:
        raise ValueError("modulus must be positive")
    g = unit_group(d)
    orders = [comp.order for comp in g.components]
    return [Character(d, exps) for exps in itertools.product(*(range(m) for m in orders))]


def char_value(chi: Character, n: int) -> complex:
    return chi.value(n)


def conductor(chi: Character) -> int:
    """Smallest modulus inducing chi, from the local component exponents."""
    g = chi.group
    cond = 1
    j = 0
    comps = g.components
    while j < len(comps):
        comp = comps[j]
        if comp.prime == 2 and comp.order == 2 and j + 1 < len(comps) and comps[j + 1].prime == 2:
            # paired components of 2^e, e >= 3
            s, t = chi.exponents[j], chi.exponents[j + 1]
            order5 = comps[j + 1].order
            if t != 0:
                tz = (t & -t).bit_length() - 1  # 2-adic valuation of t
                cond *= (4 * order5) >> tz
            elif s != 0:
                cond *= 4
            j += 2
            continue
        a = chi.exponents[j]
        if a != 0:
            p, m = comp.prime, comp.order
            if p == 2:  # the lone mod-4 component
                cond *= 4
            else:
                order_chi = m // math.gcd(a, m)
                alpha = 0
                while order_chi % p == 0:
                    order_chi //= p
                    alpha += 1
                cond *= p ** (alpha + 1)
        j += 1
    return cond


def conductor_and_primitive(chi: Character) -> tuple[int, Character]:
    """(q, chi*) with chi* primitive mod q and chi = chi* on gcd(n, d) = 1."""
    q = conductor(chi)
    if q == 1:
        return 1, Character(1, ())
    target = unit_group(q)
    exps = []
    comps = chi.group.components
    j = 0
    while j < len(comps):
        comp = comps[j]
        if comp.prime == 2 and j + 1 < len(comps) and comps[j + 1].prime == 2:
            s, t = chi.exponents[j], chi.exponents[j + 1]
            order5 = comps[j + 1].order
            if q % 8 == 0:
                q2 = q & -q  # 2-part of q
                exps.extend([s, t * (q2 // 4) // order5])
            elif q % 4 == 0:
                exps.append(1)  # only (t = 0, s = 1) reduces to conductor 4
            j += 2
            continue
        a = chi.exponents[j]
        if a != 0:
            comp_t = target.components[len(exps)]
            if comp_t.prime != comp.prime:
                raise AssertionError("component misalignment while inducing")
            exps.append(a * comp_t.order // comp.order)
        j += 1
    chi_star = Character(q, tuple(exps))
    return q, chi_star


def fold_residues(table: ArithmeticTable, d: int, coprime_to: int = 1) -> np.ndarray:
    """Residue-bucket sums of the table mod d, optionally restricted to
    gcd(n, coprime_to) = 1.  Exact for integer kinds: magnitudes must
    stay below 2^53 so float64 holds every intermediate integer."""
    n = np.arange(table.lo, table.hi + 1, dtype=np.int64)
    weights = table.values.astype(np.float64)
    if table.is_integer_valued and int(np.abs(table.values).max()) * len(n) >= 2**53:
        raise OverflowError("bucket sums would lose exactness in float64")
    if coprime_to > 1:
        cop = np.array([math.gcd(r, coprime_to) == 1 for r in range(coprime_to)])
        weights = weights * cop[n % coprime_to]
    return np.bincount(n % d, weights=weights, minlength=d)


def char_sum_from_buckets(buckets: np.ndarray, chi: Character) -> complex:
    prods = buckets * chi.values_array()
    return complex(math.fsum(prods.real), math.fsum(prods.imag))


def char_sum(table: ArithmeticTable, chi: Character, coprime_to: int = 1) -> complex:
    """sum_{n in range, gcd(n, coprime_to) = 1} f(n) chi(n)."""
    buckets = fold_residues(table, chi.modulus, coprime_to)
    return char_sum_from_buckets(buckets, chi)


@lru_cache(maxsize=512)
def _char_matrix(q: int):
    """(values matrix phi(q) x q, primitive mask) for all characters mod q."""
    chars = enumerate_characters(q)
    mat = np.vstack([chi.values_array() for chi in chars])
    prim = np.array([conductor(chi) == q for chi in chars])
    return mat, prim


def large_sieve_check(seq, Q: int) -> float:
    """Ratio of the sharp multiplicative large sieve at this sequence.

    LHS = sum_{q <= Q} (q/phi(q)) sum over primitive chi mod q of
    |sum_n a_n chi(n)|^2, normalized by (Q^2 + N - 1) * sum |a_n|^2;
    the sharp inequality says the ratio never exceeds 1.
    """
    a = np.asarray(seq, dtype=np.complex128)
    N = len(a)
    if N < 1 or Q < 1:
        raise ValueError("need N, Q >= 1")
    total = math.fsum(np.abs(a) ** 2)
    if total == 0.0:
        return 0.0
    lhs = 0.0
    n = np.arange(1, N + 1)
    for q in range(1, Q + 1):
        buckets = np.bincount(n % q, weights=a.real, minlength=q) + 1j * np.bincount(
            n % q, weights=a.imag, minlength=q
        )
        mat, prim = _char_matrix(q)
        if not prim.any():
            continue
        sums = mat[prim] @ buckets
        lhs += (q / unit_group(q).phi) * float(np.sum(np.abs(sums) ** 2))
    return lhs / ((Q * Q + N - 1) * total)
