"""Bilinear sums over the hyperbola m = a n (mod d).

The raw pair sum is never enumerated over pairs: both tables are folded
into per-residue sums once per (table, d), after which each residue
class a costs an O(d) inner product.  Two variants are carried: the
plain pair sum, and the pair sum restricted to gcd(mn, d) = 1 (the
variant that matches the character expansion identically).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .arith import euler_phi_at
from .sieve import ArithmeticTable, ap_sum, sieve_table, unit_residues

VARIANTS = ("unrestricted", "coprime")


@dataclass(frozen=True)
class BilinearRecord:
    d: int
    a: int
    e_value: Fraction | float
    variant: str

    def csv_row(self) -> str:
        if isinstance(self.e_value, Fraction):
            return f"{self.d},{self.a},{self.e_value.numerator},{self.e_value.denominator},{self.variant}"
        return f"{self.d},{self.a},{self.e_value!r},1,{self.variant}"


def _buckets(table: ArithmeticTable, d: int) -> list:
    return [ap_sum(table, d, r) for r in range(d)]


def _pair_and_main(b1: list, b2: list, d: int, a: int, variant: str):
    units = unit_residues(d)
    if variant == "unrestricted":
        pair = sum(b1[(a * r) % d] * b2[r] for r in range(d))
    else:
        pair = sum(b1[(a * r) % d] * b2[r] for r in units)
    c1 = sum(b1[r] for r in units)
    c2 = sum(b2[r] for r in units)
    return pair, c1, c2


def bilinear_E(
    t1: ArithmeticTable,
    t2: ArithmeticTable,
    d: int,
    a: int,
    variant: str = "unrestricted",
) -> BilinearRecord:
    """E(f1, f2; X, d, a): hyperbola pair sum minus its expected share
    (1/phi(d)) (coprime sum of f1)(coprime sum of f2).

    Exact rational whenever both tables are integer valued.
    """
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    if d < 1:
        raise ValueError("d must be positive")
    a %= d
    if math.gcd(a, d) != 1:
        raise ValueError(f"residue class {a} mod {d} is not reduced")
    b1 = _buckets(t1, d)
    b2 = _buckets(t2, d)
    pair, c1, c2 = _pair_and_main(b1, b2, d, a, variant)
    phi = euler_phi_at(d)
    if t1.is_integer_valued and t2.is_integer_valued:
        e = pair - Fraction(c1 * c2, phi)
    else:
        e = pair - c1 * c2 / phi
    return BilinearRecord(d=d, a=a, e_value=e, variant=variant)


def theorem14_experiment(k: int, X: int, D: int, second: str = "tauk",
                         variant: str = "unrestricted") -> dict:
    """sum_{d <= D} sum over reduced a of E^2 vs X^(4 - 1/(3(k+4))).

    Exact rational when both factors are tau_k; float when the second
    factor is the von Mangoldt function.  Report only.
    """
    if second not in ("tauk", "vonmangoldt"):
        raise ValueError("second must be 'tauk' or 'vonmangoldt'")
    t1 = sieve_table("tauk", 1, X, k=k)
    t2 = t1 if second == "tauk" else sieve_table("vonmangoldt", 1, X)
    exact = second == "tauk"
    lhs_fraction = Fraction(0)
    lhs_float_parts = []
    for d in range(1, D + 1):
        b1 = _buckets(t1, d)
        b2 = b1 if second == "tauk" else _buckets(t2, d)
        phi = euler_phi_at(d)
        for a in unit_residues(d):
            pair, c1, c2 = _pair_and_main(b1, b2, d, a, variant)
            if exact:
                num = pair * phi - c1 * c2
                lhs_fraction += Fraction(num * num, phi * phi)
            else:
                e = pair - c1 * c2 / phi
                lhs_float_parts.append(e * e)
    rhs = X ** (4.0 - 1.0 / (3 * (k + 4)))
    lhs_float = float(lhs_fraction) if exact else math.fsum(lhs_float_parts)
    report = {
        "experiment": "bilinear_variance",
        "k": k,
        "X": X,
        "d_or_D": D,
        "second": second,
        "variant": variant,
        "lhs": lhs_float,
        "rhs": rhs,
        "ratio": lhs_float / rhs,
    }
    if exact:
        report["lhs_num"] = str(lhs_fraction.numerator)
        report["lhs_den"] = str(lhs_fraction.denominator)
    return report
