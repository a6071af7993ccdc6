"""Exact discrepancies in arithmetic progressions and the moduli-family
machinery built on top of them: the admissible family, the modulus
factorization, the finer-than-dyadic box decomposition, and the case
classifier for box-exponent vectors.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .arith import ParamSet, euler_phi_at, factorize, pow_cmp, real_pow_cmp
from .characters import char_sum_from_buckets, enumerate_characters, fold_residues
from .sieve import ArithmeticTable, ap_sum, coprime_sum, sieve_table, unit_residues

# Family exponent window from the averaged-discrepancy theorem: moduli
# run below X^(293/584) and their rough part must exceed X^(71/584).
FAMILY_MODULUS_EXP = Fraction(293, 584)
ROUGH_FLOOR_EXP = Fraction(71, 584)


class HypothesesError(ValueError):
    """A stated precondition of the factorization lemma fails."""


@dataclass(frozen=True)
class DiscrepancyRecord:
    d: int
    a: int
    delta: Fraction
    ap_part: int
    main_part: Fraction

    def csv_row(self) -> str:
        return (
            f"{self.d},{self.a},{self.delta.numerator},{self.delta.denominator},"
            f"{abs(float(self.delta))!r}"
        )


def delta(table: ArithmeticTable, d: int, a: int) -> DiscrepancyRecord:
    """Exact Delta(f; X, d, a) = ap_sum - coprime_sum / phi(d)."""
    if d < 1:
        raise ValueError("d must be positive")
    a %= d
    if math.gcd(a, d) != 1:
        raise ValueError(f"residue class {a} mod {d} is not reduced")
    ap = ap_sum(table, d, a)
    cop = coprime_sum(table, d)
    if not isinstance(ap, int):
        raise TypeError("delta needs an integer-valued table")
    main = Fraction(cop, euler_phi_at(d))
    return DiscrepancyRecord(d=d, a=a, delta=ap - main, ap_part=ap, main_part=main)


def _nonprincipal_char_sums(table: ArithmeticTable, d: int):
    buckets = fold_residues(table, d)
    out = []
    for chi in enumerate_characters(d):
        if not chi.is_principal:
            out.append((chi, char_sum_from_buckets(buckets, chi)))
    return out


def delta_via_characters(table: ArithmeticTable, d: int, a: int) -> complex:
    """Delta recomputed as (1/phi(d)) sum over nonprincipal chi of
    conj(chi(a)) * char_sum; agrees with the exact path to float accuracy."""
    if d > 10**4:
        raise ValueError("character route capped at d <= 10^4")
    a %= d
    if math.gcd(a, d) != 1:
        raise ValueError(f"residue class {a} mod {d} is not reduced")
    total = 0j
    for chi, s in _nonprincipal_char_sums(table, d):
        total += chi.value(a).conjugate() * s
    return total / euler_phi_at(d)


def delta_profile(table: ArithmeticTable, d: int) -> dict[int, Fraction]:
    """delta() for every reduced residue mod d in one pass over the table."""
    units = unit_residues(d)
    sums = {a: ap_sum(table, d, a) for a in units}
    cop = sum(sums.values())
    phi = len(units)
    return {a: s - Fraction(cop, phi) for a, s in sums.items()}


def delta_via_characters_profile(table: ArithmeticTable, d: int) -> dict[int, complex]:
    """Character-route delta for every reduced residue, char sums shared."""
    pairs = _nonprincipal_char_sums(table, d)
    phi = euler_phi_at(d)
    out = {}
    for a in unit_residues(d):
        total = 0j
        for chi, s in pairs:
            total += chi.value(a).conjugate() * s
        out[a] = total / phi
    return out


@dataclass(frozen=True)
class ModuliFamily:
    params: ParamSet
    a: int
    members: tuple[int, ...]


def _rough_and_smooth_parts(d_factors, params: ParamSet) -> tuple[int, int]:
    """(product of prime factors <= X^(varpi^2), product of those <= X^varpi)."""
    tiny = 1
    small = 1
    X = params.X
    varpi_sq = params.varpi * params.varpi
    for p, _ in d_factors:
        if pow_cmp(p, varpi_sq, X) <= 0:
            tiny *= p
        if pow_cmp(p, params.varpi, X) <= 0:
            small *= p
    return tiny, small


def family_member(d: int, params: ParamSet, a: int) -> bool:
    """All five membership conditions, boundaries strict."""
    if math.gcd(d, a) != 1:
        return False
    f = factorize(d)
    if not f.is_squarefree:
        return False
    if pow_cmp(d, FAMILY_MODULUS_EXP, params.X) >= 0:
        return False
    tiny, small = _rough_and_smooth_parts(f.factors, params)
    if pow_cmp(tiny, params.varpi, params.X) >= 0:
        return False
    if pow_cmp(small, ROUGH_FLOOR_EXP, params.X) <= 0:
        return False
    return True


def build_family(params: ParamSet, a: int) -> ModuliFamily:
    """Enumerate the admissible moduli below X^(293/584)."""
    if a == 0:
        raise ValueError("shift a must be nonzero")
    cap = int(math.exp(float(FAMILY_MODULUS_EXP) * math.log(params.X))) + 2
    while cap > 1 and pow_cmp(cap, FAMILY_MODULUS_EXP, params.X) >= 0:
        cap -= 1
    members = tuple(d for d in range(1, cap + 1) if family_member(d, params, a))
    return ModuliFamily(params=params, a=a, members=members)


def factorize_modulus(d: int, rstar: float, params: ParamSet) -> tuple[int, int]:
    """Split d = q * r with X^-varpi * R* < r < R* and q free of primes
    <= X^(varpi^(4/3)).

    d is written as d0 * d1 * d2 (prime factors at most D0, in (D0, D1],
    above D1); r starts from d0 (first R* window) or d0 * d2 (second) and
    greedily absorbs the middle primes in ascending order while staying
    below R*.
    """
    X = params.X
    f = factorize(d)
    if not f.is_squarefree:
        raise HypothesesError(f"d = {d} is not squarefree")
    if pow_cmp(d, params.exp_D2, X) <= 0 or pow_cmp(d, params.exp_D3, X) >= 0:
        raise HypothesesError(f"d = {d} outside the (D2, D3) range")

    d0 = 1
    middle = []
    d2 = 1
    for p, _ in f.factors:
        if real_pow_cmp(p, params.exp_D0, X) <= 0:
            d0 *= p
        elif pow_cmp(p, params.exp_D1, X) <= 0:
            middle.append(p)
        else:
            d2 *= p
    if pow_cmp(d0, params.varpi, X) >= 0:
        raise HypothesesError(f"smooth part {d0} of d reaches X^varpi")
    if pow_cmp(d0 * math.prod(middle), Fraction(1, 8) - 4 * params.varpi, X) <= 0:
        raise HypothesesError("rough-below-D1 part of d too small")

    lo1, hi1 = 2 * params.varpi, 45 * params.varpi
    lo2, hi2 = Fraction(3, 8) + 7 * params.varpi, Fraction(1, 2) - 2 * params.varpi
    log_rstar = math.log(rstar) / math.log(X)
    in_win1 = float(lo1) <= log_rstar <= float(hi1)
    in_win2 = float(lo2) <= log_rstar <= float(hi2)
    if not (in_win1 or in_win2):
        raise HypothesesError(f"R* = {rstar} lies in neither admissible window")

    window_floor = rstar * math.exp(-float(params.varpi) * math.log(X))
    starts = []
    if in_win1:
        starts.append(d0)
    if in_win2:
        starts.append(d0 * d2)
    for start in starts:
        r = start
        if r >= rstar:
            continue
        for p in middle:
            if r * p < rstar:
                r *= p
            else:
                break
        if window_floor < r < rstar:
            q = d // r
            return q, r
    raise HypothesesError("greedy accumulation missed the R* window")


def finer_partition(X: int, rho: float) -> list[float]:
    """Lower edges (1+rho)^r, r = 0..R, with R maximal s.t. (1+rho)^R < 2X.

    The boundary test is exact: edges are powers of the exact binary
    rational 1 + rho, so the dyadic special case rho = 1 is exact too.
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    base = 1 + Fraction(rho)
    bound = 2 * X
    edges = []
    e = Fraction(1)
    while e < bound:
        edges.append(float(e))
        e *= base
    return edges


@lru_cache(maxsize=32)
def _edge_lattice(rho: float, bound: int) -> list[Fraction]:
    """Exact lattice edges (1+rho)^r up to bound (exclusive)."""
    base = 1 + Fraction(rho)
    out = [Fraction(1)]
    while out[-1] * base <= bound:
        out.append(out[-1] * base)
    return out


def _ordered_factorizations(n: int, k: int) -> list[tuple[int, ...]]:
    if k == 1:
        return [(n,)]
    out = []
    f = factorize(n)
    for d in f.divisors():
        for rest in _ordered_factorizations(n // d, k - 1):
            out.append((d,) + rest)
    return out


def t1_value(n: int, N: int, k: int, rho: float, constraint: str = "intersect") -> int:
    """Count of ordered k-factorizations of n whose box tuple is admissible.

    Boxes are [E_r, E_{r+1}) on the (1+rho)-lattice; each factor tuple
    lands in exactly one box tuple, which is kept when the product box
    [prod E_{r_i}, (1+rho)^k prod E_{r_i}) meets [N, 2N) ("intersect",
    the tau_k-reproducing variant) or is contained in it ("contain").
    """
    if not N <= n < 2 * N:
        raise ValueError(f"n = {n} outside [N, 2N) = [{N}, {2 * N})")
    if constraint not in ("intersect", "contain"):
        raise ValueError("constraint must be 'intersect' or 'contain'")
    edges = _edge_lattice(rho, 2 * N)
    base = 1 + Fraction(rho)
    ratio_k = base**k
    count = 0
    for tup in _ordered_factorizations(n, k):
        prod_edge = Fraction(1)
        for ni in tup:
            r = bisect_right(edges, ni) - 1
            prod_edge *= edges[r]
        upper = prod_edge * ratio_k
        if constraint == "intersect":
            ok = prod_edge < 2 * N and upper > N
        else:
            ok = prod_edge >= N and upper <= 2 * N
        if ok:
            count += 1
    return count


def case_thresholds(varpi: Fraction) -> tuple[Fraction, Fraction]:
    return Fraction(3, 8) + 8 * varpi, Fraction(5, 8) - 8 * varpi


def validate_case_vector(nu, varpi: Fraction) -> None:
    k = len(nu)
    if k < 1:
        raise ValueError("empty exponent vector")
    if any(nu[i] < nu[i + 1] for i in range(k - 1)) or nu[-1] < 0:
        raise ValueError("exponents must be nonincreasing and nonnegative")
    # Sum bound 1 - k*log(rho)/log(X) evaluates to exactly 1 + k*varpi
    # since rho = X^-varpi.
    total = sum(Fraction(x) for x in nu)
    if total >= 1 + k * Fraction(varpi):
        raise ValueError("exponent sum reaches 1 + k*varpi")


def classify_case(nu, varpi: Fraction) -> str:
    """'A', 'B' or 'C' for a nonincreasing box-exponent vector.

    A: nu_1 >= 5/8 - 8*varpi.  Otherwise scan all 2^k subset sums
    exactly (floats lifted to rationals); B when none lies in
    [3/8 + 8*varpi, 5/8 - 8*varpi], else C.  k is capped at 20.
    """
    varpi = Fraction(varpi)
    validate_case_vector(nu, varpi)
    k = len(nu)
    if k > 20:
        raise ValueError("subset scan capped at k <= 20")
    low, high = case_thresholds(varpi)
    exact = [Fraction(x) for x in nu]
    if exact[0] >= high:
        return "A"
    sums = [Fraction(0)]
    for x in exact:
        sums += [s + x for s in sums]
    if any(low <= s <= high for s in sums[1:]):
        return "C"
    return "B"


def max_abs_delta(table: ArithmeticTable, d: int, scan_cap: int = 10**4,
                  sample: int = 1000, seed: int = 0) -> tuple[Fraction, bool]:
    """max over reduced a of |Delta(f; X, d, a)|.

    Full scan for d <= scan_cap; above that, `sample` random reduced
    residues are scanned instead and the True flag marks the result as
    sampled (callers must surface that flag in any output).
    """
    import random

    units = unit_residues(d)
    sampled = d > scan_cap
    if sampled:
        rng = random.Random(seed)
        units = [units[rng.randrange(len(units))] for _ in range(sample)]
    main = Fraction(coprime_sum(table, d), euler_phi_at(d))
    best = Fraction(0)
    for a in units:
        best = max(best, abs(ap_sum(table, d, a) - main))
    return best, sampled


def theorem1_experiment(params: ParamSet, a: int, family: ModuliFamily | None = None,
                        table: ArithmeticTable | None = None, parallel_map=map) -> dict:
    """Sum of |Delta(tau_k)| over the family vs X^(1 - theta_k); report only."""
    if family is None:
        family = build_family(params, a)
    if table is None:
        table = sieve_table("tauk", 1, params.X, k=params.k)
    records = list(parallel_map(lambda d: delta(table, d, a % d), family.members))
    lhs = Fraction(0)
    for rec in sorted(records, key=lambda r: r.d):
        lhs += abs(rec.delta)
    rhs = math.exp((1 - float(params.theta_k)) * math.log(params.X))
    return {
        "experiment": "averaged_discrepancy",
        "params": params.to_json_dict(),
        "a": a,
        "member_count": len(family.members),
        "lhs_num": str(lhs.numerator),
        "lhs_den": str(lhs.denominator),
        "lhs": float(lhs),
        "rhs": rhs,
        "ratio": float(lhs) / rhs,
        "scaled": params.scaled,
    }
