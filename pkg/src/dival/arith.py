"""Integer, modular, and multiplicative-function primitives.

Everything downstream leans on this module being exact: factorizations
are plain (prime, exponent) lists, the parameter system keeps its
thresholds as rationals in the exponent domain, and comparisons like
d < X^(293/584) are settled by exact integer power comparison rather
than floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

MAX_INPUT = 2**63
MAX_TAU_ACC = 2**127

# Guard band for comparisons against irrational exponents (only the
# varpi^(4/3) threshold needs one); ties are excluded.
LOG_GUARD = 1e-12


class NoInverseError(ValueError):
    """gcd(a, m) > 1, so a has no inverse mod m."""


class NotSquarefreeError(ValueError):
    """Operation requires a squarefree argument."""


@lru_cache(maxsize=64)
def primes_up_to(n: int) -> tuple[int, ...]:
    """All primes <= n, ascending."""
    if n < 2:
        return ()
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(sieve[p * p :: p]))
    return tuple(i for i, b in enumerate(sieve) if b)


@dataclass(frozen=True)
class Factorization:
    """n together with its prime decomposition, primes ascending."""

    n: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prod = 1
        last = 1
        for p, e in self.factors:
            if p <= last or e < 1:
                raise ValueError("factors must be ascending primes with exponents >= 1")
            prod *= p**e
            last = p
        if prod != self.n:
            raise ValueError("factor product does not equal n")

    @property
    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)

    def divisors(self) -> list[int]:
        divs = [1]
        for p, e in self.factors:
            divs = [d * p**j for d in divs for j in range(e + 1)]
        return sorted(divs)


def factorize(n: int) -> Factorization:
    """Canonical factorization by trial division, 1 <= n <= 2^63."""
    if not 1 <= n <= MAX_INPUT:
        raise ValueError(f"n must be in [1, 2^63], got {n}")
    factors = []
    m = n
    for p in primes_up_to(65536):
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            factors.append((p, e))
    # Residual cofactor after small primes: continue trial division by
    # odd candidates (inputs are capped at 2^63 so sqrt fits easily).
    p = 65537
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            factors.append((p, e))
        p += 2
    if m > 1:
        factors.append((m, 1))
    return Factorization(n, tuple(sorted(factors)))


def tau_k_at(n: int, k: int) -> int:
    """Number of ordered k-tuples of positive integers with product n.

    Multiplicative with tau_k(p^e) = C(e+k-1, k-1).
    """
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    out = 1
    for _, e in factorize(n).factors:
        out *= math.comb(e + k - 1, k - 1)
        if out >= MAX_TAU_ACC:
            raise OverflowError(f"tau_{k}({n}) exceeds the 128-bit accumulator")
    return out


def moebius_at(n: int) -> int:
    f = factorize(n)
    if not f.is_squarefree:
        return 0
    return -1 if len(f.factors) % 2 else 1


def euler_phi_at(n: int) -> int:
    out = n
    for p, _ in factorize(n).factors:
        out = out // p * (p - 1)
    return out


def smooth_part(d: int, z: float) -> int:
    """Product of the prime factors of squarefree d not exceeding z.

    Equals gcd(d, prod_{p <= z} p); that identity is what requires d to
    be squarefree.
    """
    f = factorize(d)
    if not f.is_squarefree:
        raise NotSquarefreeError(f"{d} is not squarefree")
    out = 1
    for p, _ in f.factors:
        if p <= z:
            out *= p
    return out


def mod_inverse(a: int, m: int) -> int:
    """Inverse of a mod m in [0, m); requires gcd(a, m) = 1."""
    if m < 1:
        raise ValueError("modulus must be positive")
    if math.gcd(a, m) != 1:
        raise NoInverseError(f"gcd({a}, {m}) > 1")
    return pow(a, -1, m)


def pow_cmp(base: int, exponent: Fraction, x: int) -> int:
    """Sign of base - x^exponent for rational exponent, decided exactly.

    Returns -1, 0, or +1.  Used for every boundary like d < X^(293/584);
    the thresholds are strict inequalities, so callers treat 0 as
    "excluded".  A log comparison settles the generic case; only
    near-ties fall back to exact integer powers.
    """
    if base < 0 or x < 1:
        raise ValueError("need base >= 0 and x >= 1")
    num, den = exponent.numerator, exponent.denominator
    if base == 0:
        return -1 if num >= 0 else -1  # 0 < x^e always (x >= 1 only gives e<0 -> positive)
    lhs_log = den * math.log(base)
    rhs_log = num * math.log(x)
    margin = 1e-9 * (abs(lhs_log) + abs(rhs_log) + 1.0)
    if abs(lhs_log - rhs_log) > margin:
        return 1 if lhs_log > rhs_log else -1
    if num >= 0:
        lhs, rhs = base**den, x**num
    else:
        # base vs x^(neg): cross-multiply so both sides stay integral.
        lhs, rhs = base**den * x ** (-num), 1
    return (lhs > rhs) - (lhs < rhs)


def real_pow_cmp(base: int, exponent: float, x: int, guard: float = LOG_GUARD) -> int:
    """Sign of base - x^exponent for an irrational exponent.

    Log comparison with a guard band: |log base - exponent*log x| within
    the guard counts as a tie (0), which callers exclude.
    """
    diff = math.log(base) - exponent * math.log(x)
    if abs(diff) <= guard * max(1.0, abs(exponent * math.log(x))):
        return 0
    return 1 if diff > 0 else -1


@dataclass(frozen=True)
class ParamSet:
    """The parameter system for the moduli-family and decomposition machinery.

    All exponents are exact rationals except exp_D0 = varpi^(4/3), which is
    irrational and stored as a float (comparisons against it go through
    real_pow_cmp with the documented guard band).
    """

    X: int
    k: int
    varpi: Fraction
    theta_k: Fraction
    exp_D0: float
    exp_D1: Fraction
    exp_D2: Fraction
    exp_D3: Fraction
    exp_Q0: Fraction
    rho: float
    exp_X1: Fraction
    exp_X2: Fraction

    REFERENCE_VARPI = Fraction(1, 1168)

    @property
    def scaled(self) -> bool:
        """True when varpi differs from the reference 1/1168."""
        return self.varpi != self.REFERENCE_VARPI

    def to_json_dict(self) -> dict:
        return {
            "X": self.X,
            "k": self.k,
            "varpi": str(self.varpi),
            "theta_k": str(self.theta_k),
            "exp_D0": self.exp_D0,
            "exp_D1": str(self.exp_D1),
            "exp_D2": str(self.exp_D2),
            "exp_D3": str(self.exp_D3),
            "exp_Q0": str(self.exp_Q0),
            "rho": self.rho,
            "exp_X1": str(self.exp_X1),
            "exp_X2": str(self.exp_X2),
            "scaled": self.scaled,
        }


def make_params(X: int, k: int, varpi: Fraction = Fraction(1, 1168)) -> ParamSet:
    """Populate every derived threshold from (X, k, varpi)."""
    varpi = Fraction(varpi)
    if X < 2 or k < 1 or not (0 < varpi < Fraction(1, 2)):
        raise ValueError("need X >= 2, k >= 1, 0 < varpi < 1/2")
    theta_k = min(Fraction(1, 12 * (k + 2)), varpi * varpi)
    exp_d2 = Fraction(1, 2) - Fraction(1, 12 * (k + 1))
    exp_d3 = Fraction(1, 2) + 2 * varpi
    if not exp_d2 < exp_d3:
        raise ValueError("derived thresholds out of order")
    rho = math.exp(-float(varpi) * math.log(X))
    return ParamSet(
        X=X,
        k=k,
        varpi=varpi,
        theta_k=theta_k,
        exp_D0=float(varpi) ** (4.0 / 3.0),
        exp_D1=varpi,
        exp_D2=exp_d2,
        exp_D3=exp_d3,
        exp_Q0=Fraction(1, 12 * (k + 1)),
        rho=rho,
        exp_X1=Fraction(3, 8) + 8 * varpi,
        exp_X2=Fraction(1, 2) - 4 * varpi,
    )
