"""Exponential-sum evaluators with their classical bounds.

Every evaluator accumulates phase numerators mod the relevant modulus
in integers and only converts to complex per term through a shared
root-of-unity table, so long sums do not drift.  Bound checkers report
the observed |sum| / bound ratio; only the classically sharp bounds
(Weil with constant 2, the sharp large sieve) are asserted elsewhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arith import NotSquarefreeError, euler_phi_at, factorize, mod_inverse, moebius_at, tau_k_at

MAX_BRUTE_Q = 10**5
MAX_T_Q = 300


@dataclass(frozen=True)
class ExpSumResult:
    value: complex
    abs_value: float
    bound: float
    ratio: float
    constant_used: float = 1.0


def _result(value: complex, bound: float, constant: float = 1.0) -> ExpSumResult:
    av = abs(value)
    b = constant * bound
    return ExpSumResult(value=value, abs_value=av, bound=b, ratio=av / b if b else math.inf,
                        constant_used=constant)


@lru_cache(maxsize=128)
def _roots(q: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(q) / q)


@lru_cache(maxsize=128)
def _inverse_table(q: int) -> np.ndarray:
    """inv[s] = s^-1 mod q for units, 0 otherwise."""
    inv = np.zeros(q if q > 1 else 1, dtype=np.int64)
    for s in range(1, q):
        if math.gcd(s, q) == 1:
            inv[s] = pow(s, -1, q)
    if q == 1:
        inv[0] = 0
    return inv


def _csum(terms: np.ndarray) -> complex:
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


def tau(n: int) -> int:
    return tau_k_at(n, 2)


def ramanujan(q: int, n: int) -> int:
    """C_q(n) by the closed form sum_{d | (q, n)} d * mu(q/d)."""
    if q < 1:
        raise ValueError("q must be positive")
    g = math.gcd(q, n % q) if n % q else q
    out = 0
    for d in factorize(g).divisors():
        out += d * moebius_at(q // d)
    return out


def ramanujan_unit_sum(q: int, n: int) -> complex:
    """Defining sum over units s mod q of e_q(n s); brute-force oracle."""
    roots = _roots(q)
    terms = [roots[(n * s) % q] for s in range(q) if math.gcd(s, q) == 1]
    return _csum(np.asarray(terms))


def kloosterman(a: int, b: int, q: int) -> ExpSumResult:
    """S(a, b; q) over units s of e_q(a s + b s-bar), brute force O(q)."""
    if not 1 <= q <= MAX_BRUTE_Q:
        raise ValueError(f"q must be in [1, {MAX_BRUTE_Q}]")
    roots = _roots(q)
    inv = _inverse_table(q)
    s = np.arange(q, dtype=np.int64)
    if q == 1:
        value = 1 + 0j
    else:
        units = np.gcd(s, q) == 1
        su = s[units]
        phases = (a * su + b * inv[su]) % q
        value = _csum(roots[phases])
    g = math.gcd(math.gcd(abs(a), abs(b)), q)
    bound = tau(q) * math.sqrt(q) * math.sqrt(g)
    return _result(value, bound)


def kloosterman_weil_scan(p: int) -> float:
    """max |S(a, b; p)| over unit a, b for prime p, via one FFT per b.

    For fixed b the map a -> S(a, b; p) is the length-p DFT of
    s -> e_p(b s-bar), so a full scan costs O(p^2 log p).
    """
    inv = _inverse_table(p)
    roots = _roots(p)
    best = 0.0
    for b in range(1, p):
        g = np.zeros(p, dtype=np.complex128)
        g[1:] = roots[(b * inv[1:]) % p]
        spectrum = np.fft.fft(g)
        best = max(best, float(np.abs(spectrum[1:]).max()))
    return best


def incomplete_kloosterman(c1: int, d1: int, c2: int, d2: int, ell: int, N: int) -> ExpSumResult:
    """sum over n <= N with (n, d1) = (n + ell, d2) = 1 of
    e(c1 nbar/d1 + c2 (n+ell)bar/d2), against the incomplete-sum bound
    (d1 d2)^(1/2) tau(d1 d2) + (c1,d1)(c2,d2)(d1,d2)^2 N / (d1 d2)."""
    if d1 * d2 <= 10:
        raise ValueError("need d1 * d2 > 10")
    if d1 * d2 > MAX_BRUTE_Q:
        raise ValueError(f"need d1 * d2 <= {MAX_BRUTE_Q}")
    if not (factorize(d1).is_squarefree and factorize(d2).is_squarefree):
        raise NotSquarefreeError("d1 and d2 must be squarefree")
    if N < 1:
        raise ValueError("need N >= 1")
    n = np.arange(1, N + 1, dtype=np.int64)
    mask = np.gcd(n, d1) == 1
    if d2 > 1:
        mask &= np.gcd(n + ell, d2) == 1
    n = n[mask]
    inv1 = _inverse_table(d1)
    roots1 = _roots(d1)
    terms = roots1[(c1 * inv1[n % d1]) % d1]
    if d2 > 1:
        inv2 = _inverse_table(d2)
        roots2 = _roots(d2)
        terms = terms * roots2[(c2 * inv2[(n + ell) % d2]) % d2]
    value = _csum(terms)
    d = d1 * d2
    bound = math.sqrt(d) * tau(d) + (
        math.gcd(abs(c1), d1) * math.gcd(abs(c2), d2) * math.gcd(d1, d2) ** 2 * N / d
    )
    return _result(value, bound)


def minsum(c: int, d: int, H: float, N: int) -> ExpSumResult:
    """sum over n <= N coprime to d of min(H, ||c nbar / d||^-1).

    ||x|| is the distance to the nearest integer; at x = 0 the inverse
    is taken as +inf so the term is H (only reachable for d = 1, since
    gcd(c, d) = 1 keeps c nbar off 0 otherwise).  Reference size is
    (dN)^0.1 * (H + N), reported, not asserted.
    """
    if H < 2 or N < 2:
        raise ValueError("need H, N >= 2")
    if d < 1 or math.gcd(c, d) != 1:
        raise ValueError("need d >= 1 and gcd(c, d) = 1")
    if d > MAX_BRUTE_Q:
        raise ValueError(f"d capped at {MAX_BRUTE_Q}")
    if d == 1:
        value = N * H
    else:
        inv = _inverse_table(d)
        n = np.arange(1, N + 1, dtype=np.int64)
        n = n[np.gcd(n, d) == 1]
        t = (c * inv[n % d]) % d
        dist = np.minimum(t, d - t) / d
        terms = np.where(dist == 0, H, np.minimum(H, 1.0 / np.where(dist == 0, 1.0, dist)))
        value = math.fsum(terms)
    bound = (d * N) ** 0.1 * (H + N)
    return _result(complex(value), bound)


def birch_bombieri_T(k: int, m1: int, m2: int, q: int) -> ExpSumResult:
    """Complete 3-variable sum T(k; m1, m2; q) for squarefree q.

    T = sum over l with (l(l+k), q) = 1 of
        [sum over units t1 of e_q(lbar t1 + m1 t1bar)] *
        conj[sum over units t2 of e_q((l+k)bar t2 + m2 t2bar)];
    bound (k, q)^(1/2) q^(3/2) tau(q) with the constant reported.
    """
    if not 1 <= q <= MAX_T_Q:
        raise ValueError(f"q must be in [1, {MAX_T_Q}]")
    if not factorize(q).is_squarefree:
        raise NotSquarefreeError(f"q = {q} is not squarefree")
    if q == 1:
        value = 1 + 0j
    else:
        inv = _inverse_table(q)
        roots = _roots(q)
        t = np.arange(q, dtype=np.int64)
        units = np.gcd(t, q) == 1
        tu = t[units]
        itu = inv[tu]
        total = 0j
        for ell in range(q):
            if math.gcd(ell * (ell + k), q) != 1:
                continue
            s1 = _csum(roots[(inv[ell % q] * tu + m1 * itu) % q])
            s2 = _csum(roots[(inv[(ell + k) % q] * tu + m2 * itu) % q])
            total += s1 * s2.conjugate()
        value = total
    g = math.gcd(abs(k), q) if k else q
    bound = math.sqrt(g) * q**1.5 * tau(q)
    return _result(value, bound)


def expsum_csv_row(kind: str, params: list, res: ExpSumResult) -> str:
    fields = [kind] + [str(p) for p in params] + [repr(res.abs_value), repr(res.bound), repr(res.ratio)]
    return ",".join(fields)
