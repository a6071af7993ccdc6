"""Variance of the divisor discrepancy over residue classes.

The empirical side is an exact rational sum of squared discrepancies;
the predicted side combines the arithmetic Euler-product constant, the
Vandermonde-squared Monte Carlo profile gamma_k(c), and a power of
log d.  The two are only ever compared as a reported ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arith import euler_phi_at, primes_up_to
from .sieve import ArithmeticTable, ap_sum, sieve_table, unit_residues

MC_SHARD = 1 << 16


def barnes_g(m: int) -> int:
    """G(m) = 1! 2! ... (m-2)! with G(1) = G(2) = 1, exact."""
    if not 1 <= m <= 30:
        raise ValueError("m must be in [1, 30]")
    out = 1
    fact = 1
    for j in range(1, m - 1):
        fact *= j
        out *= fact
    return out


def _local_factor(k: int, p: int) -> float:
    """(1 - 1/p)^(k^2) * sum_j tau_k(p^j)^2 p^-j, tail below 1e-16 relative."""
    x = 1.0 / p
    total = 0.0
    term_binom = 1  # C(j + k - 1, k - 1) at j
    power = 1.0
    for j in range(400):
        if j > 0:
            term_binom = term_binom * (j + k - 1) // j
            power *= x
        term = term_binom * term_binom * power
        total += term
        if j > 0 and term < 1e-16 * total:
            break
    return (1.0 - x) ** (k * k) * total


def a_k_const(k: int, d: int, prime_cutoff: int = 10**5) -> float:
    """Arithmetic constant of the variance prediction, Euler product
    truncated at prime_cutoff (monotone in the cutoff; see
    a_k_cutoff_delta for the truncation diagnostic)."""
    if not 1 <= k <= 8:
        raise ValueError("k must be in [1, 8]")
    if prime_cutoff > 10**6:
        raise ValueError("cutoff capped at 10^6")
    log_out = 0.0
    for p in primes_up_to(prime_cutoff):
        if d % p == 0:
            log_out += k * k * math.log1p(-1.0 / p)
        else:
            log_out += math.log(_local_factor(k, p))
    return math.exp(log_out)


def a_k_cutoff_delta(k: int, d: int, prime_cutoff: int = 10**5) -> float:
    """|a_k at the cutoff - a_k at half the cutoff|."""
    return abs(a_k_const(k, d, prime_cutoff) - a_k_const(k, d, prime_cutoff // 2))


@dataclass(frozen=True)
class GammaEstimate:
    k: int
    c: float
    samples: int
    value: float
    std_error: float


def _vandermonde_sq(W: np.ndarray) -> np.ndarray:
    """prod_{i<j} (w_i - w_j)^2 along the last axis."""
    k = W.shape[1]
    out = np.ones(W.shape[0])
    for i in range(k):
        for j in range(i + 1, k):
            out *= (W[:, i] - W[:, j]) ** 2
    return out


def gamma_k(k: int, c: float, samples: int, seed: int = 0) -> GammaEstimate:
    """Monte Carlo for the Vandermonde-squared slice integral.

    The delta slice is integrated out through the last coordinate:
    draw (w_1 .. w_{k-1}) uniform on the cube, set w_k = c - sum, and
    keep the Vandermonde-squared weight when w_k lands in [0, 1]
    (co-area with unit Jacobian, so the estimate is unbiased, no
    smoothing kernel).  Sampling is sharded into fixed blocks with
    counter-based substreams, so any worker layout reproduces the
    single-threaded result for the same seed and sample count.
    """
    if not 2 <= k <= 6:
        raise ValueError("k must be in [2, 6]")
    if samples < 10**4:
        raise ValueError("need at least 10^4 samples")
    if c <= 0 or c >= k:
        return GammaEstimate(k=k, c=c, samples=samples, value=0.0, std_error=0.0)
    norm = math.factorial(k) * barnes_g(k + 1) ** 2
    shard_stats = []
    done = 0
    shard_index = 0
    while done < samples:
        m = min(MC_SHARD, samples - done)
        rng = np.random.Generator(np.random.Philox(key=seed & (2**128 - 1),
                                                   counter=shard_index * 2**128))
        W = rng.random((m, k - 1))
        wk = c - W.sum(axis=1)
        ok = (wk >= 0.0) & (wk <= 1.0)
        full = np.concatenate([W, wk[:, None]], axis=1)
        v = np.where(ok, _vandermonde_sq(full), 0.0)
        shard_stats.append((float(v.sum()), float((v * v).sum())))
        done += m
        shard_index += 1
    s1 = math.fsum(s[0] for s in shard_stats)
    s2 = math.fsum(s[1] for s in shard_stats)
    mean = s1 / samples
    var = max(s2 - s1 * s1 / samples, 0.0) / (samples - 1)
    return GammaEstimate(
        k=k,
        c=c,
        samples=samples,
        value=mean / norm,
        std_error=math.sqrt(var / samples) / norm,
    )


def empirical_variance(table: ArithmeticTable, d: int) -> Fraction:
    """Exact rational sum over reduced residues of Delta(f; X, d, a)^2."""
    if not 1 <= d <= 10**5:
        raise ValueError("full residue scan capped at d <= 10^5")
    if not table.is_integer_valued:
        raise TypeError("exact variance needs an integer-valued table")
    units = unit_residues(d)
    sums = [ap_sum(table, d, a) for a in units]
    phi = len(sums)
    cop = sum(sums)
    num = sum((s * phi - cop) ** 2 for s in sums)
    return Fraction(num, phi * phi)


def theorem13_experiment(k: int, X: int, D: int, table: ArithmeticTable | None = None) -> dict:
    """Variance summed over moduli d <= D against (D + X^(1 - 1/(6(k+2)))) X (log X)^(k^2-1)."""
    if table is None:
        table = sieve_table("tauk", 1, X, k=k)
    lhs = Fraction(0)
    for d in range(1, D + 1):
        lhs += empirical_variance(table, d)
    rhs = (D + X ** (1.0 - 1.0 / (6 * (k + 2)))) * X * math.log(X) ** (k * k - 1)
    return {
        "experiment": "averaged_variance",
        "k": k,
        "X": X,
        "d_or_D": D,
        "lhs_num": str(lhs.numerator),
        "lhs_den": str(lhs.denominator),
        "lhs": float(lhs),
        "rhs": rhs,
        "ratio": float(lhs) / rhs,
    }


def conjecture_report(
    k: int,
    X: int,
    d: int,
    samples: int = 10**5,
    seed: int = 0,
    table: ArithmeticTable | None = None,
    prime_cutoff: int = 10**5,
) -> dict:
    """Empirical vs predicted variance at a single modulus; report only.

    c = log X / log d must land in (0, k) for a nonzero prediction;
    outside that range the predicted side is 0 and the row is flagged.
    """
    if table is None:
        table = sieve_table("tauk", 1, X, k=k)
    emp = empirical_variance(table, d)
    c = math.log(X) / math.log(d) if d > 1 else math.inf
    flagged = not (0 < c < k)
    if flagged:
        conjectured = 0.0
        gamma = None
    else:
        gamma = gamma_k(k, c, samples, seed=seed)
        conjectured = (
            a_k_const(k, d, prime_cutoff) * gamma.value * X * math.log(d) ** (k * k - 1)
        )
    ratio = float(emp) / conjectured if conjectured else None
    return {
        "experiment": "variance_conjecture",
        "k": k,
        "X": X,
        "d_or_D": d,
        "c": None if math.isinf(c) else c,
        "empirical_num": str(emp.numerator),
        "empirical_den": str(emp.denominator),
        "conjectured": conjectured,
        "ratio": ratio,
        "samples": samples,
        "seed": seed,
        "flagged_c_out_of_range": flagged,
        "gamma_std_error": gamma.std_error if gamma else None,
        "a_k_cutoff_delta": a_k_cutoff_delta(k, d, prime_cutoff) if not flagged else None,
    }
