"""Segmented sieving of arithmetic-function tables.

Tables carry exact integer values (numpy int64) for tau_k, mu, phi and
the unit function, and log p floats for the von Mangoldt function.  A
block [lo, hi] is sieved using only primes up to sqrt(hi), so sieving a
range in one shot and sieving it in blocks give bit-identical values.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .arith import euler_phi_at, primes_up_to, tau_k_at

KINDS = ("tauk", "vonmangoldt", "moebius", "eulerphi", "unit")
KIND_TAGS = {"tauk": 1, "vonmangoldt": 2, "moebius": 3, "eulerphi": 4, "unit": 5}
TAGS_KIND = {v: k for k, v in KIND_TAGS.items()}
MAGIC = b"DVL1"

DEFAULT_MEMORY_BUDGET = 2 * 1024**3  # bytes
MAX_HI = 10**9


class MemoryBudgetError(MemoryError):
    """Requested table exceeds the memory budget; build it via iter_blocks."""


@dataclass(frozen=True)
class ArithmeticTable:
    kind: str
    k: int
    lo: int
    hi: int
    values: np.ndarray

    def __post_init__(self):
        if self.hi - self.lo + 1 != len(self.values):
            raise ValueError("value array length does not match [lo, hi]")

    @property
    def is_integer_valued(self) -> bool:
        return self.kind != "vonmangoldt"

    def value_at(self, n: int):
        if not self.lo <= n <= self.hi:
            raise IndexError(f"{n} outside [{self.lo}, {self.hi}]")
        v = self.values[n - self.lo]
        return float(v) if self.kind == "vonmangoldt" else int(v)


def _multiples_index(pe: int, lo: int, size: int) -> np.ndarray:
    first = ((lo + pe - 1) // pe) * pe
    return np.arange(first - lo, size, pe, dtype=np.int64)


def _prime_exponents(p: int, lo: int, hi: int, idx: np.ndarray) -> np.ndarray:
    """v_p(n) for each n = lo + idx (idx are the multiples of p)."""
    e = np.ones(idx.size, dtype=np.int64)
    pe = p * p
    base = idx[0]
    while pe <= hi:
        sub = _multiples_index(pe, lo, hi - lo + 1)
        e[(sub - base) // p] += 1
        pe *= p
    return e


def _sieve_block(kind: str, lo: int, hi: int, k: int) -> np.ndarray:
    size = hi - lo + 1
    ps = primes_up_to(math.isqrt(hi))

    if kind == "unit":
        return np.ones(size, dtype=np.int64)

    if kind == "vonmangoldt":
        lam = np.zeros(size, dtype=np.float64)
        touched = np.zeros(size, dtype=bool)
        for p in ps:
            idx = _multiples_index(p, lo, size)
            if idx.size:
                touched[idx] = True
            pe = p
            while pe <= hi:
                if pe >= lo:
                    lam[pe - lo] = math.log(p)
                pe *= p
        n = np.arange(lo, hi + 1, dtype=np.int64)
        big_prime = ~touched & (n > 1)
        lam[big_prime] = np.log(n[big_prime].astype(np.float64))
        return lam

    n = np.arange(lo, hi + 1, dtype=np.int64)
    rem = n.copy()

    if kind == "tauk":
        # C(e+k-1, k-1) lookup; exponents of primes below 10^9 are < 30.
        comb = np.array([math.comb(e + k - 1, k - 1) for e in range(32)], dtype=np.int64)
        tau = np.ones(size, dtype=np.int64)
        for p in ps:
            idx = _multiples_index(p, lo, size)
            if not idx.size:
                continue
            e = _prime_exponents(p, lo, hi, idx)
            tau[idx] *= comb[e]
            rem[idx] //= np.power(p, e)
        tau[rem > 1] *= k
        if (tau <= 0).any():
            raise OverflowError("tau_k values overflowed int64")
        return tau

    if kind == "eulerphi":
        phi = n.copy()
        for p in ps:
            idx = _multiples_index(p, lo, size)
            if not idx.size:
                continue
            e = _prime_exponents(p, lo, hi, idx)
            phi[idx] = phi[idx] // p * (p - 1)
            rem[idx] //= np.power(p, e)
        big = rem > 1
        phi[big] = phi[big] // rem[big] * (rem[big] - 1)
        return phi

    if kind == "moebius":
        mu = np.ones(size, dtype=np.int64)
        for p in ps:
            idx = _multiples_index(p, lo, size)
            if not idx.size:
                continue
            mu[idx] *= -1
            rem[idx] //= p
            sq = _multiples_index(p * p, lo, size)
            if sq.size:
                mu[sq] = 0
        mu[rem > 1] *= -1
        return mu

    raise ValueError(f"unknown kind {kind!r}")


def sieve_table(
    kind: str,
    lo: int,
    hi: int,
    k: int = 0,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
) -> ArithmeticTable:
    """Sieve f(n) for n in [lo, hi]; exact and deterministic."""
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    if kind == "tauk" and k < 1:
        raise ValueError("tauk needs k >= 1")
    if not 1 <= lo <= hi <= MAX_HI:
        raise ValueError(f"need 1 <= lo <= hi <= {MAX_HI}")
    if (hi - lo + 1) * 8 > memory_budget:
        raise MemoryBudgetError(
            f"table of {hi - lo + 1} entries exceeds the {memory_budget}-byte "
            "budget; build it with iter_blocks()"
        )
    values = _sieve_block(kind, lo, hi, k)
    return ArithmeticTable(kind=kind, k=k if kind == "tauk" else 0, lo=lo, hi=hi, values=values)


def iter_blocks(
    kind: str, lo: int, hi: int, k: int = 0, block_size: int = 10**4
) -> Iterator[ArithmeticTable]:
    """Yield the table for [lo, hi] as consecutive blocks of block_size."""
    start = lo
    while start <= hi:
        stop = min(start + block_size - 1, hi)
        yield sieve_table(kind, start, stop, k=k)
        start = stop + 1


_SUM_SAFE = 2**62


def _exact_slice_sum(vals: np.ndarray) -> int:
    if vals.size == 0:
        return 0
    bound = int(np.abs(vals).max()) * vals.size
    if bound < _SUM_SAFE:
        return int(vals.sum(dtype=np.int64))
    return int(sum(int(v) for v in vals))


def ap_sum(table: ArithmeticTable, d: int, a: int):
    """Sum of f(n) over n in the table range with n = a (mod d).

    Exact integer for integer-valued kinds, fsum float for von Mangoldt.
    """
    if not 0 <= a < d:
        raise ValueError("need 0 <= a < d")
    start = (a - table.lo) % d
    vals = table.values[start::d]
    if table.kind == "vonmangoldt":
        return math.fsum(vals)
    return _exact_slice_sum(vals)


def residue_sums(table: ArithmeticTable, d: int) -> list:
    """[ap_sum(table, d, a) for a in range(d)], in one pass per residue."""
    return [ap_sum(table, d, a) for a in range(d)]


def unit_residues(d: int) -> list[int]:
    return [a for a in range(d) if math.gcd(a, d) == 1]


def coprime_sum(table: ArithmeticTable, d: int):
    """Sum of f(n) over the table range restricted to gcd(n, d) = 1."""
    if d < 1:
        raise ValueError("d must be positive")
    if d == 1:
        return ap_sum(table, 1, 0)
    parts = [ap_sum(table, d, a) for a in unit_residues(d)]
    if table.kind == "vonmangoldt":
        return math.fsum(parts)
    return sum(parts)


def shiu_ratio(j: int, nu: int, N: int, Nprime: int, d: int, c: int) -> float:
    """Observed-to-reference ratio for short AP sums of tau_j(n)^nu.

    Reference size is ((N'-N)/phi(d)) * (log N')^(j^nu - 1), taking the
    right endpoint as the scale; diagnostic only, no asserted bound.
    Returns 0.0 when the progression does not meet [N, N'].
    """
    if not (1 <= N < Nprime):
        raise ValueError("need 1 <= N < N'")
    if math.gcd(c, d) != 1:
        raise ValueError("need gcd(c, d) = 1")
    if Nprime - N <= d:
        raise ValueError("need N' - N > d")
    total = 0
    n = N + ((c - N) % d)
    while n <= Nprime:
        total += tau_k_at(n, j) ** nu
        n += d
    if total == 0:
        return 0.0
    ref = ((Nprime - N) / euler_phi_at(d)) * math.log(Nprime) ** (j**nu - 1)
    return total / ref


def dump_table(table: ArithmeticTable, path) -> None:
    """Binary dump: magic "DVL1", u8 kind tag, u8 k, u64 lo, u64 hi, raw values."""
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<BBQQ", KIND_TAGS[table.kind], table.k, table.lo, table.hi))
        dtype = "<f8" if table.kind == "vonmangoldt" else "<i8"
        fh.write(table.values.astype(dtype).tobytes())


def load_table(path) -> ArithmeticTable:
    with open(path, "rb") as fh:
        if fh.read(4) != MAGIC:
            raise ValueError("bad magic; not a DVL1 table dump")
        tag, k, lo, hi = struct.unpack("<BBQQ", fh.read(18))
        kind = TAGS_KIND[tag]
        dtype = "<f8" if kind == "vonmangoldt" else "<i8"
        values = np.frombuffer(fh.read(), dtype=dtype).copy()
    return ArithmeticTable(kind=kind, k=k, lo=lo, hi=hi, values=values)


def spot_check_tauk(table: ArithmeticTable, rng, checks: int = 1000) -> None:
    """Cross-check sieved tau_k values against the pointwise formula."""
    for _ in range(checks):
        n = int(rng.integers(table.lo, table.hi + 1))
        if table.value_at(n) != tau_k_at(n, table.k):
            raise AssertionError(f"tau_k mismatch at n={n}")
