import math

import numpy as np
import pytest

from dival.arith import euler_phi_at, moebius_at, tau_k_at
from dival.sieve import (
    MemoryBudgetError,
    ap_sum,
    coprime_sum,
    dump_table,
    iter_blocks,
    load_table,
    shiu_ratio,
    sieve_table,
    spot_check_tauk,
    unit_residues,
)


def divisor_count_oracle(n):
    return sum(1 for d in range(1, n + 1) if n % d == 0)


def test_tauk_table_example():
    t = sieve_table("tauk", 1, 10, k=2)
    assert t.values.tolist() == [divisor_count_oracle(n) for n in range(1, 11)]
    assert int(t.values.sum()) == 27


def test_moebius_table_example():
    t = sieve_table("moebius", 1, 6)
    assert t.values.tolist() == [1, -1, -1, 0, -1, 1]


def test_unit_table_example():
    t = sieve_table("unit", 5, 9)
    assert t.values.tolist() == [1, 1, 1, 1, 1]


def test_eulerphi_and_moebius_match_pointwise():
    t_phi = sieve_table("eulerphi", 100, 400)
    t_mu = sieve_table("moebius", 100, 400)
    for n in range(100, 401):
        assert t_phi.value_at(n) == euler_phi_at(n)
        assert t_mu.value_at(n) == moebius_at(n)


def test_vonmangoldt_values():
    t = sieve_table("vonmangoldt", 1, 50)
    for n in range(1, 51):
        expect = 0.0
        for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47):
            pe = p
            while pe <= 50:
                if pe == n:
                    expect = math.log(p)
                pe *= p
        assert t.value_at(n) == expect


def test_tauk_spot_checks():
    t = sieve_table("tauk", 1, 5000, k=4)
    spot_check_tauk(t, np.random.default_rng(0), checks=1000)


def test_ap_sum_examples():
    t = sieve_table("tauk", 1, 10, k=2)
    assert ap_sum(t, 3, 1) == 10
    assert ap_sum(t, 1, 0) == 27
    u = sieve_table("unit", 1, 10)
    assert ap_sum(u, 2, 0) == 5


def test_coprime_sum_examples():
    t = sieve_table("tauk", 1, 10, k=2)
    assert coprime_sum(t, 3) == 18
    assert coprime_sum(t, 1) == 27
    u = sieve_table("unit", 1, 10)
    assert coprime_sum(u, 6) == 3


@pytest.mark.parametrize("kind,k", [("tauk", 2), ("tauk", 5), ("moebius", 0), ("eulerphi", 0)])
def test_partition_identity(kind, k):
    t = sieve_table(kind, 1, 2000, k=k)
    full = ap_sum(t, 1, 0)
    for d in range(1, 51):
        assert sum(ap_sum(t, d, a) for a in range(d)) == full


def test_coprime_equals_unit_residue_sum():
    t = sieve_table("tauk", 1, 2000, k=3)
    for d in range(1, 51):
        assert coprime_sum(t, d) == sum(ap_sum(t, d, a) for a in unit_residues(d))


@pytest.mark.parametrize("kind,k", [("tauk", 3), ("moebius", 0), ("eulerphi", 0),
                                    ("unit", 0), ("vonmangoldt", 0)])
def test_block_consistency(kind, k):
    lo, hi = 1, 25000
    whole = sieve_table(kind, lo, hi, k=k)
    parts = [b.values for b in iter_blocks(kind, lo, hi, k=k, block_size=10**4)]
    assert np.array_equal(np.concatenate(parts), whole.values)


@pytest.mark.parametrize("X", [10**3, 10**5])
def test_hyperbola_identity(X):
    t = sieve_table("tauk", 1, X, k=2)
    total = ap_sum(t, 1, 0)
    r = math.isqrt(X)
    assert total == 2 * sum(X // m for m in range(1, r + 1)) - r * r


def test_shiu_ratio_matches_direct_sum():
    got = shiu_ratio(2, 1, 100, 200, 1, 0)
    direct = sum(tau_k_at(n, 2) for n in range(100, 201))
    assert got == pytest.approx(direct / (100 * math.log(200)))


def test_shiu_ratio_positive_and_stable():
    assert shiu_ratio(2, 1, 100, 1000, 3, 1) > 0
    ratios = [shiu_ratio(2, 1, N, 2 * N, 3, 1) for N in (10**3, 10**4, 10**5)]
    print("shiu ratios across N:", ratios)
    assert max(ratios) / min(ratios) < 3


def test_shiu_ratio_preconditions():
    with pytest.raises(ValueError):
        shiu_ratio(2, 1, 100, 104, 10, 1)  # window not longer than d
    with pytest.raises(ValueError):
        shiu_ratio(2, 1, 100, 200, 4, 2)  # gcd(c, d) > 1


@pytest.mark.parametrize("kind,k", [("tauk", 4), ("moebius", 0), ("vonmangoldt", 0)])
def test_dump_load_roundtrip(tmp_path, kind, k):
    t = sieve_table(kind, 7, 3000, k=k)
    path = tmp_path / "table.bin"
    dump_table(t, path)
    back = load_table(path)
    assert back.kind == t.kind and back.k == t.k
    assert back.lo == t.lo and back.hi == t.hi
    assert np.array_equal(back.values, t.values)


def test_load_rejects_bad_magic(tmp_path):
    path = tmp_path / "junk.bin"
    path.write_bytes(b"NOPE" + b"\0" * 32)
    with pytest.raises(ValueError):
        load_table(path)


def test_memory_budget():
    with pytest.raises(MemoryBudgetError):
        sieve_table("unit", 1, 10**6, memory_budget=1000)


def test_range_validation():
    with pytest.raises(ValueError):
        sieve_table("tauk", 0, 10, k=2)
    with pytest.raises(ValueError):
        sieve_table("tauk", 1, 10)  # k missing
    with pytest.raises(ValueError):
        sieve_table("nope", 1, 10)
