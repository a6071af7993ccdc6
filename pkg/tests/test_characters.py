import cmath
import math
import random

import numpy as np
import pytest

from dival.arith import euler_phi_at
from dival.characters import (
    Character,
    char_sum,
    char_value,
    conductor,
    conductor_and_primitive,
    enumerate_characters,
    large_sieve_check,
    unit_group,
)
from dival.sieve import sieve_table, unit_residues


def all_units(d):
    return [n for n in range(d) if math.gcd(n, d) == 1] if d > 1 else [0]


def test_counts_and_principal_first():
    assert len(enumerate_characters(1)) == 1
    assert len(enumerate_characters(3)) == 2
    for d in range(1, 61):
        chars = enumerate_characters(d)
        assert len(chars) == euler_phi_at(d)
        assert chars[0].is_principal
        assert sum(c.is_principal for c in chars) == 1


def test_mod_one_is_identically_one():
    chi = enumerate_characters(1)[0]
    for n in (-3, 0, 1, 17):
        assert chi.value(n) == 1


def test_d8_conductors():
    chars = enumerate_characters(8)
    assert sorted(conductor(c) for c in chars) == [1, 4, 8, 8]


def test_value_examples():
    principal6 = enumerate_characters(6)[0]
    assert principal6.value(5) == pytest.approx(1)
    chi4 = [c for c in enumerate_characters(4) if not c.is_principal][0]
    assert chi4.value(3) == pytest.approx(-1)
    for d in range(2, 31):
        for chi in enumerate_characters(d):
            for n in range(d):
                v = chi.value(n)
                if math.gcd(n, d) > 1:
                    assert v == 0
                else:
                    assert abs(abs(v) - 1) < 1e-12


def test_values_multiplicative_random():
    rng = random.Random(3)
    checked = 0
    while checked < 10**4:
        d = rng.randrange(2, 200)
        chars = enumerate_characters(d)
        chi = chars[rng.randrange(len(chars))]
        m = rng.randrange(2 * d)
        n = rng.randrange(2 * d)
        assert abs(chi.value(m * n) - chi.value(m) * chi.value(n)) < 1e-10
        checked += 1


def test_values_match_angle():
    for d in (5, 8, 12, 45):
        for chi in enumerate_characters(d):
            for n in all_units(d):
                theta = chi.angle(n)
                assert abs(chi.value(n) - cmath.exp(2j * cmath.pi * float(theta))) < 1e-12


def brute_conductor(chi):
    """Oracle: smallest q | d whose characters match chi on units of d."""
    d = chi.modulus
    units = all_units(d)
    for q in sorted(k for k in range(1, d + 1) if d % k == 0):
        for psi in enumerate_characters(q):
            if all(abs(chi.value(n) - psi.value(n)) < 1e-9 for n in units):
                return q, psi
    raise AssertionError("no inducing character found")


def test_conductor_and_primitive_against_brute_force():
    for d in range(1, 51):
        for chi in enumerate_characters(d):
            q_brute, psi = brute_conductor(chi)
            q, chi_star = conductor_and_primitive(chi)
            assert q == q_brute == conductor(chi)
            assert chi_star.modulus == q
            assert conductor(chi_star) == q  # primitive
            for n in all_units(d):
                assert abs(chi.value(n) - chi_star.value(n)) < 1e-9
            # matches the brute-force inducing character everywhere
            for n in range(q):
                assert abs(chi_star.value(n) - psi.value(n)) < 1e-9


def test_conductor_examples():
    principal6 = enumerate_characters(6)[0]
    assert conductor_and_primitive(principal6) == (1, Character(1, ()))
    nonpr6 = [c for c in enumerate_characters(6) if not c.is_principal][0]
    assert conductor_and_primitive(nonpr6)[0] == 3
    for chi in enumerate_characters(5):
        if not chi.is_principal:
            assert conductor_and_primitive(chi)[0] == 5


def test_char_sum_examples():
    t = sieve_table("tauk", 1, 100, k=2)
    principal1 = enumerate_characters(1)[0]
    assert char_sum(t, principal1) == pytest.approx(int(t.values.sum()))
    u = sieve_table("unit", 1, 9)
    chi3 = [c for c in enumerate_characters(3) if not c.is_principal][0]
    assert abs(char_sum(u, chi3)) < 1e-10


def test_char_sum_tiny_moduli_diagnostic():
    # |sum tau_4(n) chi(n)| against X^(1 - 1/(3(k+2))), report only
    X, k = 10**4, 4
    t = sieve_table("tauk", 1, X, k=k)
    for chi in enumerate_characters(5):
        if chi.is_principal:
            continue
        s = abs(char_sum(t, chi))
        print(f"d=5 char sum ratio: {s / X ** (1 - 1 / (3 * (k + 2))):.4f}")


def test_induction_consistency():
    tables = [sieve_table("tauk", 1, 500, k=2), sieve_table("moebius", 1, 500)]
    for t in tables:
        for d in range(2, 51):
            for chi in enumerate_characters(d):
                if chi.is_principal:
                    continue
                q, chi_star = conductor_and_primitive(chi)
                r = d // q
                lhs = char_sum(t, chi)
                rhs = char_sum(t, chi_star, coprime_to=r)
                assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs))


def test_char_value_function():
    chi = enumerate_characters(7)[1]
    assert char_value(chi, 3) == chi.value(3)


def test_orthogonality_small():
    for d in range(1, 13):
        chars = enumerate_characters(d)
        phi = len(chars)
        for a in all_units(d):
            for n in range(d):
                s = sum(chi.value(a).conjugate() * chi.value(n) for chi in chars) / phi
                want = 1.0 if n == a % d else 0.0
                assert abs(s - want) < 1e-10


def test_large_sieve_single_term():
    for Q in (1, 5, 50):
        assert large_sieve_check([1.0], Q) <= 1.0


def test_large_sieve_random_pm1():
    rng = np.random.default_rng(12)
    for _ in range(20):
        N = int(rng.integers(1, 51))
        Q = int(rng.integers(1, 51))
        seq = rng.choice([-1.0, 1.0], size=N)
        assert large_sieve_check(seq, Q) <= 1.0


def test_large_sieve_spike_positive():
    seq = [1.0] + [0.0] * 20
    assert large_sieve_check(seq, 10) > 0


def test_group_structure_2adic():
    g = unit_group(32)
    orders = sorted(c.order for c in g.components)
    assert orders == [2, 8]
    assert g.phi == 16
