"""Acceptance suite: one test per criterion, one printed line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines, or `dival verify` for the same checks through the CLI.
"""

import pytest

from dival import acceptance

NAMES = [name for name, _ in acceptance.CRITERIA]


@pytest.mark.parametrize("name", NAMES)
def test_criterion(name):
    result = acceptance.run(name)
    status = "PASS" if result.passed else "FAIL"
    print(f"{status}  {result.name}  [{result.elapsed:.1f}s]  {result.detail}")
    assert result.passed, f"{result.name}: {result.detail}"


def test_registry_covers_every_primary_criterion():
    expected = {
        "null_sum_exact",
        "delta_character_equivalence",
        "orthogonality_relations",
        "ramanujan_closed_form",
        "weil_bound",
        "birch_bombieri_sample",
        "sharp_large_sieve",
        "gamma2_closed_form",
        "a_k_constants",
        "t1_decomposition_identity",
        "factorization_lemma",
        "combinatorial_lemma",
        "worked_toy_numbers",
        "experiment_reports",
    }
    assert expected == set(NAMES)
