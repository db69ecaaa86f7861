import math
import random
from fractions import Fraction

import pytest

from clusterkit import tonks
from clusterkit.errors import DomainError, InputError
from clusterkit.series import (
    MultisetPartition,
    assemble_free_energy,
    combi_identity_check,
    enum_partitions,
    free_energy_series,
    invert_mayer_oracle,
    log_factorial,
    virial_from_mayer,
)


def tonks_b(n_max):
    return {n: tonks.bn_exact(n) for n in range(1, n_max + 1)}


# ---------------------------------------------------------------------------
# multiset partitions
# ---------------------------------------------------------------------------

def test_partition_examples():
    assert [p.m for p in enum_partitions(2, 1)] == [{3: 1}]
    assert [p.m for p in enum_partitions(2, 2)] == [{2: 2}]
    got = sorted((sorted(p.m.items()) for p in enum_partitions(4, 2)))
    assert got == [[(2, 1), (4, 1)], [(3, 2)]]


def test_partition_constraints_hold():
    for k in range(1, 8):
        for n in range(1, k + 1):
            for p in enum_partitions(k, n):
                assert sum(p.m.values()) == n
                assert sum((i - 1) * v for i, v in p.m.items()) == k


def test_partition_validation():
    with pytest.raises(ValueError):
        MultisetPartition(2, 1, {2: 1})  # weighted sum is 1, not 2
    with pytest.raises(InputError):
        list(enum_partitions(2, 3))


# ---------------------------------------------------------------------------
# the transform and its inversion oracle
# ---------------------------------------------------------------------------

def test_transform_examples():
    b = tonks_b(5)
    assert virial_from_mayer(b, 1) == Fraction(-2)
    assert virial_from_mayer(b, 2) == Fraction(-3, 2)
    assert virial_from_mayer(b, 4) == Fraction(-5, 4)


def test_transform_k2_structure():
    b = {2: -1.0, 3: 1.5}
    # 3 b_3 - 3 (2 b_2)^2 / 2
    assert virial_from_mayer(b, 2) == pytest.approx(3 * 1.5 - 6.0)


def test_transform_missing_input():
    with pytest.raises(InputError):
        virial_from_mayer({2: 1.0}, 2)


def test_inversion_examples():
    b = tonks_b(7)
    inv = invert_mayer_oracle(b, 6)
    for k in range(1, 7):
        assert inv.coeff(k) == Fraction(-(k + 1), k)
    assert inv.source == "inversion_oracle"


def test_inversion_k1_general():
    b = {1: 1.0, 2: 0.37}
    assert invert_mayer_oracle(b, 1).coeff(1) == pytest.approx(2 * 0.37)


def test_inversion_requires_unit_b1():
    with pytest.raises(InputError):
        invert_mayer_oracle({1: 0.9, 2: 1.0}, 1)
    with pytest.raises(InputError):
        invert_mayer_oracle({2: 1.0}, 1)


def test_transform_equals_inversion_random():
    rng = random.Random(2024)
    for _ in range(30):
        b = {1: 1.0}
        for n in range(2, 8):
            b[n] = rng.uniform(-1.0, 1.0)
        inv = invert_mayer_oracle(b, 6)
        for k in range(1, 7):
            a = virial_from_mayer(b, k)
            assert abs(a - inv.coeff(k)) <= 1e-10 * max(1.0, abs(a))


def test_transform_equals_inversion_exact():
    rng = random.Random(7)
    b = {1: Fraction(1)}
    for n in range(2, 7):
        b[n] = Fraction(rng.randint(-9, 9), rng.randint(1, 7))
    inv = invert_mayer_oracle(b, 5)
    for k in range(1, 6):
        assert virial_from_mayer(b, k) == inv.coeff(k)


# ---------------------------------------------------------------------------
# the exact binomial identity
# ---------------------------------------------------------------------------

def test_combi_examples():
    assert combi_identity_check((1, 2), 2, 2) == (1, 1)
    assert combi_identity_check((1, 2, 2), 3, 3) == (5, 5)
    assert combi_identity_check((2, 2, 2, 2), 4, 5) == (28, 28)


def test_combi_validation():
    with pytest.raises(InputError):
        combi_identity_check((2, 2), 2, 2)  # wrong sum
    with pytest.raises(InputError):
        combi_identity_check((1, 1), 2, 1)  # t_2 < 2
    with pytest.raises(InputError):
        combi_identity_check((3,), 1, 3)  # n < 2


# ---------------------------------------------------------------------------
# free-energy assembly
# ---------------------------------------------------------------------------

def test_free_energy_series_zero_density():
    est = free_energy_series(0.0, {1: -2.0, 2: -1.5}, 2, 1.0, 0.0, 2.0)
    assert est.value == 0.0
    assert est.tail_bound == 0.0
    assert est.certified


def test_free_energy_series_tonks():
    coeffs = {k: tonks.beta_k_value(k) for k in range(1, 10)}
    for rho, k_max in ((0.05, 6), (0.07, 8)):
        est = free_energy_series(rho, coeffs, k_max, 1.0, 0.0, 2.0)
        closed = tonks.q_infinite_volume(rho)
        assert est.certified
        assert abs(est.value - closed) <= est.tail_bound


def test_free_energy_series_uncertified():
    coeffs = {k: tonks.beta_k_value(k) for k in range(1, 7)}
    est = free_energy_series(0.5, coeffs, 6, 1.0, 0.0, 2.0)
    assert not est.certified
    assert math.isnan(est.tail_bound)


def test_tail_shrinks_with_more_terms():
    coeffs = {k: tonks.beta_k_value(k) for k in range(1, 10)}
    tails = [free_energy_series(0.05, coeffs, k, 1.0, 0.0, 2.0).tail_bound
             for k in (4, 6, 8)]
    assert tails[0] > tails[1] > tails[2]


def test_assemble_examples():
    assert assemble_free_energy(1.0, None, 1, 1.0, 0.0) == pytest.approx(0.0)
    assert assemble_free_energy(1.0, None, 2, 1.0, 0.0) == pytest.approx(math.log(2.0))


def test_assemble_against_closed_form():
    N, L = 100, 2000.0
    q_closed = tonks.q_box(N, L)
    f1 = assemble_free_energy(1.0, 0.05, N, L, q_closed)
    # same assembly with the identical closed-form Q must agree to 1e-10
    ideal = (N * math.log(L) - log_factorial(N)) / L
    assert f1 == pytest.approx(-(ideal + q_closed), rel=1e-12)


def test_assemble_density_consistency():
    with pytest.raises(InputError):
        assemble_free_energy(1.0, 0.9, 10, 100.0, 0.0)


def test_log_factorial():
    for n in (0, 1, 2, 5, 50, 1000):
        assert log_factorial(n) == pytest.approx(math.lgamma(n + 1), abs=1e-9)
    big = 10 ** 7
    assert log_factorial(big) == pytest.approx(math.lgamma(big + 1), rel=1e-12)
    with pytest.raises(DomainError):
        log_factorial(-1)
