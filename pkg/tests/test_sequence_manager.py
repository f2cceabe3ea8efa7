import math

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from Kurepa_py.arithmetic_manager import ArithmeticManager, Residue
from Kurepa_py.determinant_manager import PUBLISHED_KUREPA_TABLE
from Kurepa_py.exceptions import DomainError
from Kurepa_py.sequence_manager import AlternatingSum, SequenceManager

SMALL_PRIMES = ArithmeticManager.sieve_primes(200).tolist()


@pytest.mark.parametrize("n, expected", [(0, 0), (1, 1), (2, 2), (3, 4), (4, 10), (5, 34), (6, 154)])
def test_left_factorial(n, expected):
    assert SequenceManager.left_factorial(n) == expected


def test_left_factorial_mod_matches_exact():
    for n in range(0, 40):
        for m in (1, 2, 7, 10, 97):
            assert SequenceManager.left_factorial_mod(n, m).value == SequenceManager.left_factorial(n) % m


def test_left_factorial_gcd_is_two():
    left, factorial = 1, 1
    for n in range(2, 1001):
        left += factorial
        factorial *= n
        assert math.gcd(left, factorial) == 2, n
    assert all(SequenceManager.left_factorial_gcd(n) == 2 for n in (*range(2, 80), 500, 1000))
    with pytest.raises(DomainError):
        SequenceManager.left_factorial_gcd(1)


def test_subfactorial_small_values():
    assert [SequenceManager.subfactorial(n) for n in range(7)] == [1, 0, 1, 2, 9, 44, 265]
    with pytest.raises(DomainError):
        SequenceManager.subfactorial(-1)


@pytest.mark.parametrize("n, printed_k, printed_s, printed_congruence", PUBLISHED_KUREPA_TABLE)
def test_subfactorial_matches_printed_column(n, printed_k, printed_s, printed_congruence):
    assert SequenceManager.subfactorial(n - 1) == printed_s


def test_subfactorial_by_sum_agrees_with_recurrence():
    for n in range(1, 60):
        assert SequenceManager.subfactorial_by_sum(n) == SequenceManager.subfactorial(n - 1)
    with pytest.raises(DomainError):
        SequenceManager.subfactorial_by_sum(0)


EXACT_SUBFACTORIALS = [SequenceManager.subfactorial(n) for n in range(501)]


@settings(max_examples=100)
@given(st.integers(min_value=0, max_value=500), st.integers(min_value=1, max_value=10 ** 12))
def test_subfactorial_mod_matches_exact(n, m):
    assert SequenceManager.subfactorial_mod(n, m) == Residue(EXACT_SUBFACTORIALS[n] % m, m)


def test_subfactorial_mod_counterexample_residue():
    assert SequenceManager.subfactorial_mod(11562, 11563) == Residue(2, 11563)
    assert SequenceManager.subfactorial_mod(960, 961).value == 467
    assert SequenceManager.subfactorial_mod(373 ** 2 - 1, 373 ** 2).value == 2613


def test_subfactorial_mod_fast_counterexample():
    assert SequenceManager.subfactorial_mod_fast(11563).value == 2
    assert SequenceManager.subfactorial_mod_fast(1) == Residue(0, 1)


@settings(max_examples=60)
@given(st.integers(min_value=2, max_value=3000))
def test_subfactorial_mod_fast_matches_recurrence(n):
    assert SequenceManager.subfactorial_mod_fast(n) == SequenceManager.subfactorial_mod(n - 1, n)


def test_subfactorial_mod_fast_with_cache_matches_batched_recurrence():
    limit = 20000
    direct = SequenceManager.subfactorial_residues(range(1, limit + 1))
    powers = [d for d, _, _ in ArithmeticManager.prime_powers_upto(limit)]
    cache = dict(zip(powers, SequenceManager.subfactorial_residues(powers).tolist()))
    factored = ArithmeticManager.factorize_range(1, limit + 1)
    for n in range(1, limit + 1):
        assert SequenceManager.subfactorial_mod_fast(n, factored[n], cache).value == direct[n - 1]


def test_subfactorial_mod_fast_rejects_wrong_factorization():
    with pytest.raises(DomainError):
        SequenceManager.subfactorial_mod_fast(15, ArithmeticManager.factorize(21))


def test_divisor_congruence_on_composites():
    limit = 5000
    residues = [0] + SequenceManager.subfactorial_residues(range(1, limit + 1)).tolist()
    for n in range(4, limit + 1):
        nf = ArithmeticManager.factorize(n)
        if nf.is_prime:
            continue
        for d in nf.divisors()[1:]:
            sign = 1 if (n + d) % 2 == 0 else -1
            assert (residues[n] - sign * residues[d]) % d == 0, (n, d)


def test_subfactorial_residues_keeps_input_order():
    moduli = [97, 3, 11563, 1, 50, 3]
    expected = [SequenceManager.subfactorial_mod(m - 1, m).value for m in moduli]
    assert SequenceManager.subfactorial_residues(moduli).tolist() == expected
    assert SequenceManager.subfactorial_residues([]).size == 0
    with pytest.raises(DomainError):
        SequenceManager.subfactorial_residues([0, 5])


def test_alternating_factorial_sum_mod():
    assert SequenceManager.alternating_factorial_sum_mod(7).value == 1
    for p in SMALL_PRIMES[1:]:
        s = SequenceManager.subfactorial_mod(p - 1, p).value
        # (p-1)! = -1 (mod p) turns S_(p-1) into minus the sum
        assert SequenceManager.alternating_factorial_sum_mod(p).value == (-s) % p
    for bad in (2, 9, 1):
        with pytest.raises(DomainError):
            SequenceManager.alternating_factorial_sum_mod(bad)


def test_alternating_sum_numerator():
    assert SequenceManager.alternating_sum_numerator(3) == AlternatingSum(1, 2, False)
    assert SequenceManager.alternating_sum_numerator(4) == AlternatingSum(1, 3, False)
    for n in range(3, 200):
        result = SequenceManager.alternating_sum_numerator(n)
        assert math.gcd(result.numerator, result.denominator) == 1
        assert not result.divisible_by_n
    with pytest.raises(DomainError):
        SequenceManager.alternating_sum_numerator(2)


def test_bell_numbers():
    assert SequenceManager.bell_numbers(8) == [1, 1, 2, 5, 15, 52, 203, 877, 4140]
    assert SequenceManager.bell_numbers(0) == [1]


def test_bell_mod_matches_exact():
    bells = SequenceManager.bell_numbers(40)
    for n in range(41):
        for m in (1, 2, 9, 1000003, 2 ** 61 - 1):
            assert SequenceManager.bell_mod(n, m).value == bells[n] % m


def test_bell_numbers_mod():
    expected = np.array(SequenceManager.bell_numbers(30), dtype=object) % 7
    assert SequenceManager.bell_numbers_mod(30, 7).tolist() == expected.tolist()


def test_bell_and_derangement_residues_agree_at_primes():
    for p in SMALL_PRIMES:
        bell = SequenceManager.bell_mod(p - 1, p).value
        assert (bell - 1) % p == SequenceManager.subfactorial_mod(p - 1, p).value


@pytest.mark.parametrize("chunk", [1, 7, 128])
def test_bell_residues_matches_scalar(chunk):
    moduli = list(range(300, 0, -1)) + [5, 5]
    expected = [SequenceManager.bell_mod(m - 1, m).value for m in moduli]
    assert SequenceManager.bell_residues(moduli, chunk=chunk).tolist() == expected


def test_term():
    assert SequenceManager.term("subfact", 6).value == 265
    assert SequenceManager.term("leftfact", 0).value == 0
    assert SequenceManager.term("bell", 8).value == 4140
    assert SequenceManager.term("subfact", 11562, 11563).value == Residue(2, 11563)
    with pytest.raises(DomainError):
        SequenceManager.term("catalan", 3)
