import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from Kurepa_py.arithmetic_manager import ArithmeticManager, Residue
from Kurepa_py.config_manager import ConfigManager
from Kurepa_py.determinant_manager import DeterminantManager
from Kurepa_py.exceptions import DomainError, ResourceError
from Kurepa_py.sequence_manager import SequenceManager

KUREPA_VALUES = {
    7: 15, 8: -47, 9: 197, 10: -1029, 11: 6439, 12: -46927, 13: 390249, 14: -3645737,
    15: 37792331, 16: -430400211, 17: 5341017373,
}
PRIMES = ArithmeticManager.sieve_primes(300).tolist()


@pytest.fixture(scope="module")
def determinants():
    return DeterminantManager()


def square_matrices(max_size=6, bound=20):
    return st.integers(min_value=1, max_value=max_size).flatmap(
        lambda size: st.lists(
            st.lists(st.integers(min_value=-bound, max_value=bound), min_size=size, max_size=size),
            min_size=size, max_size=size))


def test_kurepa_matrix_layout():
    assert DeterminantManager.kurepa_matrix(7) == [[1, 1, 3], [3, 1, 2], [0, 1, -4]]
    assert DeterminantManager.kurepa_matrix(8) == [[1, 1, 1, 3], [3, 1, 1, 2], [1, 4, 1, 2], [0, 0, 1, -4]]
    assert DeterminantManager.kurepa_array(12).shape == (8, 8)


@pytest.mark.parametrize("n, expected", sorted(KUREPA_VALUES.items()))
def test_kurepa_det_exact(determinants, n, expected):
    assert determinants.kurepa_det_exact(n) == expected


def test_kurepa_det_exact_is_odd(determinants):
    assert all(determinants.kurepa_det_exact(n) % 2 == 1 for n in range(7, 61))


def test_kurepa_det_exact_errors(determinants):
    with pytest.raises(DomainError):
        determinants.kurepa_det_exact(6)
    small = DeterminantManager(ConfigManager(exact_det_ceiling=10))
    with pytest.raises(ResourceError, match="kurepa_det_mod"):
        small.kurepa_det_exact(11)


def test_bareiss_small_cases():
    assert DeterminantManager.bareiss_det([]) == 1
    assert DeterminantManager.bareiss_det([[2]]) == 2
    assert DeterminantManager.bareiss_det([[0, 1], [1, 0]]) == -1
    assert DeterminantManager.bareiss_det([[1, 2], [2, 4]]) == 0
    assert DeterminantManager.bareiss_det([[0, 0, 1], [0, 1, 0], [1, 0, 0]]) == -1
    with pytest.raises(DomainError):
        DeterminantManager.bareiss_det([[1, 2]])


@settings(max_examples=80)
@given(square_matrices(), st.sampled_from([(2, 1), (2, 3), (3, 2), (5, 1), (7, 2), (31, 1)]))
def test_det_mod_prime_power_matches_exact(grid, prime_power):
    p, e = prime_power
    exact = DeterminantManager.bareiss_det(grid)
    assert DeterminantManager.det_mod_prime_power(grid, p, e) == Residue.of(exact, p ** e)


@settings(max_examples=40)
@given(square_matrices(max_size=5), st.sampled_from([4, 12, 15, 72, 11563]))
def test_det_mod_matches_exact(grid, modulus):
    exact = DeterminantManager.bareiss_det(grid)
    assert DeterminantManager.det_mod(grid, modulus) == Residue.of(exact, modulus)


def test_det_mod_prime_power_large_modulus():
    grid = DeterminantManager.kurepa_matrix(17)
    q = (2 ** 31 - 1) ** 2
    assert DeterminantManager.det_mod_prime_power(grid, 2 ** 31 - 1, 2).value == 5341017373 % q


def test_kurepa_det_mod_prime(determinants):
    assert determinants.kurepa_det_mod(11, 11).value == 6439 % 11
    assert determinants.kurepa_det_mod(17, 5).value == 5341017373 % 5
    with pytest.raises(DomainError):
        determinants.kurepa_det_mod(11, 9)


def test_kurepa_det_mod_is_nonzero_at_primes(determinants):
    for p in PRIMES:
        if p >= 7:
            assert determinants.kurepa_det_mod(p, p).value != 0, p


def test_kurepa_det_mod_composite(determinants):
    assert determinants.kurepa_det_mod_composite(9, 9).value == 8
    assert determinants.kurepa_det_mod_composite(15, 15).value == 37792331 % 15
    assert determinants.kurepa_det_mod_composite(16, 12).value == -430400211 % 12
    with pytest.raises(DomainError):
        determinants.kurepa_det_mod_composite(11, 11)


def test_kurepa_det_mod_nonzero_for_even_n(determinants):
    for n in range(8, 201, 2):
        assert determinants.kurepa_det_mod_composite(n, n).value != 0, n


def test_kurepa_det_mod_ceiling():
    small = DeterminantManager(ConfigManager(elimination_ceiling=100))
    with pytest.raises(ResourceError, match="derangement"):
        small.kurepa_det_mod(101, 101)


def test_derangement_path_small_values(determinants):
    assert determinants.kurepa_det_mod_via_derangement(7).value == 1
    assert determinants.kurepa_det_mod_via_derangement(9).value == 8
    assert determinants.kurepa_det_mod_via_derangement(21) == determinants.kurepa_det_mod_composite(21, 21)


def test_derangement_path_counterexample(determinants):
    assert determinants.kurepa_det_mod_via_derangement(11563, 11563) == Residue(0, 11563)


def test_derangement_path_errors(determinants):
    with pytest.raises(DomainError):
        determinants.kurepa_det_mod_via_derangement(10)
    with pytest.raises(DomainError):
        determinants.kurepa_det_mod_via_derangement(9, 3)
    with pytest.raises(DomainError):
        DeterminantManager.kurepa_residue_from_subfactorial(Residue(1, 10))


def test_derangement_path_agrees_with_elimination(determinants):
    for n in range(9, 302, 2):
        if ArithmeticManager.is_prime(n):
            eliminated = determinants.kurepa_det_mod(n, n)
        else:
            eliminated = determinants.kurepa_det_mod_composite(n, n)
        assert determinants.kurepa_det_mod_via_derangement(n) == eliminated, n


def test_general_formula_holds_for_composites(determinants):
    for n in (9, 15):
        assert DeterminantManager.kurepa_det_mod_general(n) == determinants.kurepa_det_mod_composite(n, n)


def test_odd_composite_congruence(determinants):
    for n in range(9, 200, 2):
        if ArithmeticManager.is_prime(n):
            continue
        k = determinants.kurepa_det_mod_composite(n, n).value
        s = SequenceManager.subfactorial_mod(n - 1, n).value
        assert (8 * k + s) % n == 2, n


def test_prime_congruence(determinants):
    for p in PRIMES:
        if p < 7 or p > 200:
            continue
        assert determinants.verify_prop1(p).equal
        k = determinants.kurepa_det_mod(p, p).value
        s = SequenceManager.subfactorial_mod(p - 1, p).value
        assert (8 * k + s) % p == 0
    with pytest.raises(DomainError):
        determinants.verify_prop1(9)


def test_binary_matrix_is_parity_image():
    for n in (7, 12, 25):
        binary = DeterminantManager.binary_kurepa_matrix(n)
        full = DeterminantManager.kurepa_matrix(n)
        assert all(b == f % 2 for brow, frow in zip(binary, full) for b, f in zip(brow, frow))


def test_binary_det_matches_closed_form(determinants):
    assert determinants.kurepa_binary_closed_form(7) == 1
    assert determinants.kurepa_binary_closed_form(9) == -1
    for n in range(7, 61):
        assert determinants.kurepa_binary_det(n) == determinants.kurepa_binary_closed_form(n), n


def test_lemma_matrix_and_closed_form(determinants):
    assert DeterminantManager.lemma_d_matrix(3) == [[1, 1, 1], [1, 0, 1], [0, 1, 1]]
    assert determinants.lemma_det_D(3) == -1
    assert [DeterminantManager.lemma_closed_form(n) for n in range(3, 10)] == [-1, 1, 1, -1, -1, 1, 1]
    for n in range(3, 61):
        assert determinants.lemma_det_D(n) == DeterminantManager.lemma_closed_form(n), n
    with pytest.raises(DomainError):
        DeterminantManager.lemma_closed_form(2)


def test_kurepa_table(determinants):
    frame = determinants.kurepa_table()
    assert frame["n"].tolist() == list(range(7, 22))
    by_n = frame.set_index("n")
    assert by_n.loc[19, "K_typo"]
    assert not by_n.loc[7:17, "K_typo"].any()
    assert not frame["S_typo"].any()
    for n in range(7, 22, 2):
        expected = 0 if ArithmeticManager.is_prime(n) else 2
        assert by_n.loc[n, "congruence"] == expected, n


@pytest.mark.slow
def test_counterexample_by_direct_elimination(determinants):
    assert determinants.kurepa_det_mod_composite(11563, 11563) == Residue(0, 11563)
