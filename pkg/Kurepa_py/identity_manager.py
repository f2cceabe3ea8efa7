import logging
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .arithmetic_manager import ArithmeticManager, Residue
from .config_manager import ConfigManager
from .determinant_manager import DeterminantManager
from .exceptions import DomainError, InconsistencyError, ResourceError
from .sequence_manager import SequenceManager

SUN_ZAGIER_MAX_M = 10 ** 4


@dataclass(frozen=True, eq=False)
class MatrixFp:
    """A square matrix of order p - 1 over the integers modulo p."""
    p: int
    entries: np.ndarray = field(repr=False)

    @property
    def order(self) -> int:
        return self.p - 1

    def __matmul__(self, other: "MatrixFp") -> "MatrixFp":
        if other.p != self.p:
            raise DomainError(f"Cannot multiply matrices over F_{self.p} and F_{other.p}.")
        return MatrixFp(self.p, (self.entries @ other.entries) % self.p)


@dataclass(frozen=True, eq=False)
class DerangementVector:
    """``(S_0, S_1, ..., S_(p-2))`` modulo p."""
    p: int
    entries: np.ndarray = field(repr=False)

    @classmethod
    def of(cls, p: int) -> "DerangementVector":
        entries = np.empty(p - 1, dtype=np.int64)
        value = 1 % p
        entries[0] = value
        for i in range(1, p - 1):
            value = (i * value + (1 if i % 2 == 0 else -1)) % p
            entries[i] = value
        return cls(p, entries)


@dataclass(frozen=True)
class DetAReport:
    direct: Residue
    closed: Residue
    equal: bool
    square_is_minus_one: Optional[bool] = None


class IdentityManager:
    """
    The power-matrix identities over F_p that relate Bell numbers, derangement
    numbers and Kurepa counterexamples.
    """

    def __init__(self, config: Optional[ConfigManager] = None):
        self.config = config or ConfigManager()
        self.logger = logging.getLogger(__name__)

    def _check_prime(self, p: int):
        if p < 3 or not ArithmeticManager.is_prime(p):
            raise DomainError(f"{p} is not an odd prime.")
        if p > self.config.identity_prime_ceiling:
            raise ResourceError(f"p = {p} exceeds the identity ceiling "
                                f"{self.config.identity_prime_ceiling}.",
                                "a larger KUREPA_IDENTITY_PRIME_CEILING")

    @staticmethod
    def _power_table(p: int) -> np.ndarray:
        """``table[b, e] = b**e mod p`` for ``0 <= b, e < p``, filled by running products."""
        bases = np.arange(p, dtype=np.int64)
        table = np.empty((p, p), dtype=np.int64)
        table[:, 0] = 1
        for e in range(1, p):
            table[:, e] = table[:, e - 1] * bases % p
        return table

    def build_power_matrices(self, p: int) -> Tuple[MatrixFp, MatrixFp]:
        """
        Builds A with ``A[i][j] = (p-i)**(p-j)`` and B with ``B[i][j] = (p-j)**(i-1)``,
        indices running over ``1 .. p-1``.

        Args:
            p (int): Odd prime within the identity ceiling.

        Returns:
            Tuple[MatrixFp, MatrixFp]: The pair (A, B).
        """
        self._check_prime(p)
        table = self._power_table(p)
        reversed_index = p - np.arange(1, p)
        a = table[np.ix_(reversed_index, reversed_index)]
        b = table[np.ix_(reversed_index, np.arange(p - 1))].T.copy()
        return MatrixFp(p, a), MatrixFp(p, b)

    def verify_inverse_pair(self, p: int) -> bool:
        """True iff ``A @ B = -I`` over F_p."""
        a, b = self.build_power_matrices(p)
        product = (a @ b).entries
        return bool(np.array_equal(product, (p - 1) * np.eye(p - 1, dtype=np.int64)))

    def counterexample_residual(self, p: int) -> Residue:
        """
        Returns the common value of
        ``rho_m = (-1)**(m-1) S_(m-1) - sum_(k=0)^(p-2) (p-m)**(p-1-k) B_k (mod p)``
        over ``m = 1 .. p-1``.

        The value equals ``B_(p-1) - 1`` and ``S_(p-1)`` modulo p, so it is zero
        exactly when p is a counterexample to Kurepa's hypothesis.

        Raises:
            InconsistencyError: If the residuals are not all equal.
        """
        self._check_prime(p)
        table = self._power_table(p)
        bells = SequenceManager.bell_numbers_mod(p - 2, p)
        derangements = DerangementVector.of(p).entries

        m = np.arange(1, p)
        exponents = p - 1 - np.arange(p - 1)
        sums = table[np.ix_(p - m, exponents)] @ bells % p
        signs = np.where(m % 2 == 1, 1, -1)
        residuals = (signs * derangements - sums) % p

        if not np.all(residuals == residuals[0]):
            raise InconsistencyError(f"Residual vector for p = {p} is not constant: {residuals.tolist()}")
        self.logger.debug("residual for p = %d is %d", p, residuals[0])
        return Residue(int(residuals[0]), p)

    def sun_zagier_check(self, p: int, m: int) -> bool:
        """
        Checks ``sum_(k=1)^(p-1) B_k (-m)**(-k) = (-1)**(m-1) S_(m-1) (mod p)``.

        Negative powers are taken as ``(p - m)**(p-1-k)``.

        Raises:
            DomainError: If p divides m or m < 1.
        """
        self._check_prime(p)
        if m < 1 or m % p == 0:
            raise DomainError(f"Need a positive m not divisible by {p}, got {m}.")
        if m > SUN_ZAGIER_MAX_M:
            raise ResourceError(f"m = {m} exceeds {SUN_ZAGIER_MAX_M}.")
        bells = SequenceManager.bell_numbers_mod(p - 1, p).tolist()
        base = (-m) % p
        lhs = sum(bells[k] * pow(base, p - 1 - k, p) for k in range(1, p)) % p
        s = SequenceManager.subfactorial_mod(m - 1, p).value
        rhs = s if m % 2 == 1 else -s
        return lhs == rhs % p

    def det_A_congruence(self, p: int) -> DetAReport:
        """
        Compares det(A) over F_p with ``(-1)**((p*p-1)/8) * ((p-1)/2)!``.

        For p = 1 (mod 4) the report also says whether ``det(A)**2 = -1 (mod p)``.
        """
        a, _ = self.build_power_matrices(p)
        direct = DeterminantManager.det_mod_prime_power(a.entries, p)
        half_factorial = 1
        for k in range(2, (p - 1) // 2 + 1):
            half_factorial = half_factorial * k % p
        sign = 1 if ((p * p - 1) // 8) % 2 == 0 else -1
        closed = Residue.of(sign * half_factorial, p)
        square = None
        if p % 4 == 1:
            square = direct.value * direct.value % p == p - 1
        return DetAReport(direct, closed, direct == closed, square)
