import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

from .arithmetic_manager import ArithmeticManager, Residue
from .config_manager import ConfigManager
from .exceptions import DomainError, ResourceError
from .sequence_manager import SequenceManager

Grid = List[List[int]]

# int64 elimination needs q**2 < 2**63.
INT64_MODULUS_LIMIT = 2 ** 31

# (n, K_n, S_(n-1), (8K_n + S_(n-1)) mod n balanced) as printed for 7 <= n <= 21.
PUBLISHED_KUREPA_TABLE = (
    (7, 15, 265, 0),
    (8, -47, 1854, -2),
    (9, 197, 14833, 2),
    (10, -1029, 133496, 4),
    (11, 6439, 1334961, 0),
    (12, -46927, 14684570, 6),
    (13, 390249, 176214841, 0),
    (14, -3645737, 2290792932, 4),
    (15, 37792331, 32071101049, 2),
    (16, -430400211, 481066515734, -2),
    (17, 5341017373, 7697064251745, 0),
    (18, -71724018781, 130850092279664, 0),
    (19, 1036207207363983, 2355301661033953, 0),
    (20, -16024176975479, 44750731559645106, -6),
    (21, 264083895859409, 895014631192902121, 2),
)


@dataclass(frozen=True)
class CongruenceReport:
    lhs: Residue
    rhs: Residue
    equal: bool


class DeterminantManager:
    """
    Builds the Kurepa matrix, its parity image and the auxiliary 0/1 matrix,
    and evaluates their determinants exactly, modulo a prime, modulo a composite,
    or through the derangement congruences.
    """

    def __init__(self, config: Optional[ConfigManager] = None):
        self.config = config or ConfigManager()
        self.logger = logging.getLogger(__name__)

    @staticmethod
    def _check_kurepa_index(n: int):
        if n < 7:
            raise DomainError(f"The Kurepa matrix needs n >= 7, got {n}.")

    @staticmethod
    def kurepa_array(n: int) -> np.ndarray:
        """
        Returns the int64 matrix of order n - 4 whose determinant is K_n.

        Rows are: (1, ..., 1, 3); then for 2 <= i <= n-5 the row
        (0, ..., 0, 1, i+1, 1, ..., 1, 2) with ``i+1`` just left of the diagonal;
        finally (0, ..., 0, 1, -4).

        Args:
            n (int): Index, at least 7.

        Returns:
            np.ndarray: A fresh square array.
        """
        DeterminantManager._check_kurepa_index(n)
        order = n - 4
        idx = np.arange(order)
        grid = (idx[None, :] >= idx[:, None]).astype(np.int64)
        band = np.arange(1, order - 1)
        grid[band, band - 1] = band + 2
        grid[band[1:], band[1:] - 2] = 1
        grid[:order - 1, order - 1] = 2
        grid[0, order - 1] = 3
        grid[order - 1, :] = 0
        grid[order - 1, order - 2:] = (1, -4)
        return grid

    @staticmethod
    def kurepa_matrix(n: int) -> Grid:
        """``kurepa_array(n)`` as nested lists of Python integers."""
        return DeterminantManager.kurepa_array(n).tolist()

    @staticmethod
    def binary_kurepa_matrix(n: int) -> Grid:
        """Parity image of ``kurepa_matrix(n)``."""
        return [[entry % 2 for entry in row] for row in DeterminantManager.kurepa_matrix(n)]

    @staticmethod
    def lemma_d_matrix(n: int) -> Grid:
        """
        Returns the 0/1 matrix of order n with a first row of ones, ones on the
        subdiagonal and above the diagonal, and ``i mod 2`` on the diagonal of row i >= 2.
        """
        if n < 3:
            raise DomainError(f"The auxiliary 0/1 matrix needs n >= 3, got {n}.")
        grid = [[1] * n]
        for i in range(2, n + 1):
            row = [0] * n
            row[i - 2] = 1
            row[i - 1] = i % 2
            for j in range(i, n):
                row[j] = 1
            grid.append(row)
        return grid

    @staticmethod
    def bareiss_det(grid: Sequence[Sequence[int]]) -> int:
        """
        Exact determinant by fraction-free Bareiss elimination.

        Every division is exact, so the work stays in Python integers. A zero pivot
        is replaced by the first nonzero entry below it; each swap flips the sign.

        Args:
            grid (Sequence[Sequence[int]]): Square integer matrix.

        Returns:
            int: The determinant.
        """
        m = [list(map(int, row)) for row in grid]
        size = len(m)
        if size == 0:
            return 1
        if any(len(row) != size for row in m):
            raise DomainError("Determinant needs a square matrix.")

        sign = 1
        previous = 1
        for k in range(size - 1):
            if m[k][k] == 0:
                for i in range(k + 1, size):
                    if m[i][k] != 0:
                        m[k], m[i] = m[i], m[k]
                        sign = -sign
                        break
                else:
                    return 0
            pivot = m[k][k]
            row_k = m[k]
            for i in range(k + 1, size):
                row_i = m[i]
                lead = row_i[k]
                for j in range(k + 1, size):
                    row_i[j] = (pivot * row_i[j] - lead * row_k[j]) // previous
                row_i[k] = 0
            previous = pivot
        return sign * m[size - 1][size - 1]

    @staticmethod
    def _valuations(column: np.ndarray, p: int, e: int) -> np.ndarray:
        values = np.full(column.shape, e, dtype=np.int64)
        nonzero = column != 0
        values[nonzero] = 0
        rest = column.copy()
        for _ in range(e - 1):
            step = nonzero & (rest % p == 0)
            if not step.any():
                break
            values[step] += 1
            rest[step] //= p
        return values

    @staticmethod
    def det_mod_prime_power(grid: Sequence[Sequence[int]], p: int, e: int = 1) -> Residue:
        """
        Determinant modulo ``q = p**e`` by elimination over Z/qZ.

        Each step pivots on the entry of least p-adic valuation in the column. Writing
        the pivot as ``p**v * u`` with u a unit, every entry below it is divisible by
        ``p**v`` and is cleared exactly with the multiplier ``(a / p**v) * u**-1``.
        Rows with a zero entry in the pivot column are skipped. A column that is zero
        from the diagonal down makes the determinant 0 modulo q.

        Args:
            grid (Sequence[Sequence[int]]): Square integer matrix.
            p (int): Prime.
            e (int): Exponent, at least 1.

        Returns:
            Residue: The determinant modulo p**e.
        """
        if e < 1:
            raise DomainError(f"Exponent must be positive, got {e}.")
        q = p ** e
        dtype = np.int64 if q < INT64_MODULUS_LIMIT else object
        m = np.array(grid, dtype=dtype) % q
        size = m.shape[0]
        if m.ndim != 2 or m.shape[1] != size:
            raise DomainError("Determinant needs a square matrix.")

        det = 1 % q
        for k in range(size):
            column = m[k:, k]
            valuations = DeterminantManager._valuations(column, p, e)
            best = int(np.argmin(valuations))
            v = int(valuations[best])
            if v >= e:
                return Residue(0, q)
            if best:
                m[[k, k + best]] = m[[k + best, k]]
                det = -det
            pivot = int(m[k, k])
            det = det * pivot % q
            if det == 0:
                return Residue(0, q)

            below = np.flatnonzero(m[k + 1:, k]) + k + 1
            if below.size == 0:
                continue
            scale = p ** v
            unit_inverse = pow(pivot // scale, -1, q)
            multipliers = (m[below, k] // scale) * unit_inverse % q
            m[below, k:] = (m[below, k:] - (multipliers[:, None] * m[k, k:]) % q) % q
        return Residue(det % q, q)

    @staticmethod
    def det_mod(grid: Sequence[Sequence[int]], modulus: int) -> Residue:
        """Determinant modulo any ``modulus >= 2``: one elimination per prime power, then CRT."""
        if modulus < 2:
            raise DomainError(f"Modulus must be at least 2, got {modulus}.")
        parts = [DeterminantManager.det_mod_prime_power(grid, p, e)
                 for p, e in ArithmeticManager.factorize(modulus).factors]
        return ArithmeticManager.crt_combine(parts)

    def _check_ceiling(self, n: int, ceiling: int, alternative: str):
        if n > ceiling:
            raise ResourceError(f"n = {n} exceeds the configured ceiling {ceiling}.", alternative)

    def kurepa_det_exact(self, n: int) -> int:
        """
        Returns K_n exactly.

        Raises:
            DomainError: If n < 7.
            ResourceError: If n is above the exact-mode ceiling.
        """
        self._check_kurepa_index(n)
        self._check_ceiling(n, self.config.exact_det_ceiling,
                            "kurepa_det_mod or kurepa_det_mod_via_derangement")
        return self.bareiss_det(self.kurepa_matrix(n))

    def kurepa_det_mod(self, n: int, p: int) -> Residue:
        """K_n modulo the prime p by elimination over the field with p elements."""
        self._check_kurepa_index(n)
        if not ArithmeticManager.is_prime(p):
            raise DomainError(f"{p} is not prime; use kurepa_det_mod_composite for composite moduli.")
        self._check_ceiling(n, self.config.elimination_ceiling, "kurepa_det_mod_via_derangement")
        return self.det_mod_prime_power(self.kurepa_array(n), p)

    def kurepa_det_mod_composite(self, n: int, m: int) -> Residue:
        """
        K_n modulo a composite m, combining one valuation-tracking elimination per
        prime power of m by CRT. A result of 0 is a valid answer.

        Args:
            n (int): Index, at least 7.
            m (int): Composite modulus, at least 4.

        Returns:
            Residue: K_n modulo m.
        """
        self._check_kurepa_index(n)
        if m < 4 or ArithmeticManager.is_prime(m):
            raise DomainError(f"{m} is not composite; use kurepa_det_mod for prime moduli.")
        self._check_ceiling(n, self.config.elimination_ceiling, "kurepa_det_mod_via_derangement")
        grid = self.kurepa_array(n)
        parts = []
        for p, e in ArithmeticManager.factorize(m).factors:
            part = self.det_mod_prime_power(grid, p, e)
            self.logger.debug("K_%d mod %d^%d = %d", n, p, e, part.value)
            parts.append(part)
        return ArithmeticManager.crt_combine(parts)

    def kurepa_det_mod_via_derangement(self, n: int, m: Optional[int] = None) -> Residue:
        """
        K_n modulo n for odd n without building the matrix.

        Odd composite n use ``8 K_n = 2 - S_(n-1) (mod n)``; odd primes use
        ``K_n = -3 S_(n-5) - 1 + 180 (n-7)! (mod n)``, which holds for every odd n >= 7.

        Args:
            n (int): Odd integer, at least 7.
            m (int, optional): Modulus; only ``m = n`` is supported.

        Returns:
            Residue: K_n modulo n.
        """
        self._check_kurepa_index(n)
        if n % 2 == 0:
            raise DomainError(f"The derangement path needs odd n, got {n}.")
        if m is not None and m != n:
            raise DomainError(f"The derangement path computes K_n modulo n only, got m = {m}.")

        nf = ArithmeticManager.factorize(n)
        if not nf.is_prime:
            return self.kurepa_residue_from_subfactorial(SequenceManager.subfactorial_mod_fast(n, nf))
        return self.kurepa_det_mod_general(n)

    @staticmethod
    def kurepa_residue_from_subfactorial(s: Residue) -> Residue:
        """Solves ``8 K = 2 - S_(n-1) (mod n)`` for K, given ``S_(n-1) mod n`` with n odd composite."""
        n = s.modulus
        if n % 2 == 0:
            raise DomainError(f"8 is not invertible modulo even n = {n}.")
        return Residue.of(pow(8, -1, n) * (2 - s.value), n)

    @staticmethod
    def kurepa_det_mod_general(n: int) -> Residue:
        """``-3 S_(n-5) - 1 + 180 (n-7)! mod n``, valid for every odd n >= 7."""
        DeterminantManager._check_kurepa_index(n)
        factorial = 1
        for k in range(2, n - 6):
            factorial = factorial * k % n
        s = SequenceManager.subfactorial_mod(n - 5, n).value
        return Residue.of(-3 * s - 1 + 180 * factorial, n)

    def kurepa_binary_det(self, n: int) -> int:
        """Exact determinant of the binary Kurepa matrix; always -1 or +1."""
        self._check_kurepa_index(n)
        self._check_ceiling(n, self.config.exact_det_ceiling, "kurepa_binary_closed_form")
        return self.bareiss_det(self.binary_kurepa_matrix(n))

    @staticmethod
    def kurepa_binary_closed_form(n: int) -> int:
        DeterminantManager._check_kurepa_index(n)
        return 1 if ((n + 1) // 2) % 2 == 0 else -1

    def lemma_det_D(self, n: int) -> int:
        self._check_ceiling(n, self.config.exact_det_ceiling, "lemma_closed_form")
        return self.bareiss_det(self.lemma_d_matrix(n))

    @staticmethod
    def lemma_closed_form(n: int) -> int:
        """``D_3 = -1`` and ``D_2k = D_(2k+1) = (-1)**k`` for k >= 2."""
        if n < 3:
            raise DomainError(f"The auxiliary 0/1 matrix needs n >= 3, got {n}.")
        if n == 3:
            return -1
        return 1 if (n // 2) % 2 == 0 else -1

    def verify_prop1(self, p: int) -> CongruenceReport:
        """
        Compares K_p mod p from elimination with ``8**-1 * sum (-1)**k / k! mod p``.

        Args:
            p (int): Prime, at least 7.

        Returns:
            CongruenceReport: Both sides and whether they agree.
        """
        if p < 7 or not ArithmeticManager.is_prime(p):
            raise DomainError(f"Expected a prime p >= 7, got {p}.")
        lhs = self.kurepa_det_mod(p, p)
        inverse = ArithmeticManager.mod_inverse(8, p).value
        rhs = Residue.of(inverse * SequenceManager.alternating_factorial_sum_mod(p).value, p)
        return CongruenceReport(lhs, rhs, lhs == rhs)

    def kurepa_table(self, lo: int = 7, hi: int = 22) -> pd.DataFrame:
        """
        Recomputes K_n, S_(n-1) and the balanced ``(8K_n + S_(n-1)) mod n`` for lo <= n < hi.

        Rows covered by the published table are compared against it; mismatching
        printed values are flagged in ``K_typo``, ``S_typo`` and ``congruence_typo``.

        Returns:
            pd.DataFrame: One row per n.
        """
        if lo < 7 or hi <= lo:
            raise DomainError(f"Invalid table range [{lo}, {hi}).")
        published = {row[0]: row[1:] for row in PUBLISHED_KUREPA_TABLE}
        rows = []
        for n in range(lo, hi):
            k_n = self.kurepa_det_exact(n)
            s = SequenceManager.subfactorial(n - 1)
            congruence = Residue.of(8 * k_n + s, n).signed
            row = {"n": n, "K_n": k_n, "S_n_minus_1": s, "congruence": congruence,
                   "K_typo": False, "S_typo": False, "congruence_typo": False}
            if n in published:
                printed_k, printed_s, printed_c = published[n]
                row.update(K_typo=printed_k != k_n, S_typo=printed_s != s,
                           congruence_typo=printed_c != congruence)
                if printed_k != k_n:
                    self.logger.warning("printed K_%d = %d differs from computed %d", n, printed_k, k_n)
            rows.append(row)
        return pd.DataFrame(rows)
