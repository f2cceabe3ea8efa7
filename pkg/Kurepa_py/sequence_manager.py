import math
import logging
from dataclasses import dataclass
from typing import List, Mapping, NamedTuple, Optional, Sequence, Union

import numpy as np

from .arithmetic_manager import ArithmeticManager, FactoredInteger, Residue
from .exceptions import DomainError, ResourceError

logger = logging.getLogger(__name__)

# k * S < m**2 must stay below 2**63 in the batched int64 kernels.
BATCH_MODULUS_LIMIT = 2 ** 31


@dataclass(frozen=True)
class SequenceValue:
    """A sequence term: exact when ``value`` is an int, modular when it is a Residue."""
    index: int
    value: Union[int, Residue]


class AlternatingSum(NamedTuple):
    numerator: int
    denominator: int
    divisible_by_n: bool


class SequenceManager:
    """Left factorials, derangement numbers and Bell numbers, exact and modular."""

    @staticmethod
    def _check_index(n: int):
        if n < 0:
            raise DomainError(f"Sequence index must be nonnegative, got {n}.")

    @staticmethod
    def term(name: str, n: int, m: Optional[int] = None) -> SequenceValue:
        """
        Evaluates ``leftfact``, ``subfact`` or ``bell`` at n, exactly or modulo m.

        Raises:
            DomainError: For an unknown sequence name.
        """
        if name == "leftfact":
            value = SequenceManager.left_factorial(n) if m is None else SequenceManager.left_factorial_mod(n, m)
        elif name == "subfact":
            value = SequenceManager.subfactorial(n) if m is None else SequenceManager.subfactorial_mod(n, m)
        elif name == "bell":
            value = SequenceManager.bell_numbers(n)[-1] if m is None else SequenceManager.bell_mod(n, m)
        else:
            raise DomainError(f"Unknown sequence {name!r}; expected leftfact, subfact or bell.")
        return SequenceValue(n, value)

    @staticmethod
    def left_factorial(n: int) -> int:
        """Returns ``!n = 0! + 1! + ... + (n-1)!`` with ``!0 = 0``."""
        SequenceManager._check_index(n)
        total, factorial = 0, 1
        for k in range(n):
            total += factorial
            factorial *= k + 1
        return total

    @staticmethod
    def left_factorial_mod(n: int, m: int) -> Residue:
        SequenceManager._check_index(n)
        total, factorial = 0, 1 % m
        for k in range(n):
            total = (total + factorial) % m
            factorial = factorial * (k + 1) % m
        return Residue.of(total, m)

    @staticmethod
    def left_factorial_gcd(n: int) -> int:
        """
        Returns ``gcd(!n, n!)``, which Kurepa's hypothesis asserts is 2 for every n >= 2.

        Raises:
            DomainError: If n < 2.
        """
        if n < 2:
            raise DomainError(f"left_factorial_gcd needs n >= 2, got {n}.")
        return math.gcd(SequenceManager.left_factorial(n), math.factorial(n))

    @staticmethod
    def subfactorial(n: int) -> int:
        """Exact derangement number via ``S_m = m*S_(m-1) + (-1)**m`` with ``S_0 = 1``."""
        SequenceManager._check_index(n)
        value = 1
        for m in range(1, n + 1):
            value = m * value + (1 if m % 2 == 0 else -1)
        return value

    @staticmethod
    def subfactorial_by_sum(n: int) -> int:
        """
        Returns ``S_(n-1)`` from the alternating product sum
        ``sum_k (-1)**k * (k+1)(k+2)...(n-1)`` for ``k = 0 .. n-1``.
        """
        if n < 1:
            raise DomainError(f"subfactorial_by_sum needs n >= 1, got {n}.")
        total, product = 0, 1
        for k in range(n - 1, -1, -1):
            total += product if k % 2 == 0 else -product
            product *= k
        return total

    @staticmethod
    def subfactorial_mod(n: int, m: int) -> Residue:
        """
        Returns ``S_n mod m`` by running the derangement recurrence in modular arithmetic.

        Args:
            n (int): Index, n >= 0.
            m (int): Modulus, m >= 1.

        Returns:
            Residue: S_n reduced modulo m.
        """
        SequenceManager._check_index(n)
        if m < 1:
            raise DomainError(f"Modulus must be positive, got {m}.")
        value = 1 % m
        for k in range(1, n + 1):
            value = (k * value + (1 if k % 2 == 0 else -1)) % m
        return Residue(value, m)

    @staticmethod
    def subfactorial_mod_fast(n: int, nf: Optional[FactoredInteger] = None,
                              cache: Optional[Mapping[int, int]] = None) -> Residue:
        """
        Returns ``S_(n-1) mod n`` from the residues at the prime powers of n.

        For each prime power ``d = q**e`` exactly dividing n,
        ``S_(n-1) = (-1)**(n+d) * S_(d-1) (mod d)``; the parts are CRT-combined.
        Prime and prime-power n fall back to the direct recurrence.

        Args:
            n (int): Positive integer.
            nf (FactoredInteger, optional): Factorization of n; computed when omitted.
            cache (Mapping[int, int], optional): Known ``S_(d-1) mod d`` keyed by prime power d.

        Returns:
            Residue: S_(n-1) modulo n.
        """
        if n < 1:
            raise DomainError(f"subfactorial_mod_fast needs n >= 1, got {n}.")
        nf = ArithmeticManager.factorize(n) if nf is None else nf
        if nf.n != n:
            raise DomainError(f"Factorization of {nf.n} supplied for n = {n}.")
        cache = {} if cache is None else cache

        def local(d: int) -> int:
            if d in cache:
                return cache[d]
            return SequenceManager.subfactorial_mod(d - 1, d).value

        if n == 1:
            return Residue(0, 1)
        if nf.is_prime_power:
            return Residue(local(n), n)
        parts = []
        for d in nf.prime_powers():
            sign = 1 if (n + d) % 2 == 0 else -1
            parts.append(Residue.of(sign * local(d), d))
        return ArithmeticManager.crt_combine(parts)

    @staticmethod
    def subfactorial_residues(moduli: Sequence[int]) -> np.ndarray:
        """
        Computes ``S_(m-1) mod m`` for many moduli in one shared recurrence pass.

        The moduli are sorted; step k updates only the moduli still waiting for
        their index, so the total work is the sum of the moduli.

        Args:
            moduli (Sequence[int]): Positive moduli below 2**31, in any order.

        Returns:
            np.ndarray: Canonical residues aligned with the input order.
        """
        mods = np.asarray(moduli, dtype=np.int64)
        if mods.size == 0:
            return mods.copy()
        if mods.min() < 1 or mods.max() >= BATCH_MODULUS_LIMIT:
            raise DomainError(f"Batched moduli must lie in [1, {BATCH_MODULUS_LIMIT}).")

        order = np.argsort(mods, kind="stable")
        sorted_mods = mods[order]
        state = np.ones_like(sorted_mods) % sorted_mods
        found = np.empty_like(sorted_mods)
        start, total, k = 0, len(sorted_mods), 0
        while True:
            ready = int(np.searchsorted(sorted_mods, k + 1, side="right"))
            if ready > start:
                found[start:ready] = state[start:ready]
                start = ready
            if start == total:
                break
            k += 1
            active = state[start:]
            np.multiply(active, k, out=active)
            active += 1 if k % 2 == 0 else -1
            np.remainder(active, sorted_mods[start:], out=active)

        result = np.empty_like(found)
        result[order] = found
        return result

    @staticmethod
    def alternating_factorial_sum_mod(p: int) -> Residue:
        """
        Returns ``sum_(k=0)^(p-1) (-1)**k / k! mod p`` for an odd prime p.

        Raises:
            DomainError: If p is not an odd prime.
        """
        if p < 3 or not ArithmeticManager.is_prime(p):
            raise DomainError(f"{p} is not an odd prime.")
        factorial = 1
        for k in range(1, p):
            factorial = factorial * k % p
        inverse = pow(factorial, -1, p)
        total = 0
        for k in range(p - 1, -1, -1):
            # inverse holds 1/k! here
            total = (total + (inverse if k % 2 == 0 else -inverse)) % p
            inverse = inverse * k % p
        return Residue(total, p)

    @staticmethod
    def alternating_sum_numerator(n: int) -> AlternatingSum:
        """
        Writes ``sum_(k=0)^(n-1) (-1)**k / k!`` in lowest terms.

        The terms are accumulated over the common denominator ``(n-1)!`` and reduced once.

        Returns:
            AlternatingSum: numerator, denominator and whether n divides the numerator.
        """
        if n < 3:
            raise DomainError(f"alternating_sum_numerator needs n >= 3, got {n}.")
        numerator = SequenceManager.subfactorial_by_sum(n)
        denominator = math.factorial(n - 1)
        g = math.gcd(numerator, denominator)
        numerator, denominator = numerator // g, denominator // g
        return AlternatingSum(numerator, denominator, numerator % n == 0)

    @staticmethod
    def bell_numbers(limit: int) -> List[int]:
        """Exact Bell numbers ``B_0 .. B_limit`` from the Bell triangle."""
        SequenceManager._check_index(limit)
        row = [1]
        bells = [1]
        for _ in range(limit):
            nxt = [row[-1]]
            for value in row:
                nxt.append(nxt[-1] + value)
            row = nxt
            bells.append(row[0])
        return bells

    @staticmethod
    def bell_mod(n: int, m: int) -> Residue:
        """
        Returns ``B_n mod m`` with the Bell triangle carried modulo m, one rolling row.

        Args:
            n (int): Index, n >= 0.
            m (int): Modulus, m >= 1.
        """
        SequenceManager._check_index(n)
        if m < 1:
            raise DomainError(f"Modulus must be positive, got {m}.")
        dtype = np.int64 if (n + 2) * m < 2 ** 62 else object
        row = np.array([1 % m], dtype=dtype)
        for _ in range(n):
            nxt = np.empty(len(row) + 1, dtype=dtype)
            nxt[0] = row[-1]
            nxt[1:] = np.cumsum(row) + row[-1]
            row = nxt % m
        return Residue(int(row[0]), m)

    @staticmethod
    def bell_numbers_mod(limit: int, m: int) -> np.ndarray:
        """``B_0 .. B_limit`` modulo m from a single pass of the triangle."""
        SequenceManager._check_index(limit)
        if m < 1 or (limit + 2) * m >= 2 ** 62:
            raise DomainError(f"Modulus {m} is outside the int64 range for index {limit}.")
        bells = np.empty(limit + 1, dtype=np.int64)
        row = np.array([1 % m], dtype=np.int64)
        bells[0] = row[0]
        for k in range(1, limit + 1):
            nxt = np.empty(len(row) + 1, dtype=np.int64)
            nxt[0] = row[-1]
            nxt[1:] = np.cumsum(row) + row[-1]
            row = nxt % m
            bells[k] = row[0]
        return bells

    @staticmethod
    def bell_residues(moduli: Sequence[int], chunk: int = 128) -> np.ndarray:
        """
        Computes ``B_(m-1) mod m`` for many moduli with a column-batched Bell triangle.

        Args:
            moduli (Sequence[int]): Positive moduli, in any order.
            chunk (int): Number of moduli sharing one two-dimensional triangle.

        Returns:
            np.ndarray: Canonical residues aligned with the input order.
        """
        mods = np.asarray(moduli, dtype=np.int64)
        if mods.size == 0:
            return mods.copy()
        if mods.min() < 1 or mods.max() >= BATCH_MODULUS_LIMIT:
            raise ResourceError(f"Bell moduli must lie in [1, {BATCH_MODULUS_LIMIT}).")

        order = np.argsort(mods, kind="stable")
        sorted_mods = mods[order]
        found = np.empty_like(sorted_mods)
        for offset in range(0, len(sorted_mods), chunk):
            cols = sorted_mods[offset:offset + chunk]
            row = np.ones((1, len(cols)), dtype=np.int64) % cols
            done, k = 0, 0
            while True:
                ready = int(np.searchsorted(cols, k + 1, side="right"))
                if ready > done:
                    found[offset + done:offset + ready] = row[0, :ready - done]
                    row = row[:, ready - done:]
                    done = ready
                if done == len(cols):
                    break
                nxt = np.empty((row.shape[0] + 1, row.shape[1]), dtype=np.int64)
                nxt[0] = row[-1]
                np.cumsum(row, axis=0, out=nxt[1:])
                nxt[1:] += row[-1]
                nxt %= cols[done:]
                row = nxt
                k += 1
            logger.debug("bell residues done for moduli %d..%d", cols[0], cols[-1])

        result = np.empty_like(found)
        result[order] = found
        return result
