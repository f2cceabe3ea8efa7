import math
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .exceptions import CoprimalityError, DomainError, NotInvertibleError, ResourceError

logger = logging.getLogger(__name__)

DEFAULT_SIEVE_CEILING = 2 ** 31
SEGMENT_ODD_COUNT = 1 << 22
SMALL_TRIAL_BOUND = 2 ** 16
WORD_LIMIT = 2 ** 64
# Deterministic for every n < 3.3 * 10**24, which covers 64-bit inputs.
MILLER_RABIN_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


@dataclass(frozen=True)
class Residue:
    """
    A residue class ``value (mod modulus)`` in canonical form ``0 <= value < modulus``.

    ``signed`` is the balanced representative in ``(-modulus/2, modulus/2]`` used by
    the published tables, ``near_miss`` the distance of the class from zero.
    """
    value: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 1:
            raise DomainError(f"Modulus must be positive, got {self.modulus}.")
        if not 0 <= self.value < self.modulus:
            raise DomainError(f"Value {self.value} is not reduced modulo {self.modulus}.")

    @classmethod
    def of(cls, value: int, modulus: int) -> "Residue":
        """Reduces an arbitrary integer modulo ``modulus``."""
        if modulus < 1:
            raise DomainError(f"Modulus must be positive, got {modulus}.")
        return cls(int(value) % modulus, int(modulus))

    @property
    def signed(self) -> int:
        if 2 * self.value <= self.modulus:
            return self.value
        return self.value - self.modulus

    @property
    def near_miss(self) -> int:
        return min(self.value, self.modulus - self.value)

    def __int__(self) -> int:
        return self.value

    def __str__(self) -> str:
        return f"{self.value} (mod {self.modulus}), signed {self.signed}"


@dataclass(frozen=True)
class FactoredInteger:
    """An integer ``n >= 1`` with its prime factorization, primes strictly increasing."""
    n: int
    factors: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        product = 1
        previous = 1
        for prime, exponent in self.factors:
            if prime <= previous or exponent < 1:
                raise DomainError(f"Malformed factorization {self.factors} of {self.n}.")
            previous = prime
            product *= prime ** exponent
        if product != self.n:
            raise DomainError(f"Factors {self.factors} multiply to {product}, not {self.n}.")

    @property
    def is_prime(self) -> bool:
        return len(self.factors) == 1 and self.factors[0][1] == 1

    @property
    def is_prime_power(self) -> bool:
        return len(self.factors) == 1

    def prime_powers(self) -> List[int]:
        return [prime ** exponent for prime, exponent in self.factors]

    def divisors(self) -> List[int]:
        """All positive divisors of n in ascending order."""
        divisors = [1]
        for prime, exponent in self.factors:
            divisors = [d * prime ** k for d in divisors for k in range(exponent + 1)]
        return sorted(divisors)

    def format(self) -> str:
        """Renders the factorization as ``p^e*q^f`` (``1`` for the empty product)."""
        if not self.factors:
            return "1"
        return "*".join(str(p) if e == 1 else f"{p}^{e}" for p, e in self.factors)


class ArithmeticManager:
    """Prime sieving, factorization, modular inverses and CRT on plain integers."""

    @staticmethod
    def _small_sieve(limit: int) -> np.ndarray:
        flags = np.ones(limit + 1, dtype=bool)
        flags[:2] = False
        for p in range(2, math.isqrt(limit) + 1):
            if flags[p]:
                flags[p * p::p] = False
        return np.flatnonzero(flags).astype(np.int64)

    @staticmethod
    def sieve_primes(limit: int, ceiling: Optional[int] = None) -> np.ndarray:
        """
        Returns all primes ``<= limit`` in ascending order.

        An odd-only segmented sieve of Eratosthenes: memory stays at
        O(sqrt(limit) + segment) however large the limit.

        Args:
            limit (int): Inclusive upper bound, at least 2.
            ceiling (int, optional): Largest accepted limit, defaults to 2**31.

        Returns:
            np.ndarray: Read-only int64 array of primes.

        Raises:
            DomainError: If the limit is below 2.
            ResourceError: If the limit exceeds the ceiling.
        """
        ceiling = DEFAULT_SIEVE_CEILING if ceiling is None else ceiling
        if limit < 2:
            raise DomainError(f"No primes below {limit}: sieve limit must be at least 2.")
        if limit > ceiling:
            raise ResourceError(f"Sieve limit {limit} exceeds the configured ceiling {ceiling}.",
                                "a smaller range or a larger KUREPA_SIEVE_CEILING")

        base = ArithmeticManager._small_sieve(math.isqrt(limit))
        chunks = [np.array([2], dtype=np.int64)]
        low = 3
        while low <= limit:
            high = min(low + 2 * SEGMENT_ODD_COUNT, limit + 1)
            mask = np.ones((high - low + 1) // 2, dtype=bool)
            for p in base[1:].tolist():
                if p * p >= high:
                    break
                start = max(p * p, ((low + p - 1) // p) * p)
                if start % 2 == 0:
                    start += p
                if start < high:
                    mask[(start - low) // 2::p] = False
            chunks.append(low + 2 * np.flatnonzero(mask).astype(np.int64))
            low = high if high % 2 == 1 else high + 1

        primes = np.concatenate(chunks)
        primes.setflags(write=False)
        logger.debug("sieved %d primes up to %d", len(primes), limit)
        return primes

    @staticmethod
    @lru_cache(maxsize=8)
    def _trial_primes(bound: int) -> Tuple[int, ...]:
        return tuple(ArithmeticManager.sieve_primes(max(bound, 2)).tolist())

    @staticmethod
    def is_prime(n: int) -> bool:
        """Deterministic strong-pseudoprime test, exact for every n below 2**64."""
        if n < 2:
            return False
        for p in MILLER_RABIN_BASES:
            if n % p == 0:
                return n == p
        d, s = n - 1, 0
        while d % 2 == 0:
            d //= 2
            s += 1
        for a in MILLER_RABIN_BASES:
            x = pow(a, d, n)
            if x in (1, n - 1):
                continue
            for _ in range(s - 1):
                x = x * x % n
                if x == n - 1:
                    break
            else:
                return False
        return True

    @staticmethod
    def factorize(n: int) -> FactoredInteger:
        """
        Factors n by trial division with sieved primes up to sqrt(n).

        Primes are tried up to 2**16 first and up to ``min(sqrt(n), 2**31)`` only while
        the cofactor is still composite, so every n below 2**62 factors completely.
        Above that, at most one prime factor may exceed 2**31.

        Args:
            n (int): A positive integer below 2**64.

        Returns:
            FactoredInteger: The complete factorization (empty for n = 1).

        Raises:
            DomainError: If n < 1.
            ResourceError: If n does not fit in a machine word, or leaves a composite
                cofactor without prime factors up to 2**31.
        """
        if n < 1:
            raise DomainError(f"Cannot factorize {n}: input must be a positive integer.")
        if n >= WORD_LIMIT:
            raise ResourceError(f"{n} is beyond word size for trial division.")

        # Round the trial bound up to a power of two so the prime cache is reused.
        bound = min(1 << max(1, math.isqrt(n).bit_length()), DEFAULT_SIEVE_CEILING)
        factors = []
        remaining = n
        tried = 1
        for limit in (min(SMALL_TRIAL_BOUND, bound), bound):
            if remaining == 1 or limit <= tried or ArithmeticManager.is_prime(remaining):
                break
            for p in ArithmeticManager._trial_primes(limit):
                if p <= tried:
                    continue
                if p * p > remaining:
                    break
                if remaining % p == 0:
                    exponent = 0
                    while remaining % p == 0:
                        remaining //= p
                        exponent += 1
                    factors.append((p, exponent))
            tried = limit
        if remaining > 1:
            if not ArithmeticManager.is_prime(remaining):
                raise ResourceError(f"{n} leaves the composite cofactor {remaining} after trial division "
                                    f"up to {bound}.", "a dedicated factoring method")
            factors.append((remaining, 1))
        return FactoredInteger(n, tuple(factors))

    @staticmethod
    def factorize_range(lo: int, hi: int) -> Dict[int, FactoredInteger]:
        """
        Factors every integer in ``[lo, hi)`` by sieving the segment with the primes up to sqrt(hi).

        Memory is O(hi - lo + sqrt(hi)), so scan blocks far from the origin stay cheap.

        Args:
            lo (int): Inclusive lower bound, at least 1.
            hi (int): Exclusive upper bound.

        Returns:
            Dict[int, FactoredInteger]: Factorizations keyed by n.
        """
        if lo < 1 or hi <= lo:
            raise DomainError(f"Invalid factorization range [{lo}, {hi}).")
        size = hi - lo
        remaining = np.arange(lo, hi, dtype=np.int64)
        factors: List[List[Tuple[int, int]]] = [[] for _ in range(size)]
        for p in ArithmeticManager._small_sieve(math.isqrt(hi - 1)).tolist():
            offsets = np.arange(-lo % p, size, p)
            if offsets.size == 0:
                continue
            quotients = remaining[offsets]
            exponents = np.zeros(offsets.size, dtype=np.int64)
            divisible = np.ones(offsets.size, dtype=bool)
            while divisible.any():
                quotients[divisible] //= p
                exponents[divisible] += 1
                divisible = quotients % p == 0
            remaining[offsets] = quotients
            for i, e in zip(offsets.tolist(), exponents.tolist()):
                factors[i].append((p, e))

        result = {}
        for i, cofactor in enumerate(remaining.tolist()):
            if cofactor > 1:
                factors[i].append((cofactor, 1))
            result[lo + i] = FactoredInteger(lo + i, tuple(factors[i]))
        return result

    @staticmethod
    def mod_inverse(a: int, m: int) -> Residue:
        """
        Returns x with ``a * x = 1 (mod m)``.

        Raises:
            NotInvertibleError: If gcd(a, m) != 1; the error carries the gcd.
        """
        if m < 1:
            raise DomainError(f"Modulus must be positive, got {m}.")
        g = math.gcd(a, m)
        if g != 1:
            raise NotInvertibleError(a, m, g)
        return Residue(pow(a, -1, m), m)

    @staticmethod
    def crt_combine(parts: Sequence[Residue]) -> Residue:
        """
        Combines residues with pairwise coprime moduli into one residue modulo their product.

        Args:
            parts (Sequence[Residue]): Nonempty list of residues.

        Returns:
            Residue: The unique class agreeing with every part.

        Raises:
            DomainError: If the list is empty.
            CoprimalityError: Naming the first pair of moduli sharing a factor.
        """
        if not parts:
            raise DomainError("crt_combine needs at least one residue.")
        moduli = [part.modulus for part in parts]
        for i, mi in enumerate(moduli):
            for mj in moduli[i + 1:]:
                if math.gcd(mi, mj) != 1:
                    raise CoprimalityError((mi, mj))

        value, modulus = parts[0].value, parts[0].modulus
        for part in parts[1:]:
            step = (part.value - value) * pow(modulus, -1, part.modulus) % part.modulus
            value += modulus * step
            modulus *= part.modulus
        return Residue(value % modulus, modulus)

    @staticmethod
    def prime_powers_upto(limit: int, min_exponent: int = 1) -> List[Tuple[int, int, int]]:
        """Lists ``(q**e, q, e)`` for every prime power ``<= limit`` with ``e >= min_exponent``, sorted."""
        if limit < 2:
            return []
        powers = []
        for q in ArithmeticManager.sieve_primes(limit).tolist():
            if q ** min_exponent > limit:
                break
            value, exponent = q ** min_exponent, min_exponent
            while value <= limit:
                powers.append((value, q, exponent))
                value *= q
                exponent += 1
        return sorted(powers)

    @staticmethod
    def balanced(values: Iterable[int], modulus: int) -> List[int]:
        return [Residue.of(v, modulus).signed for v in values]
