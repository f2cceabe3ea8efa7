from typing import Optional, Tuple


class KurepaError(Exception):
    """Base class for every error raised by Kurepa_py."""


class DomainError(KurepaError, ValueError):
    """An argument lies outside the domain of the requested operation."""


class ResourceError(KurepaError, ValueError):
    """A configured ceiling (memory, matrix order, scan range) would be exceeded."""

    def __init__(self, message: str, alternative: Optional[str] = None):
        if alternative:
            message = f"{message} Try {alternative} instead."
        super().__init__(message)
        self.alternative = alternative


class NotInvertibleError(DomainError):
    def __init__(self, value: int, modulus: int, gcd: int):
        super().__init__(f"{value} is not invertible modulo {modulus}: gcd = {gcd}")
        self.value = value
        self.modulus = modulus
        self.gcd = gcd


class CoprimalityError(DomainError):
    def __init__(self, pair: Tuple[int, int]):
        super().__init__(f"Moduli {pair[0]} and {pair[1]} are not coprime")
        self.pair = pair


class InconsistencyError(KurepaError, ArithmeticError):
    """Two independent evaluations that must agree did not."""


class CheckpointError(KurepaError, IOError):
    """A checkpoint file is corrupt or belongs to a different scan."""
