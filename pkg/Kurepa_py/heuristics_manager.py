import math
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
import pandas as pd

from .arithmetic_manager import ArithmeticManager
from .config_manager import ConfigManager
from .exceptions import DomainError

EXACT = "exact-prime-sum"
MERTENS = "mertens-asymptotic"
PRODUCT = "prime-product"
MODE_ALIASES = {"exact": EXACT, "mertens": MERTENS, EXACT: EXACT, MERTENS: MERTENS}

# (label, kind, x, y, d, printed value)
PUBLISHED_CONSTANTS = (
    ("near misses d=9 on [23, 2^23]", "expected-count", 23, 2 ** 23, 9, 30.8977),
    ("counterexamples on [3, 2^23]", "expected-count", 3, 2 ** 23, 0, 2.67493),
    ("counterexamples on [353, 2^23]", "expected-count", 353, 2 ** 23, 0, 0.999729),
    ("near misses d=99 on [1000, 100000]", "expected-count", 1000, 100000, 99, 101.654),
    ("counterexamples on [2^23, 10^19]", "expected-count", 2 ** 23, 10 ** 19, 0, 1.00949),
    ("no counterexample on [4, 2^23]", "event-prob", 4, 2 ** 23, None, 0.105652),
)
PRINTED_EVENT_INTERVAL = (2 ** 23, 5000000)
CORRECTED_EVENT_INTERVAL = (2 ** 23, 5 * 10 ** 7)
PRINTED_EVENT_PROBABILITY = 0.899309


@dataclass(frozen=True)
class HeuristicEstimate:
    x: float
    y: float
    d: Optional[int]
    value: float
    mode: str

    def __float__(self) -> float:
        return self.value


class HeuristicsManager:
    """
    Expected near-miss counts and the probability that an interval holds no
    Kurepa counterexample, under the model where ``S_(p-1) mod p`` is uniform.
    """

    def __init__(self, config: Optional[ConfigManager] = None):
        self.config = config or ConfigManager()
        self.logger = logging.getLogger(__name__)

    def _odd_primes(self, x: float, y: float) -> np.ndarray:
        """Odd primes in the closed interval [x, y]."""
        top = math.floor(y)
        if top < 3:
            return np.empty(0, dtype=np.int64)
        primes = ArithmeticManager.sieve_primes(top, self.config.sieve_ceiling)
        return primes[(primes >= max(x, 3)) & (primes <= y)]

    def expected_near_miss_count(self, x: float, y: float, d: int, mode: str = "mertens") -> HeuristicEstimate:
        """
        Expected number of primes p in [x, y] with ``min(r_p, p - r_p) <= d``.

        Each prime contributes ``(2d+1)/p``. The exact mode sums over sieved primes,
        the Mertens mode uses ``(2d+1) * ln(ln y / ln x)``.

        Args:
            x (float): Lower end, at least 3.
            y (float): Upper end, greater than x.
            d (int): Near-miss bound, at least 0.
            mode (str): ``exact`` or ``mertens`` (long names accepted).

        Returns:
            HeuristicEstimate: The expected count.

        Raises:
            DomainError: For an invalid interval, bound or mode.
        """
        if mode not in MODE_ALIASES:
            raise DomainError(f"Unknown mode {mode!r}; expected one of {sorted(MODE_ALIASES)}.")
        if x < 3 or x >= y:
            raise DomainError(f"Need 3 <= x < y, got x = {x}, y = {y}.")
        if d < 0:
            raise DomainError(f"Near-miss bound must be nonnegative, got {d}.")

        mode = MODE_ALIASES[mode]
        if mode == EXACT:
            primes = self._odd_primes(x, y)
            value = (2 * d + 1) * math.fsum((1.0 / primes).tolist())
        else:
            value = (2 * d + 1) * math.log(math.log(y) / math.log(x))
        return HeuristicEstimate(x, y, d, value, mode)

    def kurepa_event_probability(self, x: float, y: float) -> HeuristicEstimate:
        """
        Probability that no odd prime in [x, y] is a counterexample: the product of
        ``1 - 1/p``, accumulated as a compensated sum of ``log1p(-1/p)``.

        The prime 2 never contributes.
        """
        if x < 2 or x >= y:
            raise DomainError(f"Need 2 <= x < y, got x = {x}, y = {y}.")
        primes = self._odd_primes(x, y)
        value = math.exp(math.fsum(np.log1p(-1.0 / primes).tolist())) if primes.size else 1.0
        return HeuristicEstimate(x, y, None, value, PRODUCT)

    def event_probability_report(self) -> pd.DataFrame:
        """
        Evaluates the published ``P = 0.899309`` on the printed interval and on the
        interval ending near 5 * 10**7.

        The printed interval is empty because its upper end lies below 2**23, so its
        row carries no value.
        """
        rows = []
        for label, (x, y) in (("printed", PRINTED_EVENT_INTERVAL), ("corrected", CORRECTED_EVENT_INTERVAL)):
            if x >= y:
                self.logger.warning("printed interval [%d, %d] is empty", x, y)
                rows.append({"interval": label, "x": x, "y": y, "computed": float("nan"),
                             "published": PRINTED_EVENT_PROBABILITY, "matches": False,
                             "note": "upper end below lower end"})
                continue
            value = self.kurepa_event_probability(x, y).value
            rows.append({"interval": label, "x": x, "y": y, "computed": value,
                         "published": PRINTED_EVENT_PROBABILITY,
                         "matches": abs(value - PRINTED_EVENT_PROBABILITY) <= 1e-4, "note": ""})
        return pd.DataFrame(rows)

    def published_constants(self, mode: str = "mertens") -> pd.DataFrame:
        """
        Recomputes the published heuristic constants.

        Args:
            mode (str): Mode for the expected counts.

        Returns:
            pd.DataFrame: label, inputs, published and computed values, relative error.
        """
        rows = []
        for label, kind, x, y, d, published in PUBLISHED_CONSTANTS:
            if kind == "event-prob":
                estimate = self.kurepa_event_probability(x, y)
            else:
                # y beyond the sieve ceiling only has the asymptotic form
                row_mode = mode if y <= self.config.sieve_ceiling else MERTENS
                estimate = self.expected_near_miss_count(x, y, d, row_mode)
            error = abs(estimate.value - published) / published
            rows.append({"label": label, "kind": kind, "x": x, "y": y, "d": d,
                         "mode": estimate.mode, "published": published,
                         "computed": estimate.value, "relative_error": error})
        return pd.DataFrame(rows)
