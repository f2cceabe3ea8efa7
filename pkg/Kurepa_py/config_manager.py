import os
import logging
from dataclasses import dataclass, fields, replace
from typing import Mapping, Optional

ENV_PREFIX = "KUREPA_"

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConfigManager:
    """
    Tunable ceilings and defaults shared by every manager.

    Each field can be overridden through an environment variable named
    ``KUREPA_<FIELD>`` (for example ``KUREPA_EXACT_DET_CEILING=600``).
    """
    sieve_ceiling: int = 2 ** 31
    exact_det_ceiling: int = 400
    elimination_ceiling: int = 13000
    bell_scan_ceiling: int = 20000
    identity_prime_ceiling: int = 2000
    checkpoint_interval: int = 5000
    jobs: int = 1
    precision: int = 6

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None) -> "ConfigManager":
        """
        Builds a configuration from ``KUREPA_*`` environment variables.

        Args:
            environ (Mapping[str, str], optional): Source mapping, defaults to ``os.environ``.

        Returns:
            ConfigManager: Defaults overridden by every variable that is set.

        Raises:
            ValueError: If a variable is set to something that is not an integer.
        """
        environ = os.environ if environ is None else environ
        overrides = {}
        for field in fields(cls):
            key = ENV_PREFIX + field.name.upper()
            if key not in environ:
                continue
            try:
                overrides[field.name] = int(environ[key])
            except ValueError:
                raise ValueError(f"Environment variable {key}={environ[key]!r} is not an integer.")
            logger.debug("config %s overridden from %s", field.name, key)
        return cls(**overrides)

    def with_overrides(self, **kwargs) -> "ConfigManager":
        """Returns a copy with the non-None keyword values applied."""
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})
