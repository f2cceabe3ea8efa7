import pytest

from Kurepa_py.config_manager import ConfigManager


def test_defaults():
    config = ConfigManager()
    assert config.sieve_ceiling == 2 ** 31
    assert config.exact_det_ceiling == 400
    assert config.bell_scan_ceiling == 20000
    assert config.jobs == 1


def test_from_env_mapping():
    config = ConfigManager.from_env({"KUREPA_EXACT_DET_CEILING": "600", "KUREPA_JOBS": "4", "OTHER": "x"})
    assert config.exact_det_ceiling == 600
    assert config.jobs == 4
    assert config.elimination_ceiling == 13000


def test_from_env_process_environment(monkeypatch):
    monkeypatch.setenv("KUREPA_PRECISION", "9")
    assert ConfigManager.from_env().precision == 9


def test_from_env_rejects_non_integers():
    with pytest.raises(ValueError, match="KUREPA_JOBS"):
        ConfigManager.from_env({"KUREPA_JOBS": "many"})


def test_with_overrides_skips_none():
    config = ConfigManager().with_overrides(jobs=None, precision=3)
    assert config.jobs == 1
    assert config.precision == 3
