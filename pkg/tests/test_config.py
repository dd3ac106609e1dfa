from pathlib import Path

import pytest
from pydantic import ValidationError as PydanticValidationError

from crackscan.config import Settings


class TestSettings:
    def test_defaults(self, monkeypatch):
        for name in ("CRACKSCAN_LOG_LEVEL", "CRACKSCAN_WORKERS"):
            monkeypatch.delenv(name, raising=False)

        settings = Settings(_env_file=None)

        assert settings.log_level == "INFO"
        assert settings.workers is None
        assert settings.default_output_dir == Path("crackscan-out")

    def test_environment_overrides(self, monkeypatch):
        monkeypatch.setenv("CRACKSCAN_LOG_LEVEL", "DEBUG")
        monkeypatch.setenv("CRACKSCAN_WORKERS", "3")

        settings = Settings(_env_file=None)

        assert settings.log_level == "DEBUG"
        assert settings.resolved_workers() == 3

    def test_resolved_workers_defaults_to_cpu_count(self, monkeypatch):
        monkeypatch.delenv("CRACKSCAN_WORKERS", raising=False)
        monkeypatch.setattr("os.cpu_count", lambda: 6)

        assert Settings(_env_file=None).resolved_workers() == 6

    def test_invalid_log_level_rejected(self, monkeypatch):
        monkeypatch.setenv("CRACKSCAN_LOG_LEVEL", "LOUD")

        with pytest.raises(PydanticValidationError):
            Settings(_env_file=None)
