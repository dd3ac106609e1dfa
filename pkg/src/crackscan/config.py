import os
from pathlib import Path
from typing import Literal, Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="CRACKSCAN_",
        extra="ignore",
    )

    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "INFO"
    workers: Optional[int] = Field(default=None, ge=1)
    default_output_dir: Path = Path("crackscan-out")

    def resolved_workers(self) -> int:
        return self.workers or os.cpu_count() or 1


settings = Settings()
