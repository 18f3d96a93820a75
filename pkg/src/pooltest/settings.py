from pathlib import Path
from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

# Repository-level YAML configuration (commands SSoT + dataset manifest)
CONFIG_DIR = Path(__file__).parent.parent.parent / "config"


class PoolTestSettings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="POOLTEST_", env_file=".env", extra="ignore")

    data_dir: Path = Field(default_factory=lambda: Path.home() / ".pooltest" / "data")
    cache_path: Optional[Path] = None
    workers: int = Field(default=1, ge=1)
    log_level: str = "WARNING"

    @property
    def resolved_cache_path(self) -> Path:
        return self.cache_path or self.data_dir / "cache.db"
