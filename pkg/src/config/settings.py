from typing import Optional
from pydantic import Field, ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict
from pathlib import Path

from src.errors import InvalidConfig
from src.utils.yaml import load_yaml

BASE_DIR = Path(__file__).resolve().parent.parent.parent
CONFIG_DIR = BASE_DIR / "config"
DOTENV_PATH = BASE_DIR / ".env"
CONFIG_PATH = CONFIG_DIR / "config.yaml"


class Settings(BaseSettings):
    """
    Ambient application settings, loaded from config/config.yaml, the
    environment and an optional .env file (environment wins).

    Hyperparameters do not live here: they belong to `RunConfig`, which is
    serialized next to every artifact so that runs are reproducible from
    their own config file.
    """

    model_config = SettingsConfigDict(
        env_file=DOTENV_PATH,
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # --- Output Configuration ---
    runs_dir: str = Field(default="./runs")
    default_run_config: str = Field(default=str(CONFIG_DIR / "run.yaml"))
    default_synth_spec: str = Field(default=str(CONFIG_DIR / "synth.yaml"))
    command_cfg_path: str = Field(default=str(CONFIG_DIR / "commands.yaml"))

    # --- Logger Configuration ---
    sys_log_level: str = Field(default="INFO")
    sys_log_format: str = Field(default="standard")
    sys_log_file: str = Field(default="./logs/sys_logs/spectral_merc.log")
    sys_log_file_enabled: bool = Field(default=False)
    sys_log_retention_days: int = Field(default=30)

    run_log_level: str = Field(default="INFO")
    run_log_name: str = Field(default="train_log.jsonl")


# Global settings instance (singleton pattern)
_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Get application settings (singleton pattern)."""
    global _settings
    if _settings is None:
        config_dict = {}
        if CONFIG_PATH.exists():
            config_dict = load_yaml(str(CONFIG_PATH)) or {}

        try:
            _settings = Settings(**config_dict)
        except ValidationError as e:
            raise InvalidConfig(f"Validation failed in configuration {CONFIG_PATH}: {e}") from e

    return _settings
