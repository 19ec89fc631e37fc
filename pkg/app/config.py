import logging

from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    log_level: str = "INFO"
    output_dir: str = "runs"

    # Search / self-play defaults
    seed: int = 0
    simulations: int = 800
    c_puct: float = 1.5
    root_noise_alpha: float = 0.3
    root_noise_weight: float = 0.25
    # Evaluation sets (opening-eval, selfplay --evaluation)
    eval_root_noise_weight: float = 0.0
    softmax_plies: int = 20
    max_game_plies: int = 512
    workers: int = 1

    # Monte Carlo sizes
    posterior_samples: int = 100_000
    sequence_samples: int = 10_000

    model_config = SettingsConfigDict(
        env_file=".env", env_prefix="VARIANTLAB_", extra="ignore"
    )

    @field_validator("log_level")
    @classmethod
    def normalize_log_level(cls, v: str) -> str:
        level = v.upper()
        if not isinstance(logging.getLevelName(level), int):
            raise ValueError(f"Unknown log level '{v}'")
        return level

    @field_validator("workers")
    @classmethod
    def at_least_one_worker(cls, v: int) -> int:
        return max(1, v)


settings = Settings()
