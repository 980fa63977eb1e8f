from functools import lru_cache

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Toolkit settings loaded from environment variables (prefix ``LCMST_``)."""

    log_level: str = "INFO"

    # Pseudo-polynomial guards
    layer_cap: int = 10_000
    max_guesses_per_region: int = 4096

    # Exact oracles
    exact_edge_cap: int = 20
    exact_subset_edge_cap: int = 16
    exact_terminal_cap: int = 12

    # Assertion ceilings (constants hidden in O(.) bounds)
    boundary_length_factor: int = 36
    boundary_component_cap: int = 6
    light_boundary_factor: int = 64
    hierarchy_boundary_factor: int = 64
    piece_count_factor: int = 8
    main_ratio_factor: int = 8
    lp_ratio_factor: int = 8

    # Algorithm parameters
    default_alpha: float = 2.0
    default_beta: float = 2.0
    default_delta: float = 0.5
    alpha_min: float = 1.5
    beta_min: float = 1.0
    beta_max: float = 8.0

    # Harness
    max_workers: int = 1
    output_dir: str = "./reports"

    class Config:
        env_file = ".env"
        env_prefix = "LCMST_"
        case_sensitive = False


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
