# Configuration and environment settings utilities
from __future__ import annotations

import os
from dataclasses import dataclass


def get_env_bool(name: str, default: str) -> bool:
    return os.getenv(name, default).strip().lower() in ("1", "true", "yes", "on")


@dataclass
class Settings:
    # Largest order served by actual enumeration; beyond it only fixture counts exist
    max_order: int = int(os.getenv("TREEDECOMP_MAX_ORDER", "20"))
    # Node expansions allowed per tree and per search phase
    search_budget: int = int(os.getenv("TREEDECOMP_SEARCH_BUDGET", "100000000"))
    log_level: str = os.getenv("LOG_LEVEL", "info")

    cache_enabled: bool = None  # set in __post_init__

    # Local SQLite path for the labeling cache
    sqlite_path: str = os.getenv(
        "TREEDECOMP_SQLITE_PATH",
        os.path.join(os.path.dirname(__file__), "..", "var", "labelings.sqlite"),
    )
    output_dir: str = os.getenv("TREEDECOMP_OUTPUT_DIR", "certificates")

    def __post_init__(self):
        self.cache_enabled = get_env_bool("TREEDECOMP_CACHE_ENABLED", "false")


settings = Settings()
