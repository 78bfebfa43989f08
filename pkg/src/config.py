import os
from functools import lru_cache
from pathlib import Path

from dotenv import load_dotenv
from pydantic import BaseModel, Field

ENV_PREFIX = "SEU_CORNER_"


class Settings(BaseModel):
    seed: int = 20240101
    grid_2: int = Field(10_000, ge=2)
    grid_3: int = Field(300, ge=2)
    synth_grid: int = Field(100_000, ge=2)
    tol: float = Field(1e-7, ge=0)
    lp_eps: float = Field(1e-9, ge=0)
    node_budget: int = Field(1_000_000, ge=1)
    plot_points: int = Field(512, ge=2)
    lattice_budget: int = Field(1_000_000, ge=1)
    progress: bool = False
    log_dir: Path = Path("logs")

    def grid_points(self, n_states):
        return self.grid_2 if n_states <= 2 else self.grid_3


def _read_env():
    values = {}
    for name in Settings.model_fields:
        raw = os.environ.get(ENV_PREFIX + name.upper())
        if raw is not None and raw != "":
            values[name] = raw
    return values


@lru_cache(maxsize=1)
def load_settings():
    load_dotenv()
    return Settings(**_read_env())
