"""
Tolerances and command defaults.

Values come from three layers, last one wins:
    1. the defaults below
    2. a key=value file named by ``--config`` or the ``QCHIP_CONFIG`` env variable
    3. explicit overrides (command-line flags)
"""
import os
from typing import Literal, Optional

from dotenv import dotenv_values
from pydantic import BaseModel, Extra, ValidationError, validator

from .errors import UsageError

CONFIG_ENV = "QCHIP_CONFIG"

TOL_ALG = 1e-12
TOL_PHYS = 1e-9
EPS_SING = 1e-6
TOL_TRAJ = 1e-4

OUTPUT_FORMAT = Literal["csv", "json"]


class Settings(BaseModel, frozen=True, extra=Extra.forbid):
    tol_alg: float = TOL_ALG
    tol_phys: float = TOL_PHYS
    eps_sing: float = EPS_SING
    tol_traj: float = TOL_TRAJ

    # integrator
    rtol: float = 1e-10
    atol: float = 1e-12
    max_step: float = 1e-2
    crossing_gap: float = 5e-5

    # command defaults
    grid: int = 101
    samples: int = 101
    steps: int = 1000
    p0: float = 1e-3
    p1: float = 1 - 1e-3
    xi: float = 1 / 3
    chip: int = 1
    basis: str = "qbism"
    branch: str = "minus"
    channel: str = "BitFlip"
    physical: bool = False
    pz: Optional[float] = None
    px: Optional[float] = None
    axes: str = "ZX"

    check_samples: int = 10_000
    seed: int = 20241101

    # unset: each command picks its own (csv, json for reconstruct)
    format: Optional[OUTPUT_FORMAT] = None
    log_level: str = "INFO"

    @validator("tol_alg", "tol_phys", "eps_sing", "tol_traj", "rtol", "atol", "max_step")
    def _positive(cls, value):
        if value <= 0:
            raise ValueError("must be positive")
        return value

    @validator("crossing_gap")
    def _gap_outside_exclusion(cls, value, values):
        if value <= values.get("eps_sing", EPS_SING):
            raise ValueError("must exceed eps_sing")
        return value

    @validator("grid", "samples")
    def _at_least_two(cls, value):
        if value < 2:
            raise ValueError("must be at least 2")
        return value

    @validator("chip")
    def _chip_index(cls, value):
        if value not in (1, 2, 3):
            raise ValueError("must be 1, 2 or 3")
        return value

    @validator("log_level")
    def _upper(cls, value):
        return value.upper()


def load_settings(path: Optional[str] = None, **overrides) -> Settings:
    path = path or os.environ.get(CONFIG_ENV)

    values = {}
    if path:
        if not os.path.isfile(path):
            raise UsageError(f"Config file {path} does not exist")
        values.update(
            {key.lower(): value for key, value in dotenv_values(path).items()}
        )
    values.update({key: value for key, value in overrides.items() if value is not None})

    try:
        return Settings.parse_obj(values)
    except ValidationError as e:
        raise UsageError(f"Invalid configuration: {e}") from e
