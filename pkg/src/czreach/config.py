"""Configuration from environment variables."""
import os
import sys
from functools import lru_cache


def _flag(name: str, default: str) -> bool:
    return os.environ.get(name, default).strip().lower() in ("1", "true", "yes", "on")


class Config:
    """Numerical tolerances and algorithm switches, loaded from env vars."""

    def __init__(self):
        self.rank_tol: float = float(
            os.environ.get("CZREACH_RANK_TOL", repr(sys.float_info.epsilon))
        )
        self.lp_tol: float = float(os.environ.get("CZREACH_LP_TOL", "1e-9"))
        self.membership_tol: float = float(
            os.environ.get("CZREACH_MEMBERSHIP_TOL", "1e-8")
        )
        self.clamp_tol: float = float(os.environ.get("CZREACH_CLAMP_TOL", "1e-10"))
        self.degeneracy_tol: float = float(
            os.environ.get("CZREACH_DEGENERACY_TOL", "1e-9")
        )
        self.geometry_tol: float = float(
            os.environ.get("CZREACH_GEOMETRY_TOL", "1e-9")
        )
        self.max_condition: float = float(os.environ.get("CZREACH_MAX_COND", "1e12"))
        self.outer_boxed: bool = _flag("CZREACH_OUTER_BOXED", "1")
        self.outer_reduce: bool = _flag("CZREACH_OUTER_REDUCE", "0")
        self.verify_min_row: bool = _flag("CZREACH_VERIFY_MIN_ROW", "0")
        self.debug_full_dim: bool = _flag("CZREACH_DEBUG_FULL_DIM", "0")

    def validate(self) -> list[str]:
        """Return list of validation errors. Empty = valid."""
        errors = []
        for name in (
            "rank_tol", "lp_tol", "membership_tol", "clamp_tol",
            "degeneracy_tol", "geometry_tol",
        ):
            value = getattr(self, name)
            if not 0 < value < 1:
                errors.append(f"{name} must lie in (0, 1), got {value!r}")
        if self.max_condition <= 1:
            errors.append(f"max_condition must exceed 1, got {self.max_condition!r}")
        return errors

    def replace(self, **changes) -> "Config":
        """Copy with some attributes overridden."""
        clone = object.__new__(Config)
        clone.__dict__.update(self.__dict__)
        for key, value in changes.items():
            if not hasattr(clone, key):
                raise AttributeError(f"unknown config field {key!r}")
            setattr(clone, key, value)
        return clone


@lru_cache(maxsize=1)
def default_config() -> Config:
    return Config()


def resolve(config: Config | None) -> Config:
    return default_config() if config is None else config
