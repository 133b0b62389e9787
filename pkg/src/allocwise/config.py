"""Layered runtime configuration.

Settings resolve with precedence flags > environment > config file >
built-ins. The file is ``allocwise.toml`` in the working directory (or
the path in ``ALLOCWISE_CONFIG``); environment variables use the
``ALLOCWISE_`` prefix. CLI flags arrive as the ``overrides`` mapping.
"""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass, fields
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .ahp import RI_TABLE
from .allocation import DEFAULT_PENALTY_RATE
from .errors import SchemaValidationError

CONFIG_FILENAME = "allocwise.toml"
ENV_PREFIX = "ALLOCWISE_"

DEFAULT_CORS_ORIGINS = (
    "http://localhost:5173",
    "http://127.0.0.1:5173",
    "http://localhost:3000",
    "http://127.0.0.1:3000",
)


@dataclass(frozen=True)
class Config:
    store_dir: Path = Path.home() / ".allocwise" / "store"
    solver_tol: float = 1e-10
    solver_max_iter: int = 10000
    penalty_rate: float = DEFAULT_PENALTY_RATE
    ri_table: tuple[float, ...] = tuple(RI_TABLE)
    host: str = "127.0.0.1"
    port: int = 8000
    cors_origins: tuple[str, ...] = DEFAULT_CORS_ORIGINS
    request_timeout: float = 120.0

    def __post_init__(self):
        object.__setattr__(self, "store_dir", Path(self.store_dir))
        if not (self.solver_tol > 0):
            raise SchemaValidationError("solver_tol must be positive")
        if int(self.solver_max_iter) < 1:
            raise SchemaValidationError("solver_max_iter must be >= 1")
        if not (self.penalty_rate >= 0):
            raise SchemaValidationError("penalty_rate must be >= 0")
        ri = tuple(float(x) for x in self.ri_table)
        if len(ri) != len(RI_TABLE) or any(x < 0 for x in ri):
            raise SchemaValidationError(
                f"ri_table must hold {len(RI_TABLE)} non-negative reals "
                "(orders 1..10)"
            )
        object.__setattr__(self, "ri_table", ri)
        if not (0 < int(self.port) < 65536):
            raise SchemaValidationError("port must be in 1..65535")
        object.__setattr__(self, "cors_origins", tuple(self.cors_origins))
        if not (self.request_timeout > 0):
            raise SchemaValidationError("request_timeout must be positive")


# (config key, TOML [section] name, TOML key, env var suffix, parser)
def _csv_tuple(raw) -> tuple[str, ...]:
    if isinstance(raw, str):
        return tuple(p.strip() for p in raw.split(",") if p.strip())
    return tuple(str(p) for p in raw)


def _float_tuple(raw) -> tuple[float, ...]:
    items = raw.split(",") if isinstance(raw, str) else raw
    return tuple(float(p) for p in items)


_KEYS = (
    ("store_dir", "store", "dir", "STORE_DIR", Path),
    ("solver_tol", "solver", "tol", "SOLVER_TOL", float),
    ("solver_max_iter", "solver", "max_iter", "SOLVER_MAX_ITER", int),
    ("penalty_rate", "allocation", "penalty_rate", "PENALTY_RATE", float),
    ("ri_table", "ahp", "ri_table", "RI_TABLE", _float_tuple),
    ("host", "serve", "host", "HOST", str),
    ("port", "serve", "port", "PORT", int),
    ("cors_origins", "serve", "cors_origins", "CORS_ORIGINS", _csv_tuple),
    ("request_timeout", "serve", "request_timeout", "REQUEST_TIMEOUT", float),
)


def _from_file(path: Path) -> dict:
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except OSError as exc:
        raise SchemaValidationError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise SchemaValidationError(f"invalid TOML in {path}: {exc}") from exc
    out = {}
    for key, section, name, _env, parse in _KEYS:
        if section in doc and name in doc[section]:
            out[key] = parse(doc[section][name])
    return out


def _from_env(env) -> dict:
    out = {}
    for key, _section, _name, suffix, parse in _KEYS:
        raw = env.get(ENV_PREFIX + suffix)
        if raw is not None and raw != "":
            try:
                out[key] = parse(raw)
            except ValueError as exc:
                raise SchemaValidationError(
                    f"bad value for {ENV_PREFIX + suffix}: {raw!r}"
                ) from exc
    return out


def load_config(
    config_path=None,
    env=None,
    overrides: dict | None = None,
) -> Config:
    """Resolve settings: overrides > env > file > built-ins.

    ``config_path=None`` looks for ./allocwise.toml (or $ALLOCWISE_CONFIG);
    a missing default file is fine, an explicit one must exist.
    """
    env = os.environ if env is None else env
    merged: dict = {}

    explicit = config_path is not None
    path = Path(config_path) if explicit else None
    if path is None:
        candidate = env.get(ENV_PREFIX + "CONFIG")
        if candidate:
            path, explicit = Path(candidate), True
        elif Path(CONFIG_FILENAME).is_file():
            path = Path(CONFIG_FILENAME)
    if path is not None:
        if not path.is_file():
            if explicit:
                raise SchemaValidationError(f"config file not found: {path}")
        else:
            merged.update(_from_file(path))

    merged.update(_from_env(env))
    if overrides:
        valid = {f.name for f in fields(Config)}
        unknown = set(overrides) - valid
        if unknown:
            raise SchemaValidationError(f"unknown config keys: {sorted(unknown)}")
        merged.update({k: v for k, v in overrides.items() if v is not None})
    return Config(**merged)


__all__ = ["Config", "load_config", "CONFIG_FILENAME", "ENV_PREFIX",
           "DEFAULT_CORS_ORIGINS"]
