"""Model configuration and config file support for braket-rhs.

ModelConfig fixes the concrete finite-dimensional model (factor dimension,
number of factors, numerical tolerance). Run defaults are loaded from
.braket-rhs.toml if present; CLI flags always override. Searches for config
in: current directory, then home directory.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    try:
        import tomli as tomllib  # type: ignore[no-redef]
    except ImportError:
        tomllib = None  # type: ignore[assignment]

from .errors import ModelError

log = logging.getLogger(__name__)

CONFIG_FILENAME = ".braket-rhs.toml"

KNOWN_KEYS = {"tol", "format", "suites", "workers"}

SEED_ENV_VAR = "BRAKET_RHS_SEED"
DEFAULT_SEED = 42

DEFAULT_TOL = 1e-10

# Largest tensor-space dimension d**N a model may have. Dense operators are
# (d**N)**2 complex entries, so this also bounds operator memory.
MAX_DENSE_DIM = 1 << 16


@dataclass(frozen=True)
class ModelConfig:
    """Concrete model: `factors` copies of a `dim`-dimensional factor space."""
    dim: int
    factors: int = 1
    tol: float = DEFAULT_TOL

    def __post_init__(self) -> None:
        if not isinstance(self.dim, int) or self.dim < 1:
            raise ModelError(f"dim must be a positive integer, got {self.dim!r}")
        if not isinstance(self.factors, int) or self.factors < 1:
            raise ModelError(f"factors must be a positive integer, got {self.factors!r}")
        if not self.tol > 0:
            raise ModelError(f"tol must be positive, got {self.tol!r}")
        size = self.dim ** self.factors
        if size > sys.maxsize:
            raise ModelError(
                f"dim**factors = {self.dim}**{self.factors} exceeds the platform index range"
            )
        if size > MAX_DENSE_DIM:
            raise ModelError(
                f"dim**factors = {size} exceeds the supported dense dimension {MAX_DENSE_DIM}"
            )

    @property
    def dense_dim(self) -> int:
        """Dimension of the N-fold tensor space."""
        return self.dim ** self.factors

    def with_tol(self, tol: float) -> ModelConfig:
        return ModelConfig(dim=self.dim, factors=self.factors, tol=tol)


def resolve_seed(environ: dict[str, str] | None = None) -> int:
    """Seed for randomized suites: $BRAKET_RHS_SEED if set, else 42."""
    env = os.environ if environ is None else environ
    raw = env.get(SEED_ENV_VAR)
    if raw is None or not raw.strip():
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        log.warning("Ignoring non-integer %s=%r, using %d", SEED_ENV_VAR, raw, DEFAULT_SEED)
        return DEFAULT_SEED


def find_config() -> Path | None:
    """Search for .braket-rhs.toml in cwd then home directory.

    Returns the path to the first config file found, or None.
    """
    candidates = [
        Path.cwd() / CONFIG_FILENAME,
        Path.home() / CONFIG_FILENAME,
    ]
    for path in candidates:
        if path.is_file():
            return path
    return None


def load_config(path: Path | None = None) -> dict:
    """Load and parse a .braket-rhs.toml config file.

    If *path* is None, searches for a config file using find_config().
    Returns an empty dict if no config file is found, if the TOML parser
    is unavailable, or if the file cannot be parsed.
    """
    if tomllib is None:
        log.debug("TOML parser not available, skipping config file")
        return {}

    if path is None:
        path = find_config()

    if path is None:
        return {}

    try:
        with open(path, "rb") as f:
            config = tomllib.load(f)
    except Exception as e:
        log.warning("Failed to parse config file %s: %s", path, e)
        return {}

    for key in config:
        if key not in KNOWN_KEYS:
            log.warning("Unknown config key '%s' in %s", key, path)

    log.debug("Loaded config from %s: %s", path, config)
    return config


_HARDCODED_DEFAULTS: dict[str, object] = {
    "format": "json",
    "workers": 1,
}

# Maps config-file key -> argparse attribute name.
_CONFIG_KEY_TO_ARG = {
    "tol": "tol",
    "format": "format",
    "suites": "suite",
    "workers": "workers",
}


def apply_config_defaults(args: argparse.Namespace, config: dict) -> None:
    """Apply config-file defaults to any CLI arg that is still None.

    Precedence: CLI flag > config file > hardcoded default.
    """
    for config_key, arg_name in _CONFIG_KEY_TO_ARG.items():
        if not hasattr(args, arg_name):
            continue  # subcommand has no such flag
        if getattr(args, arg_name) is not None:
            continue

        if config_key in config:
            value = config[config_key]
            if arg_name == "suite" and isinstance(value, str):
                value = [value]
            setattr(args, arg_name, value)
        else:
            default = _HARDCODED_DEFAULTS.get(arg_name)
            if default is not None:
                setattr(args, arg_name, default)
