"""Run configuration shared by every commat module."""

import logging
import os
from pathlib import Path
from typing import TextIO

import toml

from .errors import UsageError

logger = logging.getLogger(__name__)

DEFAULTS = {
    "digits": 20,
    "budget": 10**9,
    "format": "json",
    "workers": 1,
    "cl_outer": 10,
    "cl_inner": 100,
}
ENV_VARS = {
    "budget": "COMMAT_BUDGET",
    "digits": "COMMAT_DIGITS",
    "format": "COMMAT_FORMAT",
    "workers": "COMMAT_WORKERS",
}
FORMATS = ("json", "csv")


class RunConfig:
    """Class for managing attributes that need to be shared across modules.

    Values are layered, lowest to highest precedence:
    - built-in defaults (DEFAULTS)
    - a TOML file: commat.toml ([commat] table) or pyproject.toml ([tool.commat] table)
    - environment variables (ENV_VARS)
    - command-line flags, applied by the CLI through update()

    Attributes:
    - digits: decimal digits requested for approximate results
    - budget: maximum field multiplications for a brute-force enumeration
    - format: output record format, "json" or "csv"
    - workers: number of parallel workers for enumerations and partition sums
    - cl_outer, cl_inner: default (M, N) truncation of the Cohen-Lenstra series
    - stderr: diagnostics stream, or None to keep diagnostics in the log only
    """

    def __init__(self):
        self.stderr: TextIO | None = None
        self.reset()

    def reset(self) -> None:
        """Restore built-in defaults."""
        for key, value in DEFAULTS.items():
            setattr(self, key, value)

    def load(self, config_path: Path | None = None, environ=None) -> "RunConfig":
        """Apply the file and environment layers on top of the defaults."""
        environ = os.environ if environ is None else environ
        self.reset()
        path = config_path or environ.get("COMMAT_CONFIG")
        self.update(_read_config_file(Path(path) if path else None), source="config file")
        env_values = {key: environ[var] for key, var in ENV_VARS.items() if var in environ}
        self.update(env_values, source="environment")
        return self

    def update(self, values: dict, source: str = "flags") -> None:
        """Validate and apply a mapping of settings; None values are skipped."""
        for key, raw in values.items():
            if raw is None:
                continue
            if key not in DEFAULTS:
                raise UsageError(f"Unknown setting {key!r} in {source}.")
            setattr(self, key, _coerce(key, raw, source))
            logger.debug("Setting %s=%r from %s", key, getattr(self, key), source)


def _coerce(key: str, raw, source: str):
    if key == "format":
        value = str(raw).lower()
        if value not in FORMATS:
            raise UsageError(f"Format {raw!r} from {source} must be one of {', '.join(FORMATS)}.")
        return value
    try:
        value = int(raw)
    except (TypeError, ValueError):
        raise UsageError(f"Setting {key} from {source} must be an integer, got {raw!r}.")
    if value < 1:
        raise UsageError(f"Setting {key} from {source} must be positive, got {value}.")
    return value


def _read_config_file(path: Path | None) -> dict:
    """Read settings from an explicit path, or look for commat.toml / pyproject.toml."""
    if path is not None:
        if not path.exists():
            raise UsageError(f"Config file {path} does not exist.")
        candidates = [path]
    else:
        candidates = [Path("commat.toml"), Path("pyproject.toml")]

    for candidate in candidates:
        if not candidate.exists():
            continue
        try:
            data = toml.load(candidate)
        except toml.TomlDecodeError as e:
            # A discovered pyproject.toml belongs to some other project.
            if path is None and candidate.name == "pyproject.toml":
                logger.debug("Skipping %s, not readable as TOML: %s", candidate, e)
                continue
            raise UsageError(f"Config file {candidate} is not valid TOML: {e}")
        if candidate.name == "pyproject.toml":
            section = data.get("tool", {}).get("commat", {})
        else:
            section = data.get("commat", data)
        if section:
            logger.debug("Loaded settings from %s", candidate)
            return dict(section)
    return {}


run_config = RunConfig()


def log_message(message: str, level: int = logging.INFO, **kwargs) -> None:
    """Log a message, echoing it to the diagnostics stream when one is configured.

    Args:
        message: The message to log
        level: The logging level (default: INFO)
        **kwargs: Additional keyword arguments for the logger
    """
    logger.log(level, message, **kwargs)
    if run_config.stderr is not None and level >= logging.INFO:
        run_config.stderr.write(f"  {message}\n")
