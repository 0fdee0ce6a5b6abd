"""Run configuration: the reproducibility record embedded in every artifact."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, fields
from typing import Optional

from .approximants import DEFAULT_TOL
from .trace import DEFAULT_ESCAPE_BOUND, DEFAULT_MAX_STEPS

FORMATS = ("json", "csv")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SpectralConfig:
    V: float = 1.0
    k: Optional[int] = None  # None means the command's level policy decides
    tol: float = DEFAULT_TOL
    max_steps: int = DEFAULT_MAX_STEPS
    escape_bound: float = DEFAULT_ESCAPE_BOUND
    omega: float = 0.0
    seed: int = 0
    format: str = "json"
    N: Optional[int] = None

    def __post_init__(self):
        if self.V < 0:
            raise ConfigError("V must be nonnegative")
        if self.k is not None and self.k < 0:
            raise ConfigError("k must be nonnegative")
        if not self.tol > 0:
            raise ConfigError("tol must be positive")
        if self.max_steps < 1:
            raise ConfigError("max_steps must be >= 1")
        if not self.escape_bound > 1:
            raise ConfigError("escape_bound must exceed 1")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        if self.N is not None and self.N < 1:
            raise ConfigError("N must be >= 1")

    def replace(self, **changes) -> "SpectralConfig":
        return dataclasses.replace(self, **{k: v for k, v in changes.items() if v is not None})

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


_CASTS = {"V": float, "k": int, "tol": float, "max_steps": int, "escape_bound": float,
          "omega": float, "seed": int, "format": str, "N": int}


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines; blank lines and ``#`` comments are ignored."""
    out = {}
    known = {f.name for f in fields(SpectralConfig)}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            out[key] = _CASTS[key](value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from exc
    return out


def load_config(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        return parse_config_text(fh.read())
