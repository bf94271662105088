"""Sweep configuration files.

Format: one ``key = value`` per line, ``#`` starts a comment, lists are comma
separated and reals may be written as fractions (``r = 1/3``)::

    config_id = separation
    beta = 2.6
    r = 1/3
    q = 5/6
    n_values = 100, 316, 1000
    trials = 20
    modes = gaussian, binary
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, fields, replace
from fractions import Fraction
from pathlib import Path
from typing import Tuple

from ..errors import ConfigError, InvalidParams
from ..spectra import BiLevelParams

__all__ = ["SweepConfig", "parse_config", "load_config", "DEFAULT_N_VALUES", "MODES"]

DEFAULT_N_VALUES = (10, 18, 32, 56, 100, 178, 316, 562, 1000, 1778, 3162)
MODES = ("gaussian", "binary")


def _real(text: str) -> float:
    text = text.strip()
    try:
        if "/" in text:
            return float(Fraction(text))
        return float(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"not a real number: {text!r}") from exc


def _int(text: str) -> int:
    try:
        return int(text.strip())
    except ValueError as exc:
        raise ConfigError(f"not an integer: {text!r}") from exc


def _bool(text: str) -> bool:
    val = text.strip().lower()
    if val in ("1", "true", "yes", "on"):
        return True
    if val in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _list(text: str):
    return [item.strip() for item in text.split(",") if item.strip()]


@dataclass(frozen=True)
class SweepConfig:
    config_id: str
    beta: float
    r: float
    q: float
    n_values: Tuple[int, ...] = DEFAULT_N_VALUES
    trials: int = 100
    alpha: float = 1e-3
    sigma: float = 1.0
    grid_size: int = 8192
    master_seed: int = 0
    modes: Tuple[str, ...] = MODES
    diagnostics_enabled: bool = False
    record_wall_time: bool = False
    cell_timeout_s: float = field(default=120.0)

    def __post_init__(self):
        if not self.config_id or any(c in self.config_id for c in ",\n\r\""):
            raise ConfigError(f"invalid config_id {self.config_id!r}")
        if not self.n_values:
            raise ConfigError("n_values is empty")
        if any(b <= a for a, b in zip(self.n_values, self.n_values[1:])):
            raise ConfigError("n_values must be strictly increasing")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.alpha < 0:
            raise ConfigError("alpha must be >= 0")
        if self.sigma < 0:
            raise ConfigError("sigma must be >= 0")
        if self.grid_size < 1024:
            raise ConfigError("grid_size must be >= 1024")
        if not 0 <= self.master_seed < 2 ** 64:
            raise ConfigError("master_seed must fit in 64 unsigned bits")
        if not self.modes or any(m not in MODES for m in self.modes) or len(set(self.modes)) != len(self.modes):
            raise ConfigError(f"modes must be a nonempty subset of {MODES}, got {self.modes}")
        for n in self.n_values:
            try:
                BiLevelParams(n, self.beta, self.r, self.q)
            except InvalidParams as exc:
                raise ConfigError(f"n = {n}: {exc}") from exc

    def canonical(self) -> str:
        """Stable text form used for provenance hashing."""
        parts = []
        for f in fields(self):
            val = getattr(self, f.name)
            if isinstance(val, tuple):
                val = ",".join(str(v) for v in val)
            elif isinstance(val, float):
                val = repr(val)
            parts.append(f"{f.name}={val}")
        return "\n".join(parts)

    def digest(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:16]

    def with_trials(self, trials: int) -> "SweepConfig":
        return replace(self, trials=trials)


_PARSERS = {
    "config_id": str.strip,
    "beta": _real,
    "r": _real,
    "q": _real,
    "n_values": lambda t: tuple(_int(v) for v in _list(t)),
    "trials": _int,
    "alpha": _real,
    "sigma": _real,
    "grid_size": _int,
    "master_seed": _int,
    "modes": lambda t: tuple(_list(t)),
    "diagnostics_enabled": _bool,
    "diagnostics": _bool,
    "record_wall_time": _bool,
    "cell_timeout_s": _real,
}


def parse_config(text: str) -> SweepConfig:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in _PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key == "diagnostics":
            key = "diagnostics_enabled"
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = _PARSERS[key](val)
    for required in ("config_id", "beta", "r", "q"):
        if required not in values:
            raise ConfigError(f"missing required key {required!r}")
    return SweepConfig(**values)


def load_config(path) -> SweepConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))
