"""Scenario configuration and its flat ``key = value`` text format."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ParameterError
from .modem import QamSpec
from .precoding import SCHEMES, LgPolicy


def parse_grid(text: str) -> tuple[float, ...]:
    """``start:step:stop`` (inclusive) or a comma-separated list."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ParameterError(f"grid {text!r} must look like start:step:stop")
        start, step, stop = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise ParameterError(f"grid {text!r} is empty or has a non-positive step")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(round(start + i * step, 12) for i in range(count))
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise ParameterError(f"cannot parse grid {text!r}") from None


def parse_schemes(text: str) -> tuple[str, ...]:
    names = tuple(s.strip().lower() for s in text.split(",") if s.strip())
    unknown = [s for s in names if s not in SCHEMES]
    if unknown or not names:
        raise ParameterError(f"unknown scheme(s) {unknown or text!r}; choose from {SCHEMES}")
    return names


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ParameterError(f"not a boolean: {text!r}")


@dataclass(frozen=True)
class SystemConfig:
    """Every parameter of a simulation scenario. Defaults follow the
    ``N=32, K=16, G=4, 16-QAM, omega=0.5, Delta=10 deg`` setup."""

    N: int = 32
    K: int = 16
    G: int = 4
    M: int = 16
    omega: float = 0.5
    delta_deg: float = 10.0
    T: int = 100
    ebn0_grid_db: tuple[float, ...] = (0.0, 4.0, 8.0, 12.0, 16.0, 20.0, 24.0)
    max_blocks: int = 2000
    min_bit_errors: int = 200
    seed: int = 1
    lg_policy: LgPolicy = field(default_factory=LgPolicy)
    schemes: tuple[str, ...] = SCHEMES
    literal_eq2: bool = False
    quad_points: int = 512

    def __post_init__(self):
        if self.N < 1 or self.K < 1 or self.G < 1:
            raise ParameterError("N, K and G must be positive")
        if self.K % self.G:
            raise ParameterError(f"G={self.G} does not divide K={self.K}")
        QamSpec(self.M)
        if self.T < 1:
            raise ParameterError("T must be at least 1")
        if self.max_blocks < 0 or self.min_bit_errors < 0:
            raise ParameterError("block and error counts must be non-negative")
        if not 0 <= self.seed < 2**64:
            raise ParameterError("seed must fit in 64 bits")
        if not self.delta_deg > 0:
            raise ParameterError("delta_deg must be positive")
        parse_schemes(",".join(self.schemes))

    @property
    def users_per_group(self) -> int:
        return self.K // self.G

    @property
    def load_factor(self) -> float:
        """``beta = K / N``."""
        return self.K / self.N

    @property
    def delta(self) -> float:
        return math.radians(self.delta_deg)

    @property
    def qam(self) -> QamSpec:
        return QamSpec(self.M)

    @property
    def p_tx(self) -> float:
        return self.K * self.qam.symbol_variance

    def replace(self, **changes) -> "SystemConfig":
        return dataclasses.replace(self, **changes)

    def to_items(self) -> list[tuple[str, str]]:
        """Key/value pairs in the text-file format, in field order."""
        out = []
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if f.name == "ebn0_grid_db":
                text = ",".join(format(x, "g") for x in v)
            elif f.name == "schemes":
                text = ",".join(v)
            elif isinstance(v, bool):
                text = str(v).lower()
            else:
                text = str(v)
            out.append((f.name, text))
        return out


_CONVERTERS = {
    "N": int,
    "K": int,
    "G": int,
    "M": int,
    "omega": float,
    "delta_deg": float,
    "T": int,
    "ebn0_grid_db": parse_grid,
    "max_blocks": int,
    "min_bit_errors": int,
    "seed": int,
    "lg_policy": LgPolicy.parse,
    "schemes": parse_schemes,
    "literal_eq2": _parse_bool,
    "quad_points": int,
}


class ConfigKeyError(ParameterError):
    def __init__(self, key: str, reason: str):
        self.key = key
        super().__init__(f"config key {key!r}: {reason}")


def config_from_mapping(values: dict[str, str], base: SystemConfig | None = None) -> SystemConfig:
    """Build a config from raw string values; unknown or malformed keys raise
    :class:`ConfigKeyError` naming the key."""
    changes = {}
    for key, raw in values.items():
        conv = _CONVERTERS.get(key)
        if conv is None:
            raise ConfigKeyError(key, "unknown key")
        try:
            changes[key] = conv(raw)
        except (ValueError, ParameterError) as exc:
            raise ConfigKeyError(key, str(exc)) from None
    return dataclasses.replace(base or SystemConfig(), **changes)


def parse_config_text(text: str) -> dict[str, str]:
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigKeyError(line, f"line {lineno} is not 'key = value'")
        key, value = (p.strip() for p in line.split("=", 1))
        values[key] = value
    return values


def load_config(path: str | Path, overrides: dict[str, str] | None = None) -> SystemConfig:
    values = parse_config_text(Path(path).read_text(encoding="utf-8"))
    values.update(overrides or {})
    return config_from_mapping(values)


def dump_config(cfg: SystemConfig) -> str:
    return "".join(f"{k} = {v}\n" for k, v in cfg.to_items())
