import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, Optional, Union, get_args, get_origin, get_type_hints

import numpy as np
import yaml

from tdot.core.exceptions import ConfigurationError
from tdot.domain.models import ModelParams

METHODS = ("static", "floquet", "gpp", "oracle", "compare")
FORMATS = ("csv", "json")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass
class SweepConfig:
    method: str = "floquet"
    k_min: float = 0.05
    k_max: float = 3.09
    k_points: int = 200


@dataclass
class FloquetConfig:
    n_modes: int = 31


@dataclass
class GppConfig:
    nu_max: int = 8
    time_samples: int = 512
    quad_panels: int = 32
    quad_order: int = 64


@dataclass
class ResonanceConfig:
    scan_nu_min: int = -4
    scan_nu_max: int = 4
    scan_points: int = 2000
    strong_threshold: float = 0.9
    flip_k: float = 1.0


@dataclass
class OracleConfig:
    L: int = 4000
    sigma: float = 40.0
    dt: Optional[float] = None
    oracle_enabled: bool = False
    oracle_points: int = 5


@dataclass
class OutputConfig:
    output: Optional[str] = None
    format: str = "csv"


SECTIONS = {
    "model": ModelParams,
    "sweep": SweepConfig,
    "floquet": FloquetConfig,
    "gpp": GppConfig,
    "resonance": ResonanceConfig,
    "oracle": OracleConfig,
    "output": OutputConfig,
}
TOP_LEVEL = {"log_level": str, "threads": Optional[int], "self_check": bool}


def _flat_keys() -> Dict[str, tuple]:
    keys = {}
    for section, cls in SECTIONS.items():
        hints = get_type_hints(cls)
        for f in fields(cls):
            keys[f.name] = (section, hints[f.name])
    for name, kind in TOP_LEVEL.items():
        keys[name] = (None, kind)
    return keys


FLAT_KEYS = _flat_keys()


def _coerce(key: str, value: Any, kind) -> Any:
    if value is None:
        if get_origin(kind) is Union and type(None) in get_args(kind):
            return None
        raise ConfigurationError("value is required", field=key)
    if get_origin(kind) is Union:
        kind = next(arg for arg in get_args(kind) if arg is not type(None))
    if isinstance(value, str) and kind is not str:
        value = yaml.safe_load(value)
    try:
        if kind is bool:
            if not isinstance(value, bool):
                raise TypeError(value)
            return value
        if kind is int:
            if isinstance(value, bool) or float(value) != int(value):
                raise TypeError(value)
            return int(value)
        return kind(value)
    except (TypeError, ValueError):
        raise ConfigurationError(
            f"expected {kind.__name__}, got {value!r}", field=key
        ) from None


@dataclass
class RunConfig:
    model: ModelParams = field(default_factory=ModelParams)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    floquet: FloquetConfig = field(default_factory=FloquetConfig)
    gpp: GppConfig = field(default_factory=GppConfig)
    resonance: ResonanceConfig = field(default_factory=ResonanceConfig)
    oracle: OracleConfig = field(default_factory=OracleConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    log_level: str = "INFO"
    threads: Optional[int] = None
    self_check: bool = False

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        s = self.sweep
        if s.method not in METHODS:
            raise ConfigurationError(f"must be one of {METHODS}", field="method")
        if not s.k_min > 0:
            raise ConfigurationError("must be > 0", field="k_min")
        if not s.k_max < np.pi:
            raise ConfigurationError("must be < pi", field="k_max")
        if not s.k_min < s.k_max:
            raise ConfigurationError("must be below k_max", field="k_min")
        if s.k_points < 2:
            raise ConfigurationError("must be >= 2", field="k_points")
        n_modes = self.floquet.n_modes
        if n_modes < 5 or n_modes % 2 == 0:
            raise ConfigurationError("must be odd and >= 5", field="n_modes")
        if self.gpp.nu_max < 4:
            raise ConfigurationError("must be >= 4", field="nu_max")
        if self.gpp.time_samples < 4 * self.gpp.nu_max:
            raise ConfigurationError("too few samples for nu_max", field="time_samples")
        if self.gpp.quad_panels < 1 or self.gpp.quad_order < 2:
            raise ConfigurationError(
                "quadrature needs panels >= 1 and order >= 2", field="quad_order"
            )
        r = self.resonance
        if r.scan_nu_min > r.scan_nu_max:
            raise ConfigurationError("empty harmonic range", field="scan_nu_min")
        if r.scan_points < 2:
            raise ConfigurationError("must be >= 2", field="scan_points")
        if not 0 < r.strong_threshold <= 1:
            raise ConfigurationError("must lie in (0, 1]", field="strong_threshold")
        if not 0 < r.flip_k < np.pi:
            raise ConfigurationError("must lie in (0, pi)", field="flip_k")
        if self.oracle.dt is not None and not self.oracle.dt > 0:
            raise ConfigurationError("must be positive", field="dt")
        if self.output.format not in FORMATS:
            raise ConfigurationError(f"must be one of {FORMATS}", field="format")
        if self.threads is not None and self.threads < 1:
            raise ConfigurationError("must be >= 1", field="threads")
        self.log_level = self.log_level.upper()
        if self.log_level not in LOG_LEVELS:
            raise ConfigurationError(f"must be one of {LOG_LEVELS}", field="log_level")

    @property
    def workers(self) -> int:
        return self.threads or os.cpu_count() or 1

    def to_dict(self) -> Dict[str, Any]:
        data = {name: asdict(getattr(self, name)) for name in SECTIONS}
        data.update({name: getattr(self, name) for name in TOP_LEVEL})
        return data

    def to_flat(self) -> Dict[str, Any]:
        flat = {}
        for key, (section, _) in FLAT_KEYS.items():
            owner = getattr(self, section) if section else self
            flat[key] = getattr(owner, key)
        return flat

    @classmethod
    def from_flat(cls, flat: Dict[str, Any]) -> "RunConfig":
        sections: Dict[str, Dict[str, Any]] = {name: {} for name in SECTIONS}
        top: Dict[str, Any] = {}
        for key, value in flat.items():
            if key not in FLAT_KEYS:
                raise ConfigurationError("unknown configuration key", field=key)
            section, kind = FLAT_KEYS[key]
            value = _coerce(key, value, kind)
            if section:
                sections[section][key] = value
            else:
                top[key] = value
        built = {name: SECTIONS[name](**values) for name, values in sections.items()}
        return cls(**built, **top)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        """Build from the sectioned layout written by ``to_dict``."""
        return cls.from_flat(flatten(data))


def flatten(data: Dict[str, Any]) -> Dict[str, Any]:
    flat: Dict[str, Any] = {}
    for name, value in (data or {}).items():
        if name in SECTIONS:
            if not isinstance(value, dict):
                raise ConfigurationError("section must be a mapping", field=name)
            for key, item in value.items():
                if FLAT_KEYS.get(key, (None,))[0] != name:
                    raise ConfigurationError(f"unknown key in section {name}", field=key)
                flat[key] = item
        elif name in TOP_LEVEL:
            flat[name] = value
        else:
            raise ConfigurationError("unknown configuration section", field=name)
    return flat


class ConfigLoader:
    """Resolves a RunConfig: CLI overrides > TDOT_<KEY> environment > file > defaults."""

    def __init__(self, config_path: Optional[str] = None):
        self.config_path = config_path or os.getenv("TDOT_CONFIG")

    def load_config(self, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
        flat = self._read_file()

        for key in FLAT_KEYS:
            env_value = os.getenv(f"TDOT_{key.upper()}")
            if env_value is not None:
                flat[key] = env_value

        for key, value in (overrides or {}).items():
            if value is not None:
                flat[key] = value

        return RunConfig.from_flat(flat)

    def _read_file(self) -> Dict[str, Any]:
        if not self.config_path:
            return {}
        path = Path(self.config_path)
        if not path.exists():
            raise ConfigurationError(f"Config file not found: {path}", field="config")

        try:
            with open(path, "r") as f:
                data = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigurationError(f"Invalid YAML in {path}: {e}", field="config")
        if data is None:
            return {}
        if not isinstance(data, dict):
            raise ConfigurationError("top level must be a mapping", field="config")
        return flatten(data)

    @staticmethod
    def from_dict(data: Dict[str, Any]) -> RunConfig:
        return RunConfig.from_dict(data)
