"""Run configuration: flat ``section.key = value`` text files.

Lines starting with ``#`` are comments; a ``[section]`` header prefixes the
keys that follow it.  Unknown keys and unparsable values raise
:class:`~hamspec.errors.ConfigError` naming the key and line.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .errors import ConfigError
from .problem import parse_potential_mode


@dataclass
class ModelConfig:
    a: float = 1.0
    m: float = math.sqrt(2.0)
    potential_mode: str = "cubic"
    discretization: str = "lattice"


@dataclass
class GridConfig:
    L: float = 40.0
    N: int = 801


@dataclass
class SpectralConfig:
    kernel_tol: float = 1e-8
    Omega_max: float = 0.0  # 0 means 12 m
    omega_margin: float = 1e-6
    panels: int = 16
    panel_width: float = 0.5


@dataclass
class ExpansionConfig:
    recon_tol: float = 1e-2
    quad_tol: float = 0.02


@dataclass
class TimeConfig:
    T: float = 20.0
    dt: float = 0.01
    sample: float = 0.5


@dataclass
class ValidateConfig:
    fine_N: int = 1601
    random_systems: int = 200


@dataclass
class RunConfig:
    model: ModelConfig = field(default_factory=ModelConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    spectral: SpectralConfig = field(default_factory=SpectralConfig)
    expansion: ExpansionConfig = field(default_factory=ExpansionConfig)
    time: TimeConfig = field(default_factory=TimeConfig)
    validate: ValidateConfig = field(default_factory=ValidateConfig)
    seed: int = 0
    output_dir: str = "out"

    @property
    def omega_max(self) -> float:
        return self.spectral.Omega_max if self.spectral.Omega_max > 0 else 12.0 * self.model.m

    def validate_values(self) -> None:
        """Range checks; raise :class:`ConfigError` on the first bad key."""
        positive = {
            "model.a": self.model.a,
            "model.m": self.model.m,
            "grid.L": self.grid.L,
            "spectral.kernel_tol": self.spectral.kernel_tol,
            "spectral.omega_margin": self.spectral.omega_margin,
            "spectral.panel_width": self.spectral.panel_width,
            "expansion.recon_tol": self.expansion.recon_tol,
            "expansion.quad_tol": self.expansion.quad_tol,
            "time.T": self.time.T,
            "time.dt": self.time.dt,
            "time.sample": self.time.sample,
        }
        for key, val in positive.items():
            if not val > 0:
                raise ConfigError(f"must be positive, got {val}", key)
        if self.spectral.Omega_max < 0:
            raise ConfigError("must be non-negative", "spectral.Omega_max")
        if self.grid.N < 3:
            raise ConfigError("needs at least 3 points", "grid.N")
        if self.validate.fine_N < 3:
            raise ConfigError("needs at least 3 points", "validate.fine_N")
        if self.spectral.panels < 1:
            raise ConfigError("needs at least one node per panel", "spectral.panels")
        try:
            parse_potential_mode(self.model.potential_mode)
        except ValueError as exc:
            raise ConfigError(str(exc), "model.potential_mode") from None
        if self.model.discretization not in ("lattice", "sampled"):
            raise ConfigError("expected 'lattice' or 'sampled'", "model.discretization")

    def to_flat(self) -> dict[str, object]:
        flat: dict[str, object] = {}
        for f in fields(self):
            val = getattr(self, f.name)
            if hasattr(val, "__dataclass_fields__"):
                for k, v in asdict(val).items():
                    flat[f"{f.name}.{k}"] = v
            else:
                flat[f.name] = val
        return flat

    def dumps(self) -> str:
        """Normalized text form; :func:`loads` of it gives an equal config."""
        return "".join(f"{k} = {_format(v)}\n" for k, v in self.to_flat().items())


def _format(v: object) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _coerce(raw: str, target: type, key: str, line: int | None):
    try:
        if target is int:
            if raw.strip().lower() in ("true", "false"):
                raise ValueError
            val = float(raw)
            if val != int(val):
                raise ValueError
            return int(val)
        if target is float:
            return float(raw)
        return raw.strip().strip('"').strip("'")
    except ValueError:
        raise ConfigError(f"cannot parse '{raw}' as {target.__name__}", key, line) from None


def _schema(cfg: RunConfig) -> dict[str, tuple[object, str, type]]:
    out = {}
    for f in fields(cfg):
        val = getattr(cfg, f.name)
        if hasattr(val, "__dataclass_fields__"):
            for sub in fields(val):
                out[f"{f.name}.{sub.name}"] = (val, sub.name, type(getattr(val, sub.name)))
        else:
            out[f.name] = (cfg, f.name, type(val))
    return out


def loads(text: str) -> RunConfig:
    cfg = RunConfig()
    schema = _schema(cfg)
    section = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got '{line}'", None, lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if section and "." not in key:
            key = f"{section}.{key}"
        if key not in schema:
            raise ConfigError("unknown key", key, lineno)
        obj, attr, typ = schema[key]
        setattr(obj, attr, _coerce(value, typ, key, lineno))
    cfg.validate_values()
    return cfg


def load(path: str | Path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    return loads(text)
