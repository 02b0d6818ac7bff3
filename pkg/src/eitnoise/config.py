"""
Run configuration: flat ``key = value`` files and shipped presets.

One pair per line, ``#`` starts a comment.  The complex control field is
given as ``omega_c_re`` / ``omega_c_im``.  Numbers are written back with 17
significant digits so a dumped file re-parses to the identical config.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .lambda_system import AtomicParams, NoiseModel


class ConfigError(ValueError):
    pass


REQUIRED_KEYS = (
    "g", "N", "omega_c_re", "omega_c_im", "gamma_b", "gamma_c",
    "gamma_bc_prime", "gamma_bc_popexch", "length", "c_light",
    "omega_min", "omega_max", "omega_points",
)
FORMATS = ("csv", "jsonl")


@dataclass(frozen=True)
class RunConfig:
    g: float
    N: float
    omega_c_re: float
    omega_c_im: float
    gamma_b: float
    gamma_c: float
    gamma_bc_prime: float
    gamma_bc_popexch: float
    length: float
    c_light: float
    omega_min: float
    omega_max: float
    omega_points: int
    # optional; None means "derive from the other rates"
    gamma_ba: float | None = None
    gamma_ac: float | None = None
    gamma_total: float | None = None
    squeezing_r: float = 0.0
    probe_amplitude: float = 1e-3
    model: NoiseModel = NoiseModel.OFF_DIAGONAL
    output_path: str = ""
    format: str = "csv"

    def __post_init__(self):
        if self.omega_points < 2:
            raise ConfigError("omega_points must be at least 2")
        if not self.omega_min < self.omega_max:
            raise ConfigError("omega_min must be smaller than omega_max")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, got {self.format!r}")
        if self.squeezing_r < 0:
            raise ConfigError("squeezing_r must be non-negative")
        try:
            self.params
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    @property
    def params(self):
        return AtomicParams(
            g=self.g, N=self.N, omega_c=complex(self.omega_c_re, self.omega_c_im),
            gamma_b=self.gamma_b, gamma_c=self.gamma_c, gamma_ba=self.gamma_ba,
            gamma_ac=self.gamma_ac, gamma_bc_prime=self.gamma_bc_prime,
            gamma_bc_popexch=self.gamma_bc_popexch, gamma_total=self.gamma_total,
            length=self.length, c_light=self.c_light,
        )

    @property
    def omega_grid(self):
        return np.linspace(self.omega_min, self.omega_max, self.omega_points)

    def replace(self, **changes):
        try:
            return dataclasses.replace(self, **changes)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    def to_text(self):
        lines = []
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            lines.append(f"{f.name} = {_format_value(value)}")
        return "\n".join(lines) + "\n"


def _format_value(value):
    if isinstance(value, NoiseModel):
        return value.value
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


_FIELD_TYPES = {f.name: f for f in dataclasses.fields(RunConfig)}


def _convert(key, raw):
    if key == "model":
        try:
            return NoiseModel.parse(raw)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    if key in ("output_path", "format"):
        return raw
    if key == "omega_points":
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"{key} must be an integer, got {raw!r}") from None
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{key} must be a number, got {raw!r}") from None


def parse_pairs(text):
    """Parse ``key = value`` lines into a dict of raw strings."""
    pairs = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _FIELD_TYPES:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        pairs[key] = value
    return pairs


def build_config(values):
    """Build a RunConfig from a mapping of key -> raw string or value."""
    for key in REQUIRED_KEYS:
        if key not in values:
            raise ConfigError(f"missing required key {key!r}")
    kwargs = {}
    for key, raw in values.items():
        if key not in _FIELD_TYPES:
            raise ConfigError(f"unknown key {key!r}")
        kwargs[key] = _convert(key, raw) if isinstance(raw, str) else raw
    return RunConfig(**kwargs)


def parse_config(text, base=None):
    """Parse config text, layered on top of ``base`` (a dict of defaults) if given."""
    values = dict(base or {})
    values.update(parse_pairs(text))
    return build_config(values)


def load_config(path, base=None):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), base)


_DIMENSIONLESS = dict(g=1.0, N=1.0, c_light=1.0, omega_c_re=1.0, omega_c_im=0.0,
                      gamma_b=0.5, gamma_c=0.5, gamma_bc_popexch=0.0,
                      omega_min=-5.0, omega_max=5.0, omega_points=201)

# Rates in units of gamma_ba (= 1 unless stated).
PRESETS = {
    "weak-probe": dict(_DIMENSIONLESS, gamma_ba=0.5, gamma_ac=0.5, gamma_bc_prime=0.01,
                       length=1.0, probe_amplitude=0.01),
    "linear-response": dict(_DIMENSIONLESS, gamma_ba=1.0, gamma_ac=1.0, gamma_bc_prime=0.01,
                            length=100.0),
    "offdiag": dict(_DIMENSIONLESS, gamma_ba=1.0, gamma_ac=1.0, gamma_total=1.0,
                    gamma_bc_prime=0.1, gamma_bc_popexch=0.1, length=100.0,
                    model=NoiseModel.OFF_DIAGONAL),
    "popexch": dict(_DIMENSIONLESS, gamma_ba=1.0, gamma_ac=1.0, gamma_total=1.0,
                    gamma_bc_prime=0.1, gamma_bc_popexch=0.1, length=100.0,
                    model=NoiseModel.POPULATION_EXCHANGE),
    "transparent": dict(_DIMENSIONLESS, gamma_ba=1.0, gamma_ac=1.0, gamma_bc_prime=0.0,
                        length=100.0),
    "squeezing": dict(_DIMENSIONLESS, gamma_ba=1.0, gamma_ac=1.0, gamma_total=1.0,
                      gamma_bc_prime=1e-3, length=10.0, squeezing_r=0.3466),
    "entanglement": dict(_DIMENSIONLESS, gamma_ba=1.0, gamma_ac=1.0, gamma_bc_prime=0.0,
                         length=10.0, squeezing_r=0.5),
}


def preset_values(name):
    try:
        return dict(PRESETS[name])
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


def preset_config(name, **overrides):
    values = preset_values(name)
    values.update(overrides)
    return build_config(values)
