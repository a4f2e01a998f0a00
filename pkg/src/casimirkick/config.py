"""Run configuration: strict INI-style files with one section per concern.

Example::

    [cavity]
    omega = 6.283185307179586e9
    volume = 1e-6
    lambda_sq = 3.14e8

    [electron]
    v0 = 1e7
    flight_length = 0.01

    [sweep]
    axis1 = theta, 0.0, 12.566370614359172, 50
    axis2 = r, 0.0, 0.2, 50
"""

from __future__ import annotations

import configparser
import difflib
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .exceptions import ConfigError, ValidationError
from .params import CavityConfig, ElectronConfig, reduce
from .propagator import TOL_RANGE, Frame, ModelFlags

__all__ = [
    "SWEEP_PARAMETERS",
    "OUTPUTS",
    "Axis",
    "SweepSpec",
    "OutputSpec",
    "RunConfig",
    "load_config",
    "parse_config",
    "resolved_config_text",
]

SWEEP_PARAMETERS = ("r", "theta", "n_th", "temperature", "v0", "L")
OUTPUTS = ("delta_k", "f", "dvar_paper", "mean_n", "snr")

_SCHEMA = {
    "cavity": {
        "omega": (float, None),
        "volume": (float, None),
        "lambda_sq": (float, 0.0),
        "temperature": (float, 0.0),
        "n_th": (float, None),
    },
    "electron": {
        "v0": (float, None),
        "flight_length": (float, None),
        "sigma_x": (float, 1e-6),
    },
    "model": {
        "rwa": (bool, True),
        "backaction": (bool, False),
        "frame": (str, "rotating"),
        "tol": (float, 1e-9),
        "electron_state": (str, "minimum"),
        "narrowing": (float, 100.0),
    },
    "fock": {
        "dim": (int, None),
    },
    "sweep": {
        "axis1": (str, None),
        "axis2": (str, None),
        "outputs": (str, ",".join(OUTPUTS)),
    },
    "output": {
        "csv": (str, None),
        "svg": (str, None),
        "svg_column": (str, "delta_k"),
    },
}
_REQUIRED = {("cavity", "omega"), ("cavity", "volume"), ("electron", "v0"), ("electron", "flight_length")}


@dataclass(frozen=True)
class Axis:
    name: str
    min: float
    max: float
    count: int

    def __post_init__(self):
        if self.name not in SWEEP_PARAMETERS:
            raise ValidationError("sweep", f"unknown axis parameter {self.name!r}; choose from {', '.join(SWEEP_PARAMETERS)}")
        if self.count < 2:
            raise ValidationError("sweep", f"axis {self.name}: count must be >= 2, got {self.count}")
        if not self.min < self.max:
            raise ValidationError("sweep", f"axis {self.name}: min must be < max")

    def values(self):
        return np.linspace(self.min, self.max, self.count)

    def text(self):
        return f"{self.name}, {self.min!r}, {self.max!r}, {self.count}"


@dataclass(frozen=True)
class SweepSpec:
    axis1: Axis
    axis2: Axis | None = None
    outputs: tuple = OUTPUTS

    def __post_init__(self):
        if self.axis2 is not None and self.axis2.name == self.axis1.name:
            raise ValidationError("sweep", "axes must name distinct parameters")
        names = {self.axis1.name, getattr(self.axis2, "name", None)}
        if {"n_th", "temperature"} <= names:
            raise ValidationError("sweep", "n_th and temperature cannot be swept together")
        unknown = [o for o in self.outputs if o not in OUTPUTS]
        if unknown or not self.outputs:
            raise ValidationError("sweep", f"outputs must be a non-empty subset of {', '.join(OUTPUTS)}")
        # fixed column order regardless of how outputs were listed
        object.__setattr__(self, "outputs", tuple(o for o in OUTPUTS if o in self.outputs))

    @property
    def axes(self):
        return (self.axis1,) if self.axis2 is None else (self.axis1, self.axis2)


@dataclass(frozen=True)
class OutputSpec:
    csv: str | None = None
    svg: str | None = None
    svg_column: str = "delta_k"


@dataclass(frozen=True)
class RunConfig:
    cavity: CavityConfig
    electron: ElectronConfig
    flags: ModelFlags = ModelFlags()
    tol: float = 1e-9
    electron_state: str = "minimum"
    narrowing: float = 100.0
    fock_dim: int | None = None
    sweep: SweepSpec | None = None
    output: OutputSpec = OutputSpec()
    warnings: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if not TOL_RANGE[0] <= self.tol <= TOL_RANGE[1]:
            raise ValidationError("tol", f"must lie in [{TOL_RANGE[0]:g}, {TOL_RANGE[1]:g}], got {self.tol!r}")
        if self.electron_state not in ("minimum", "narrow"):
            raise ValidationError("electron_state", f"must be 'minimum' or 'narrow', got {self.electron_state!r}")
        if not self.narrowing >= 1:
            raise ValidationError("narrowing", f"must be >= 1, got {self.narrowing!r}")
        if self.fock_dim is not None and self.fock_dim < 2:
            raise ValidationError("dim", f"must be >= 2, got {self.fock_dim!r}")
        if self.output.svg_column not in OUTPUTS:
            raise ValidationError("svg_column", f"must be one of {', '.join(OUTPUTS)}")

    @property
    def groups(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return reduce(self.cavity, self.electron)

    def with_tol(self, tol):
        return replace(self, tol=float(tol))


def _suggest(key, known):
    close = difflib.get_close_matches(key, list(known), n=1, cutoff=0.5)
    return f"; did you mean {close[0]!r}?" if close else ""


def _convert(section, key, kind, raw):
    where = f"[{section}] {key}"
    text = raw.strip()
    try:
        if kind is float:
            value = float(text)
            if not math.isfinite(value):
                raise ValueError
            return value
        if kind is int:
            return int(text)
        if kind is bool:
            lowered = text.lower()
            if lowered in ("true", "yes", "on", "1"):
                return True
            if lowered in ("false", "no", "off", "0"):
                return False
            raise ValueError
    except ValueError:
        raise ConfigError(f"{where}: cannot parse {text!r} as {kind.__name__}") from None
    return text


def _axis(text):
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 4:
        raise ConfigError(f"[sweep] axis: expected 'name, min, max, count', got {text!r}")
    name, lo, hi, count = parts
    try:
        return Axis(name, float(lo), float(hi), int(count))
    except ValueError:
        raise ConfigError(f"[sweep] axis: cannot parse {text!r}") from None


def parse_config(text, source="<string>"):
    """Parse and validate configuration text; see module docstring for the layout."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None

    values = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"{source}: unknown section [{section}]{_suggest(section, _SCHEMA)}")
        for key, raw in parser.items(section):
            if key not in _SCHEMA[section]:
                raise ConfigError(f"{source}: unknown key {key!r} in [{section}]{_suggest(key, _SCHEMA[section])}")
            values[section, key] = _convert(section, key, _SCHEMA[section][key][0], raw)
    missing = sorted(f"[{s}] {k}" for s, k in _REQUIRED if (s, k) not in values)
    if missing:
        raise ConfigError(f"{source}: missing required key(s): {', '.join(missing)}")

    def get(section, key):
        return values.get((section, key), _SCHEMA[section][key][1])

    try:
        cavity = CavityConfig(
            omega=get("cavity", "omega"),
            volume=get("cavity", "volume"),
            lambda_sq=get("cavity", "lambda_sq"),
            temperature=get("cavity", "temperature"),
            n_th=get("cavity", "n_th"),
        )
        electron = ElectronConfig(
            v0=get("electron", "v0"),
            flight_length=get("electron", "flight_length"),
            sigma_x=get("electron", "sigma_x"),
        )
        try:
            frame = Frame(get("model", "frame"))
        except ValueError:
            raise ValidationError("frame", f"must be 'rotating' or 'lab', got {get('model', 'frame')!r}") from None
        flags = ModelFlags(rwa=get("model", "rwa"), backaction=get("model", "backaction"), frame=frame)
        sweep = None
        if get("sweep", "axis1") is not None:
            axis2 = get("sweep", "axis2")
            outputs = tuple(o.strip() for o in get("sweep", "outputs").split(",") if o.strip())
            sweep = SweepSpec(_axis(get("sweep", "axis1")), _axis(axis2) if axis2 else None, outputs)
        elif get("sweep", "axis2") is not None:
            raise ValidationError("sweep", "axis2 given without axis1")
        output = OutputSpec(get("output", "csv"), get("output", "svg"), get("output", "svg_column"))
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            reduce(cavity, electron)
        cfg = RunConfig(
            cavity=cavity,
            electron=electron,
            flags=flags,
            tol=get("model", "tol"),
            electron_state=get("model", "electron_state"),
            narrowing=get("model", "narrowing"),
            fock_dim=get("fock", "dim"),
            sweep=sweep,
            output=output,
            warnings=tuple(str(w.message) for w in caught),
        )
    except ValidationError as exc:
        raise ConfigError(f"{source}: invalid value for {exc}") from exc
    return cfg


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc.strerror}") from None
    return parse_config(text, source=str(path))


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def resolved_config_text(cfg):
    """Canonical INI text of ``cfg`` with every default filled in.

    Feeding this text back to :func:`parse_config` reproduces ``cfg``.
    """
    lines = ["[cavity]"]
    for key in ("omega", "volume", "lambda_sq", "temperature"):
        lines.append(f"{key} = {_fmt(getattr(cfg.cavity, key))}")
    if cfg.cavity.n_th is not None:
        lines.append(f"n_th = {_fmt(cfg.cavity.n_th)}")
    lines.append("")
    lines.append("[electron]")
    for key in ("v0", "flight_length", "sigma_x"):
        lines.append(f"{key} = {_fmt(getattr(cfg.electron, key))}")
    lines += [
        "",
        "[model]",
        f"rwa = {_fmt(cfg.flags.rwa)}",
        f"backaction = {_fmt(cfg.flags.backaction)}",
        f"frame = {cfg.flags.frame.value}",
        f"tol = {_fmt(cfg.tol)}",
        f"electron_state = {cfg.electron_state}",
        f"narrowing = {_fmt(cfg.narrowing)}",
    ]
    if cfg.fock_dim is not None:
        lines += ["", "[fock]", f"dim = {cfg.fock_dim}"]
    if cfg.sweep is not None:
        lines += ["", "[sweep]", f"axis1 = {cfg.sweep.axis1.text()}"]
        if cfg.sweep.axis2 is not None:
            lines.append(f"axis2 = {cfg.sweep.axis2.text()}")
        lines.append(f"outputs = {', '.join(cfg.sweep.outputs)}")
    out = cfg.output
    lines += ["", "[output]"]
    if out.csv:
        lines.append(f"csv = {out.csv}")
    if out.svg:
        lines.append(f"svg = {out.svg}")
    lines.append(f"svg_column = {out.svg_column}")
    return "\n".join(lines) + "\n"
