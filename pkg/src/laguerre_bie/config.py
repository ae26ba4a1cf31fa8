"""Run configuration: INI files, example presets and the resolved-config echo.

Precedence is preset (selected by ``example``) < config file < command-line
overrides. Every key has a default, so a run is fully described by the
resolved file written next to its outputs.
"""

import configparser
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from .geometry import EXAMPLE_CURVES, RadialCurve, TrigPolynomial, make_example_curve
from .inverse import InverseConfig
from .laguerre import LaguerreParams

EXAMPLES = ("example1", "example2", "custom")
MODES = ("simulate", "invert", "full")
CUSTOM_DEGREE = 32


class ConfigError(ValueError):
    """Invalid configuration value or file."""


@dataclass(frozen=True)
class RunConfig:
    mode: str = "full"
    example: str = "example1"
    # geometry
    inner: str = "rounded_rectangle"
    inner_scale: float = 0.5
    inner_radius: float = 0.5
    custom_radial: str = ""
    outer: str = "unit_circle"
    # Laguerre transform
    kappa: float = 1.0
    wave_speed: float = 1.0
    N: int = 10
    # grids (total node counts)
    M: int = 64
    M_forward: int = 128
    # inverse iteration
    J: int = 13
    reg_lambda: float = 0.01
    reg_decay: float = 0.9
    r0: float = 0.8
    max_iterations: int = 50
    stop_update_tol: float = 1e-4
    stop_residual_tol: float = 1e-10
    min_radius: float = 0.05
    max_halvings: int = 20
    line_search: bool = True
    sobolev_penalty: bool = False
    # data
    noise: float = 0.0
    seed: int = 7
    noise_on_g: bool = True
    # output
    out: str = "output"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.example not in EXAMPLES:
            raise ConfigError(f"example must be one of {EXAMPLES}, got {self.example!r}")
        for name in ("inner", "outer"):
            value = getattr(self, name)
            if value not in EXAMPLE_CURVES and not (name == "inner" and value == "custom"):
                raise ConfigError(f"{name} curve must be one of {EXAMPLE_CURVES}, got {value!r}")
        if self.inner == "custom" and not self.custom_radial.strip():
            raise ConfigError("inner = custom requires custom_radial")
        if self.N < 0:
            raise ConfigError("N must be >= 0")
        for name in ("M", "M_forward"):
            value = getattr(self, name)
            if value < 4 or value % 2:
                raise ConfigError(f"{name} must be an even integer >= 4, got {value}")
        if self.M_forward < self.M:
            raise ConfigError("M_forward must be >= M")
        if self.noise < 0:
            raise ConfigError("noise must be nonnegative")
        if not (self.kappa > 0 and self.wave_speed > 0):
            raise ConfigError("kappa and wave_speed must be positive")
        try:
            self.inverse_config()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    # derived objects
    def laguerre_params(self) -> LaguerreParams:
        return LaguerreParams(kappa=self.kappa, wave_speed=self.wave_speed, n_terms=self.N + 1)

    def inverse_config(self) -> InverseConfig:
        return InverseConfig(
            trig_degree=self.J, reg_lambda=self.reg_lambda, reg_decay=self.reg_decay,
            max_iterations=self.max_iterations, stop_update_tol=self.stop_update_tol,
            stop_residual_tol=self.stop_residual_tol, initial_radius=self.r0,
            min_radius=self.min_radius, max_halvings=self.max_halvings,
            line_search=self.line_search, sobolev_penalty=self.sobolev_penalty,
        )

    def inner_curve(self) -> RadialCurve:
        if self.inner == "custom":
            return custom_radial_curve(self.custom_radial)
        return make_example_curve(self.inner, radius=self.inner_radius, scale=self.inner_scale)

    def outer_curve(self) -> RadialCurve:
        return make_example_curve(self.outer)


PRESETS = {
    "example1": {},
    "example2": dict(inner="apple_inner", outer="apple_outer", J=5, reg_lambda=0.001, r0=0.6),
    "custom": {},
}

# INI layout: section -> ordered (ini key, field name)
LAYOUT = {
    "problem": (("example", "example"), ("inner", "inner"), ("inner_scale", "inner_scale"),
                ("inner_radius", "inner_radius"), ("custom_radial", "custom_radial"),
                ("outer", "outer")),
    "laguerre": (("kappa", "kappa"), ("a", "wave_speed"), ("N", "N")),
    "grid": (("M", "M"), ("M_forward", "M_forward")),
    "inverse": (("J", "J"), ("lambda", "reg_lambda"), ("reg_decay", "reg_decay"), ("r0", "r0"),
                ("max_iterations", "max_iterations"), ("stop_update_tol", "stop_update_tol"),
                ("stop_residual_tol", "stop_residual_tol"), ("min_radius", "min_radius"),
                ("max_halvings", "max_halvings"), ("line_search", "line_search"),
                ("sobolev_penalty", "sobolev_penalty")),
    "data": (("noise", "noise"), ("seed", "seed"), ("noise_on_g", "noise_on_g")),
    "output": (("directory", "out"),),
}
_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}
_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def custom_radial_curve(expression: str, degree: int = CUSTOM_DEGREE) -> RadialCurve:
    """Cavity from a radial expression in ``s`` (numpy functions allowed), projected on trig polynomials."""
    s = 2.0 * np.pi * np.arange(8 * degree) / (8 * degree)
    namespace = {name: getattr(np, name) for name in
                 ("sin", "cos", "tan", "exp", "log", "sqrt", "abs", "pi", "sinh", "cosh")}
    namespace["s"] = s
    try:
        values = np.broadcast_to(eval(expression, {"__builtins__": {}}, namespace), s.shape)
    except Exception as exc:  # user expression
        raise ConfigError(f"cannot evaluate custom_radial {expression!r}: {exc}") from None
    if not np.all(np.isfinite(values)) or values.min() <= 0:
        raise ConfigError("custom_radial must be finite and positive on [0, 2pi)")
    return RadialCurve(radial=TrigPolynomial.from_samples(values, degree), orientation=-1,
                       name="custom")


def _convert(name: str, raw: str):
    kind = _FIELD_TYPES[name]
    text = raw.strip()
    if kind in (bool, "bool"):
        if text.lower() in _TRUE:
            return True
        if text.lower() in _FALSE:
            return False
        raise ValueError(f"expected a boolean, got {text!r}")
    if kind in (int, "int"):
        return int(text)
    if kind in (float, "float"):
        return float(text)
    return text


def _line_of(lines, section, key):
    current = None
    for i, line in enumerate(lines, start=1):
        stripped = line.strip()
        if stripped.startswith("[") and stripped.endswith("]"):
            current = stripped[1:-1].strip()
            if key is None and current == section:
                return i
        elif current == section and stripped.split("=", 1)[0].strip() == key:
            return i
    return None


def read_config_file(path) -> dict:
    """Parse an INI file into ``{field name: value}`` (only keys present in the file)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str  # keys are case sensitive (N, M, J)
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    lines = text.splitlines()
    out = {}
    for section in parser.sections():
        if section not in LAYOUT:
            raise ConfigError(f"{path}:{_line_of(lines, section, None) or '?'}: unknown section "
                              f"[{section}]; expected one of {sorted(LAYOUT)}")
        keys = dict(LAYOUT[section])
        for key, raw in parser.items(section):
            where = f"{path}:{_line_of(lines, section, key) or '?'}"
            if key not in keys:
                raise ConfigError(f"{where}: unknown key {key!r} in [{section}]; "
                                  f"expected one of {sorted(keys)}")
            try:
                out[keys[key]] = _convert(keys[key], raw)
            except ValueError as exc:
                raise ConfigError(f"{where}: [{section}] {key}: {exc}") from None
    return out


def resolve(config_path=None, overrides: dict | None = None) -> RunConfig:
    """Combine preset, config file and overrides (``None`` values are ignored)."""
    from_file = read_config_file(config_path) if config_path else {}
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    example = overrides.get("example", from_file.get("example", "example1"))
    if example not in EXAMPLES:
        raise ConfigError(f"example must be one of {EXAMPLES}, got {example!r}")
    values = dict(PRESETS[example])
    values.update(from_file)
    values.update(overrides)
    values["example"] = example
    return replace(RunConfig(), **values) if values else RunConfig()


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def config_text(config: RunConfig) -> str:
    """INI text of every key actually used (resolved-config echo)."""
    parts = [f"# resolved configuration (mode: {config.mode})"]
    for section, keys in LAYOUT.items():
        parts.append(f"\n[{section}]")
        for key, name in keys:
            parts.append(f"{key} = {_fmt(getattr(config, name))}")
    return "\n".join(parts) + "\n"


def write_config(path, config: RunConfig) -> Path:
    path = Path(path)
    path.write_text(config_text(config))
    return path
