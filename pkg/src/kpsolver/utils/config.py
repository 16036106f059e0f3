"""
Configuration handling for kpsolve.

An experiment is described by an ExperimentConfig assembled from three
layers: built-in defaults (the two-soliton experiment on a 10 pi box), an
optional INI file with a single [KP] section, and command-line flags. Later
layers win.

The INI keys mirror the long command-line flags:

    [KP]
    solitons = 1.55,1.45;1.3,0
    lx = 10*pi
    nx = 128
    m = 128
    method = glm-cc

Length values accept "pi" expressions such as "10*pi", "pi/2" or "-2.5pi".
"""

import configparser
import logging
import math
import os
import re
from dataclasses import asdict, dataclass, fields, replace
from typing import Any, Callable, Dict, Mapping, NoReturn, Optional, Tuple, Union

from ..numerics.fields import Grid2D, Method, Quantity, default_workers, is_power_of_two
from ..numerics.scattering import ScatteringData, ScatteringDataError, make_data, parse_solitons
from ..numerics.spectral import WINDOW_ORDER, WINDOW_STRENGTH

APP_CONFIG_DIR = "kpsolver"
SECTION = "KP"

SOLVE_METHODS = (Method.GLM_RR, Method.GLM_CC, Method.DET_CC, Method.ANALYTIC)
STUDY_METHODS = (Method.GLM_RR, Method.GLM_CC, Method.DET_CC)
WINDOW_MODES = ("damp", "blend")

# kernel shift placing the two-soliton interaction inside the display region;
# it keeps e^{2 Theta} below e^25 on the 10 pi box at t <= 0.25
DEFAULT_XSHIFT = 10.0
DEFAULT_YSHIFT = 12.0

_PI_EXPR = re.compile(
    r"^(?P<coef>[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?)?\s*\*?\s*pi\s*(/\s*(?P<div>\d+(\.\d*)?))?$"
)


class ConfigError(Exception):
    """Raised when the merged configuration is invalid or unreadable."""

    pass


def parse_number(text: Union[str, float, int]) -> float:
    """
    Parse a float, allowing multiples of pi.

    Raises:
        ConfigError: If the text is neither a number nor a pi expression
    """
    if isinstance(text, (int, float)):
        return float(text)
    raw = text.strip().lower()
    match = _PI_EXPR.match(raw.replace("-pi", "-1pi").replace("+pi", "+1pi"))
    if match:
        coef = float(match.group("coef") or 1.0)
        div = float(match.group("div") or 1.0)
        if div == 0:
            raise ConfigError(f"Division by zero in '{text}'")
        return coef * math.pi / div
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"Not a number: '{text}'")


def _parse_int(text: Union[str, int]) -> int:
    try:
        return int(str(text).strip())
    except ValueError:
        raise ConfigError(f"Not an integer: '{text}'")


def _parse_bool(text: Union[str, bool]) -> bool:
    if isinstance(text, bool):
        return text
    value = str(text).strip().lower()
    if value in ("1", "yes", "true", "on"):
        return True
    if value in ("0", "no", "false", "off"):
        return False
    raise ConfigError(f"Not a boolean: '{text}'")


def _parse_methods(text: Union[str, Tuple[str, ...]]) -> Tuple[str, ...]:
    if isinstance(text, (tuple, list)):
        return tuple(text)
    return tuple(m.strip() for m in str(text).replace(";", ",").split(",") if m.strip())


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Every parameter of a solve, converge or evolve run.

    Defaults reproduce the two-soliton experiment: solitons (1.55, 1.45) and
    (1.3, 0) on Lx = Ly = 10 pi with a 2^7 x 2^7 grid and M = 2^7, the kernel
    shifted by (DEFAULT_XSHIFT, DEFAULT_YSHIFT), and evolve blending towards
    the exact far field at the window.
    """

    solitons: str = "1.55,1.45;1.3,0"
    Lx: float = 10.0 * math.pi
    Ly: float = 10.0 * math.pi
    Nx: int = 128
    Ny: int = 128
    M: int = 128
    t: float = 0.0
    method: str = Method.GLM_CC.value
    quantity: str = Quantity.U.value
    final_time: float = 0.25
    steps: int = 10_000
    window_order: int = WINDOW_ORDER
    window_strength: float = WINDOW_STRENGTH
    window_every: int = 1
    window_mode: str = "blend"
    xshift: float = DEFAULT_XSHIFT
    yshift: float = DEFAULT_YSHIFT
    methods: Tuple[str, ...] = ("glm-rr", "glm-cc", "det-cc")
    m_min: int = 2
    m_max: int = 9
    m_ref: int = 10
    point_x: float = 6.4
    point_y: float = 6.4
    compare_u: bool = False
    out: str = "kp-output"

    def scattering_data(self) -> ScatteringData:
        return make_data(parse_solitons(self.solitons), self.xshift, self.yshift)

    def grid(self, periodic: bool = False) -> Grid2D:
        return Grid2D(self.Lx, self.Ly, self.Nx, self.Ny, periodic=periodic)

    @property
    def m_exponents(self) -> Tuple[int, ...]:
        return tuple(range(self.m_min, self.m_max + 1))

    @property
    def point(self) -> Tuple[float, float]:
        return (self.point_x, self.point_y)

    def as_dict(self) -> Dict[str, Any]:
        values = asdict(self)
        values["methods"] = list(self.methods)
        return values

    def merged(self, overrides: Mapping[str, Any]) -> "ExperimentConfig":
        """Copy with every non-None override applied."""
        known = {f.name for f in fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise ConfigError(f"Unknown settings: {', '.join(sorted(unknown))}")
        changes = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, **changes)


# INI key -> (attribute, converter)
OPTIONS: Dict[str, Tuple[str, Callable[[Any], Any]]] = {
    "solitons": ("solitons", str),
    "lx": ("Lx", parse_number),
    "ly": ("Ly", parse_number),
    "nx": ("Nx", _parse_int),
    "ny": ("Ny", _parse_int),
    "m": ("M", _parse_int),
    "t": ("t", parse_number),
    "method": ("method", str),
    "quantity": ("quantity", str),
    "final_time": ("final_time", parse_number),
    "steps": ("steps", _parse_int),
    "window_order": ("window_order", _parse_int),
    "window_strength": ("window_strength", parse_number),
    "window_every": ("window_every", _parse_int),
    "window_mode": ("window_mode", str),
    "xshift": ("xshift", parse_number),
    "yshift": ("yshift", parse_number),
    "methods": ("methods", _parse_methods),
    "m_min": ("m_min", _parse_int),
    "m_max": ("m_max", _parse_int),
    "m_ref": ("m_ref", _parse_int),
    "point_x": ("point_x", parse_number),
    "point_y": ("point_y", parse_number),
    "compare_u": ("compare_u", _parse_bool),
    "out": ("out", str),
}


def get_config_file_path(app_name: str) -> str:
    """$XDG_CONFIG_HOME/kpsolver/<app_name>, defaulting to ~/.config."""
    config_dir = os.environ.get(
        "XDG_CONFIG_HOME", os.path.join(os.path.expanduser("~"), ".config")
    )
    return os.path.join(config_dir, APP_CONFIG_DIR, app_name)


def create_default_config(config_file: Union[str, Any], log: logging.Logger) -> None:
    """Write the default experiment as an INI file."""
    directory = os.path.dirname(str(config_file))
    if directory:
        os.makedirs(directory, exist_ok=True)

    defaults = ExperimentConfig()
    config = configparser.ConfigParser()
    config.add_section(SECTION)
    for key, (attr, _) in OPTIONS.items():
        value = getattr(defaults, attr)
        if attr in ("Lx", "Ly"):
            text = "10*pi"
        elif attr == "methods":
            text = ",".join(value)
        else:
            text = str(value)
        config.set(SECTION, key, text)

    with open(str(config_file), "w") as cfg_file:
        config.write(cfg_file)

    log.info(f"Initial config saved to {config_file}")


def read_config_file(config_file: str, log: logging.Logger) -> Dict[str, Any]:
    """
    Read the [KP] section into ExperimentConfig overrides.

    Args:
        config_file: Path of the INI file
        log: Logger for the keys read

    Returns:
        Typed values keyed by ExperimentConfig field name

    Raises:
        ConfigError: On unreadable files, unknown keys or unparsable values
    """
    config = configparser.ConfigParser()
    try:
        config.read(config_file)
    except configparser.Error as e:
        raise ConfigError(f"Cannot parse {config_file}: {e}")

    if not config.has_section(SECTION):
        log.debug(f"Config file {config_file} has no {SECTION} section")
        return {}

    values: Dict[str, Any] = {}
    for key, text in config.items(SECTION):
        if key not in OPTIONS:
            raise ConfigError(f"Unknown key '{key}' in {config_file}")
        attr, convert = OPTIONS[key]
        values[attr] = convert(text)
        log.debug(f"{key} = {text}")
    return values


def load_config(
    app_name: str,
    log: logging.Logger,
    config_path: Optional[str] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> ExperimentConfig:
    """
    Merge defaults, the config file and command-line overrides.

    An explicit config_path that does not exist is created with the defaults.
    Without config_path the XDG location is read only when present.
    """
    config = ExperimentConfig()

    config_file = config_path or get_config_file_path(app_name)
    log.debug(f"Config file path: {config_file}")
    if config_path and not os.path.exists(config_file):
        log.debug(f"Config file not found at {config_file}")
        create_default_config(config_file, log)

    if os.path.exists(config_file):
        log.debug(f"Loading configuration file {config_file}")
        config = config.merged(read_config_file(config_file, log))

    if overrides:
        set_by_flag = sorted(k for k, v in overrides.items() if v is not None)
        if set_by_flag:
            log.debug(f"Set by argument: {', '.join(set_by_flag)}")
        config = config.merged(overrides)
    return config


def _fail(msg: str, log: logging.Logger) -> NoReturn:
    log.critical(msg)
    raise ConfigError(msg)


def validate_config(
    config: ExperimentConfig, log: logging.Logger, command: Optional[str] = None
) -> None:
    """
    Check every numeric constraint the solvers impose.

    Args:
        config: Merged configuration
        log: Logger for the critical message
        command: "solve", "converge" or "evolve" to enable command checks

    Raises:
        ConfigError: On the first violated constraint
    """
    try:
        config.scattering_data()
    except ScatteringDataError as e:
        _fail(f"Invalid solitons '{config.solitons}': {e}", log)

    for name in ("Lx", "Ly"):
        value = getattr(config, name)
        if not (math.isfinite(value) and value > 0):
            _fail(f"{name} must be positive, got {value}", log)
    for name in ("Nx", "Ny"):
        if getattr(config, name) < 3:
            _fail(f"{name} must be at least 3, got {getattr(config, name)}", log)
    if config.M < 2 or config.M % 2:
        _fail(f"M must be an even integer >= 2, got {config.M}", log)
    for name in ("t", "xshift", "yshift", "point_x", "point_y"):
        if not math.isfinite(getattr(config, name)):
            _fail(f"{name} must be finite", log)

    try:
        method = Method(config.method)
        quantity = Quantity(config.quantity)
    except ValueError as e:
        _fail(str(e), log)
    if method not in SOLVE_METHODS:
        _fail(f"Method {method.value} cannot be used with solve", log)
    if quantity is Quantity.TAU and method not in (Method.DET_CC, Method.ANALYTIC):
        _fail(f"Method {method.value} does not compute tau", log)

    if config.steps < 0:
        _fail(f"steps must be non-negative, got {config.steps}", log)
    if not (math.isfinite(config.final_time) and config.final_time >= 0):
        _fail(f"T must be non-negative, got {config.final_time}", log)
    if config.window_order < 1 or config.window_every < 1:
        _fail("window order and window_every must be at least 1", log)
    if not config.window_strength > 0:
        _fail(f"window strength must be positive, got {config.window_strength}", log)
    if config.window_mode not in WINDOW_MODES:
        modes = ", ".join(WINDOW_MODES)
        _fail(f"window mode must be one of {modes}, got {config.window_mode}", log)

    if not config.methods:
        _fail("No methods selected for the convergence study", log)
    for name in config.methods:
        if name not in [m.value for m in STUDY_METHODS]:
            _fail(f"Method {name} has no convergence study", log)
    if not 1 <= config.m_min <= config.m_max:
        _fail(f"Need 1 <= m_min <= m_max, got {config.m_min}, {config.m_max}", log)
    if config.m_ref <= config.m_max:
        _fail(f"Reference exponent {config.m_ref} must exceed m_max {config.m_max}", log)

    if command == "solve" and method is Method.ANALYTIC:
        if not config.scattering_data().is_single_soliton:
            _fail("The analytic method needs a single soliton", log)
    if command == "evolve":
        if not (is_power_of_two(config.Nx) and is_power_of_two(config.Ny)):
            _fail(f"evolve needs a power-of-two grid, got {config.Nx}x{config.Ny}", log)


class Config:
    """
    Loaded and validated configuration of one kpsolve run.

    Attributes:
        experiment: The merged ExperimentConfig
        workers: Thread cap from KP_THREADS
    """

    def __init__(
        self,
        app_name: str,
        log: logging.Logger,
        config_path: Optional[str] = None,
        overrides: Optional[Mapping[str, Any]] = None,
        command: Optional[str] = None,
    ):
        self.app_name = app_name
        self.log = log
        self.experiment = load_config(app_name, log, config_path, overrides)
        validate_config(self.experiment, log, command)
        self.workers = default_workers()
        log.debug(f"Experiment: {self.experiment}")
        log.debug(f"Worker threads: {self.workers}")

    def as_dict(self) -> Dict[str, Any]:
        return {**self.experiment.as_dict(), "workers": self.workers}
