from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Tuple
import logging
import os
from config.lexer.lexer import Lexer
from config.parser.parser import Parser
from config.semantic.analyzer import SchemaAnalyzer
from config.semantic.symbol import SymbolTable
from control.lbfgs import LbfgsOptions
from numerics.linalg import FrechetMethod
from physics.fock import SpaceSpec
from physics.schemes import (
    LEVEL_NAMES,
    PRESETS,
    ControlParams,
    PhysicalConstants,
    SchemeId,
    default_params,
)

logger = logging.getLogger(__name__)

DEFAULT_FOCK_DIM = 10
DEFAULT_NBAR0 = 1.0

# Keys of [constants] that are rates or frequencies, divided by nu_mhz
# when units = mhz. Lamb–Dicke parameters are dimensionless.
RATE_KEYS = ("gamma", "gamma_g", "gamma_r", "detuning_offset")
ETA_KEYS = ("eta", "eta_g", "eta_r", "recoil_eta")

FRECHET_METHODS: Dict[str, FrechetMethod] = {"block": "blockEnlarge", "sps": "SPS"}
EVOLVE_KEYS = ("t_final", "samples", "fit_start", "fit")

# mode -> (section, key) pairs that must be present; a tuple of keys means
# any one of them.
REQUIRED_KEYS: Dict[str, List[Tuple[str, Tuple[str, ...]]]] = {
    "optimize": [("control", ("horizon", "horizons"))],
    "scan1d": [
        ("control", ("horizon", "horizons")),
        ("scan", ("param",)),
        ("scan", ("grid",)),
    ],
    "scan2d": [
        ("control", ("horizon", "horizons")),
        ("scan", ("param",)),
        ("scan", ("grid",)),
        ("scan", ("param2",)),
        ("scan", ("grid2",)),
    ],
    "evolve": [("evolve", ("t_final",))],
    "steady": [],
    "gradcheck": [("control", ("horizon", "horizons"))],
    "eit_compare": [],
}


@dataclass(frozen=True)
class ControlSettings:
    horizons: Tuple[float, ...]
    free: Tuple[str, ...]
    starts: Tuple[Dict[str, float], ...]
    options: LbfgsOptions
    frechet_method: FrechetMethod
    scales: Dict[str, float]


@dataclass(frozen=True)
class ScanSettings:
    param: str
    grid: Tuple[float, ...]
    inner: Tuple[str, ...]
    param2: Optional[str] = None
    grid2: Tuple[float, ...] = ()


@dataclass(frozen=True)
class EvolveSettings:
    t_final: float
    samples: int
    fit_start: float
    fit: bool


@dataclass(frozen=True)
class GradcheckSettings:
    points: int = 20
    seed: int = 0
    step: float = 1e-4
    tolerance: float = 1e-6


@dataclass(frozen=True)
class CompareSettings:
    horizons: Tuple[float, ...] = (300.0, 700.0, 1200.0)
    t_eval: float = 1200.0
    eit3_horizon: float = 1200.0


@dataclass(frozen=True)
class OutputSettings:
    path: Optional[str] = None
    threads: int = 1


@dataclass(frozen=True)
class ExperimentConfig:
    """
    A validated experiment, every quantity in units of ν (times in 1/ν).

    Attributes:
        name (str): Experiment name, the stem of the output files.
        scheme (SchemeId): The cooling scheme.
        mode (str): What to run.
        consts (PhysicalConstants): Physical constants.
        space (SpaceSpec): Hilbert space.
        nbar0 (float): Initial thermal occupation.
        level (int): Initial internal level.
        params (ControlParams): Full parameter point (fixed values and guesses).
        control (ControlSettings): Horizons, free set, starts and optimiser settings.
        scan (Optional[ScanSettings]): Grids of the scan modes.
        evolve (Optional[EvolveSettings]): Trajectory settings.
        gradcheck (GradcheckSettings): Gradient check settings.
        compare (CompareSettings): Settings of the EIT comparison run.
        output (OutputSettings): Output location and thread count.
        resolved (Dict[str, Dict[str, Any]]): The file's values as written.
    """

    name: str
    scheme: SchemeId
    mode: str
    consts: PhysicalConstants
    space: SpaceSpec
    nbar0: float
    level: int
    params: ControlParams
    control: ControlSettings
    scan: Optional[ScanSettings]
    evolve: Optional[EvolveSettings]
    gradcheck: GradcheckSettings
    compare: CompareSettings
    output: OutputSettings
    resolved: Dict[str, Dict[str, Any]] = field(default_factory=dict)

    def describe(self) -> Dict[str, Any]:
        """Plain-data view of the resolved experiment for the run manifest."""
        return {
            "name": self.name,
            "scheme": self.scheme.value,
            "mode": self.mode,
            "constants": vars(self.consts).copy(),
            "space": {
                "internal_dim": self.space.internal_dim,
                "fock_dim": self.space.fock_dim,
            },
            "initial": {"nbar0": self.nbar0, "level": self.level},
            "params": dict(self.params),
            "control": {
                "horizons": list(self.control.horizons),
                "free": list(self.control.free),
                "starts": [dict(s) for s in self.control.starts],
                "options": vars(self.control.options).copy(),
                "frechet_method": self.control.frechet_method,
                "scales": dict(self.control.scales),
            },
            "scan": None if self.scan is None else vars(self.scan).copy(),
            "evolve": None if self.evolve is None else vars(self.evolve).copy(),
            "gradcheck": vars(self.gradcheck).copy(),
            "compare": vars(self.compare).copy(),
            "file": self.resolved,
        }


class _Resolver:
    """Reads typed values out of an analysed symbol table."""

    def __init__(self, table: SymbolTable) -> None:
        self.table = table

    def get(self, section: str, key: str, default: Any = None) -> Any:
        symbol = self.table.lookup(section, key)
        return default if symbol is None else symbol.value

    def has(self, section: str, key: str) -> bool:
        return self.table.lookup(section, key) is not None

    def line(self, section: str, key: str) -> int:
        symbol = self.table.lookup(section, key)
        return symbol.line if symbol is not None else self.table.section_line(section)

    def require(self, section: str, key: str, reason: str) -> Any:
        """Returns a mandatory value.

        Raises:
            NameError: If the key is absent.
        """
        if not self.has(section, key):
            raise NameError(
                f"Missing `{key}` in [{section}] ({reason}) "
                f"on line {self.table.section_line(section)}"
            )
        return self.get(section, key)

    def unit_scale(self) -> float:
        """Frequency unit of the file in ν: nu_mhz when units = mhz, else 1."""
        if self.get("constants", "units") == "mhz":
            return float(self.get("constants", "nu_mhz", 1.0))
        return 1.0

    def parameter_names(
        self, section: str, key: str, scheme: SchemeId
    ) -> Tuple[str, ...]:
        """A list of parameter names, each belonging to the scheme.

        Raises:
            NameError: If a name is not a parameter of the scheme.
        """
        names = self.get(section, key)
        names = [names] if isinstance(names, str) else list(names)
        for name in names:
            if name not in scheme.parameter_names:
                raise NameError(
                    f"`{name}` is not a parameter of {scheme.value} "
                    f"on line {self.line(section, key)}"
                )
        return tuple(names)


def _constants(r: _Resolver, scheme: SchemeId) -> PhysicalConstants:
    preset = r.get("constants", "preset")
    consts = PRESETS[preset]() if preset else PhysicalConstants()

    units = r.get("constants", "units", "nu")
    scale = 1.0
    if units == "mhz":
        scale = float(r.require("constants", "nu_mhz", "units = mhz"))
        if not scale > 0:
            raise ValueError(
                f"nu_mhz must be positive on line {r.line('constants', 'nu_mhz')}"
            )
        if r.has("constants", "nu"):
            raise NameError(
                f"`nu` is the unit when units = mhz, remove it on line "
                f"{r.line('constants', 'nu')}"
            )

    overrides: Dict[str, Any] = {}
    for key in RATE_KEYS:
        if r.has("constants", key):
            overrides[key] = float(r.get("constants", key)) / scale
    for key in ETA_KEYS:
        if r.has("constants", key):
            overrides[key] = float(r.get("constants", key))
    if r.has("constants", "nu"):
        overrides["nu"] = float(r.get("constants", "nu"))

    try:
        return replace(consts, **overrides)
    except ValueError as e:
        line = r.table.section_line("constants")
        raise ValueError(f"{e} in [constants] on line {line}") from e


def _params(r: _Resolver, scheme: SchemeId, consts: PhysicalConstants) -> ControlParams:
    scale = r.unit_scale()
    params = default_params(scheme, consts)
    for key in r.table.as_dict().get("params", {}):
        if key not in scheme.parameter_names:
            raise NameError(
                f"`{key}` is not a parameter of {scheme.value} "
                f"on line {r.line('params', key)}"
            )
        params[key] = float(r.get("params", key)) / scale

    return params


def _level(r: _Resolver, space: SpaceSpec, mode: str) -> int:
    level = r.get("initial", "level", 0)
    index = LEVEL_NAMES[level] if isinstance(level, str) else int(level)
    # eit_compare also starts the three-level reduction from this level
    levels = SchemeId.EIT3.internal_dim if mode == "eit_compare" else space.internal_dim
    if not 0 <= index < levels:
        raise ValueError(
            f"Initial level {level} does not exist in a {levels}-level "
            f"scheme on line {r.line('initial', 'level')}"
        )
    return index


def _horizons(r: _Resolver) -> Tuple[float, ...]:
    if r.has("control", "horizons"):
        horizons = tuple(float(t) for t in r.get("control", "horizons"))
        key = "horizons"
    else:
        key = "horizon"
        horizons = (float(r.get("control", key)),) if r.has("control", key) else ()

    if any(t < 0 for t in horizons):
        line = r.line("control", key)
        raise ValueError(f"Horizons must be non-negative on line {line}")
    return horizons


def _control(r: _Resolver, scheme: SchemeId) -> ControlSettings:
    # control parameters are all frequencies
    scale = r.unit_scale()
    free = (
        r.parameter_names("control", "free", scheme)
        if r.has("control", "free")
        else scheme.parameter_names
    )

    starts: List[Dict[str, float]] = []
    for start in r.get("control", "starts", []):
        if len(start) != len(free):
            raise ValueError(
                f"Each start needs {len(free)} values ({', '.join(free)}), "
                f"got {len(start)} on line {r.line('control', 'starts')}"
            )
        starts.append({name: float(v) / scale for name, v in zip(free, start)})

    defaults = LbfgsOptions()
    try:
        options = LbfgsOptions(
            history=int(r.get("control", "history", defaults.history)),
            gtol=float(r.get("control", "gtol", defaults.gtol)),
            ftol=float(r.get("control", "ftol", defaults.ftol)),
            max_iter=int(r.get("control", "max_iter", defaults.max_iter)),
        )
    except ValueError as e:
        line = r.table.section_line("control")
        raise ValueError(f"{e} in [control] on line {line}") from e

    scales: Dict[str, float] = {}
    for name in scheme.parameter_names:
        key = "scale_delta" if name.startswith("delta") else "scale_omega"
        if r.has("control", key):
            scales[name] = float(r.get("control", key)) / scale
    if any(s <= 0 for s in scales.values()):
        raise ValueError(
            f"Parameter scales must be positive in [control] "
            f"on line {r.table.section_line('control')}"
        )

    return ControlSettings(
        horizons=_horizons(r),
        free=free,
        starts=tuple(starts),
        options=options,
        frechet_method=FRECHET_METHODS[r.get("control", "frechet", "block")],
        scales=scales,
    )


def _scan(r: _Resolver, scheme: SchemeId, mode: str) -> Optional[ScanSettings]:
    # steady mode sweeps one parameter when [scan] names it
    sweeps = mode == "steady" and r.has("scan", "param")
    if mode not in ("scan1d", "scan2d") and not sweeps:
        return None

    (param,) = r.parameter_names("scan", "param", scheme)
    values = r.require("scan", "grid", f"mode {mode} scans a grid")
    scale = r.unit_scale()
    grid = tuple(float(v) / scale for v in values)
    if not grid:
        raise ValueError(f"Scan grid is empty on line {r.line('scan', 'grid')}")

    if mode == "steady":
        return ScanSettings(param, grid, ())

    if mode == "scan2d":
        (param2,) = r.parameter_names("scan", "param2", scheme)
        if param2 == param:
            line = r.line("scan", "param2")
            raise ValueError(f"Cannot scan `{param}` against itself on line {line}")
        grid2 = tuple(float(v) / scale for v in r.get("scan", "grid2"))
        if not grid2:
            raise ValueError(f"Scan grid2 is empty on line {r.line('scan', 'grid2')}")
        return ScanSettings(param, grid, (), param2, grid2)

    if r.has("scan", "inner"):
        inner = r.parameter_names("scan", "inner", scheme)
    else:
        inner = tuple(name for name in scheme.parameter_names if name != param)
    if param in inner:
        raise ValueError(
            f"Scanned parameter `{param}` cannot also be inner "
            f"on line {r.line('scan', 'inner')}"
        )

    return ScanSettings(param, grid, inner)


def _evolve(r: _Resolver, mode: str) -> Optional[EvolveSettings]:
    # optimize mode fits the cooling rate at each optimum when t_final is given;
    # eit_compare takes sampling and fit window from [evolve] when present
    compares = mode == "eit_compare" and any(r.has("evolve", k) for k in EVOLVE_KEYS)
    if mode != "evolve" and not compares and not (
        mode == "optimize" and r.has("evolve", "t_final")
    ):
        return None

    t_eval = r.get("compare", "t_eval", CompareSettings().t_eval)
    settings = EvolveSettings(
        t_final=float(r.get("evolve", "t_final", t_eval)),
        samples=int(r.get("evolve", "samples", 121)),
        fit_start=float(r.get("evolve", "fit_start", 5.0)),
        fit=bool(r.get("evolve", "fit", True)),
    )
    if not settings.t_final > 0 or settings.samples < 2:
        raise ValueError(
            f"Evolution needs t_final > 0 and at least 2 samples "
            f"on line {r.table.section_line('evolve')}"
        )
    return settings


def _gradcheck(r: _Resolver) -> GradcheckSettings:
    defaults = GradcheckSettings()
    settings = GradcheckSettings(
        points=int(r.get("gradcheck", "points", defaults.points)),
        seed=int(r.get("gradcheck", "seed", defaults.seed)),
        step=float(r.get("gradcheck", "step", defaults.step)),
        tolerance=float(r.get("gradcheck", "tolerance", defaults.tolerance)),
    )
    if settings.points < 1 or not settings.step > 0:
        raise ValueError(
            f"Gradient check needs points >= 1 and step > 0 "
            f"on line {r.table.section_line('gradcheck')}"
        )
    return settings


def _compare(r: _Resolver) -> CompareSettings:
    defaults = CompareSettings()
    horizons = r.get("compare", "horizons")
    return CompareSettings(
        horizons=(
            defaults.horizons if horizons is None else tuple(float(t) for t in horizons)
        ),
        t_eval=float(r.get("compare", "t_eval", defaults.t_eval)),
        eit3_horizon=float(r.get("compare", "eit3_horizon", defaults.eit3_horizon)),
    )


def analyze_config(text: str) -> SymbolTable:
    """Lexes, parses and analyses config text.

    Raises:
        SyntaxError: On grammar errors.
        NameError: On unknown or repeated sections and keys.
        TypeError: On values of the wrong kind.
        ValueError: On malformed spans.
    """
    tokens = list(Lexer(text).tokenize())
    ast = Parser(tokens).parse()
    analyzer = SchemaAnalyzer()
    analyzer.analyze(ast)

    return analyzer.symbol_table


def parse_config(text: str, default_name: str = "experiment") -> ExperimentConfig:
    """Builds an ExperimentConfig from config text.

    Raises:
        SyntaxError: On grammar errors.
        NameError: On unknown, repeated or missing keys.
        TypeError: On values of the wrong kind.
        ValueError: On values out of range.
    """
    r = _Resolver(analyze_config(text))

    scheme = SchemeId(r.require("experiment", "scheme", "always required"))
    mode = str(r.require("experiment", "mode", "always required"))

    for section, keys in REQUIRED_KEYS[mode]:
        if not any(r.has(section, key) for key in keys):
            raise NameError(
                f"Mode `{mode}` needs `{' or '.join(keys)}` in [{section}] "
                f"on line {r.line('experiment', 'mode')}"
            )
    if mode == "eit_compare" and scheme is not SchemeId.EIT4:
        raise ValueError(
            f"Mode `eit_compare` runs the four-level scheme, set scheme = eit4 "
            f"on line {r.line('experiment', 'scheme')}"
        )

    consts = _constants(r, scheme)
    fock_dim = int(r.get("space", "fock_dim", DEFAULT_FOCK_DIM))
    try:
        space = SpaceSpec(scheme.internal_dim, fock_dim)
    except ValueError as e:
        raise ValueError(f"{e} on line {r.line('space', 'fock_dim')}") from e

    nbar0 = float(r.get("initial", "nbar0", DEFAULT_NBAR0))
    if nbar0 < 0:
        line = r.line("initial", "nbar0")
        raise ValueError(f"nbar0 must be non-negative on line {line}")

    threads = int(r.get("output", "threads", 1))
    if threads < 1:
        line = r.line("output", "threads")
        raise ValueError(f"threads must be at least 1 on line {line}")

    config = ExperimentConfig(
        name=str(r.get("experiment", "name", default_name)),
        scheme=scheme,
        mode=mode,
        consts=consts,
        space=space,
        nbar0=nbar0,
        level=_level(r, space, mode),
        params=_params(r, scheme, consts),
        control=_control(r, scheme),
        scan=_scan(r, scheme, mode),
        evolve=_evolve(r, mode),
        gradcheck=_gradcheck(r),
        compare=_compare(r),
        output=OutputSettings(r.get("output", "path"), threads),
        resolved=r.table.as_dict(),
    )
    logger.debug("Loaded %s experiment `%s` (%s)", scheme.value, config.name, mode)

    return config


def load_config(path: str) -> ExperimentConfig:
    """Reads and validates a config file; the file stem is the default name.

    Raises:
        OSError: If the file cannot be read.
        SyntaxError, NameError, TypeError, ValueError: As for parse_config.
    """
    with open(path, "r", encoding="UTF-8") as file:
        text = file.read()

    stem = os.path.splitext(os.path.basename(path))[0]
    return parse_config(text, default_name=stem or "experiment")
