from typing import Dict
from config.semantic.types import (
    BooleanType,
    ListType,
    NumberType,
    StringType,
    UnionType,
    ValueType,
    WordType,
)

SCHEMES = ("rwsc", "swsc", "eit3", "eit4")
MODES = ("optimize", "scan1d", "scan2d", "evolve", "steady", "gradcheck", "eit_compare")
PRESETS = ("running_wave", "standing_wave", "three_level", "calcium")
PARAMETERS = ("delta", "omega", "omega_g", "omega_r", "delta_g", "delta_r")
LEVELS = ("g", "e", "r", "t")

REAL = NumberType()
INTEGER = NumberType(integer=True)
REALS = ListType(REAL)
PARAMETER = WordType(PARAMETERS)

# section -> key -> accepted type
SCHEMA: Dict[str, Dict[str, ValueType]] = {
    "experiment": {
        "scheme": WordType(SCHEMES),
        "mode": WordType(MODES),
        "name": UnionType(WordType(), StringType()),
    },
    "constants": {
        "units": WordType(("nu", "mhz")),
        "nu_mhz": REAL,
        "nu": REAL,
        "eta": REAL,
        "eta_g": REAL,
        "eta_r": REAL,
        "recoil_eta": REAL,
        "gamma": REAL,
        "gamma_g": REAL,
        "gamma_r": REAL,
        "detuning_offset": REAL,
        "preset": WordType(PRESETS),
    },
    "space": {
        "fock_dim": INTEGER,
    },
    "initial": {
        "nbar0": REAL,
        "level": UnionType(INTEGER, WordType(LEVELS)),
    },
    "params": {name: REAL for name in PARAMETERS},
    "control": {
        "horizon": REAL,
        "horizons": REALS,
        "free": ListType(PARAMETER),
        "starts": ListType(REALS),
        "max_iter": INTEGER,
        "gtol": REAL,
        "ftol": REAL,
        "history": INTEGER,
        "frechet": WordType(("block", "sps")),
        "scale_delta": REAL,
        "scale_omega": REAL,
    },
    "scan": {
        "param": PARAMETER,
        "grid": REALS,
        "inner": ListType(PARAMETER),
        "param2": PARAMETER,
        "grid2": REALS,
    },
    "evolve": {
        "t_final": REAL,
        "samples": INTEGER,
        "fit_start": REAL,
        "fit": BooleanType(),
    },
    "gradcheck": {
        "points": INTEGER,
        "seed": INTEGER,
        "step": REAL,
        "tolerance": REAL,
    },
    "compare": {
        "horizons": REALS,
        "t_eval": REAL,
        "eit3_horizon": REAL,
    },
    "output": {
        "path": UnionType(StringType(), WordType()),
        "threads": INTEGER,
    },
}
