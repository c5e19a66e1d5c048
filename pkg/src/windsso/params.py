"""Physical and control parameters, per-unit conversion, operating
conditions, and JSON configuration loading.

Every quantity the impedance and simulation models consume lives in one of
the three value types here; nothing else in the package hard-codes plant or
grid numbers.
"""
from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from typing import Optional


def _require(cond: bool, msg: str):
    if not cond:
        raise ValueError(msg)


@dataclass(frozen=True)
class PlantParams:
    """Converter-side parameters of one turbine unit.

    kd and kf default to ideal cross-coupling cancellation and full voltage
    feedforward for the given modulator gain and DC voltage; both are
    calibration parameters and may be overridden.
    """
    kp: float = 0.09          # PLL proportional gain
    ki: float = 32.0          # PLL integral gain
    kip: float = 0.25         # current-loop proportional gain
    kii: float = 120.0        # current-loop integral gain
    L1: float = 75e-6         # converter filter inductance, H
    km: float = 1.0           # modulator gain
    Vdc: float = 1100.0       # DC bus reference voltage, V
    kd: Optional[float] = None   # decoupling coefficient; None -> 2*pi*f1*L1/(km*Vdc)
    kf: Optional[float] = None   # feedforward coefficient; None -> 1/(km*Vdc)
    f1: float = 50.0          # fundamental frequency, Hz
    Imax: float = 2200.0      # maximum output current of one unit, A
    t1_current_scaled: bool = False  # scale the voltage-path PLL term by the current phasor

    def __post_init__(self):
        if self.kd is None:
            object.__setattr__(self, "kd", 2 * math.pi * self.f1 * self.L1 / (self.km * self.Vdc))
        if self.kf is None:
            object.__setattr__(self, "kf", 1.0 / (self.km * self.Vdc))
        for name in ("kp", "ki", "kip", "kii", "L1", "km", "Vdc", "f1", "Imax"):
            _require(getattr(self, name) > 0, f"{name} must be strictly positive")
        _require(self.kf * self.km * self.Vdc <= 1.0 + 1e-9,
                 "kf*km*Vdc must not exceed 1 (no over-feedforward)")

    @property
    def w1(self) -> float:
        return 2 * math.pi * self.f1


@dataclass(frozen=True)
class OperatingPoint:
    """Linearization point of the farm: per-unit current phasor, bus
    voltage, and unit count.  unit_types describes a heterogeneous farm as
    (plant, per-type operating point, count) triples; counts must sum to n.
    """
    I1: float                 # output current magnitude of one unit, A
    V1: float                 # integrated-bus voltage magnitude, V
    phi_i1: float = 0.0       # current phase angle, rad
    n: int = 6                # number of online units
    unit_types: Optional[tuple] = None

    def __post_init__(self):
        _require(self.I1 >= 0, "I1 must be nonnegative")
        _require(self.n >= 1, "n must be at least 1")
        _require(self.V1 > 0, "V1 must be positive")
        if self.unit_types is not None:
            object.__setattr__(self, "unit_types", tuple(self.unit_types))
            _require(sum(c for _, _, c in self.unit_types) == self.n,
                     "unit_types counts must sum to n")


@dataclass(frozen=True)
class GridParams:
    """Grid-side per-unit impedances at f1 plus the system base."""
    RL: float = 0.0504        # line resistance, pu
    XL: float = 0.6553        # line reactance, pu
    XT: float = 0.1512        # per-unit-branch transformer reactance, pu
    Sbase: float = 20e6       # base power, VA
    Vbase: float = 690.0      # base voltage (line-to-line), V

    def __post_init__(self):
        _require(self.XL > 0 and self.XT > 0, "XL and XT must be positive")
        _require(self.RL >= 0, "RL must be nonnegative")
        _require(self.Sbase > 0 and self.Vbase > 0, "Sbase and Vbase must be positive")

    def scaled(self, factor: float) -> "GridParams":
        """Line impedance scaled by `factor`; transformer branch unchanged."""
        return dataclasses.replace(self, RL=self.RL * factor, XL=self.XL * factor)


def z_base(grid: GridParams) -> float:
    return grid.Vbase ** 2 / grid.Sbase


def pu_to_ohm(x_pu: float, grid: GridParams) -> float:
    return x_pu * z_base(grid)


def ohm_to_henry(x_ohm: float, f1: float) -> float:
    if f1 <= 0:
        raise ValueError("f1 must be positive")
    return x_ohm / (2 * math.pi * f1)


def worst_condition(op: OperatingPoint, plant: PlantParams) -> OperatingPoint:
    """Copy of `op` with every unit exporting its maximum current; unit
    count and grid state are untouched."""
    types = op.unit_types
    if types is not None:
        types = tuple((pl, dataclasses.replace(o, I1=pl.Imax), c) for pl, o, c in types)
    return dataclasses.replace(op, I1=plant.Imax, unit_types=types)


# map of model symbols to the field that owns each one; the unit test walks
# this to guarantee one home per symbol
SYMBOLS = {
    "km": (PlantParams, "km"), "Vdc": (PlantParams, "Vdc"),
    "kd": (PlantParams, "kd"), "kf": (PlantParams, "kf"),
    "kp": (PlantParams, "kp"), "ki": (PlantParams, "ki"),
    "kip": (PlantParams, "kip"), "kii": (PlantParams, "kii"),
    "L1": (PlantParams, "L1"), "f1": (PlantParams, "f1"),
    "Imax": (PlantParams, "Imax"),
    "I1": (OperatingPoint, "I1"), "phi_i1": (OperatingPoint, "phi_i1"),
    "V1": (OperatingPoint, "V1"), "n": (OperatingPoint, "n"),
    "XT": (GridParams, "XT"), "XL": (GridParams, "XL"), "RL": (GridParams, "RL"),
}


# ---------------------------------------------------------------------------
# JSON configuration

@dataclass(frozen=True)
class Config:
    plant: PlantParams
    grid: GridParams
    op: OperatingPoint
    ssrdc: "object" = None      # SsrdcConfig; typed loosely to avoid an import cycle
    scenario: Optional[dict] = None


_OP_DEFAULTS = {"I1": 1650.0, "phi_i1": 0.0, "V1": None, "n": 6,
                "current_scale": 1.0}


def _build_section(cls, data: dict, section: str):
    allowed = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - allowed
    if unknown:
        raise ValueError(f"unknown key(s) in '{section}' section: {sorted(unknown)}")
    return cls(**data)


def load_config(source) -> Config:
    """Build a Config from a JSON document (path, JSON text, or dict).

    All sections and fields are optional; unknown keys are rejected with the
    offending section named.  The operating_point section accepts
    `current_scale`, a calibration multiplier applied to I1 and Imax that
    selects how the tabulated current reading is interpreted (1.0 keeps it
    as an amplitude, sqrt(2) reads it as RMS).
    """
    from .impedance import SsrdcConfig  # deferred: impedance imports params

    if isinstance(source, dict):
        raw = dict(source)
    else:
        text = None
        try:
            with open(source) as fh:
                text = fh.read()
        except (OSError, TypeError):
            text = source
        raw = json.loads(text)

    known_sections = {"plant", "grid", "operating_point", "ssrdc", "scenario"}
    unknown = set(raw) - known_sections
    if unknown:
        raise ValueError(f"unknown top-level section(s): {sorted(unknown)}")

    plant = _build_section(PlantParams, dict(raw.get("plant", {})), "plant")
    grid = _build_section(GridParams, dict(raw.get("grid", {})), "grid")

    opd = dict(_OP_DEFAULTS)
    user_op = dict(raw.get("operating_point", {}))
    unknown = set(user_op) - set(_OP_DEFAULTS)
    if unknown:
        raise ValueError(f"unknown key(s) in 'operating_point' section: {sorted(unknown)}")
    opd.update(user_op)
    scale = float(opd.pop("current_scale"))
    _require(scale > 0, "current_scale must be positive")
    if opd["V1"] is None:
        # peak phase voltage of the base system; a calibration parameter
        opd["V1"] = grid.Vbase * math.sqrt(2.0 / 3.0)
    op = OperatingPoint(I1=opd["I1"] * scale, V1=opd["V1"],
                        phi_i1=opd["phi_i1"], n=int(opd["n"]))
    if scale != 1.0:
        plant = dataclasses.replace(plant, Imax=plant.Imax * scale)

    ssrdc = _build_section(SsrdcConfig, dict(raw.get("ssrdc", {})), "ssrdc")
    scenario = raw.get("scenario")
    return Config(plant=plant, grid=grid, op=op, ssrdc=ssrdc, scenario=scenario)
