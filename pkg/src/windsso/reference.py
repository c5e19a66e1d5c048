"""Named operating conditions and the built-in demonstration scenarios.

The analysis sweeps and scenarios in this module share one calibrated
bench: a six-unit farm exporting over a transformer plus series line,
with the bus voltage, current scale, and current phase frozen so that
the same numbers feed the impedance sweeps, the tuner tables, and the
time-domain runs.  Conditions are named by what changes: ``n4``..``n9``
vary the number of online units, ``z13``/``z135``/``z14`` scale the
line impedance.

Two current levels matter.  The *actual* level is the steady export
current of one unit; the *worst* level is the unit current limit, which
is what the tuner designs against.  At rated power the two coincide.
"""

from __future__ import annotations

from .impedance import SsrdcConfig
from .params import GridParams, OperatingPoint, PlantParams
from .sim import Fault, GridScale, PowerStep, Scenario, UnitCount

# frozen bench calibration: bus voltage, table-to-model current scale,
# current phase at the integrated bus
REFERENCE_CALIBRATION = {
    "V1": 606.0,
    "current_scale": 1.55,
    "phi_i1": 0.13,
}

CURRENT_ACTUAL = 1650.0 * REFERENCE_CALIBRATION["current_scale"]
CURRENT_MAX = 2200.0 * REFERENCE_CALIBRATION["current_scale"]

# one unit exports 1.5 MW at the actual current level
AMPS_PER_MW = CURRENT_ACTUAL / 1.5

# condition name -> (online units, line impedance scale)
CONDITIONS = {
    "n4": (4, 1.0),
    "n6": (6, 1.0),
    "n7": (7, 1.0),
    "n8": (8, 1.0),
    "n9": (9, 1.0),
    "z13": (6, 1.3),
    "z135": (6, 1.35),
    "z14": (6, 1.4),
}

# table sweeps: transitions start from n6 at the base line
UNIT_SWEEP = ("n4", "n7", "n8", "n9")
LINE_SWEEP = ("z13", "z135", "z14")
UNIT_SWEEP_ACTUAL = ("n4", "n8", "n9")
LINE_SWEEP_ACTUAL = ("z13", "z135", "z14")


def reference_plant() -> PlantParams:
    return PlantParams(Imax=CURRENT_MAX)


def reference_grid(line_scale: float = 1.0) -> GridParams:
    return GridParams().scaled(line_scale)


def reference_op(n: int = 6, worst: bool = False) -> OperatingPoint:
    return OperatingPoint(
        I1=CURRENT_MAX if worst else CURRENT_ACTUAL,
        V1=REFERENCE_CALIBRATION["V1"],
        phi_i1=REFERENCE_CALIBRATION["phi_i1"],
        n=n,
    )


def condition(name: str, worst: bool = False):
    """Return (plant, op, grid) for a named condition."""
    n, scale = CONDITIONS[name]
    return reference_plant(), reference_op(n, worst), reference_grid(scale)


def builtin_scenarios() -> dict[str, Scenario]:
    """The bundled scenario set exercised by the suite command.

    ``power_step`` pairs show an unstable growth after a power-order
    step, once without and once with the damper; ``units_*`` walk the
    unit-count transitions; ``line_step_extreme`` jumps from a very
    short to a very long line at rated power with an online retune;
    the ``fault_ride`` pair verifies that a cleared bolted fault never
    opens the damper gate.
    """
    plant = reference_plant()
    base = reference_grid()
    sc: dict[str, Scenario] = {}

    # power-order step 1.5 -> 2.0 MW/unit on the base grid; the target
    # condition is unstable so the undamped run grows until the relay
    # trips, while the damped run picks the ring up early and kills it
    op_15 = OperatingPoint(I1=1.5 * AMPS_PER_MW,
                           V1=REFERENCE_CALIBRATION["V1"],
                           phi_i1=REFERENCE_CALIBRATION["phi_i1"], n=6)
    step = (PowerStep(t=0.2, mw_per_unit=2.0),)
    sc["power_step_off"] = Scenario(
        plant=plant, op=op_15, grid=base, events=step, t_end=2.2,
        amps_per_mw=AMPS_PER_MW, relay_threshold=0.04)
    sc["power_step_on"] = Scenario(
        plant=plant, op=op_15, grid=base, ssrdc=SsrdcConfig(),
        ksso_source="pretuned", events=step, t_end=2.2,
        amps_per_mw=AMPS_PER_MW, relay_threshold=0.04,
        ssfe_threshold=0.005)

    # unit-count transitions from the six-unit base; the retune keeps
    # the damper gain matched to the new worst condition
    for tag, target in (("units_6to4", 4), ("units_6to8", 8),
                        ("units_6to9", 9)):
        sc[tag] = Scenario(
            plant=plant, op=reference_op(6), grid=base,
            ssrdc=SsrdcConfig(), ksso_source="online",
            events=(UnitCount(t=0.5, n=target),), t_end=1.5,
            amps_per_mw=AMPS_PER_MW)

    # extreme line step at rated power: 0.3x to 1.4x the base line in
    # one event, followed by a small power trim that seeds the ring;
    # the retuned damper must cut the episode short
    sc["line_step_extreme"] = Scenario(
        plant=plant, op=reference_op(6, worst=True),
        grid=reference_grid(0.3), ssrdc=SsrdcConfig(),
        ksso_source="online",
        events=(GridScale(t=0.5, factor=1.4 / 0.3),
                PowerStep(t=0.52, mw_per_unit=2.008)),
        t_end=1.8, amps_per_mw=AMPS_PER_MW, ssfe_threshold=0.001)

    # bolted fault cleared after 50 ms on the stable base condition;
    # run twice to check the damper stays exactly silent
    fault = (Fault(t=1.5, duration=0.05),)
    sc["fault_ride_off"] = Scenario(
        plant=plant, op=reference_op(6), grid=base, events=fault,
        t_end=2.5, amps_per_mw=AMPS_PER_MW)
    sc["fault_ride_on"] = Scenario(
        plant=plant, op=reference_op(6), grid=base, ssrdc=SsrdcConfig(),
        ksso_source="pretuned", events=fault, t_end=2.5,
        amps_per_mw=AMPS_PER_MW)
    return sc
