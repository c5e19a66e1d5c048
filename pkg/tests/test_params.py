"""Unit tests for parameter types, per-unit conversion, and config loading."""
import json
import math

import pytest

from windsso.params import (
    Config, GridParams, OperatingPoint, PlantParams, SYMBOLS, load_config,
    ohm_to_henry, pu_to_ohm, worst_condition, z_base,
)


# ------------------------------------------------------------- conversions

def test_z_base_table_values():
    assert z_base(GridParams()) == pytest.approx(0.023805, abs=1e-12)


def test_z_base_identity_and_quadratic_law():
    assert z_base(GridParams(Sbase=1.0, Vbase=1.0)) == 1.0
    g1 = GridParams(Sbase=5e6, Vbase=400.0)
    g2 = GridParams(Sbase=5e6, Vbase=800.0)
    assert z_base(g2) == pytest.approx(4.0 * z_base(g1), rel=1e-14)


def test_pu_to_ohm_line_reactance():
    g = GridParams()
    assert pu_to_ohm(0.6553, g) == pytest.approx(0.6553 * 0.023805, rel=1e-14)
    assert pu_to_ohm(0.6553, g) == pytest.approx(0.01560, abs=5e-6)
    assert pu_to_ohm(0.0, g) == 0.0


def test_ohm_to_henry():
    assert ohm_to_henry(0.01560, 50.0) == pytest.approx(49.65e-6, abs=1e-8)
    assert ohm_to_henry(0.0, 50.0) == 0.0
    with pytest.raises(ValueError):
        ohm_to_henry(1.0, 0.0)
    with pytest.raises(ValueError):
        ohm_to_henry(1.0, -50.0)


def test_conversion_round_trip():
    g = GridParams()
    x = 0.6553
    ohm = pu_to_ohm(x, g)
    assert ohm / z_base(g) == pytest.approx(x, rel=1e-15)
    h = ohm_to_henry(ohm, 50.0)
    assert h * 2 * math.pi * 50.0 == pytest.approx(ohm, rel=1e-15)


# ------------------------------------------------------------ value types

def test_plant_defaults():
    p = PlantParams()
    assert p.kd == pytest.approx(2 * math.pi * 50.0 * 75e-6 / 1100.0, rel=1e-15)
    assert p.kf == pytest.approx(1.0 / 1100.0, rel=1e-15)
    assert p.w1 == pytest.approx(100 * math.pi, rel=1e-15)


def test_plant_invariants():
    with pytest.raises(ValueError):
        PlantParams(kp=0.0)
    with pytest.raises(ValueError):
        PlantParams(L1=-1e-6)
    # over-feedforward: kf*km*Vdc = 2
    with pytest.raises(ValueError):
        PlantParams(kf=2.0 / 1100.0)


def test_operating_point_invariants():
    with pytest.raises(ValueError):
        OperatingPoint(I1=-1.0, V1=563.0)
    with pytest.raises(ValueError):
        OperatingPoint(I1=1650.0, V1=563.0, n=0)
    with pytest.raises(ValueError):
        OperatingPoint(I1=1650.0, V1=0.0)
    plant = PlantParams()
    sub = OperatingPoint(I1=1650.0, V1=563.0, n=1)
    with pytest.raises(ValueError):
        OperatingPoint(I1=1650.0, V1=563.0, n=6,
                       unit_types=((plant, sub, 2), (plant, sub, 3)))


def test_grid_scaled_touches_line_only():
    g = GridParams().scaled(1.3)
    assert g.RL == pytest.approx(0.0504 * 1.3, rel=1e-15)
    assert g.XL == pytest.approx(0.6553 * 1.3, rel=1e-15)
    assert g.XT == 0.1512
    assert g.Sbase == 20e6 and g.Vbase == 690.0


# --------------------------------------------------------- worst condition

def test_worst_condition_lifts_current():
    plant = PlantParams()
    op = OperatingPoint(I1=1650.0, V1=563.0, n=6)
    w = worst_condition(op, plant)
    assert w.I1 == 2200.0
    assert w.n == 6
    assert w.V1 == op.V1 and w.phi_i1 == op.phi_i1


def test_worst_condition_idempotent():
    plant = PlantParams()
    op = OperatingPoint(I1=2200.0, V1=563.0, n=6)
    assert worst_condition(op, plant) == op
    op2 = OperatingPoint(I1=900.0, V1=563.0, n=4)
    once = worst_condition(op2, plant)
    assert worst_condition(once, plant) == once


def test_worst_condition_per_type():
    pa = PlantParams(Imax=2200.0)
    pb = PlantParams(Imax=1800.0)
    oa = OperatingPoint(I1=1650.0, V1=563.0, n=3)
    ob = OperatingPoint(I1=1200.0, V1=563.0, n=3)
    op = OperatingPoint(I1=1650.0, V1=563.0, n=6,
                        unit_types=((pa, oa, 3), (pb, ob, 3)))
    w = worst_condition(op, pa)
    assert w.unit_types[0][1].I1 == 2200.0
    assert w.unit_types[1][1].I1 == 1800.0
    assert w.n == 6


# ------------------------------------------------------------ symbol table

def test_every_symbol_has_exactly_one_home():
    assert len(SYMBOLS) == 18
    plant = PlantParams()
    op = OperatingPoint(I1=1650.0, V1=563.0)
    grid = GridParams()
    inst = {PlantParams: plant, OperatingPoint: op, GridParams: grid}
    for sym, (cls, fieldname) in SYMBOLS.items():
        value = getattr(inst[cls], fieldname)
        assert value is not None, sym


# ------------------------------------------------------------- load_config

def test_load_config_defaults():
    cfg = load_config({})
    assert isinstance(cfg, Config)
    assert cfg.op.I1 == 1650.0
    assert cfg.op.n == 6
    assert cfg.op.V1 == pytest.approx(690.0 * math.sqrt(2.0 / 3.0), rel=1e-12)
    assert cfg.ssrdc.k_sso == 0.0
    assert cfg.scenario is None


def test_load_config_sources_agree(tmp_path):
    doc = {"plant": {"kp": 0.12}, "operating_point": {"n": 4},
           "scenario": {"name": "step"}}
    text = json.dumps(doc)
    path = tmp_path / "case.json"
    path.write_text(text)
    for src in (doc, text, str(path)):
        cfg = load_config(src)
        assert cfg.plant.kp == 0.12
        assert cfg.op.n == 4
        assert cfg.scenario == {"name": "step"}


def test_load_config_rejects_unknown_keys():
    with pytest.raises(ValueError, match="top-level"):
        load_config({"plan": {}})
    with pytest.raises(ValueError, match="plant"):
        load_config({"plant": {"kq": 1.0}})
    with pytest.raises(ValueError, match="operating_point"):
        load_config({"operating_point": {"current": 5.0}})
    with pytest.raises(ValueError, match="grid"):
        load_config({"grid": {"XLL": 0.5}})


def test_load_config_current_scale():
    cfg = load_config({"operating_point": {"current_scale": 1.55}})
    assert cfg.op.I1 == pytest.approx(1650.0 * 1.55, rel=1e-15)
    assert cfg.plant.Imax == pytest.approx(2200.0 * 1.55, rel=1e-15)
    with pytest.raises(ValueError):
        load_config({"operating_point": {"current_scale": 0.0}})


def test_load_config_ssrdc_section():
    cfg = load_config({"ssrdc": {"k_sso": 0.03, "omega_sso": 150.0}})
    assert cfg.ssrdc.k_sso == 0.03
    assert cfg.ssrdc.omega_sso == 150.0
    assert cfg.ssrdc.band == (55.0, 95.0)
