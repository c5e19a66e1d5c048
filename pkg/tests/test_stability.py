"""Tests for pole computation, dominant-pole selection, sensitivities, and
the argument-principle counting oracle.

The 50-draw cross-oracle is the package's own consistency check: the two
independent unstable-pole counters must agree exactly.
"""
import math

import numpy as np
import pytest

from windsso.impedance import farm_impedance, grid_impedance
from windsso.params import GridParams, OperatingPoint, PlantParams
from windsso.stability import (
    BandEscapeError, Pole, closed_loop_poles, count_rhp_zeros, damping_ratio,
    dominant_pole, sensitivity, solve_dp,
)
from windsso.tf import ComplexRational, eval_tf

RNG = np.random.default_rng(20260815)

V1_CAL = 606.0
PHI_CAL = 0.13
SCALE_CAL = 1.55


def _nominal(n=6, zs=1.0, I1=1650.0 * SCALE_CAL, kp=0.09):
    plant = PlantParams(kp=kp, Imax=2200.0 * SCALE_CAL)
    op = OperatingPoint(I1=I1, V1=V1_CAL, phi_i1=PHI_CAL, n=n)
    grid = GridParams().scaled(zs)
    return plant, op, grid


# ------------------------------------------------------- closed-loop poles

def test_poles_linear_example():
    poles = closed_loop_poles(ComplexRational([1.0, 1.0]), ComplexRational([1.0]))
    assert len(poles) == 1
    assert poles[0].sigma == pytest.approx(-2.0, abs=1e-12)
    assert poles[0].omega == pytest.approx(0.0, abs=1e-12)


def test_poles_lc_example():
    zg = ComplexRational([0.0, 1.0])
    zf = ComplexRational([1.0], [0.0, 1.0])
    poles = closed_loop_poles(zg, zf)
    got = sorted((p.sigma, p.omega) for p in poles)
    assert got[0] == pytest.approx((0.0, -1.0), abs=1e-9)
    assert got[1] == pytest.approx((0.0, 1.0), abs=1e-9)


def test_poles_degenerate_raises():
    with pytest.raises(ValueError):
        closed_loop_poles(ComplexRational([1.0]), ComplexRational([1.0]))


def test_poles_nominal_polish_bound_and_order():
    plant, op, grid = _nominal()
    zf = farm_impedance(op, grid, plant)
    zg = grid_impedance(grid, plant.f1)
    poles = closed_loop_poles(zg, zf)
    sigmas = [p.sigma for p in poles]
    assert sigmas == sorted(sigmas, reverse=True)
    for p in poles:
        s = p.as_complex
        assert abs(eval_tf(zg, s) + eval_tf(zf, s)) < 1e-6 * abs(eval_tf(zg, s))


def test_nominal_in_band_pole():
    plant, op, grid = _nominal()
    dp = solve_dp(plant, op, grid)
    assert -15.0 < dp.sigma < 0.0
    assert abs(dp.omega - 461.1) < 0.02 * 461.1


# --------------------------------------------------------- dominant pole

def test_dominant_pole_selection():
    poles = [Pole(-10.0, 400.0), Pole(1.0, 465.0), Pole(-50.0, 80.0)]
    dp = dominant_pole(poles, band=(55.0, 95.0))
    assert (dp.sigma, dp.omega) == (1.0, 465.0)


def test_dominant_pole_empty_band():
    with pytest.raises(ValueError, match="no in-band pole"):
        dominant_pole([Pole(-1.0, 100.0)], band=(55.0, 95.0))


def test_dominant_pole_tie_breaks_to_higher_frequency():
    poles = [Pole(1.0, 460.0), Pole(1.0 + 1e-9, 470.0), Pole(1.0 - 1e-9, 480.0)]
    dp = dominant_pole(poles, band=(55.0, 95.0))
    assert dp.omega == 480.0


# --------------------------------------------------------- damping ratio

def test_damping_ratio_values():
    assert damping_ratio(Pole(0.0, 5.0)) == 0.0
    assert damping_ratio(Pole(-1.0, 0.0)) == 1.0
    assert damping_ratio(Pole(-4.87, 461.1)) == pytest.approx(0.01056, abs=1e-5)
    with pytest.raises(ValueError):
        damping_ratio(Pole(0.0, 0.0))


# ----------------------------------------------------------- sensitivity

def test_sensitivity_signs_at_nominal():
    plant, op, grid = _nominal()
    s_kp = sensitivity("kp", plant, op, grid)
    s_kip = sensitivity("kip", plant, op, grid)
    assert s_kp < 0
    assert sensitivity("X", plant, op, grid) > 0
    assert sensitivity("n", plant, op, grid) > 0
    assert sensitivity("I1", plant, op, grid) > 0
    assert abs(s_kip) < 0.05 * abs(s_kp)


def test_sensitivity_inert_parameter_and_validation():
    plant, op, grid = _nominal()
    assert sensitivity("t_e", plant, op, grid) == 0.0
    with pytest.raises(ValueError):
        sensitivity("Vdc", plant, op, grid)
    with pytest.raises(ValueError):
        sensitivity("kp", plant, op, grid, delta_rel=0.5)


def test_sensitivity_forward_vs_central():
    plant, op, grid = _nominal()
    delta = 1e-4
    central = sensitivity("kp", plant, op, grid, delta_rel=delta)
    import dataclasses
    h = delta * plant.kp
    up = solve_dp(dataclasses.replace(plant, kp=plant.kp + h), op, grid).sigma
    base = solve_dp(plant, op, grid).sigma
    forward = (up - base) / h
    assert abs(forward - central) < 0.01 * abs(central)


def test_sensitivity_kp_global_sign():
    # Re(DP) strictly decreasing in kp across half to 1.5x nominal
    _, op, grid = _nominal()
    sigmas = []
    for rel in np.linspace(0.5, 1.5, 11):
        plant = PlantParams(kp=0.09 * rel, Imax=2200.0 * SCALE_CAL)
        sigmas.append(solve_dp(plant, op, grid).sigma)
    assert all(a > b for a, b in zip(sigmas, sigmas[1:]))


def test_sensitivity_kii_finite():
    # the kii sensitivity changes sign across conditions; only record it
    plant, op, grid = _nominal()
    assert math.isfinite(sensitivity("kii", plant, op, grid))


def test_sensitivity_band_escape_reported():
    plant, op, grid = _nominal()
    f0 = solve_dp(plant, op, grid).f_hz
    band = (f0 - 0.001, f0 + 5e-5)
    with pytest.raises(BandEscapeError):
        sensitivity("I1", plant, op, grid, band=band)


# ------------------------------------------------------- counting oracle

def test_count_rhp_trivial():
    assert count_rhp_zeros(ComplexRational([0.0, 1.0]), ComplexRational([1.0])) == 0
    assert count_rhp_zeros(ComplexRational([0.0, 1.0]), ComplexRational([-1.0])) == 1


def test_count_rhp_zero_on_contour_raises():
    # char = s^2 + 1 has zeros on the imaginary axis
    zg = ComplexRational([0.0, 1.0])
    zf = ComplexRational([1.0], [0.0, 1.0])
    with pytest.raises(ValueError):
        count_rhp_zeros(zg, zf)


def test_count_rhp_matches_direct_count_on_draws():
    for _ in range(50):
        kp = RNG.uniform(0.06, 0.18)
        I1 = RNG.uniform(0.2, 1.0) * 2200.0 * SCALE_CAL
        n = int(RNG.integers(1, 10))
        zs = RNG.uniform(0.3, 1.5)
        phi = RNG.uniform(-0.4, 0.4)
        plant = PlantParams(kp=kp, Imax=2200.0 * SCALE_CAL)
        op = OperatingPoint(I1=I1, V1=V1_CAL, phi_i1=phi, n=n)
        grid = GridParams().scaled(zs)
        zf = farm_impedance(op, grid, plant)
        zg = grid_impedance(grid, plant.f1)
        direct = sum(1 for p in closed_loop_poles(zg, zf) if p.sigma > 0)
        assert count_rhp_zeros(zg, zf) == direct
