"""Closed-loop pole computation, dominant-pole selection, damping ratio,
parameter sensitivity, and an argument-principle counting oracle."""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .impedance import SsrdcConfig, farm_impedance, grid_impedance
from .params import GridParams, OperatingPoint, PlantParams
from .tf import ComplexRational, _padd, _pderiv, _peval, _pmul, _pshift, poly_roots

DEFAULT_BAND = (55.0, 95.0)
SIGMA_TIE = 1e-6


@dataclass(frozen=True)
class Pole:
    sigma: float   # real part, 1/s
    omega: float   # imaginary part, rad/s

    @property
    def as_complex(self) -> complex:
        return complex(self.sigma, self.omega)

    @property
    def f_hz(self) -> float:
        return self.omega / (2 * math.pi)


def _char_poly(zg: ComplexRational, zfarm: ComplexRational) -> np.ndarray:
    return _padd(_pmul(zg.num, zfarm.den), _pmul(zfarm.num, zg.den))


def closed_loop_poles(zg: ComplexRational, zfarm: ComplexRational) -> list[Pole]:
    """Roots of num(zg)*den(zfarm) + num(zfarm)*den(zg), Newton-polished on
    the characteristic polynomial and clustered; sorted by descending real
    part for determinism."""
    char = np.trim_zeros(_char_poly(zg, zfarm), "b")
    if len(char) <= 1:
        raise ValueError("degenerate characteristic polynomial (degree 0)")
    roots = poly_roots(char)
    dchar = _pderiv(char)
    for _ in range(2):
        pv = np.array([_peval(char, r) for r in roots])
        dv = np.array([_peval(dchar, r) for r in roots])
        dv = np.where(dv == 0.0, 1.0, dv)
        roots = roots - pv / dv
    order = np.lexsort((-roots.imag, -roots.real))
    return [Pole(float(r.real), float(r.imag)) for r in roots[order]]


def dominant_pole(poles, band=DEFAULT_BAND) -> Pole:
    """In-band pole with the largest real part; ties within SIGMA_TIE break
    toward the larger frequency."""
    lo, hi = band
    cand = [p for p in poles if lo <= p.omega / (2 * math.pi) <= hi]
    if not cand:
        raise ValueError(f"no in-band pole (band {lo}-{hi} Hz)")
    best = max(cand, key=lambda p: p.sigma)
    tied = [p for p in cand if best.sigma - p.sigma <= SIGMA_TIE]
    return max(tied, key=lambda p: p.omega)


def damping_ratio(p: Pole) -> float:
    mag = math.hypot(p.sigma, p.omega)
    if mag == 0.0:
        raise ValueError("damping ratio undefined at the origin")
    return -p.sigma / mag


def solve_dp(plant: PlantParams, op: OperatingPoint, grid: GridParams,
             ssrdc: SsrdcConfig | None = None, band=None,
             n_override: float | None = None) -> Pole:
    """Dominant closed-loop pole of the farm-grid interconnection."""
    if band is None:
        band = ssrdc.band if ssrdc is not None else DEFAULT_BAND
    zf = farm_impedance(op, grid, plant, ssrdc, n_override=n_override)
    zg = grid_impedance(grid, plant.f1)
    return dominant_pole(closed_loop_poles(zg, zf), band)


SENSITIVITY_PARAMS = ("kp", "ki", "kip", "kii", "I1", "n", "R", "X")


class BandEscapeError(RuntimeError):
    """The dominant pole left the search band under a perturbation."""


def _dp_sigma(plant, op, grid, band, n_val=None):
    try:
        return solve_dp(plant, op, grid, band=band, n_override=n_val).sigma
    except ValueError as exc:
        raise BandEscapeError(str(exc)) from exc


def sensitivity(param_id: str, plant: PlantParams, op: OperatingPoint,
                grid: GridParams, delta_rel: float = 1e-4,
                band=DEFAULT_BAND) -> float:
    """Central-difference sensitivity of Re(dominant pole) to a relative
    change of one parameter; n is treated as continuous."""
    if param_id == "t_e":
        return 0.0   # detector delay never enters the impedance model
    if param_id not in SENSITIVITY_PARAMS:
        raise ValueError(f"unknown parameter {param_id!r}; use one of {SENSITIVITY_PARAMS}")
    if not (0 < delta_rel <= 0.1):
        raise ValueError("delta_rel must lie in (0, 0.1]")

    def at(rel: float) -> float:
        if param_id in ("kp", "ki", "kip", "kii"):
            pl = dataclasses.replace(plant, **{param_id: getattr(plant, param_id) * rel})
            return _dp_sigma(pl, op, grid, band)
        if param_id == "I1":
            o = dataclasses.replace(op, I1=op.I1 * rel)
            return _dp_sigma(plant, o, grid, band)
        if param_id == "n":
            return _dp_sigma(plant, op, grid, band, n_val=op.n * rel)
        if param_id == "R":
            g = dataclasses.replace(grid, RL=grid.RL * rel)
            return _dp_sigma(plant, op, g, band)
        g = dataclasses.replace(grid, XL=grid.XL * rel)
        return _dp_sigma(plant, op, g, band)

    x0 = {"kp": plant.kp, "ki": plant.ki, "kip": plant.kip, "kii": plant.kii,
          "I1": op.I1, "n": float(op.n), "R": grid.RL, "X": grid.XL}[param_id]
    if x0 == 0.0:
        return 0.0
    h = delta_rel * abs(x0)
    return (at(1 + delta_rel) - at(1 - delta_rel)) / (2 * h)


def count_rhp_zeros(zg: ComplexRational, zfarm: ComplexRational,
                    contour: np.ndarray | None = None) -> int:
    """Number of right-half-plane closed-loop poles by the argument
    principle: winding number of the characteristic polynomial (the
    denominator-cleared form of zg + zfarm) along a contour enclosing the
    right half plane, refined until every phase step is below pi/2."""
    char = np.trim_zeros(_char_poly(zg, zfarm), "b")
    if len(char) <= 1:
        raise ValueError("degenerate characteristic polynomial")
    if contour is None:
        # Fujiwara bound on root magnitude fixes the enclosing rectangle; the
        # Cauchy bound blows up on tiny henry-product leading coefficients
        deg = len(char) - 1
        lead = abs(char[-1])
        r = 2.0 * max(abs(char[deg - k] / lead) ** (1.0 / k)
                      for k in range(1, deg + 1))
        contour = np.array([0.0 - 1j * r, r - 1j * r, r + 1j * r, 0.0 + 1j * r],
                           dtype=complex)

    pts = list(np.asarray(contour, dtype=complex))
    segs = [(pts[i], pts[(i + 1) % len(pts)]) for i in range(len(pts))]
    total = 0.0
    for a, b in segs:
        total += _winding_segment(char, a, b)
    return int(round(total / (2 * math.pi)))


def _root_free_radius(char: np.ndarray, m: complex) -> float:
    """Radius around m certified to contain no zero (Cauchy bound on the
    Taylor coefficients of char at m)."""
    t = _pshift(char, m)
    c0 = abs(t[0])
    if c0 == 0.0:
        return 0.0
    n = len(t) - 1
    rho = math.inf
    for k in range(1, n + 1):
        tk = abs(t[k])
        if tk != 0.0:
            rho = min(rho, (c0 / (n * tk)) ** (1.0 / k))
    return 0.99 * rho


def _winding_segment(char: np.ndarray, a: complex, b: complex,
                     max_depth: int = 40) -> float:
    """Phase change of char along the straight segment a->b.

    A segment is accepted only when a root-free disk around its midpoint
    certifies the true phase change is at most pi/2; the measured principal
    value then cannot alias a full extra turn.  Failing to certify within
    max_depth levels means a zero sits (numerically) on the contour.
    """
    deg = len(char) - 1
    thresh = math.sin(math.pi / (4.0 * deg))
    va, vb = _peval(char, a), _peval(char, b)
    stack = [(a, b, va, vb, 0)]
    acc = 0.0
    while stack:
        a, b, va, vb, depth = stack.pop()
        if va == 0.0 or vb == 0.0:
            raise ValueError("characteristic polynomial has a zero on the contour")
        m = 0.5 * (a + b)
        half = 0.5 * abs(b - a)
        if half <= _root_free_radius(char, m) * thresh:
            acc += math.atan2((vb / va).imag, (vb / va).real)
            continue
        if depth >= max_depth:
            raise ValueError("characteristic polynomial has a zero on or "
                             "too close to the contour")
        vm = _peval(char, m)
        stack.append((a, m, va, vm, depth + 1))
        stack.append((m, b, vm, vb, depth + 1))
    return acc
