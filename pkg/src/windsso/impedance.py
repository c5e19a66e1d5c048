"""Small-signal impedance models: per-unit converter impedance, farm
aggregation, grid impedance, and the PLL transfer function with an optional
band-pass damping branch.

All models are phase-domain rationals in s; the synchronous-frame control
appears through terms shifted by -j*w1, which is what makes the
coefficients complex.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .params import GridParams, OperatingPoint, PlantParams, ohm_to_henry, pu_to_ohm, z_base
from .tf import ComplexRational, _padd, _pmul, _pshift


@dataclass(frozen=True)
class SsrdcConfig:
    """Damping-controller configuration and tuning constants.

    dp_mode selects how the damping branch enters pole computations:
    "full" keeps the complete band-pass branch inside the PLL transfer
    function; "equiv" replaces it by the constant gain it presents at the
    band center (kp -> kp + H0*k_sso/(2*zeta)).
    """
    H0: float = 1.0           # band-pass gain
    zeta: float = 0.3         # band-pass damping coefficient
    k_sso: float = 0.0        # damping gain
    k_max: float = 0.4        # cap on the effective proportional gain
    mu_min: float = 0.01      # required damping-ratio margin
    epsilon: float = 0.01     # tuner grid step
    t_e: float = 0.2          # frequency-estimator reporting delay, s
    limiter: float = 100.0    # bound on the correction signal, V
    band: tuple = (55.0, 95.0)  # dominant-pole search window, Hz
    omega_sso: float = 0.0    # active band center, rad/s (0 = inactive)
    dp_mode: str = "full"

    def __post_init__(self):
        object.__setattr__(self, "band", tuple(float(b) for b in self.band))
        if not (self.H0 > 0 and 0 < self.zeta < 1):
            raise ValueError("need H0 > 0 and zeta in (0,1)")
        if self.k_sso < 0 or self.epsilon <= 0 or self.mu_min <= 0:
            raise ValueError("need k_sso >= 0, epsilon > 0, mu_min > 0")
        if not (0 < self.band[0] < self.band[1]):
            raise ValueError("band must satisfy 0 < f_lo < f_hi")
        if self.dp_mode not in ("full", "equiv"):
            raise ValueError("dp_mode must be 'full' or 'equiv'")


def t1_phi(plant: PlantParams, V1: float) -> tuple[float, float]:
    """Magnitude/angle pair of the voltage-path PLL coupling term."""
    kv = plant.km * plant.Vdc
    rhs = (1j * plant.w1 * plant.L1 + V1 * (1.0 - kv * plant.kf)) / kv
    return 2.0 * abs(rhs), cmath.phase(rhs)


def ssrdc_branch(ssrdc: SsrdcConfig, omega_sso: float) -> ComplexRational:
    """Band-pass damping branch k_sso*H0*w*s/(s^2 + 2*zeta*w*s + w^2)."""
    if omega_sso < 0:
        raise ValueError("omega_sso must be nonnegative")
    if omega_sso == 0.0:
        return ComplexRational([0.0])
    num = [0.0, ssrdc.k_sso * ssrdc.H0 * omega_sso]
    den = [omega_sso ** 2, 2 * ssrdc.zeta * omega_sso, 1.0]
    return ComplexRational(num, den)


def equivalent_kp(kp: float, ssrdc: SsrdcConfig) -> float:
    """Constant proportional gain the damping branch adds at band center."""
    return kp + ssrdc.H0 * ssrdc.k_sso / (2 * ssrdc.zeta)


def ksso_from_kp_prime(kp: float, kp_prime: float, ssrdc: SsrdcConfig) -> float:
    """Inverse of equivalent_kp; round-trips exactly."""
    return 2 * ssrdc.zeta * (kp_prime - kp) / ssrdc.H0


def _pll_polys(plant: PlantParams, V1: float, ssrdc: SsrdcConfig | None):
    """Unshifted closed PLL transfer T = V1*G/(s^2*B + V1*G) as (num, den)
    polynomial pair, where G*s*B is the loop-filter numerator."""
    kp = plant.kp
    if ssrdc is not None and ssrdc.k_sso > 0.0 and ssrdc.dp_mode == "equiv":
        kp = equivalent_kp(kp, ssrdc)
    if (ssrdc is not None and ssrdc.k_sso > 0.0 and ssrdc.dp_mode == "full"
            and ssrdc.omega_sso > 0.0):
        w = ssrdc.omega_sso
        B = np.array([w * w, 2 * ssrdc.zeta * w, 1.0], complex)
        sB = _pmul(np.array([0.0, 1.0], complex), B)
        G = _padd(kp * sB, _padd(plant.ki * B,
                                 np.array([0, 0, ssrdc.H0 * ssrdc.k_sso * w], complex)))
        num = V1 * G
        den = _padd(_pmul(np.array([0, 0, 1.0], complex), B), V1 * G)
    else:
        num = V1 * np.array([plant.ki, kp], complex)
        den = np.array([V1 * plant.ki, V1 * kp, 1.0], complex)
    return num, den


def pll_transfer(plant: PlantParams, V1: float,
                 ssrdc: SsrdcConfig | None = None) -> ComplexRational:
    """Closed PLL tracking transfer function in the loop variable."""
    num, den = _pll_polys(plant, V1, ssrdc)
    return ComplexRational(num, den)


def _pmsg_polys(plant: PlantParams, op: OperatingPoint,
                ssrdc: SsrdcConfig | None = None):
    """Converter impedance as a raw (num, den) polynomial pair."""
    w1 = plant.w1
    dz = -1j * w1
    kv = plant.km * plant.Vdc
    kfs = kv * plant.kf
    V1, I1, phi = op.V1, op.I1, op.phi_i1

    H1n = _pshift(np.array([plant.kii, plant.kip], complex), dz)
    H1d = _pshift(np.array([0.0, 1.0], complex), dz)
    Tn_u, Td_u = _pll_polys(plant, V1, ssrdc)
    Tn, Td = _pshift(Tn_u, dz), _pshift(Td_u, dz)

    ctrl = _padd(H1n, -1j * plant.kd * H1d)          # current PI + decoupling
    numn = _padd(kv * ctrl, _pmul(np.array([0.0, plant.L1], complex), H1d))

    t1c = (1j * w1 * plant.L1 + V1 * (1.0 - kfs)) / kv
    rot = (I1 / 2.0) * cmath.exp(-1j * phi)
    if plant.t1_current_scaled:
        brn = rot * _padd(t1c * H1d, ctrl)
    else:
        brn = _padd(t1c * H1d, rot * ctrl)
    dend = _pmul(H1d, Td)
    denn = _padd((1.0 - kfs) * dend, -(kv / V1) * _pmul(brn, Tn))
    # the ratio (numn/H1d)/(denn/dend) shares the exact factor H1d between
    # numerator and denominator; cancel it analytically so no spurious root
    # lands at j*w1 (exactly on the winding contour)
    return _pmul(numn, Td), denn


def pmsg_impedance(plant: PlantParams, op: OperatingPoint,
                   ssrdc: SsrdcConfig | None = None) -> ComplexRational:
    """Small-signal impedance of one converter unit at its terminal.

    With an SsrdcConfig carrying k_sso > 0 and an active omega_sso, the PLL
    transfer function is augmented by the damping branch (mode per
    ssrdc.dp_mode).  k_sso = 0 reproduces the plain model bit for bit.
    """
    num, den = _pmsg_polys(plant, op, ssrdc)
    z = ComplexRational(num, den, reduce=False, trim=False)
    if len(np.trim_zeros(z.den, "b")) <= 1:
        raise ValueError("degenerate impedance: denominator bracket vanished")
    return z.reduce()


def _branch_polys(plant: PlantParams, op: OperatingPoint, grid: GridParams,
                  ssrdc: SsrdcConfig | None):
    lt = ohm_to_henry(pu_to_ohm(grid.XT, grid), plant.f1)
    num, den = _pmsg_polys(plant, op, ssrdc)
    num = _padd(num, _pmul(np.array([0.0, lt], complex), den))
    return num, den


def farm_impedance(op: OperatingPoint, grid: GridParams, plant: PlantParams,
                   ssrdc: SsrdcConfig | None = None,
                   n_override: float | None = None) -> ComplexRational:
    """Aggregate farm impedance: per-branch unit-plus-transformer impedance
    divided by the unit count; heterogeneous farms combine type branches in
    parallel.  n_override substitutes a (possibly non-integer) unit count,
    which the sensitivity sweep uses to treat n as continuous."""
    if op.unit_types:
        # combine type branches pairwise on raw polynomials; the operator
        # algebra would trim the genuinely tiny inductance-product leading
        # coefficients away
        acc = None
        for pl, typ_op, count in op.unit_types:
            num, den = _branch_polys(pl, typ_op, grid, ssrdc)
            den = float(count) * den
            if acc is None:
                acc = (num, den)
            else:
                an, ad = acc
                acc = (_pmul(an, num), _padd(_pmul(an, den), _pmul(num, ad)))
        return ComplexRational(acc[0], acc[1], reduce=False, trim=False).reduce()
    n = float(op.n if n_override is None else n_override)
    num, den = _branch_polys(plant, op, grid, ssrdc)
    return ComplexRational(num, n * den, reduce=False, trim=False)


def grid_impedance(grid: GridParams, f1: float = 50.0) -> ComplexRational:
    """Thevenin line impedance R + sL seen from the integrated bus; the
    transformer reactance belongs to the farm branches, not here."""
    r = pu_to_ohm(grid.RL, grid)
    lg = ohm_to_henry(pu_to_ohm(grid.XL, grid), f1)
    return ComplexRational([r, lg])
