"""Iterative damping-gain tuning under the current-worst-condition
principle, plus the online retune trigger.

The tuner walks the effective proportional gain up a fixed grid
kp' = kp + i*epsilon and stops at the first point whose dominant pole
clears the damping-ratio margin; the damping gain follows from the
equivalent-gain relation k_sso = 2*zeta*(kp' - kp)/H0.
"""
from __future__ import annotations

import dataclasses
import math
import time
from dataclasses import dataclass

from .impedance import SsrdcConfig
from .params import GridParams, OperatingPoint, PlantParams, worst_condition
from .stability import Pole, damping_ratio, solve_dp


@dataclass(frozen=True)
class TuneReport:
    k_sso: float          # tuned damping gain
    kp_prime: float       # effective proportional gain at the stop point
    iterations: int       # grid index reached
    omega_sso: float      # commissioned band center, rad/s
    dp_before: Pole
    dp_after: Pole
    elapsed: float        # seconds
    stabilizable: bool

    def to_dict(self) -> dict:
        return {
            "k_sso": self.k_sso, "kp_prime": self.kp_prime,
            "iterations": self.iterations, "omega_sso": self.omega_sso,
            "dp_before": {"sigma": self.dp_before.sigma, "omega": self.dp_before.omega},
            "dp_after": {"sigma": self.dp_after.sigma, "omega": self.dp_after.omega},
            "elapsed": self.elapsed, "stabilizable": self.stabilizable,
        }


def tune_ksso(plant: PlantParams, op: OperatingPoint, grid: GridParams,
              cfg: SsrdcConfig | None = None) -> TuneReport:
    """Smallest grid gain whose worst-condition dominant pole clears the
    margin; stabilizable=False with the gain at the cap when the grid is
    exhausted.  Raises if any iteration loses the in-band pole."""
    if cfg is None:
        cfg = SsrdcConfig()
    t0 = time.perf_counter()
    wop = worst_condition(op, plant)
    dp_before = solve_dp(plant, wop, grid, band=cfg.band)
    wsso = dp_before.omega - plant.w1
    n_max = int(math.floor((cfg.k_max - plant.kp) / cfg.epsilon + 1e-9))

    dp = dp_before
    prev_zeta = None
    for i in range(n_max + 1):
        kp_prime = plant.kp + i * cfg.epsilon
        ks = 2 * cfg.zeta * (kp_prime - plant.kp) / cfg.H0
        if i:
            ss = dataclasses.replace(cfg, k_sso=ks, omega_sso=wsso)
            dp = solve_dp(plant, wop, grid, ssrdc=ss)
        if damping_ratio(dp) > cfg.mu_min:
            # minimality: the previous grid point had not cleared the margin
            assert prev_zeta is None or prev_zeta <= cfg.mu_min
            return TuneReport(k_sso=ks, kp_prime=kp_prime, iterations=i,
                              omega_sso=wsso, dp_before=dp_before, dp_after=dp,
                              elapsed=time.perf_counter() - t0, stabilizable=True)
        prev_zeta = damping_ratio(dp)
    return TuneReport(k_sso=ks, kp_prime=kp_prime, iterations=n_max,
                      omega_sso=wsso, dp_before=dp_before, dp_after=dp,
                      elapsed=time.perf_counter() - t0, stabilizable=False)


def retune_trigger(prev: tuple[int, GridParams], new: tuple[int, GridParams],
                   deadband: float = 0.01) -> bool:
    """True when the unit count changed or the line impedance moved beyond
    the relative deadband; routine output-power changes never trigger."""
    prev_n, prev_grid = prev
    new_n, new_grid = new
    if prev_n != new_n:
        return True
    zp = complex(prev_grid.RL, prev_grid.XL)
    zn = complex(new_grid.RL, new_grid.XL)
    if zp == 0:
        return zn != 0
    return abs(zn - zp) / abs(zp) > deadband
