"""Downlink mmWave rate model with MMSE channel estimation from pilots.

Per-QI link statistics over n_c scheduled subcarriers at range r:

    beta        = n_c * G_tx * c^2 / (4 pi r f_c)^2      (aggregate gain)
    sigma_h^2   = tau_p p_p beta^2 / (tau_p p_p beta + sigma_p^2)
    eps^2       = beta - sigma_h^2                        (estimation error)
    sigma_w^2   = N0 * F * n_c * delta_f                  (data noise)
    gamma_c     = P_tx sigma_h^2 / (P_tx eps^2 + sigma_w^2)
    rate        = tau_bar * n_c * delta_f * log2(1 + gamma_c)

with tau_bar = (tau_tot - tau_p)/tau_tot the pilot-overhead discount.  The
linear growth of beta with n_c is kept verbatim from the source model;
``beta_scales_with_n_c=False`` drops it.  Pilot noise sigma_p^2 tracks the
data noise floor when left unset.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

from .sensing import OfdmConfig
from .units import SPEED_OF_LIGHT, dbm_to_watt


@dataclass(frozen=True)
class PilotConfig:
    tau_p: int = 16                 # pilot symbols per block
    tau_tot: int = 256              # block length in symbols
    p_p: float = dbm_to_watt(25.0)  # pilot power (W); calibration retunes this
    sigma_p_sq: Optional[float] = None  # pilot noise power; None = track data floor
    beta_scales_with_n_c: bool = True

    def __post_init__(self):
        if not 0 < self.tau_p < self.tau_tot:
            raise ValueError("need 0 < tau_p < tau_tot")
        if self.p_p <= 0:
            raise ValueError("pilot power must be positive")
        if self.sigma_p_sq is not None and self.sigma_p_sq <= 0:
            raise ValueError("pilot noise power must be positive")

    @property
    def tau_bar(self) -> float:
        return (self.tau_tot - self.tau_p) / self.tau_tot

    def with_pilot_power(self, p_p: float) -> "PilotConfig":
        return replace(self, p_p=p_p)


@dataclass(frozen=True)
class LinkStats:
    n_c: int
    beta: float
    sigma_hhat_sq: float
    eps_sq: float
    sigma_w_sq: float
    gamma_c: float
    tau_bar: float
    rate: float  # bit/s


def link_stats(cfg: OfdmConfig, pilots: PilotConfig, n_c: int, range_m: float) -> LinkStats:
    """Channel, SINR and achievable rate for n_c subcarriers at range r.

    n_c = 0 is a valid no-grant QI and yields all-zero stats.
    """
    if n_c < 0:
        raise ValueError("n_c must be non-negative")
    if range_m <= 0:
        raise ValueError("range must be positive")
    tau_bar = pilots.tau_bar
    if n_c == 0:
        return LinkStats(0, 0.0, 0.0, 0.0, 0.0, 0.0, tau_bar, 0.0)
    scale = n_c if pilots.beta_scales_with_n_c else 1
    beta = scale * cfg.tx_gain * SPEED_OF_LIGHT ** 2 / (
        4.0 * math.pi * range_m * cfg.f_c) ** 2
    sigma_p_sq = pilots.sigma_p_sq
    if sigma_p_sq is None:
        sigma_p_sq = cfg.noise_density * cfg.noise_figure * cfg.delta_f * n_c
    pilot_energy = pilots.tau_p * pilots.p_p * beta
    sigma_hhat_sq = pilot_energy * beta / (pilot_energy + sigma_p_sq)
    eps_sq = beta - sigma_hhat_sq
    sigma_w_sq = cfg.noise_density * cfg.noise_figure * n_c * cfg.delta_f
    gamma_c = cfg.tx_power * sigma_hhat_sq / (cfg.tx_power * eps_sq + sigma_w_sq)
    rate = tau_bar * n_c * cfg.delta_f * math.log2(1.0 + gamma_c)
    return LinkStats(n_c, beta, sigma_hhat_sq, eps_sq, sigma_w_sq, gamma_c, tau_bar, rate)


def comm_demand_closed_form(gamma_c: float, tau_bar: float, delta_f: float,
                            rate_target: float) -> int:
    """Subcarrier count needed at a fixed SINR: ceil(R / (tau_bar df log2(1+g)))."""
    if rate_target <= 0:
        return 0
    if gamma_c <= 0:
        raise ValueError("closed form needs a positive SINR")
    return math.ceil(rate_target / (tau_bar * delta_f * math.log2(1.0 + gamma_c)))


def required_comm_subcarriers(cfg: OfdmConfig, pilots: PilotConfig, rate_target: float,
                              range_m: float) -> int:
    """Minimal n_c whose achievable rate meets rate_target at range r.

    Solved by fixed-point iteration on the closed form (gamma_c depends on
    n_c through beta and the noise floor), then nudged to the exact minimal
    feasible count.  The iteration is capped at 4N; if even 4N subcarriers
    cannot carry the target the uncapped closed-form demand at that SINR is
    returned (necessarily > 4N), which the allocator treats as overflow.
    """
    if rate_target <= 0:
        return 0
    cap = 4 * cfg.n_subcarriers

    def rate(n: int) -> float:
        return link_stats(cfg, pilots, n, range_m).rate

    n = 1
    for _ in range(cap):
        stats = link_stats(cfg, pilots, n, range_m)
        if stats.gamma_c <= 0:
            break
        nxt = min(comm_demand_closed_form(stats.gamma_c, stats.tau_bar,
                                          cfg.delta_f, rate_target), cap)
        if nxt == n:
            break
        n = nxt
    while n < cap and rate(n) < rate_target:
        n += 1
    while n > 1 and rate(n - 1) >= rate_target:
        n -= 1
    if rate(n) < rate_target:
        stats = link_stats(cfg, pilots, cap, range_m)
        return comm_demand_closed_form(stats.gamma_c, stats.tau_bar,
                                       cfg.delta_f, rate_target)
    return n
