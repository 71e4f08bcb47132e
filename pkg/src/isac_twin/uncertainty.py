"""Polar-to-track uncertainty propagation and the sensing subcarrier bound.

The twin tracks the vehicle through a range/elevation belief
(r ~ (r_mean, r_var), theta ~ N(theta_mean, theta_var), independent).  The
along-track position is x = r cos(theta), whose exact first two moments
under the Gaussian angle are

    x_mean = r_mean cos(theta_mean) exp(-theta_var/2)
    Upsilon = E[cos^2 theta] = 1/2 + 1/2 cos(2 theta_mean) exp(-2 theta_var)
    Gamma   = r_mean^2 Var[cos theta]
            = r_mean^2 (Upsilon - cos^2(theta_mean) exp(-theta_var))
    x_var   = Gamma + r_var * Upsilon

Inverting x_var <= xi_bar^2 through the range-error floor
sigma_r^2 = (c/(4 pi delta_f))^2 * 6/((n_s^2-1) gamma_s) gives the minimal
sensing allocation

    n_s >= sqrt( 6 c^2 Upsilon / ((xi_bar^2 - Gamma) (4 pi delta_f)^2 gamma_s) + 1 ).

When xi_bar^2 <= Gamma the angle spread alone exceeds the accuracy budget
and no subcarrier count helps (SensingInfeasibleError).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .sensing import OfdmConfig
from .units import SPEED_OF_LIGHT


class SensingInfeasibleError(ValueError):
    """No n_s can meet the accuracy target (angle term exceeds the budget)."""


@dataclass(frozen=True)
class PolarBelief:
    range_mean: float
    range_var: float
    theta_mean: float
    theta_var: float

    def __post_init__(self):
        if self.range_mean < 0:
            raise ValueError("range mean must be non-negative")
        if self.range_var < 0 or self.theta_var < 0:
            raise ValueError("variances must be non-negative")


@dataclass(frozen=True)
class PositionBelief:
    x_mean: float
    x_var: float
    gamma_term: float    # angle-induced variance (m^2)
    upsilon_term: float  # E[cos^2 theta], multiplies the range variance


@dataclass(frozen=True)
class AccuracyTarget:
    """Twin accuracy cap xi^2 possibly tightened by an agent request eta.

    eta is an inverse-variance ask; the effective budget is
    min(xi^2, 1/eta).  eta = 0 means no request.
    """

    xi_sq: float
    eta: float = 0.0

    def __post_init__(self):
        if self.xi_sq <= 0:
            raise ValueError("xi^2 must be positive")
        if self.eta < 0:
            raise ValueError("eta must be non-negative")

    @property
    def xibar_sq(self) -> float:
        if self.eta == 0:
            return self.xi_sq
        return min(self.xi_sq, 1.0 / self.eta)


def position_moments(belief: PolarBelief) -> PositionBelief:
    """Exact mean/variance of x = r cos(theta) under the polar belief."""
    s = belief.theta_var
    c1 = math.cos(belief.theta_mean) * math.exp(-s / 2.0)
    upsilon = 0.5 + 0.5 * math.cos(2.0 * belief.theta_mean) * math.exp(-2.0 * s)
    gamma = belief.range_mean ** 2 * (upsilon - c1 * c1)
    # Var[cos theta] >= 0; guard the subtractive cancellation at tiny spreads
    gamma = max(gamma, 0.0)
    x_var = gamma + belief.range_var * upsilon
    return PositionBelief(x_mean=belief.range_mean * c1, x_var=x_var,
                          gamma_term=gamma, upsilon_term=upsilon)


def _position_var_at(cfg: OfdmConfig, n_s: int, gamma_term: float,
                     upsilon_term: float, gamma_s: float) -> float:
    if upsilon_term == 0.0:
        return gamma_term
    sigma_r_sq = (SPEED_OF_LIGHT / (4.0 * math.pi * cfg.delta_f)) ** 2 \
        * 6.0 / ((n_s ** 2 - 1) * gamma_s)
    return gamma_term + sigma_r_sq * upsilon_term


def required_sensing_subcarriers(cfg: OfdmConfig, belief: PolarBelief,
                                 target: AccuracyTarget, gamma_s: float) -> int:
    """Minimal integer n_s so the propagated position variance meets the target.

    The returned count may exceed the carrier budget N; the allocator deals
    with that.  Raises SensingInfeasibleError when the angle term alone
    breaks the budget.
    """
    if gamma_s <= 0:
        raise ValueError("gamma_s must be positive")
    moments = position_moments(PolarBelief(belief.range_mean, 0.0,
                                           belief.theta_mean, belief.theta_var))
    gamma_term, upsilon = moments.gamma_term, moments.upsilon_term
    xibar_sq = target.xibar_sq
    if xibar_sq <= gamma_term:
        raise SensingInfeasibleError(
            f"angle-induced variance {gamma_term:.3e} m^2 exceeds the budget {xibar_sq:.3e} m^2")
    if upsilon == 0.0:
        return 1
    bound = math.sqrt(6.0 * SPEED_OF_LIGHT ** 2 * upsilon
                      / ((xibar_sq - gamma_term) * (4.0 * math.pi * cfg.delta_f) ** 2 * gamma_s)
                      + 1.0)
    n = max(2, math.ceil(bound))
    # land exactly on the minimal feasible integer despite float rounding
    while n > 2 and _position_var_at(cfg, n - 1, gamma_term, upsilon, gamma_s) <= xibar_sq:
        n -= 1
    while _position_var_at(cfg, n, gamma_term, upsilon, gamma_s) > xibar_sq:
        n += 1
    return n
