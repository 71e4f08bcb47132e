import math

import numpy as np
import pytest

from isac_twin.sensing import OfdmConfig, sensing_snr
from isac_twin.uncertainty import (AccuracyTarget, PolarBelief,
                                   SensingInfeasibleError, position_moments,
                                   required_sensing_subcarriers)

CFG = OfdmConfig()

# frozen from tests/oracles/gen_moments.py: 2e7-sample Monte Carlo of
# x = r cos(theta) with independent Gaussian r and theta, plus the
# standard errors of the sampled mean and variance
MC_CASES = [
    # (r_mean, sigma_r, th_mean, sigma_th, mc_mean, se_mean, mc_var, se_var)
    (20.0, 0.5, 0.3, 0.05, 19.0827942916, 1.26e-4, 0.3157447522, 1.00e-4),
    (10.0, 1.0, 0.8, 0.02, 6.9656958411, 1.59e-4, 0.5058980732, 1.60e-4),
    (5.0, 0.1, 1.2, 0.10, 1.8026873191, 1.04e-4, 0.2166031723, 6.82e-5),
]


@pytest.mark.parametrize("rm, sr, tm, st, mc_mean, se_mean, mc_var, se_var",
                         MC_CASES)
def test_moments_match_monte_carlo(rm, sr, tm, st, mc_mean, se_mean, mc_var, se_var):
    pos = position_moments(PolarBelief(rm, sr ** 2, tm, st ** 2))
    assert abs(pos.x_mean - mc_mean) <= 4 * se_mean
    assert abs(pos.x_var - mc_var) <= 4 * se_var


def test_moments_degenerate_zero_angle():
    # theta pinned at 0: x == r exactly
    pos = position_moments(PolarBelief(12.0, 0.09, 0.0, 0.0))
    assert pos.x_mean == pytest.approx(12.0, rel=1e-15)
    assert pos.x_var == pytest.approx(0.09, rel=1e-15)
    assert pos.gamma_term == 0.0
    assert pos.upsilon_term == pytest.approx(1.0, rel=1e-15)


def test_moments_degenerate_broadside():
    # theta pinned at pi/2: x == 0 regardless of r
    pos = position_moments(PolarBelief(12.0, 0.09, math.pi / 2, 0.0))
    assert abs(pos.x_mean) < 1e-14
    assert pos.upsilon_term == pytest.approx(0.0, abs=1e-15)
    assert pos.x_var == pytest.approx(0.0, abs=1e-13)


def test_moments_variance_nonnegative_fuzz():
    rng = np.random.default_rng(4)
    for _ in range(5000):
        pos = position_moments(PolarBelief(
            float(rng.uniform(0.1, 100.0)), float(rng.uniform(0.0, 9.0)),
            float(rng.uniform(-math.pi, math.pi)), float(rng.uniform(0.0, 1.0))))
        assert pos.x_var >= 0.0
        assert pos.gamma_term >= 0.0
        assert 0.0 <= pos.upsilon_term <= 1.0


def test_belief_validation():
    with pytest.raises(ValueError):
        PolarBelief(-1.0, 0.1, 0.3, 0.01)
    with pytest.raises(ValueError):
        PolarBelief(10.0, -0.1, 0.3, 0.01)


def test_accuracy_target():
    assert AccuracyTarget(4e-4).xibar_sq == 4e-4
    assert AccuracyTarget(4e-4, eta=10.0).xibar_sq == pytest.approx(4e-4)
    assert AccuracyTarget(4e-4, eta=1e4).xibar_sq == pytest.approx(1e-4)
    with pytest.raises(ValueError):
        AccuracyTarget(0.0)
    with pytest.raises(ValueError):
        AccuracyTarget(1.0, eta=-1.0)


def _scan_minimum(belief, target, gamma, n_max=200_000):
    """Independent linear scan over the public pieces."""
    for n in range(2, n_max):
        sigma_r_sq = (299792458.0 / (4 * math.pi * CFG.delta_f)) ** 2 \
            * 6.0 / ((n * n - 1) * gamma)
        pos = position_moments(PolarBelief(belief.range_mean, sigma_r_sq,
                                           belief.theta_mean, belief.theta_var))
        if pos.x_var <= target.xibar_sq:
            return n
    return None


def test_demand_matches_scan():
    rng = np.random.default_rng(6)
    checked = 0
    for _ in range(80):
        belief = PolarBelief(float(rng.uniform(4, 30)), 0.0,
                             float(rng.uniform(0.05, 1.2)),
                             float(rng.uniform(1e-5, 6e-3)) ** 2)
        target = AccuracyTarget(float(rng.uniform(3e-3, 2.0)),
                                float(rng.uniform(0.0, 300.0)))
        gamma = float(rng.uniform(1.0, 1e4))
        try:
            n = required_sensing_subcarriers(CFG, belief, target, gamma)
        except SensingInfeasibleError:
            continue
        assert n == _scan_minimum(belief, target, gamma)
        checked += 1
    assert checked >= 40


def test_demand_boundary_is_tight():
    belief = PolarBelief(20.0, 0.0, 0.3, 2e-3 ** 2)
    target = AccuracyTarget(0.05)
    gamma = sensing_snr(CFG.with_rcs(8e-7), 20.0)
    n = required_sensing_subcarriers(CFG, belief, target, gamma)
    assert n == _scan_minimum(belief, target, gamma)


def test_demand_infeasible_pole():
    # wide angle spread at long range: no count can meet a 2 cm budget
    belief = PolarBelief(20.0, 0.0, 0.3, 0.05 ** 2)
    with pytest.raises(SensingInfeasibleError):
        required_sensing_subcarriers(CFG, belief, AccuracyTarget(0.02 ** 2), 100.0)


def test_demand_broadside_needs_one():
    # Upsilon = 0: range errors do not project on x at all
    belief = PolarBelief(20.0, 0.0, math.pi / 2, 0.0)
    n = required_sensing_subcarriers(CFG, belief, AccuracyTarget(1.0), 100.0)
    assert n == 1


def test_demand_ignores_belief_range_var():
    # the bound solves for the post-measurement variance; the prior range
    # variance does not enter
    a = PolarBelief(20.0, 0.0, 0.3, 1e-6)
    b = PolarBelief(20.0, 25.0, 0.3, 1e-6)
    t = AccuracyTarget(0.05)
    assert required_sensing_subcarriers(CFG, a, t, 50.0) == \
        required_sensing_subcarriers(CFG, b, t, 50.0)


def test_demand_monotone_in_budget():
    belief = PolarBelief(15.0, 0.0, 0.4, 1e-6)
    gamma = 30.0
    last = None
    for xi_sq in (2.0, 0.5, 0.1, 0.02):
        n = required_sensing_subcarriers(CFG, belief, AccuracyTarget(xi_sq), gamma)
        if last is not None:
            assert n >= last
        last = n
