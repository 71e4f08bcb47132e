import math

import numpy as np
import pytest

from isac_twin import dynamics
from isac_twin.dynamics import AgvState, goal_reward, step


def test_spot_value_full_force_from_rest():
    new = step(AgvState(0.0, 0.0), 1.0)
    assert new.x == 0.0
    assert new.v == pytest.approx(-0.001, abs=1e-15)  # 0.0015 - 0.0025*cos(0)


def test_spot_value_coasting():
    new = step(AgvState(0.3, 0.05), 0.0)
    assert new.x == pytest.approx(0.35, abs=1e-15)
    assert new.v == pytest.approx(0.05 - 0.0025 * math.cos(0.9), abs=1e-15)


def test_equilibrium_point():
    # at x = -pi/6 the slope term cos(3x) vanishes (to float eps), so rest
    # stays rest
    state = AgvState(-math.pi / 6.0, 0.0)
    new = step(state, 0.0)
    assert new.x == state.x
    assert new.v == pytest.approx(0.0, abs=1e-18)


def test_position_integrates_old_velocity():
    new = step(AgvState(-0.5, 0.03), -1.0)
    assert new.x == pytest.approx(-0.47, abs=1e-15)


def test_force_clamped():
    assert step(AgvState(0.1, 0.0), 7.0) == step(AgvState(0.1, 0.0), 1.0)
    assert step(AgvState(0.1, 0.0), -7.0) == step(AgvState(0.1, 0.0), -1.0)


def test_noise_enters_before_clamp():
    base = step(AgvState(0.0, 0.0), 0.0)
    shifted = step(AgvState(0.0, 0.0), 0.0, noise=(0.01, 0.002))
    assert shifted.x == pytest.approx(base.x + 0.01, abs=1e-15)
    assert shifted.v == pytest.approx(base.v + 0.002, abs=1e-15)


def test_bounds_and_wall_fuzz():
    rng = np.random.default_rng(0)
    for _ in range(10_000):
        state = AgvState(float(rng.uniform(-1.2, 0.6)), float(rng.uniform(-0.07, 0.07)))
        new = step(state, float(rng.uniform(-3, 3)),
                   noise=(float(rng.normal(0, 0.05)), float(rng.normal(0, 0.01))))
        assert dynamics.X_MIN <= new.x <= dynamics.X_MAX
        assert -dynamics.V_MAX <= new.v <= dynamics.V_MAX
        if new.x == dynamics.X_MIN:
            assert new.v >= 0.0  # inelastic wall


def test_velocity_clamp_exact():
    new = step(AgvState(0.0, 0.069), 1.0, noise=(0.0, 0.05))
    assert new.v == dynamics.V_MAX


def test_goal_reward_below_goal():
    prev, new = AgvState(0.0, 0.0), AgvState(0.1, 0.01)
    reward, done = goal_reward(prev, 0.5, new)
    assert not done and isinstance(done, bool)
    assert reward == pytest.approx(-0.1 * 0.25, abs=1e-15)


def test_goal_reward_at_goal():
    reward, done = goal_reward(AgvState(0.44, 0.02), 1.0, AgvState(0.46, 0.02))
    assert done
    assert reward == pytest.approx(100.0 - 0.1, abs=1e-12)


def test_goal_reward_clamps_force_cost():
    reward, _ = goal_reward(AgvState(0.0, 0.0), 5.0, AgvState(0.0, 0.0))
    assert reward == pytest.approx(-0.1, abs=1e-15)


def test_returns_plain_floats():
    new = step(AgvState(0.0, 0.0), 0.0, noise=(np.float64(0.01), np.float64(0.0)))
    assert type(new.x) is float and type(new.v) is float
