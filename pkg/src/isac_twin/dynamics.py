"""Ground-vehicle plant: the continuous mountain-car update with hard state bounds.

Discrete-time update applied once per query interval:

    x'   = x + v + u_x
    v'   = v - GRAVITY * cos(3 x) + FORCE_GAIN * a + u_v

with the applied force a clamped to [-1, 1], position clamped to
[X_MIN, X_MAX], speed clamped to [-V_MAX, V_MAX], and an inelastic wall at
X_MIN (negative velocity zeroed there).  (u_x, u_v) is additive process
noise supplied by the caller.  The goal is crossing GOAL_X from the left;
each step costs 0.1 * a**2 and reaching the goal pays 100.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

GRAVITY = 0.0025
FORCE_GAIN = 0.0015
X_MIN = -1.2
X_MAX = 0.6
V_MAX = 0.07
GOAL_X = 0.45
GOAL_REWARD = 100.0
FORCE_COST = 0.1


@dataclass(frozen=True)
class AgvState:
    x: float
    v: float


def step(state: AgvState, force: float, noise: tuple[float, float] = (0.0, 0.0)) -> AgvState:
    """Advance the plant one interval. Force outside [-1, 1] is clamped."""
    a = min(max(force, -1.0), 1.0)
    x = state.x + state.v + noise[0]
    v = state.v - GRAVITY * math.cos(3.0 * state.x) + FORCE_GAIN * a + noise[1]
    v = min(max(v, -V_MAX), V_MAX)
    x = min(max(x, X_MIN), X_MAX)
    if x <= X_MIN and v < 0.0:
        v = 0.0
    return AgvState(float(x), float(v))


def goal_reward(prev: AgvState, force: float, new: AgvState) -> tuple[float, bool]:
    """Per-step reward and termination for the transition prev -> new.

    Reaching x >= GOAL_X pays GOAL_REWARD; every step costs
    FORCE_COST * force**2 (force as applied, i.e. clamped).
    """
    a = min(max(force, -1.0), 1.0)
    done = bool(new.x >= GOAL_X)
    reward = -FORCE_COST * a * a
    if done:
        reward += GOAL_REWARD
    return reward, done
