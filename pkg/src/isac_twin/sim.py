"""Per-QI closed loop: sense, update the twin's belief, act, allocate, report.

Geometry: the vehicle runs on a straight ground track; an access point sits
ap_height above the point the track is measured from.  Task coordinates
x in [-1.2, 0.6] map affinely onto ground position

    p = track_offset + (x + 1.2) / 1.8 * track_length        (m)

so range r = hypot(p, h), elevation theta = atan2(h, p), and the radial
velocity is the ground speed (one task velocity unit per QI scaled to m/s)
projected on the line of sight.

Each QI executes, in order: the agent picks (force, eta) from the current
belief; the twin computes subcarrier demands from that belief; the
allocator splits the budget; the radar senses the *current* plant state
with the granted n_s (so the belief the agent uses next interval is one
step stale, matching a twin that never extrapolates); the plant steps with
process noise; the downlink rate for the granted n_c is logged.  With a
granted n_s < 2 or a saturated angle bound there is no measurement and the
belief dead-reckons through the known dynamics.

Two sensing paths: "crb" draws the measurement error from the estimation
floors directly (fast path, used for training and statistics), "signal"
synthesizes the radar frame and reads the periodogram peak (used for
sensing-fidelity checks).  Belief variances come from the floors either
way.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field, fields, replace
from typing import Optional, get_args, get_origin, get_type_hints

import numpy as np

from . import dynamics
from .agent import AgentAction, BeliefState, Policy, augmented_reward
from .allocator import MODES, AllocationDecision, allocate, p1_objective
from .comms import PilotConfig, link_stats, required_comm_subcarriers
from .sensing import (AngleSaturatedError, OfdmConfig, crb_bundle, periodogram,
                      sensing_snr, synthesize_frame)
from .uncertainty import (AccuracyTarget, PolarBelief, SensingInfeasibleError,
                          position_moments, required_sensing_subcarriers)

TASK_SPAN = 1.8  # x range of the plant, maps onto track_length

SENSING_MODES = ("crb", "signal")
OBSERVATION_MODES = ("isac", "perfect")


@dataclass(frozen=True)
class GeometryConfig:
    ap_height: float = 3.0
    track_offset: float = 10.0  # ground distance of x = -1.2 from the AP (m)
    track_length: float = 10.0

    def __post_init__(self):
        if self.ap_height <= 0 or self.track_length <= 0 or self.track_offset < 0:
            raise ValueError("need ap_height > 0, track_length > 0, track_offset >= 0")


@dataclass(frozen=True)
class ScenarioConfig:
    ofdm: OfdmConfig = field(default_factory=OfdmConfig)
    pilots: PilotConfig = field(default_factory=PilotConfig)
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    xi: float = 0.02             # twin accuracy cap (m)
    rate_target: float = 1e9     # bit/s
    allocator_mode: str = "cp"
    qi_duration: float = 0.05    # s
    episode_cap: int = 999
    seed: int = 0
    sensing_mode: str = "crb"
    observation: str = "isac"
    kappa: float = 5e-6
    eta_cost_sign: float = -1.0
    process_noise_std: float = 1e-4  # per-component std of the plant noise
    randomize_start_range: bool = True
    start_range_min: float = 5.0
    start_range_max: float = 30.0
    start_x_min: float = -0.6
    start_x_max: float = -0.4

    def __post_init__(self):
        if self.xi <= 0:
            raise ValueError("xi must be positive")
        if self.qi_duration <= 0:
            raise ValueError("qi_duration must be positive")
        if self.episode_cap < 1:
            raise ValueError("episode_cap must be at least 1")
        if self.allocator_mode not in MODES:
            raise ValueError(f"unknown allocator mode {self.allocator_mode!r}")
        if self.sensing_mode not in SENSING_MODES:
            raise ValueError(f"unknown sensing mode {self.sensing_mode!r}")
        if self.observation not in OBSERVATION_MODES:
            raise ValueError(f"unknown observation mode {self.observation!r}")
        if self.kappa < 0:
            raise ValueError("kappa must be non-negative")
        if not self.start_range_min <= self.start_range_max:
            raise ValueError("start range bounds out of order")
        if self.start_range_min <= self.geometry.ap_height:
            raise ValueError("start range must exceed the AP height")
        if not self.start_x_min <= self.start_x_max:
            raise ValueError("start x bounds out of order")


@dataclass(frozen=True)
class PhysicalPose:
    ground_pos: float
    range_m: float
    theta: float
    radial_velocity: float


# ---------------------------------------------------------------------------
# geometry


def ground_position(scenario: ScenarioConfig, x: float) -> float:
    g = scenario.geometry
    return g.track_offset + (x - dynamics.X_MIN) / TASK_SPAN * g.track_length


def task_position(scenario: ScenarioConfig, ground_pos: float) -> float:
    g = scenario.geometry
    return (ground_pos - g.track_offset) * TASK_SPAN / g.track_length + dynamics.X_MIN


def physical_map(scenario: ScenarioConfig, state: dynamics.AgvState) -> PhysicalPose:
    """True pose of the plant state in radar coordinates."""
    g = scenario.geometry
    p = ground_position(scenario, state.x)
    r = math.hypot(p, g.ap_height)
    theta = math.atan2(g.ap_height, p)
    ground_speed = state.v * g.track_length / TASK_SPAN / scenario.qi_duration
    return PhysicalPose(ground_pos=p, range_m=r, theta=theta,
                        radial_velocity=ground_speed * (p / r))


def elevation_at_range(scenario: ScenarioConfig, range_m: float) -> float:
    h = scenario.geometry.ap_height
    if range_m < h:
        raise ValueError("range below the AP height")
    return math.asin(h / range_m)


# ---------------------------------------------------------------------------
# scenario serialization (flat key/value text, unknown keys rejected)

_SECTIONS = {"ofdm": OfdmConfig, "pilots": PilotConfig, "geometry": GeometryConfig}


def _flat_fields() -> dict[str, type]:
    out: dict[str, type] = {}
    for name, cls in _SECTIONS.items():
        hints = get_type_hints(cls)
        for f in fields(cls):
            out[f"{name}.{f.name}"] = hints[f.name]
    hints = get_type_hints(ScenarioConfig)
    for f in fields(ScenarioConfig):
        if f.name not in _SECTIONS:
            out[f.name] = hints[f.name]
    return out


def _format_value(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    return repr(v) if isinstance(v, float) else str(v)


def _parse_value(text: str, hint) -> object:
    if get_origin(hint) is not None:  # Optional[float]
        args = [a for a in get_args(hint) if a is not type(None)]
        if text.lower() == "none":
            return None
        hint = args[0]
    if hint is bool:
        if text.lower() in ("true", "1", "yes"):
            return True
        if text.lower() in ("false", "0", "no"):
            return False
        raise ValueError(f"not a boolean: {text!r}")
    if hint is int:
        return int(text)
    if hint is float:
        return float(text)
    return text


def scenario_to_text(scenario: ScenarioConfig) -> str:
    lines = []
    for key in sorted(_flat_fields()):
        if "." in key:
            section, name = key.split(".", 1)
            value = getattr(getattr(scenario, section), name)
        else:
            value = getattr(scenario, key)
        lines.append(f"{key} = {_format_value(value)}")
    return "\n".join(lines) + "\n"


def scenario_from_text(text: str) -> ScenarioConfig:
    known = _flat_fields()
    seen: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in known:
            raise ValueError(f"line {lineno}: unknown scenario key {key!r}")
        if key in seen:
            raise ValueError(f"line {lineno}: duplicate key {key!r}")
        seen[key] = _parse_value(val, known[key])
    sections: dict[str, dict] = {name: {} for name in _SECTIONS}
    top: dict[str, object] = {}
    for key, value in seen.items():
        if "." in key:
            section, name = key.split(".", 1)
            sections[section][name] = value
        else:
            top[key] = value
    kwargs = dict(top)
    for name, cls in _SECTIONS.items():
        if sections[name]:
            kwargs[name] = cls(**sections[name])
    return ScenarioConfig(**kwargs)


def scenario_hash(scenario: ScenarioConfig) -> str:
    return hashlib.sha256(scenario_to_text(scenario).encode()).hexdigest()[:16]


def load_scenario(path) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return scenario_from_text(fh.read())


def save_scenario(path, scenario: ScenarioConfig) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(scenario_to_text(scenario))


# ---------------------------------------------------------------------------
# trade-off sweep and calibration


def tradeoff_point(scenario: ScenarioConfig, range_m: float, n_s: int
                   ) -> tuple[float, float]:
    """(certainty dB, rate bit/s) at a fixed range for the split (n_s, N - n_s)."""
    cfg = scenario.ofdm
    n_c = cfg.n_subcarriers - n_s
    rate = link_stats(cfg, scenario.pilots, n_c, range_m).rate
    theta = elevation_at_range(scenario, range_m)
    if n_s < 2:
        return -math.inf, rate
    gamma = sensing_snr(cfg, range_m)
    try:
        crb = crb_bundle(cfg, n_s, gamma, theta)
    except AngleSaturatedError:
        return -math.inf, rate
    pos = position_moments(PolarBelief(range_m, crb.sigma_r ** 2,
                                       theta, crb.sigma_theta ** 2))
    return -10.0 * math.log10(pos.x_var), rate


@dataclass(frozen=True)
class TradeoffRow:
    range_m: float
    n_s: int
    n_c: int
    certainty_db: float
    rate: float


def tradeoff_sweep(scenario: ScenarioConfig,
                   ranges: tuple[float, ...] = (5.0, 10.0, 20.0, 30.0)
                   ) -> list[TradeoffRow]:
    rows = []
    n_total = scenario.ofdm.n_subcarriers
    for r in ranges:
        for n_s in range(1, n_total):
            certainty, rate = tradeoff_point(scenario, r, n_s)
            rows.append(TradeoffRow(r, n_s, n_total - n_s, certainty, rate))
    return rows


def calibrate_pilot_power(scenario: ScenarioConfig, range_m: float = 20.0,
                          n_c: int = 262, target_rate: float = 600e6
                          ) -> ScenarioConfig:
    """Retune pilot power so the anchor point (range_m, n_c) hits target_rate.

    The achievable rate is monotone increasing in p_p, so bisection on
    log10 p_p converges; raises if the target is outside the bracket.
    """
    cfg = scenario.ofdm

    def rate_at(log_pp: float) -> float:
        pilots = scenario.pilots.with_pilot_power(10.0 ** log_pp)
        return link_stats(cfg, pilots, n_c, range_m).rate

    lo, hi = -16.0, 4.0
    if not rate_at(lo) < target_rate < rate_at(hi):
        raise ValueError("pilot calibration target outside the achievable bracket")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if rate_at(mid) < target_rate:
            lo = mid
        else:
            hi = mid
    pilots = scenario.pilots.with_pilot_power(10.0 ** (0.5 * (lo + hi)))
    return replace(scenario, pilots=pilots)


def calibrate_rcs(scenario: ScenarioConfig, range_m: float = 20.0,
                  anchors: tuple[tuple[int, float], ...] = ((250, 7.5), (50, -9.0))
                  ) -> ScenarioConfig:
    """Solve the scenario RCS so the certainty anchors are jointly centered.

    Certainty at fixed (range, n_s) is monotone increasing in the RCS; the
    anchor residuals cannot all be zeroed simultaneously (their n_s gap
    fixes the certainty gap), so bisection zeroes the *sum* of residuals,
    splitting the error evenly.
    """

    def residual(log_rcs: float) -> float:
        sc = replace(scenario, ofdm=scenario.ofdm.with_rcs(10.0 ** log_rcs))
        return sum(tradeoff_point(sc, range_m, n_s)[0] - target
                   for n_s, target in anchors)

    lo, hi = -12.0, 2.0
    if not residual(lo) < 0.0 < residual(hi):
        raise ValueError("rcs calibration anchors outside the bracket")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if residual(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    rcs = 10.0 ** (0.5 * (lo + hi))
    return replace(scenario, ofdm=scenario.ofdm.with_rcs(rcs))


def default_scenario(calibrate: bool = True, **overrides) -> ScenarioConfig:
    """Table-default scenario; calibration pins the 20 m anchor points."""
    scenario = ScenarioConfig(**overrides)
    if calibrate:
        scenario = calibrate_pilot_power(scenario)
        scenario = calibrate_rcs(scenario)
    return scenario


# ---------------------------------------------------------------------------
# the per-QI loop


@dataclass(frozen=True)
class QiRecord:
    t: int
    x_true: float
    v_true: float
    x_hat: float
    v_hat: float
    x_var: float          # task units
    v_var: float          # task units
    force: float
    eta: float
    demand_c: int
    demand_s: int
    n_c: int
    n_s: int
    feasible_c: bool
    feasible_s: bool
    range_true: float
    range_est: float      # nan on QIs without a measurement
    sigma_r: float        # nan on QIs without a measurement
    sigma_v: float
    sigma_theta: float
    gamma_s_db: float
    sigma_x_sq: float     # reported position variance (m^2)
    xibar_sq: float
    rate: float
    rate_met: bool
    x_var_met: bool
    p1: float
    reward: float
    goal: bool


@dataclass
class EpisodeLog:
    scenario_hash: str
    mode: str
    seed: int
    success: bool
    qis_to_goal: int      # episode cap when the goal was not reached
    records: list[QiRecord]

    def summary(self) -> dict:
        n = len(self.records)
        if n == 0:
            return {"qis": 0, "success": self.success, "qis_to_goal": self.qis_to_goal}
        return {
            "qis": n,
            "success": self.success,
            "qis_to_goal": self.qis_to_goal,
            "return": sum(r.reward for r in self.records),
            "mean_rate": sum(r.rate for r in self.records) / n,
            "frac_rate_met": sum(r.rate_met for r in self.records) / n,
            "frac_x_var_met": sum(r.x_var_met for r in self.records) / n,
            "mean_eta": sum(r.eta for r in self.records) / n,
            "mean_sigma_x_sq": sum(r.sigma_x_sq for r in self.records) / n,
        }


class ControlLoopEnv:
    """Episodic env over the QI loop, driving the plant and the twin belief."""

    def __init__(self, scenario: ScenarioConfig):
        self.scenario = scenario
        self._rng: Optional[np.random.Generator] = None
        self._state: Optional[dynamics.AgvState] = None
        self._belief: Optional[BeliefState] = None
        self._polar: Optional[PolarBelief] = None
        self._t = 0
        self.done_at_reset = False
        self.records: list[QiRecord] = []

    # -- belief helpers ----------------------------------------------------

    def _meters_per_task(self) -> float:
        return self.scenario.geometry.track_length / TASK_SPAN

    def _measure(self, pose: PhysicalPose, n_s: int) -> Optional[dict]:
        """One radar measurement of the current pose; None when degenerate."""
        sc = self.scenario
        cfg = sc.ofdm
        if n_s < 2:
            return None
        gamma = sensing_snr(cfg, pose.range_m)
        try:
            crb = crb_bundle(cfg, n_s, gamma, pose.theta)
        except AngleSaturatedError:
            return None
        if sc.sensing_mode == "signal":
            frame = synthesize_frame(cfg, n_s, pose.range_m, pose.radial_velocity,
                                     self._rng)
            peak = periodogram(frame, cfg)
            r_est, v_est = peak.range_est, peak.velocity_est
        else:
            r_est = pose.range_m + crb.sigma_r * float(self._rng.standard_normal())
            v_est = (pose.radial_velocity
                     + crb.sigma_v * float(self._rng.standard_normal()))
        theta_est = pose.theta + crb.sigma_theta * float(self._rng.standard_normal())
        theta_est = min(max(theta_est, 0.0), math.pi / 2 - 1e-3)
        r_est = max(r_est, 0.1)
        return {"r": r_est, "v": v_est, "theta": theta_est, "crb": crb}

    def _belief_from_measurement(self, meas: dict) -> tuple[BeliefState, PolarBelief]:
        sc = self.scenario
        crb = meas["crb"]
        polar = PolarBelief(meas["r"], crb.sigma_r ** 2, meas["theta"],
                            crb.sigma_theta ** 2)
        pos = position_moments(polar)
        scale = 1.0 / self._meters_per_task()
        cos_t = max(math.cos(meas["theta"]), 0.05)
        v_scale = sc.qi_duration * scale / cos_t
        belief = BeliefState(
            x_hat=task_position(sc, pos.x_mean),
            v_hat=meas["v"] * v_scale,
            x_var=pos.x_var * scale ** 2,
            v_var=(crb.sigma_v * v_scale) ** 2,
        )
        return belief, polar

    def _dead_reckon(self, force: float) -> tuple[BeliefState, PolarBelief]:
        """No measurement this QI: advance the belief through the known model."""
        sc = self.scenario
        b = self._belief
        mean = dynamics.step(dynamics.AgvState(b.x_hat, b.v_hat), force)
        belief = BeliefState(x_hat=mean.x, v_hat=mean.v,
                             x_var=b.x_var + b.v_var, v_var=b.v_var)
        p_hat = ground_position(sc, belief.x_hat)
        r_hat = math.hypot(p_hat, sc.geometry.ap_height)
        theta_hat = math.atan2(sc.geometry.ap_height, p_hat)
        sigma_p_sq = belief.x_var * self._meters_per_task() ** 2
        polar = PolarBelief(r_hat, sigma_p_sq * (p_hat / r_hat) ** 2,
                            theta_hat, self._polar.theta_var)
        return belief, polar

    # -- episode interface ---------------------------------------------------

    def reset(self, seed: int) -> BeliefState:
        sc = self.scenario
        self._rng = np.random.default_rng(seed)
        x0 = float(self._rng.uniform(sc.start_x_min, sc.start_x_max))
        if sc.randomize_start_range:
            r0 = float(self._rng.uniform(sc.start_range_min, sc.start_range_max))
            p0 = math.sqrt(r0 ** 2 - sc.geometry.ap_height ** 2)
            offset = p0 - (x0 - dynamics.X_MIN) / TASK_SPAN * sc.geometry.track_length
            geometry = replace(sc.geometry, track_offset=max(offset, 0.0))
            self.scenario = sc = replace(sc, geometry=geometry)
        self._state = dynamics.AgvState(x0, 0.0)
        self._t = 0
        self.records = []
        self.done_at_reset = self._state.x >= dynamics.GOAL_X
        pose = physical_map(sc, self._state)
        if sc.observation == "perfect":
            self._belief = BeliefState(self._state.x, self._state.v, 0.0, 0.0)
            self._polar = PolarBelief(pose.range_m, 0.0, pose.theta, 0.0)
        else:
            # free full-band initialization pass before the first QI
            meas = self._measure(pose, sc.ofdm.n_subcarriers)
            if meas is None:
                self._belief = BeliefState(self._state.x, 0.0, sc.xi ** 2, sc.xi ** 2)
                self._polar = PolarBelief(pose.range_m, sc.xi ** 2, pose.theta, 1e-4)
            else:
                self._belief, self._polar = self._belief_from_measurement(meas)
        return self._belief

    def step(self, action: AgentAction) -> tuple[BeliefState, float, bool, dict]:
        sc = self.scenario
        cfg = sc.ofdm
        n_total = cfg.n_subcarriers
        force = min(max(action.force, -1.0), 1.0)
        pose = physical_map(sc, self._state)

        # twin-side demands from the current belief
        r_belief = max(self._polar.range_mean, 0.1)
        target = AccuracyTarget(sc.xi ** 2, action.eta)
        demand_c = required_comm_subcarriers(cfg, sc.pilots, sc.rate_target, r_belief)
        try:
            demand_s = required_sensing_subcarriers(
                cfg, self._polar, target, sensing_snr(cfg, r_belief))
        except SensingInfeasibleError:
            demand_s = n_total + 1
        grant = allocate(demand_c, demand_s, n_total, sc.allocator_mode)

        # sense the current state with the granted subcarriers
        meas = self._measure(pose, grant.n_s)
        if sc.observation == "perfect":
            new_belief, new_polar = None, None  # filled after the plant step
        elif meas is None:
            new_belief, new_polar = self._dead_reckon(force)
        else:
            new_belief, new_polar = self._belief_from_measurement(meas)

        # plant step and reward
        draw = self._rng.normal(0.0, sc.process_noise_std, 2)
        noise = (float(draw[0]), float(draw[1]))
        new_state = dynamics.step(self._state, force, noise)
        base_reward, goal = dynamics.goal_reward(self._state, force, new_state)
        if sc.observation == "perfect":
            reward = base_reward
            new_belief = BeliefState(new_state.x, new_state.v, 0.0, 0.0)
            new_pose = physical_map(sc, new_state)
            new_polar = PolarBelief(new_pose.range_m, 0.0, new_pose.theta, 0.0)
        else:
            reward = augmented_reward(base_reward, action.eta, sc.kappa,
                                      sc.eta_cost_sign)

        # downlink over the granted carriers at the true range
        stats = link_stats(cfg, sc.pilots, grant.n_c, pose.range_m)
        sigma_x_sq = new_belief.x_var * self._meters_per_task() ** 2
        record = QiRecord(
            t=self._t,
            x_true=self._state.x, v_true=self._state.v,
            x_hat=new_belief.x_hat, v_hat=new_belief.v_hat,
            x_var=new_belief.x_var, v_var=new_belief.v_var,
            force=force, eta=action.eta,
            demand_c=demand_c, demand_s=demand_s,
            n_c=grant.n_c, n_s=grant.n_s,
            feasible_c=grant.feasible_c, feasible_s=grant.feasible_s,
            range_true=pose.range_m,
            range_est=meas["r"] if meas else math.nan,
            sigma_r=meas["crb"].sigma_r if meas else math.nan,
            sigma_v=meas["crb"].sigma_v if meas else math.nan,
            sigma_theta=meas["crb"].sigma_theta if meas else math.nan,
            gamma_s_db=10.0 * math.log10(sensing_snr(cfg, pose.range_m)),
            sigma_x_sq=sigma_x_sq,
            xibar_sq=target.xibar_sq,
            rate=stats.rate,
            rate_met=stats.rate >= sc.rate_target,
            x_var_met=sigma_x_sq <= target.xibar_sq,
            p1=p1_objective(sigma_x_sq, target.xibar_sq, grant.n_s, grant.n_c,
                            stats.rate, sc.rate_target),
            reward=reward,
            goal=goal,
        )
        self.records.append(record)
        self._state = new_state
        self._belief = new_belief
        self._polar = new_polar
        self._t += 1
        truncated = not goal and self._t >= sc.episode_cap
        done = goal or truncated
        info = {"goal": goal, "truncated": truncated, "record": record}
        return new_belief, reward, done, info


def run_episode(scenario: ScenarioConfig, policy: Policy, seed: int,
                deterministic: bool = True,
                rng: Optional[np.random.Generator] = None) -> EpisodeLog:
    """Roll one episode and return its full log.

    ``deterministic`` selects mean actions (the evaluation convention);
    pass an rng for stochastic rollouts.
    """
    env = ControlLoopEnv(scenario)
    belief = env.reset(seed)
    shash = scenario_hash(scenario)
    if env.done_at_reset:
        return EpisodeLog(shash, scenario.allocator_mode, seed, True, 0, [])
    done = False
    goal = False
    while not done:
        action = policy.act(belief, rng=rng, deterministic=deterministic)
        belief, _, done, info = env.step(action)
        goal = info["goal"]
    qis = env.records[-1].t + 1 if goal else scenario.episode_cap
    return EpisodeLog(shash, scenario.allocator_mode, seed, goal, qis, env.records)


def empirical_cdf(values) -> tuple[np.ndarray, np.ndarray]:
    """Sorted sample values and cumulative fractions ending at 1.0."""
    x = np.sort(np.asarray(values, dtype=float))
    if x.size == 0:
        return x, np.zeros(0)
    return x, np.arange(1, x.size + 1) / x.size


@dataclass
class ExperimentResult:
    scenario_hash: str
    episodes_per_mode: dict[str, list[EpisodeLog]]

    def rate_cdf(self, mode: str) -> tuple[np.ndarray, np.ndarray]:
        rates = [r.rate for log in self.episodes_per_mode[mode] for r in log.records]
        return empirical_cdf(rates)

    def qi_cdf(self, mode: str) -> tuple[np.ndarray, np.ndarray]:
        return empirical_cdf(
            [log.qis_to_goal for log in self.episodes_per_mode[mode]])

    def summary(self) -> dict:
        out: dict = {"scenario_hash": self.scenario_hash, "modes": {}}
        for mode, logs in self.episodes_per_mode.items():
            qis = [log.qis_to_goal for log in logs]
            all_records = [r for log in logs for r in log.records]
            n = max(len(all_records), 1)
            out["modes"][mode] = {
                "episodes": len(logs),
                "success_rate": sum(log.success for log in logs) / max(len(logs), 1),
                "median_qis_to_goal": float(np.median(qis)) if qis else math.nan,
                "mean_qis_to_goal": float(np.mean(qis)) if qis else math.nan,
                "frac_rate_met": sum(r.rate_met for r in all_records) / n,
                "frac_x_var_met": sum(r.x_var_met for r in all_records) / n,
                "mean_rate": sum(r.rate for r in all_records) / n,
                "mean_eta": sum(r.eta for r in all_records) / n,
            }
        return out


def run_experiment(scenario: ScenarioConfig, policy: Policy, episodes: int,
                   modes: tuple[str, ...] = MODES, seed: Optional[int] = None
                   ) -> ExperimentResult:
    """Paired-seed episode batches for each allocator mode (same starts)."""
    base = scenario.seed if seed is None else seed
    per_mode: dict[str, list[EpisodeLog]] = {}
    for mode in modes:
        sc = replace(scenario, allocator_mode=mode)
        per_mode[mode] = [run_episode(sc, policy, base + i) for i in range(episodes)]
    return ExperimentResult(scenario_hash(scenario), per_mode)
