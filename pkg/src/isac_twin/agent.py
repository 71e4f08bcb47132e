"""Uncertainty-aware actor-critic controller (clipped-surrogate policy gradient).

The policy maps a belief observation (x_hat, v_hat, log10 x_var) to a
squashed-Gaussian action (force in [-1, 1], accuracy request eta on a log
scale in [eta_min, eta_max]).  Training uses generalized advantage
estimation, a clipped surrogate objective, an entropy bonus on the base
Gaussian, and a learned state-value baseline.  The accuracy request is
priced into the reward outside this module via ``augmented_reward``.

Sampling draws come from a caller-supplied numpy Generator so rollouts are
reproducible independent of torch's global RNG (torch only seeds weight
init).  All training runs single-threaded for bit-stable results.
"""

from __future__ import annotations

import copy
import math
from collections import deque
from dataclasses import asdict, dataclass, field
from typing import Optional, Protocol

import numpy as np
import torch
import torch.nn as nn

CHECKPOINT_FORMAT = "isac-twin-policy"
CHECKPOINT_VERSION = 1

# observation scaling: track position, track speed, log10 position variance
OBS_X_CENTER = -0.3
OBS_X_SCALE = 0.9
OBS_V_SCALE = 0.07
OBS_LOGVAR_FLOOR = 1e-12
OBS_LOGVAR_CENTER = -6.0
OBS_LOGVAR_SCALE = 6.0


@dataclass(frozen=True)
class BeliefState:
    """Twin-side estimate of the plant state, in task units."""

    x_hat: float
    v_hat: float
    x_var: float
    v_var: float


@dataclass(frozen=True)
class AgentAction:
    force: float
    eta: float


@dataclass(frozen=True)
class TrainConfig:
    total_steps: int = 400_000
    rollout_steps: int = 4096
    minibatch_size: int = 256
    epochs: int = 10
    gamma: float = 0.99
    gae_lambda: float = 0.95
    clip_ratio: float = 0.2
    lr_actor: float = 3e-4
    lr_critic: float = 1e-3
    entropy_coef: float = 0.01
    value_coef: float = 0.5
    max_grad_norm: float = 0.5
    hidden: tuple[int, int] = (64, 64)
    log_std_init: float = 0.0
    eta_min: float = 1.0
    eta_max: float = 1e5
    seed: int = 0
    success_window: int = 20

    def __post_init__(self):
        if not 0 < self.gamma <= 1 or not 0 <= self.gae_lambda <= 1:
            raise ValueError("gamma in (0,1], gae_lambda in [0,1]")
        if self.clip_ratio <= 0:
            raise ValueError("clip ratio must be positive")
        if not 0 < self.eta_min <= self.eta_max:
            raise ValueError("need 0 < eta_min <= eta_max")


class ControlEnv(Protocol):
    """Minimal episodic interface the trainer drives."""

    def reset(self, seed: int) -> BeliefState: ...

    def step(self, action: AgentAction) -> tuple[BeliefState, float, bool, dict]: ...


def augmented_reward(base_reward: float, eta: float, kappa: float,
                     sign: float = -1.0) -> float:
    """Task reward plus the priced accuracy request: r + sign * kappa * eta."""
    if kappa < 0:
        raise ValueError("kappa must be non-negative")
    if eta < 0:
        raise ValueError("eta must be non-negative")
    return base_reward + sign * kappa * eta


def belief_to_obs(belief: BeliefState) -> np.ndarray:
    var = max(belief.x_var, OBS_LOGVAR_FLOOR)
    return np.array([
        (belief.x_hat - OBS_X_CENTER) / OBS_X_SCALE,
        belief.v_hat / OBS_V_SCALE,
        (math.log10(var) - OBS_LOGVAR_CENTER) / OBS_LOGVAR_SCALE,
    ], dtype=np.float32)


def _mlp(sizes: tuple[int, ...], out_dim: int, out_gain: float) -> nn.Sequential:
    layers: list[nn.Module] = []
    last = sizes[0]
    for h in sizes[1:]:
        lin = nn.Linear(last, h)
        nn.init.orthogonal_(lin.weight, gain=math.sqrt(2.0))
        nn.init.zeros_(lin.bias)
        layers += [lin, nn.Tanh()]
        last = h
    head = nn.Linear(last, out_dim)
    nn.init.orthogonal_(head.weight, gain=out_gain)
    nn.init.zeros_(head.bias)
    layers.append(head)
    return nn.Sequential(*layers)


class ActorCritic(nn.Module):
    def __init__(self, hidden: tuple[int, int] = (64, 64), log_std_init: float = 0.0):
        super().__init__()
        sizes = (3, *hidden)
        self.actor = _mlp(sizes, 2, 0.01)
        self.critic = _mlp(sizes, 1, 1.0)
        self.log_std = nn.Parameter(torch.full((2,), float(log_std_init)))

    def dist_params(self, obs: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        mean = self.actor(obs)
        log_std = self.log_std.clamp(-5.0, 2.0).expand_as(mean)
        return mean, log_std

    def value(self, obs: torch.Tensor) -> torch.Tensor:
        return self.critic(obs).squeeze(-1)


class Policy:
    """Inference wrapper: squashes raw Gaussian draws into (force, eta)."""

    def __init__(self, config: TrainConfig):
        self.config = config
        self.net = ActorCritic(config.hidden, config.log_std_init)
        self.net.eval()

    def _squash(self, z: np.ndarray) -> AgentAction:
        force = float(np.tanh(z[0]))
        u = (math.tanh(float(z[1])) + 1.0) / 2.0
        log_eta = math.log(self.config.eta_min) + u * (
            math.log(self.config.eta_max) - math.log(self.config.eta_min))
        return AgentAction(force=force, eta=math.exp(log_eta))

    def raw_action(self, belief: BeliefState, rng: Optional[np.random.Generator],
                   deterministic: bool) -> tuple[np.ndarray, np.ndarray]:
        obs = belief_to_obs(belief)
        with torch.no_grad():
            mean, log_std = self.net.dist_params(torch.from_numpy(obs).unsqueeze(0))
        mean = mean.numpy()[0]
        if deterministic:
            return obs, mean
        if rng is None:
            raise ValueError("stochastic acting needs an rng")
        std = np.exp(log_std.numpy()[0])
        return obs, mean + std * rng.standard_normal(2).astype(np.float32)

    def act(self, belief: BeliefState, rng: Optional[np.random.Generator] = None,
            deterministic: bool = False) -> AgentAction:
        _, z = self.raw_action(belief, rng, deterministic)
        return self._squash(z)


def act(policy: Policy, belief: BeliefState, rng: Optional[np.random.Generator] = None,
        deterministic: bool = False) -> AgentAction:
    return policy.act(belief, rng, deterministic)


def gaussian_logp(mean: torch.Tensor, log_std: torch.Tensor,
                  z: torch.Tensor) -> torch.Tensor:
    """Log density of the pre-squash draw. Squash corrections depend only on
    z, so they cancel in likelihood ratios and are omitted."""
    var = torch.exp(2.0 * log_std)
    return (-0.5 * ((z - mean) ** 2 / var + 2.0 * log_std
                    + math.log(2.0 * math.pi))).sum(-1)


def clipped_surrogate_loss(net: ActorCritic, obs: torch.Tensor, z: torch.Tensor,
                           old_logp: torch.Tensor, advantage: torch.Tensor,
                           clip_ratio: float) -> tuple[torch.Tensor, dict]:
    mean, log_std = net.dist_params(obs)
    logp = gaussian_logp(mean, log_std, z)
    ratio = torch.exp(logp - old_logp)
    clipped = torch.clamp(ratio, 1.0 - clip_ratio, 1.0 + clip_ratio)
    loss = -torch.min(ratio * advantage, clipped * advantage).mean()
    entropy = (log_std + 0.5 * math.log(2.0 * math.pi * math.e)).sum(-1).mean()
    stats = {"entropy": float(entropy.detach()),
             "clip_frac": float((torch.abs(ratio - 1.0) > clip_ratio).float().mean())}
    return loss, stats


def value_loss(net: ActorCritic, obs: torch.Tensor, returns: torch.Tensor) -> torch.Tensor:
    return ((net.value(obs) - returns) ** 2).mean()


@dataclass
class TrainResult:
    policy: Policy
    history: list[dict] = field(default_factory=list)
    best_score: tuple[float, float] = (-math.inf, -math.inf)
    total_steps: int = 0


def train(env: ControlEnv, config: TrainConfig) -> TrainResult:
    """Run clipped-surrogate training on ``env`` and return the best policy.

    The returned policy is the snapshot with the best rolling
    (success-rate, mean-return) over the last ``success_window`` completed
    episodes.  Fixed seeds give identical runs on one machine; training is
    pinned to one torch thread for that reason.
    """
    torch.set_num_threads(1)
    torch.manual_seed(config.seed)
    policy = Policy(config)
    net = policy.net
    rng = np.random.default_rng(config.seed)
    opt_actor = torch.optim.Adam(
        [*net.actor.parameters(), net.log_std], lr=config.lr_actor)
    opt_critic = torch.optim.Adam(net.critic.parameters(), lr=config.lr_critic)

    returns_window: deque[float] = deque(maxlen=config.success_window)
    success_window: deque[float] = deque(maxlen=config.success_window)
    best_score = (-math.inf, -math.inf)
    best_state = copy.deepcopy(net.state_dict())
    history: list[dict] = []

    belief = env.reset(int(rng.integers(2 ** 62)))
    episode_return = 0.0
    steps_done = 0
    n_episodes = 0

    while steps_done < config.total_steps:
        horizon = min(config.rollout_steps, config.total_steps - steps_done)
        obs_buf = np.zeros((horizon, 3), dtype=np.float32)
        z_buf = np.zeros((horizon, 2), dtype=np.float32)
        logp_buf = np.zeros(horizon, dtype=np.float32)
        rew_buf = np.zeros(horizon, dtype=np.float32)
        val_buf = np.zeros(horizon, dtype=np.float32)
        next_val_buf = np.zeros(horizon, dtype=np.float32)
        boundary = np.zeros(horizon, dtype=bool)  # episode ended after this step
        eta_sum = 0.0
        terminal_obs: list[np.ndarray] = []

        net.eval()
        with torch.no_grad():
            for t in range(horizon):
                obs, z = policy.raw_action(belief, rng, deterministic=False)
                obs_t = torch.from_numpy(obs).unsqueeze(0)
                mean, log_std = net.dist_params(obs_t)
                val_buf[t] = float(net.value(obs_t))
                logp_buf[t] = float(gaussian_logp(mean, log_std,
                                                  torch.from_numpy(z).unsqueeze(0)))
                action = policy._squash(z)
                belief, reward, done, info = env.step(action)
                obs_buf[t], z_buf[t], rew_buf[t] = obs, z, reward
                eta_sum += action.eta
                episode_return += reward
                if done:
                    boundary[t] = True
                    next_obs = belief_to_obs(belief)
                    if info.get("goal", False):
                        next_val_buf[t] = 0.0
                        terminal_obs.append(next_obs)
                    else:  # truncated: bootstrap through the cap
                        next_val_buf[t] = float(net.value(
                            torch.from_numpy(next_obs).unsqueeze(0)))
                    returns_window.append(episode_return)
                    success_window.append(1.0 if info.get("goal", False) else 0.0)
                    n_episodes += 1
                    episode_return = 0.0
                    belief = env.reset(int(rng.integers(2 ** 62)))
                elif t == horizon - 1:
                    next_val_buf[t] = float(net.value(
                        torch.from_numpy(belief_to_obs(belief)).unsqueeze(0)))
        steps_done += horizon

        # GAE over the segment; values inside an episode chain through val_buf
        adv = np.zeros(horizon, dtype=np.float32)
        last_adv = 0.0
        for t in range(horizon - 1, -1, -1):
            next_v = next_val_buf[t] if (boundary[t] or t == horizon - 1) else val_buf[t + 1]
            delta = rew_buf[t] + config.gamma * next_v - val_buf[t]
            last_adv = delta + config.gamma * config.gae_lambda * (
                0.0 if boundary[t] else last_adv)
            adv[t] = last_adv
        ret = adv + val_buf
        adv = (adv - adv.mean()) / (adv.std() + 1e-8)

        obs_t = torch.from_numpy(obs_buf)
        z_t = torch.from_numpy(z_buf)
        logp_t = torch.from_numpy(logp_buf)
        adv_t = torch.from_numpy(adv)
        ret_t = torch.from_numpy(ret)
        term_t = (torch.from_numpy(np.stack(terminal_obs)) if terminal_obs else None)

        net.train()
        stats: dict = {}
        pol_loss_v = val_loss_v = 0.0
        for _ in range(config.epochs):
            perm = rng.permutation(horizon)
            for lo in range(0, horizon, config.minibatch_size):
                idx = torch.from_numpy(perm[lo:lo + config.minibatch_size].copy())
                pol_loss, stats = clipped_surrogate_loss(
                    net, obs_t[idx], z_t[idx], logp_t[idx], adv_t[idx],
                    config.clip_ratio)
                ent_bonus = -config.entropy_coef * (
                    net.log_std.clamp(-5.0, 2.0)
                    + 0.5 * math.log(2.0 * math.pi * math.e)).sum()
                vf = value_loss(net, obs_t[idx], ret_t[idx])
                loss = pol_loss + ent_bonus + config.value_coef * vf
                if not torch.isfinite(loss):
                    raise RuntimeError(
                        f"training diverged at step {steps_done}: loss={loss.item()}, "
                        f"stats={stats}")
                opt_actor.zero_grad()
                opt_critic.zero_grad()
                loss.backward()
                nn.utils.clip_grad_norm_(net.parameters(), config.max_grad_norm)
                opt_actor.step()
                opt_critic.step()
                pol_loss_v, val_loss_v = pol_loss.item(), vf.item()
            if term_t is not None:  # pin terminal values toward zero
                vf_term = value_loss(net, term_t, torch.zeros(len(term_t)))
                opt_critic.zero_grad()
                (config.value_coef * vf_term).backward()
                opt_critic.step()
        net.eval()

        rolling_ret = float(np.mean(returns_window)) if returns_window else -math.inf
        rolling_suc = float(np.mean(success_window)) if success_window else 0.0
        score = (rolling_suc, rolling_ret)
        if len(returns_window) >= min(5, config.success_window) and score > best_score:
            best_score = score
            best_state = copy.deepcopy(net.state_dict())
        history.append({
            "step": steps_done, "episodes": n_episodes,
            "rolling_return": rolling_ret, "rolling_success": rolling_suc,
            "policy_loss": pol_loss_v, "value_loss": val_loss_v,
            "entropy": stats.get("entropy", 0.0),
            "mean_eta": eta_sum / horizon,
        })

    net.load_state_dict(best_state)
    return TrainResult(policy=policy, history=history, best_score=best_score,
                       total_steps=steps_done)


@dataclass
class EvalEpisode:
    seed: int
    success: bool
    qis_to_goal: int
    mean_eta: float
    episode_return: float


@dataclass
class EvalResult:
    success_rate: float
    mean_qis_to_goal: float  # cap counts for unfinished episodes
    mean_eta: float
    episodes: list[EvalEpisode]


def evaluate(policy: Policy, env: ControlEnv, episodes: int,
             seed_base: int = 10_000) -> EvalResult:
    """Deterministic (mean-action) rollouts; aggregates over ``episodes`` runs."""
    records: list[EvalEpisode] = []
    for i in range(episodes):
        seed = seed_base + i
        belief = env.reset(seed)
        done = getattr(env, "done_at_reset", False)
        total, eta_total, t = 0.0, 0.0, 0
        goal = done
        while not done:
            action = policy.act(belief, deterministic=True)
            belief, reward, done, info = env.step(action)
            total += reward
            eta_total += action.eta
            t += 1
            if done:
                goal = info.get("goal", False)
        records.append(EvalEpisode(seed=seed, success=goal, qis_to_goal=t,
                                   mean_eta=eta_total / t if t else 0.0,
                                   episode_return=total))
    n = len(records)
    return EvalResult(
        success_rate=sum(r.success for r in records) / n,
        mean_qis_to_goal=sum(r.qis_to_goal for r in records) / n,
        mean_eta=sum(r.mean_eta for r in records) / n,
        episodes=records,
    )


def save_checkpoint(path, policy: Policy) -> None:
    cfg = asdict(policy.config)
    cfg["hidden"] = list(cfg["hidden"])
    torch.save({
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "train_config": cfg,
        "model_state": policy.net.state_dict(),
    }, path)


def load_checkpoint(path) -> Policy:
    payload = torch.load(path, map_location="cpu", weights_only=True)
    if payload.get("format") != CHECKPOINT_FORMAT:
        raise ValueError(f"not a policy checkpoint: {path}")
    if payload.get("version") != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {payload.get('version')}")
    cfg_dict = dict(payload["train_config"])
    cfg_dict["hidden"] = tuple(cfg_dict["hidden"])
    policy = Policy(TrainConfig(**cfg_dict))
    policy.net.load_state_dict(payload["model_state"])
    policy.net.eval()
    return policy
