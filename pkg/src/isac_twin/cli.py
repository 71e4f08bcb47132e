"""Command-line front end: train a policy, roll episodes, dump sweep tables."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import io as io_
from . import sim
from .agent import (AgentAction, BeliefState, Policy, TrainConfig, evaluate,
                    load_checkpoint, save_checkpoint, train)
from .allocator import MODES


class HeuristicPolicy:
    """Fallback controller when no checkpoint is given: push with the
    estimated velocity to pump the oscillation, fixed mid-scale eta."""

    def __init__(self, eta: float = 1e3):
        self.eta = eta

    def act(self, belief: BeliefState, rng=None, deterministic=True):
        force = 1.0 if belief.v_hat >= 0.0 else -1.0
        return AgentAction(force=force, eta=self.eta)


def _load_scenario(args) -> sim.ScenarioConfig:
    if args.scenario:
        scenario = sim.load_scenario(args.scenario)
    else:
        scenario = sim.default_scenario()
    if getattr(args, "mode", None):
        scenario = replace(scenario, allocator_mode=args.mode)
    if getattr(args, "sensing", None):
        scenario = replace(scenario, sensing_mode=args.sensing)
    if args.seed is not None:
        scenario = replace(scenario, seed=args.seed)
    if getattr(args, "episode_cap", None) is not None:
        scenario = replace(scenario, episode_cap=args.episode_cap)
    return scenario


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_train(args) -> int:
    scenario = _load_scenario(args)
    if args.observation:
        scenario = replace(scenario, observation=args.observation)
    out = _outdir(args)
    cfg = TrainConfig(total_steps=args.steps, seed=scenario.seed)
    env = sim.ControlLoopEnv(scenario)
    result = train(env, cfg)
    ckpt = out / "policy.pt"
    save_checkpoint(ckpt, result.policy)
    ev = evaluate(result.policy, sim.ControlLoopEnv(scenario), episodes=20)
    report = {
        "steps": result.total_steps,
        "best_score": list(result.best_score),
        "eval_success_rate": ev.success_rate,
        "eval_mean_qis": ev.mean_qis_to_goal,
        "checkpoint": str(ckpt),
    }
    (out / "train.json").write_text(json.dumps(report, indent=2) + "\n")
    print(json.dumps(report, indent=2))
    return 0


def _policy(args, scenario) -> Policy:
    if args.policy:
        return load_checkpoint(args.policy)
    return HeuristicPolicy()


def cmd_run(args) -> int:
    scenario = _load_scenario(args)
    policy = _policy(args, scenario)
    out = _outdir(args)
    logs = [sim.run_episode(scenario, policy, scenario.seed + i)
            for i in range(args.episodes)]
    io_.write_episodes_csv(out / "episodes.csv", logs)
    result = sim.ExperimentResult(sim.scenario_hash(scenario),
                                  {scenario.allocator_mode: logs})
    io_.write_summary_json(out / "summary.json", result.summary())
    sim.save_scenario(out / "scenario.txt", scenario)
    print(f"wrote {len(logs)} episodes to {out / 'episodes.csv'}")
    return 0


def cmd_sweep(args) -> int:
    scenario = _load_scenario(args)
    out = _outdir(args)
    rows = sim.tradeoff_sweep(scenario, ranges=tuple(args.ranges))
    io_.write_tradeoff_csv(out / "tradeoff.csv", rows)
    print(f"wrote {len(rows)} sweep rows to {out / 'tradeoff.csv'}")
    return 0


def cmd_cdf(args) -> int:
    scenario = _load_scenario(args)
    policy = _policy(args, scenario)
    out = _outdir(args)
    result = sim.run_experiment(scenario, policy, args.episodes, modes=MODES)
    io_.write_cdf_csv(out / "cdf_rate.csv", result, "rate")
    io_.write_cdf_csv(out / "cdf_qi.csv", result, "qi")
    for mode, logs in result.episodes_per_mode.items():
        io_.write_episodes_csv(out / f"episodes_{mode}.csv", logs)
    io_.write_summary_json(out / "summary.json", result.summary())
    print(f"wrote CDF tables for modes {', '.join(MODES)} to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isac-twin",
        description="Joint sensing/communication digital-twin control loop")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, episodes_default=None):
        p.add_argument("--scenario", type=str, default=None,
                       help="scenario file (key = value lines)")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--mode", choices=MODES, default=None,
                       help="allocator mode override")
        p.add_argument("--sensing", choices=sim.SENSING_MODES, default=None,
                       help="measurement path override")
        p.add_argument("--out", type=str, default="out")
        p.add_argument("--episode-cap", type=int, default=None,
                       help="truncate episodes after this many QIs")
        if episodes_default is not None:
            p.add_argument("--episodes", type=int, default=episodes_default)

    p_train = sub.add_parser("train", help="train the control policy")
    common(p_train)
    p_train.add_argument("--steps", type=int, default=400_000)
    p_train.add_argument("--observation", choices=sim.OBSERVATION_MODES,
                         default=None)
    p_train.set_defaults(func=cmd_train)

    p_run = sub.add_parser("run", help="roll episodes and write logs")
    common(p_run, episodes_default=10)
    p_run.add_argument("--policy", type=str, default=None,
                       help="policy checkpoint (heuristic fallback if omitted)")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="certainty/rate trade-off table")
    common(p_sweep)
    p_sweep.add_argument("--ranges", type=float, nargs="+",
                         default=[5.0, 10.0, 20.0, 30.0],
                         help="target ranges in meters")
    p_sweep.set_defaults(func=cmd_sweep)

    p_cdf = sub.add_parser("cdf", help="rate and QIs-to-goal CDFs per mode")
    common(p_cdf, episodes_default=100)
    p_cdf.add_argument("--policy", type=str, default=None)
    p_cdf.set_defaults(func=cmd_cdf)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
