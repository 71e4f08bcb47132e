"""Digital-twin control loop over a joint sensing/communication downlink."""

from .agent import (AgentAction, BeliefState, Policy, TrainConfig, TrainResult,
                    augmented_reward, evaluate, load_checkpoint,
                    save_checkpoint, train)
from .allocator import (MODES, AllocationDecision, allocate, p1_objective)
from .comms import (LinkStats, PilotConfig, comm_demand_closed_form,
                    link_stats, required_comm_subcarriers)
from .dynamics import AgvState, goal_reward, step
from .sensing import (AngleSaturatedError, CrbBundle, DegenerateCrbError,
                      OfdmConfig, PeriodogramResult, crb_bundle, periodogram,
                      sensing_snr, synthesize_frame)
from .sim import (ControlLoopEnv, EpisodeLog, ExperimentResult, GeometryConfig,
                  PhysicalPose, QiRecord, ScenarioConfig, TradeoffRow,
                  calibrate_pilot_power, calibrate_rcs, default_scenario,
                  empirical_cdf, physical_map, run_episode, run_experiment,
                  scenario_from_text, scenario_hash, scenario_to_text,
                  tradeoff_point, tradeoff_sweep)
from .uncertainty import (AccuracyTarget, PolarBelief, PositionBelief,
                          SensingInfeasibleError, position_moments,
                          required_sensing_subcarriers)

__version__ = "0.1.0"

__all__ = [
    "AgentAction", "BeliefState", "Policy", "TrainConfig", "TrainResult",
    "augmented_reward", "evaluate", "load_checkpoint", "save_checkpoint",
    "train", "MODES", "AllocationDecision", "allocate", "p1_objective",
    "LinkStats", "PilotConfig", "comm_demand_closed_form", "link_stats",
    "required_comm_subcarriers", "AgvState", "goal_reward", "step",
    "AngleSaturatedError", "CrbBundle", "DegenerateCrbError", "OfdmConfig",
    "PeriodogramResult", "crb_bundle", "periodogram", "sensing_snr",
    "synthesize_frame", "ControlLoopEnv", "EpisodeLog", "ExperimentResult",
    "GeometryConfig", "PhysicalPose", "QiRecord", "ScenarioConfig",
    "TradeoffRow", "calibrate_pilot_power", "calibrate_rcs",
    "default_scenario", "empirical_cdf", "physical_map", "run_episode",
    "run_experiment", "scenario_from_text", "scenario_hash",
    "scenario_to_text", "tradeoff_point", "tradeoff_sweep", "AccuracyTarget",
    "PolarBelief", "PositionBelief", "SensingInfeasibleError",
    "position_moments", "required_sensing_subcarriers",
]
