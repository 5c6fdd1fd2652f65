"""Event-driven cooperative receding horizon control for reward collection missions."""
from .controller import (
    ActiveSetResult,
    ControlDecision,
    MissionState,
    TourProjection,
    action_horizon,
    active_targets,
    closest_point,
    immediate_reward,
    planning_horizon,
    project_tour,
    reward_to_go,
    sparsity_factor,
    travel_cost,
    visit_time_lower_bound,
)
from .cooperation import TargetPartition, neighbor_set, partition_targets, proximity, relative_distance
from .engine import MissionEvent, MissionLog, run_mission, sense_filter, total_reward
from .estimator import CRHController
from .generate import RandomMissionParams, gen_random
from .lookahead import count_paths, solve
from .mission import (
    Agent,
    ControllerConfig,
    MissionSpec,
    SpaceExtent,
    Target,
    discount,
    distance,
    effective_deadline,
    reward_at,
)
from .oracle import active_set_bruteforce, discretized_control_check, exhaustive_optimal, two_target_optimal
from .serialize import parse_mission, write_mission, write_summary, write_trajectory
from .tsplib import RewardPolicy, parse_tsplib, tour_length
from .validation import MissionComplete, MissionValidationError

__version__ = "0.1.0"
