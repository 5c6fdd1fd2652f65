"""Mission primitives: targets, agents, discounting, motion and visit detection."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

Point = Tuple[float, float]

TWO_PI = 2.0 * math.pi


def normalize_angle(angle: float) -> float:
    """Wrap an angle into [0, 2*pi)."""
    a = math.fmod(angle, TWO_PI)
    if a < 0.0:
        a += TWO_PI
    # fmod of a tiny negative number can round up to exactly 2*pi
    return 0.0 if a >= TWO_PI else a


@dataclass(frozen=True)
class Target:
    """A stationary target holding a time-decaying reward.

    ``deadline`` is the time at which the linear part of the discount ends
    (and at which a fully linear reward reaches zero). ``appears_at`` of 0
    means the target is known from the start of the mission.
    """

    id: int
    position: Point
    initial_reward: float
    alpha: float = 1.0
    beta: float = 1.0
    deadline: float = 300.0
    capture_radius: float = 0.0
    appears_at: float = 0.0


@dataclass(frozen=True)
class Agent:
    id: int
    position: Point
    speed: float = 1.0
    heading: float = 0.0
    sensing_range: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "heading", normalize_angle(float(self.heading)))


@dataclass(frozen=True)
class ControllerConfig:
    """Tuning knobs of the receding horizon controller.

    lookahead_depth
        Number of hypothetical control steps expanded before the
        reward-to-go estimate closes each branch.
    sparsity_gamma, sparsity_neighbors
        Geometric weight and neighbour count of the sparsity term added to
        each target's travel cost. ``sparsity_gamma=0`` disables it.
    cooperation_delta, neighbor_count
        Parameters of the relative proximity function used to split targets
        between agents.
    reward_epsilon
        A target whose discount drops below this fraction is expired.
    tie_tolerance
        Absolute tolerance for geometric boundary comparisons.
    node_budget
        Cap on lookahead tree nodes per control evaluation.
    """

    lookahead_depth: int = 1
    sparsity_gamma: float = 0.0
    sparsity_neighbors: int = 0
    cooperation_delta: float = 0.0
    neighbor_count: int = 2
    reward_epsilon: float = 1e-6
    tie_tolerance: float = 1e-9
    node_budget: int = 1_000_000


@dataclass(frozen=True)
class SpaceExtent:
    xmin: float
    ymin: float
    xmax: float
    ymax: float

    def contains(self, p: Point, tol: float = 1e-9) -> bool:
        return (
            self.xmin - tol <= p[0] <= self.xmax + tol
            and self.ymin - tol <= p[1] <= self.ymax + tol
        )

    @property
    def center(self) -> Point:
        return (0.5 * (self.xmin + self.xmax), 0.5 * (self.ymin + self.ymax))

    @property
    def max_dimension(self) -> float:
        return max(self.xmax - self.xmin, self.ymax - self.ymin)


@dataclass(frozen=True)
class MissionSpec:
    space_extent: SpaceExtent
    base: Point
    mission_time: float
    targets: Tuple[Target, ...]
    agents: Tuple[Agent, ...]
    config: ControllerConfig = field(default_factory=ControllerConfig)
    return_to_base: bool = False
    # free-form provenance, e.g. {"name": "berlin52", "edge_weight_type": "EUC_2D"}
    metadata: Tuple[Tuple[str, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))
        object.__setattr__(self, "agents", tuple(self.agents))
        if isinstance(self.metadata, dict):
            object.__setattr__(self, "metadata", tuple(sorted(self.metadata.items())))

    def target(self, target_id: int) -> Target:
        for t in self.targets:
            if t.id == target_id:
                return t
        raise KeyError(target_id)

    @property
    def meta(self) -> dict:
        return dict(self.metadata)


def effective_deadline(target: Target, mission_time: float) -> float:
    return min(target.deadline, mission_time)


def discount(target: Target, t: float) -> float:
    """Fraction of the initial reward left at time ``t``.

    Linear decay with slope ``alpha / deadline`` up to the deadline, then an
    exponential tail starting from ``1 - alpha`` with rate ``beta``.
    """
    d = target.deadline
    if t <= d:
        value = 1.0 - (target.alpha / d) * t
    else:
        value = (1.0 - target.alpha) * math.exp(-target.beta * (t - d))
    return min(1.0, max(0.0, value))


def reward_at(target: Target, t: float) -> float:
    return target.initial_reward * discount(target, t)


def average_decay_rate(target: Target, mission_time: float) -> float:
    """Initial reward over the effective deadline (reward lost per unit time)."""
    return target.initial_reward / effective_deadline(target, mission_time)


def expiry_time(target: Target, epsilon: float) -> float:
    """Earliest time after which the target is treated as worthless.

    A fully linear reward (``alpha`` within ``epsilon`` of 1) expires at its
    deadline. An exponential tail expires once it drops below ``epsilon``;
    with ``beta == 0`` the tail is flat and never expires.
    """
    if target.alpha >= 1.0 - epsilon:
        return target.deadline
    if target.beta <= 0.0:
        return math.inf
    return target.deadline + math.log((1.0 - target.alpha) / epsilon) / target.beta


def distance(p: Sequence[float], q: Sequence[float]) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])


def advance_agent(position: Sequence[float], heading: float, speed: float, dt: float) -> Point:
    step = speed * dt
    return (position[0] + step * math.cos(heading), position[1] + step * math.sin(heading))


def heading_to(p: Sequence[float], q: Sequence[float]) -> float:
    return normalize_angle(math.atan2(q[1] - p[1], q[0] - p[0]))


def is_visit(agent_position: Sequence[float], target: Target, tie_tolerance: float = 1e-9) -> bool:
    return distance(agent_position, target.position) <= target.capture_radius + tie_tolerance
