"""Input validation helpers shared by the estimator, the engine and the loaders."""
from __future__ import annotations

import math
from typing import List

from .mission import ControllerConfig, MissionSpec


class MissionValidationError(ValueError):
    """Raised when a mission or configuration breaks an invariant.

    ``violations`` holds one ``"<field path>: <message>"`` string per problem.
    """

    def __init__(self, violations: List[str]):
        self.violations = list(violations)
        super().__init__("invalid mission: " + "; ".join(self.violations))


class MissionComplete(RuntimeError):
    """Raised when a control step is requested with no live targets left."""

    def __init__(self, msg: str = "mission complete"):
        super().__init__(msg)


def _finite(x) -> bool:
    try:
        return math.isfinite(float(x))
    except (TypeError, ValueError):
        return False


def config_violations(cfg: ControllerConfig, prefix: str = "control") -> List[str]:
    out = []
    if not isinstance(cfg.lookahead_depth, int) or cfg.lookahead_depth < 1:
        out.append(f"{prefix}.lookahead_depth: must be an integer >= 1")
    if not (_finite(cfg.sparsity_gamma) and 0.0 <= cfg.sparsity_gamma <= 1.0):
        out.append(f"{prefix}.sparsity_gamma: must lie in [0, 1]")
    if not isinstance(cfg.sparsity_neighbors, int) or cfg.sparsity_neighbors < 0:
        out.append(f"{prefix}.sparsity_neighbors: must be an integer >= 0")
    if not (_finite(cfg.cooperation_delta) and 0.0 <= cfg.cooperation_delta < 0.5):
        out.append(f"{prefix}.cooperation_delta: must lie in [0, 0.5)")
    if not isinstance(cfg.neighbor_count, int) or cfg.neighbor_count < 1:
        out.append(f"{prefix}.neighbor_count: must be an integer >= 1")
    if not (_finite(cfg.reward_epsilon) and cfg.reward_epsilon > 0):
        out.append(f"{prefix}.reward_epsilon: must be positive")
    if not (_finite(cfg.tie_tolerance) and cfg.tie_tolerance > 0):
        out.append(f"{prefix}.tie_tolerance: must be positive")
    if not isinstance(cfg.node_budget, int) or cfg.node_budget < 1:
        out.append(f"{prefix}.node_budget: must be an integer >= 1")
    return out


def mission_violations(spec: MissionSpec) -> List[str]:
    out = []
    box = spec.space_extent
    if not (box.xmax > box.xmin and box.ymax > box.ymin):
        out.append("space: max corner must exceed min corner")
    if not (_finite(spec.mission_time) and spec.mission_time > 0):
        out.append("mission_time: must be positive")
    if not box.contains(spec.base):
        out.append("base: outside space extent")

    seen = set()
    for k, t in enumerate(spec.targets):
        p = f"targets[{k}]"
        if t.id in seen:
            out.append(f"{p}.id: duplicate id {t.id}")
        seen.add(t.id)
        if not box.contains(t.position):
            out.append(f"{p}.position: outside space extent")
        if not (_finite(t.initial_reward) and t.initial_reward > 0):
            out.append(f"{p}.initial_reward: must be positive")
        if not (_finite(t.alpha) and 0.0 <= t.alpha <= 1.0):
            out.append(f"{p}.alpha: must lie in [0, 1]")
        if not (_finite(t.beta) and t.beta >= 0):
            out.append(f"{p}.beta: must be nonnegative")
        if not (_finite(t.deadline) and t.deadline > 0):
            out.append(f"{p}.deadline: must be positive")
        if not (_finite(t.capture_radius) and t.capture_radius >= 0):
            out.append(f"{p}.capture_radius: must be nonnegative")
        if not (_finite(t.appears_at) and t.appears_at >= 0):
            out.append(f"{p}.appears_at: must be nonnegative")

    if not spec.agents:
        out.append("agents: at least one agent is required")
    seen = set()
    for k, a in enumerate(spec.agents):
        p = f"agents[{k}]"
        if a.id in seen:
            out.append(f"{p}.id: duplicate id {a.id}")
        seen.add(a.id)
        if not box.contains(a.position):
            out.append(f"{p}.position: outside space extent")
        if not (_finite(a.speed) and a.speed > 0):
            out.append(f"{p}.speed: must be positive")
        if a.sensing_range is not None and not (_finite(a.sensing_range) and a.sensing_range > 0):
            out.append(f"{p}.sensing_range: must be positive when given")

    out.extend(config_violations(spec.config))
    return out


def check_config(cfg: ControllerConfig) -> ControllerConfig:
    bad = config_violations(cfg)
    if bad:
        raise MissionValidationError(bad)
    return cfg


def check_mission(spec: MissionSpec) -> MissionSpec:
    """Return ``spec`` unchanged or raise :class:`MissionValidationError`."""
    if not isinstance(spec, MissionSpec):
        raise TypeError(f"expected MissionSpec, got {type(spec).__name__}")
    bad = mission_violations(spec)
    if bad:
        raise MissionValidationError(bad)
    return spec
