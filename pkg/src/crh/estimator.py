"""scikit-learn style wrapper around the controller and the simulator."""
from __future__ import annotations

from dataclasses import fields, replace
from typing import Optional, Union

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .controller import ControlDecision, MissionState
from .engine import MissionLog, run_mission
from .lookahead import solve
from .mission import ControllerConfig, MissionSpec
from .serialize import mission_from_dict, parse_mission
from .validation import check_config, check_mission

MissionLike = Union[MissionSpec, dict, str]


def as_mission(mission: MissionLike) -> MissionSpec:
    """Accept a spec, a parsed mission document or its JSON text."""
    if isinstance(mission, MissionSpec):
        return check_mission(mission)
    if isinstance(mission, dict):
        return mission_from_dict(mission)
    if isinstance(mission, str):
        return parse_mission(mission)
    raise TypeError(f"cannot read a mission from {type(mission).__name__}")


class CRHController(BaseEstimator):
    """Cooperative receding horizon controller for one mission.

    The constructor takes the controller parameters; ``fit`` binds a mission
    (overriding the mission's own ``control`` block), ``predict`` returns
    the control decision at a state and ``simulate`` runs the mission to the
    end. ``score`` is the total collected reward, so parameter searches such
    as ``sklearn.model_selection.ParameterGrid`` pick the best settings.
    """

    def __init__(
        self,
        lookahead_depth: int = 1,
        sparsity_gamma: float = 0.0,
        sparsity_neighbors: int = 0,
        cooperation_delta: float = 0.0,
        neighbor_count: int = 2,
        reward_epsilon: float = 1e-6,
        tie_tolerance: float = 1e-9,
        node_budget: int = 1_000_000,
    ):
        self.lookahead_depth = lookahead_depth
        self.sparsity_gamma = sparsity_gamma
        self.sparsity_neighbors = sparsity_neighbors
        self.cooperation_delta = cooperation_delta
        self.neighbor_count = neighbor_count
        self.reward_epsilon = reward_epsilon
        self.tie_tolerance = tie_tolerance
        self.node_budget = node_budget

    @classmethod
    def from_config(cls, config: ControllerConfig) -> "CRHController":
        return cls(**{f.name: getattr(config, f.name) for f in fields(ControllerConfig)})

    def _config(self) -> ControllerConfig:
        return check_config(ControllerConfig(**self.get_params()))

    def fit(self, mission: MissionLike, y=None) -> "CRHController":
        spec = as_mission(mission)
        self.config_ = self._config()
        self.mission_ = replace(spec, config=self.config_)
        return self

    def predict(self, state: Optional[MissionState] = None) -> ControlDecision:
        check_is_fitted(self, "mission_")
        if state is None:
            state = MissionState.initial(self.mission_)
        return solve(state, self.mission_)

    def simulate(self) -> MissionLog:
        check_is_fitted(self, "mission_")
        self.log_ = run_mission(self.mission_)
        return self.log_

    def score(self, mission: Optional[MissionLike] = None, y=None) -> float:
        if mission is not None:
            self.fit(mission)
        return self.simulate().total_reward
