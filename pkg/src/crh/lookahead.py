"""K-step lookahead over joint candidate headings.

Every level recomputes the planning horizon and the candidate headings of
all agents from their hypothetical positions, moves every agent at once
and removes the targets it would collect. Leaves are closed with the
tour-based reward-to-go estimate.
"""
from __future__ import annotations

import itertools
import logging
import math
from typing import List, Tuple

from .controller import ControlDecision, MissionState, PlanningStep
from .mission import MissionSpec
from .validation import MissionComplete

log = logging.getLogger(__name__)

# relative slack so float noise does not overturn the lexicographic tie rule
_IMPROVE = 1e-12


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0
        self.warned = False

    def spend(self, n: int) -> bool:
        self.used += n
        if self.used > self.limit:
            if not self.warned:
                log.warning("lookahead node budget %d exhausted; truncating depth", self.limit)
                self.warned = True
            return False
        return True


def _better(value: float, best: float) -> bool:
    if best == -math.inf:
        return value > best
    return value > best + _IMPROVE * max(1.0, abs(best))


def _search(step: PlanningStep, depth: int, budget: _Budget) -> Tuple[float, Tuple[int, ...], list]:
    H = step.horizon
    cands = [step.candidates(j, H) for j in range(len(step.agents))]
    joint = list(itertools.product(*[range(len(c)) for c in cands]))
    expand = depth > 1 and budget.spend(len(joint))
    best, best_idx = -math.inf, joint[0]
    for idx in joint:
        ends = [cands[j][i].endpoint for j, i in enumerate(idx)]
        ji, caught = step.immediate(ends, H)
        if expand and len(caught) < step.n_targets:
            child = step.child(ends, caught, H)
            if child.n_targets and child.horizon > 0.0:
                value = ji + _search(child, depth - 1, budget)[0]
            else:
                value = ji + step.reward_to_go(ends, caught, H)
        else:
            value = ji + step.reward_to_go(ends, caught, H)
        if _better(value, best):
            best, best_idx = value, idx
    return best, best_idx, cands


def solve(state: MissionState, spec: MissionSpec) -> ControlDecision:
    """Choose the joint heading that maximises immediate plus lookahead reward.

    Depth is ``min(lookahead_depth, number of live targets)``. Ties go to
    the lexicographically smallest vector of candidate indices.
    """
    step = PlanningStep(spec, state)
    if step.n_targets == 0:
        raise MissionComplete()
    H = step.horizon
    depth = max(1, min(spec.config.lookahead_depth, step.n_targets))
    budget = _Budget(spec.config.node_budget)
    value, idx, cands = _search(step, depth, budget)
    chosen = tuple(cands[j][i].heading for j, i in enumerate(idx))
    return ControlDecision(
        planning_horizon=H,
        joint_candidates=tuple(tuple(c.heading for c in cj) for cj in cands),
        chosen_headings=chosen,
        action_horizon=step.action_horizon(chosen, H),
        objective_value=value,
        chosen_targets=tuple(cands[j][i].target_id for j, i in enumerate(idx)),
        nodes_expanded=budget.used,
        depth_used=depth,
    )


def candidate_objectives(state: MissionState, spec: MissionSpec) -> List[Tuple[Tuple[int, ...], float]]:
    """One-step objective of every joint candidate, in lexicographic order."""
    step = PlanningStep(spec, state)
    H = step.horizon
    cands = [step.candidates(j, H) for j in range(len(step.agents))]
    out = []
    for idx in itertools.product(*[range(len(c)) for c in cands]):
        ends = [cands[j][i].endpoint for j, i in enumerate(idx)]
        out.append((tuple(cands[j][i].target_id for j, i in enumerate(idx)), step.objective(ends, H)))
    return out


def count_paths(state: MissionState, spec: MissionSpec, max_targets: int = 12) -> int:
    """Number of root-to-leaf paths of the single-agent active-set tree.

    Each tree edge visits one active target; the child node starts at that
    target with it removed. A leaf is reached when no targets remain.
    """
    if len(spec.agents) != 1:
        raise ValueError("path counting is defined for a single agent")
    if len(state.live_targets) > max_targets:
        raise ValueError("tree too large")

    def walk(st: MissionState) -> int:
        if not st.live_targets:
            return 1
        step = PlanningStep(spec, st)
        active, _ = step.active_indices(0, step.horizon) if step.horizon > 0 else ([], {})
        if step.horizon <= 0:
            # already inside a capture disk: that target is the only branch
            active = step.captured_by([tuple(step.agent_pos[0])])
        total = 0
        for k in active:
            tid = int(step.ids[k])
            d = math.dist(step.agent_pos[0], step.pos[k]) / step.speeds[0]
            nxt = MissionState(
                st.clock + d,
                (tuple(step.pos[k]),),
                st.live_targets - {tid},
                {**st.collected, tid: st.clock + d},
            )
            total += walk(nxt)
        return total

    return walk(state)
