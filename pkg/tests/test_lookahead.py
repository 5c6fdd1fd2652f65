import logging

import pytest

from crh import MissionComplete, MissionState, count_paths, run_mission, solve
from crh.lookahead import candidate_objectives
from crh.oracle import exhaustive_optimal, order_reward, two_target_optimal

import instances


def with_depth(spec, k, **kw):
    from dataclasses import replace

    return replace(spec, config=replace(spec.config, lookahead_depth=k, **kw))


def test_one_step_is_the_best_candidate_objective():
    for seed in range(25):
        spec = instances.scattered(seed, m=6, n_agents=1 + seed % 2, gamma=0.3 * (seed % 2))
        state = MissionState.initial(spec)
        decision = solve(state, spec)
        best = max(v for _, v in candidate_objectives(state, spec))
        assert decision.objective_value == pytest.approx(best, abs=1e-12)
        assert decision.depth_used == 1
        assert all(u in cand for u, cand in zip(decision.chosen_headings, decision.joint_candidates))
        assert 0.0 < decision.action_horizon <= decision.planning_horizon


def test_one_step_objective_reaches_the_two_target_optimum():
    for seed in range(200):
        spec = instances.two_target(seed)
        label = two_target_optimal(spec)
        if label.tie:
            continue
        decision = solve(MissionState.initial(spec), spec)
        assert decision.objective_value >= order_reward(spec, label.order) - 1e-9


def test_depth_is_clamped_to_live_targets():
    spec = with_depth(instances.scattered(3, m=2), 5)
    assert solve(MissionState.initial(spec), spec).depth_used == 2


def test_solve_without_targets_raises():
    spec = instances.scattered(3, m=2)
    done = MissionState(0.0, ((1.0, 1.0),), frozenset(), {1: 0.0, 2: 0.0})
    with pytest.raises(MissionComplete):
        solve(done, spec)


def test_solve_is_deterministic():
    spec = with_depth(instances.scattered(11, m=7, n_agents=2, gamma=0.3), 2)
    state = MissionState.initial(spec)
    assert solve(state, spec) == solve(state, spec)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_every_depth_stays_below_the_optimum(k):
    for seed in range(15):
        spec = with_depth(instances.scattered(500 + seed, m=6, deadline=(60.0, 200.0)), k)
        assert run_mission(spec).total_reward <= exhaustive_optimal(spec).reward + 1e-9


def test_node_budget_truncates_with_warning(caplog):
    spec = with_depth(instances.scattered(5, m=9, n_agents=2), 4, node_budget=5)
    with caplog.at_level(logging.WARNING, logger="crh.lookahead"):
        decision = solve(MissionState.initial(spec), spec)
    assert "budget" in caplog.text
    assert decision.nodes_expanded > 5


def test_count_paths_small_trees():
    one = instances.equal_reward_mission((5.0, 5.0), [(7.0, 5.0)])
    assert count_paths(MissionState.initial(one), one) == 1
    two = instances.equal_reward_mission((5.0, 5.0), [(3.0, 5.0), (7.0, 5.0)])
    assert count_paths(MissionState.initial(two), two) == 2


def test_count_paths_rejects_large_or_multi_agent():
    spec = instances.scattered(1, m=13)
    with pytest.raises(ValueError, match="tree too large"):
        count_paths(MissionState.initial(spec), spec)
    spec = instances.scattered(1, m=3, n_agents=2)
    with pytest.raises(ValueError):
        count_paths(MissionState.initial(spec), spec)


@pytest.mark.xfail(
    strict=True,
    reason="with these approximate coordinates the active-set tree has 44 paths "
    "(42 under the closest-point test), not 11",
)
def test_count_paths_five_target_layout():
    spec = instances.equal_reward_mission(instances.FIVE_TARGET_AGENT, instances.FIVE_TARGETS)
    assert count_paths(MissionState.initial(spec), spec) == 11


def test_count_paths_five_target_layout_is_well_below_permutations():
    spec = instances.equal_reward_mission(instances.FIVE_TARGET_AGENT, instances.FIVE_TARGETS)
    assert count_paths(MissionState.initial(spec), spec) == 44 < 120
