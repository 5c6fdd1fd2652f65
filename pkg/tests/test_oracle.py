import itertools
import math

import pytest

from crh import (
    Agent,
    MissionSpec,
    MissionState,
    SpaceExtent,
    Target,
    active_set_bruteforce,
    discretized_control_check,
    exhaustive_optimal,
    reward_at,
    two_target_optimal,
)
from crh.lookahead import candidate_objectives
from crh.oracle import order_reward, two_target_margin

import instances

BOX = SpaceExtent(0.0, 0.0, 100.0, 100.0)


def single(targets, agent=(0.0, 0.0), speed=1.0):
    return MissionSpec(BOX, (50.0, 50.0), 1000.0, targets, [Agent(1, agent, speed=speed)])


def test_one_target():
    t = Target(1, (30.0, 40.0), 10.0)
    res = exhaustive_optimal(single([t], speed=2.0))
    assert res.order == (1,)
    assert res.reward == pytest.approx(reward_at(t, 25.0))


def test_collinear_sweep_is_optimal():
    targets = [Target(i, (10.0 * i, 0.0), 5.0) for i in (3, 1, 2)]
    spec = single(targets)
    res = exhaustive_optimal(spec)
    assert res.order == (1, 2, 3)
    brute = max(itertools.permutations([1, 2, 3]), key=lambda o: order_reward(spec, o))
    assert res.reward == pytest.approx(order_reward(spec, brute))


def test_capture_radius_shortens_each_leg():
    targets = [Target(1, (10.0, 0.0), 10.0, capture_radius=2.0), Target(2, (20.0, 0.0), 10.0, capture_radius=2.0)]
    res = exhaustive_optimal(single(targets))
    assert res.reward == pytest.approx(reward_at(targets[0], 8.0) + reward_at(targets[1], 18.0))


def test_matches_brute_force_permutations():
    for seed in range(10):
        spec = instances.scattered(seed, m=6, deadline=(50.0, 150.0))
        res = exhaustive_optimal(spec)
        ids = [t.id for t in spec.targets]
        values = {o: order_reward(spec, o) for o in itertools.permutations(ids)}
        top = max(values.values())
        assert res.reward == pytest.approx(top, abs=1e-9)
        assert res.order == min(o for o, v in values.items() if v >= top - 1e-12 * max(1.0, top))


def test_exhaustive_errors():
    spec = instances.scattered(1, m=11)
    with pytest.raises(ValueError, match="too many"):
        exhaustive_optimal(spec)
    assert exhaustive_optimal(spec, cap=11).reward > 0
    with pytest.raises(ValueError):
        exhaustive_optimal(instances.scattered(1, m=3, n_agents=2))


def test_two_target_tie_on_symmetric_instance():
    spec = single([Target(1, (10.0, 0.0), 5.0), Target(2, (0.0, 10.0), 5.0)])
    assert two_target_optimal(spec).tie


def test_two_target_prefers_fast_decay():
    spec = single([Target(1, (10.0, 0.0), 50.0, deadline=100.0), Target(2, (0.0, 11.0), 5.0, deadline=500.0)])
    assert two_target_optimal(spec).order == (1, 2)


def test_two_target_margin_is_the_path_reward_difference():
    for seed in range(200):
        spec = instances.two_target(seed)
        assert two_target_margin(spec) == pytest.approx(order_reward(spec, (1, 2)) - order_reward(spec, (2, 1)), abs=1e-9)


def test_two_target_agrees_with_exhaustive():
    for seed in range(1000):
        spec = instances.two_target(seed)
        label = two_target_optimal(spec)
        if not label.tie:
            assert exhaustive_optimal(spec).order == label.order


def test_two_target_rejects_nonlinear():
    spec = single([Target(1, (10.0, 0.0), 5.0, alpha=0.5), Target(2, (0.0, 10.0), 5.0)])
    with pytest.raises(ValueError, match="analytic form requires linear decay"):
        two_target_optimal(spec)


def test_grid_finds_aligned_capture():
    spec = single([Target(1, (10.0, 0.0), 5.0), Target(2, (0.0, 30.0), 5.0)])
    res = discretized_control_check(MissionState.initial(spec), spec, n=8)
    assert res.headings == (0.0,)
    assert res.value == pytest.approx(reward_at(spec.target(1), 10.0) + reward_at(spec.target(2), 10.0 + math.hypot(10, 30)))


def test_grid_argument_checks():
    spec = instances.scattered(1, m=3)
    state = MissionState.initial(spec)
    with pytest.raises(ValueError):
        discretized_control_check(state, spec, n=4)
    with pytest.raises(ValueError, match="grid too large"):
        discretized_control_check(state, spec, n=721)
    three = instances.scattered(1, m=3, n_agents=3)
    with pytest.raises(ValueError, match="grid too large"):
        discretized_control_check(MissionState.initial(three), three, n=8)


def test_grid_never_beats_candidates_on_small_sweep():
    for seed in range(20):
        spec = instances.scattered(900 + seed, m=5, n_agents=1 + seed % 2)
        state = MissionState.initial(spec)
        best = max(v for _, v in candidate_objectives(state, spec))
        assert best >= discretized_control_check(state, spec, n=360).value - 1e-9


def test_bruteforce_active_set():
    spec = single([Target(1, (30.0, 40.0), 10.0)])
    assert active_set_bruteforce(0, MissionState.initial(spec), 5.0, spec, n=100) == {1}
    with pytest.raises(ValueError):
        active_set_bruteforce(0, MissionState.initial(spec), 5.0, spec, n=99)
