from collections import Counter

import numpy as np
import pytest

from crh import RandomMissionParams, SpaceExtent, gen_random
from crh.generate import cluster_spread


def test_seed_reproduces_the_mission():
    p = RandomMissionParams(seed=123, cluster_count=3, appearance_fraction=0.5)
    assert gen_random(p) == gen_random(p)
    assert gen_random(p) != gen_random(RandomMissionParams(seed=124, cluster_count=3, appearance_fraction=0.5))


def test_known_draw_is_stable():
    # pins the generator algorithm: PCG64 with uniform positions drawn first
    spec = gen_random(RandomMissionParams(target_count=2, agent_count=1, seed=7))
    g = np.random.Generator(np.random.PCG64(7))
    pos = g.uniform([0.0, 0.0], [300.0, 300.0], size=(2, 2))
    assert spec.targets[0].position == (float(pos[0, 0]), float(pos[0, 1]))
    assert spec.meta == {"generator": "pcg64", "seed": "7", "clusters": "0"}


def test_defaults_follow_the_uniform_protocol():
    spec = gen_random(RandomMissionParams(seed=1))
    assert len(spec.targets) == 20 and len(spec.agents) == 2
    assert all(10.0 <= t.initial_reward <= 20.0 for t in spec.targets)
    assert all(300.0 <= t.deadline <= 600.0 for t in spec.targets)
    assert all(a.position == spec.base == (150.0, 150.0) for a in spec.agents)
    assert spec.mission_time == 1000.0


def test_clusters_are_round_robin_and_compact():
    p = RandomMissionParams(target_count=20, cluster_count=9, seed=3)
    spec = gen_random(p)
    pos = np.array([t.position for t in spec.targets])
    g = np.random.Generator(np.random.PCG64(3))
    centers = g.uniform([0.0, 0.0], [300.0, 300.0], size=(9, 2))
    which = np.arange(20) % 9
    assert Counter(which.tolist()) == Counter({0: 3, 1: 3, **{k: 2 for k in range(2, 9)}})
    spread = np.linalg.norm(pos - centers[which], axis=1)
    assert np.median(spread) < 3 * cluster_spread(p.space_extent, 9)
    assert all(p.space_extent.contains(t.position) for t in spec.targets)


def test_cluster_spread():
    assert cluster_spread(SpaceExtent(0, 0, 300, 300), 9) == pytest.approx(25.0)


def test_half_the_targets_appear_late():
    p = RandomMissionParams(target_count=20, appearance_fraction=0.5, seed=9)
    spec = gen_random(p)
    late = [t.appears_at for t in spec.targets if t.appears_at > 0]
    assert len(late) == 10
    assert all(0.0 < a <= 500.0 for a in late)


def test_agent_positions_and_sensing():
    p = RandomMissionParams(agent_count=2, agent_positions=((0.0, 0.0), (10.0, 10.0)), sensing_range=60.0)
    spec = gen_random(p)
    assert [a.position for a in spec.agents] == [(0.0, 0.0), (10.0, 10.0)]
    assert all(a.sensing_range == 60.0 for a in spec.agents)
    with pytest.raises(ValueError):
        gen_random(RandomMissionParams(agent_count=3, agent_positions=((0.0, 0.0),)))


@pytest.mark.parametrize(
    "kw",
    [dict(target_count=0), dict(agent_count=0), dict(cluster_count=-1), dict(reward_low=5.0, reward_high=1.0),
     dict(appearance_fraction=1.5)],
)
def test_invalid_params(kw):
    with pytest.raises(ValueError):
        RandomMissionParams(**kw)
