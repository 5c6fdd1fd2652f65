import math

import pytest

from crh import ControllerConfig, RewardPolicy, parse_tsplib, run_mission, tour_length
from crh.tsplib import (
    UnsupportedInstance,
    bundled_instance,
    known_optima,
    nearest_neighbor_length,
    nint_distance,
    read_tsplib,
    visit_order_length,
)

TOY = """NAME : toy3
TYPE : TSP
DIMENSION : 3
EDGE_WEIGHT_TYPE : EUC_2D
NODE_COORD_SECTION
1 0 0
2 3 0
3 3 4.6
EOF
"""


def test_toy_instance():
    spec = parse_tsplib(TOY)
    assert [t.id for t in spec.targets] == [1, 2, 3]
    assert spec.agents[0].position == (0.0, 0.0)
    assert all(t.initial_reward == 1.0 and t.alpha == 1.0 and t.capture_radius == 0.0 for t in spec.targets)
    nn = nearest_neighbor_length([(0, 0), (3, 0), (3, 4.6)])
    assert spec.targets[0].deadline == pytest.approx(10 * nn)
    assert spec.meta == {"name": "toy3", "edge_weight_type": "EUC_2D"}


def test_nint_convention():
    assert nint_distance((0, 0), (3, 4.6)) == 5  # 5.49 rounds down
    assert nint_distance((0, 0), (3, 4.7)) == 6  # 5.58 rounds up
    # 3 + 5 (4.6 rounded) + 5 (5.49 rounded)
    assert tour_length([(0, 0), (3, 0), (3, 4.6)], [0, 1, 2]) == 3 + 5 + 5
    assert tour_length([(0, 0)], [0]) == 0


def test_reward_policy_override():
    spec = parse_tsplib(TOY, RewardPolicy(initial_reward=2.0, deadline=50.0))
    assert {(t.initial_reward, t.deadline) for t in spec.targets} == {(2.0, 50.0)}
    assert spec.mission_time == 50.0


def test_unsupported_metric():
    with pytest.raises(UnsupportedInstance, match="ATT"):
        read_tsplib(TOY.replace("EUC_2D", "ATT"))


def test_dimension_mismatch():
    with pytest.raises(ValueError, match="DIMENSION"):
        read_tsplib(TOY.replace("DIMENSION : 3", "DIMENSION : 4"))


def test_berlin52():
    spec = parse_tsplib(bundled_instance("berlin52"))
    assert len(spec.targets) == 52
    assert known_optima()["berlin52"] == 7542
    # the published optimal tour of berlin52
    opt = [1, 49, 32, 45, 19, 41, 8, 9, 10, 43, 33, 51, 11, 52, 14, 13, 47, 26, 27, 28, 12, 25, 4, 6, 15, 5, 24,
           48, 38, 37, 40, 39, 36, 35, 34, 44, 46, 16, 29, 50, 20, 23, 30, 2, 7, 42, 21, 17, 3, 18, 31, 22]
    assert visit_order_length(spec, opt) == 7542


def test_toy_run_visits_every_node():
    spec = parse_tsplib(TOY, config=ControllerConfig(lookahead_depth=2))
    order = run_mission(spec).visit_order()
    assert sorted(order) == [1, 2, 3] and order[0] == 1
    assert visit_order_length(spec, order) == 13
    assert math.isclose(spec.base[0], 0.0)
