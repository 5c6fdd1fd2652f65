import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crh import Agent, Target, discount, distance, effective_deadline, reward_at
from crh.mission import advance_agent, expiry_time, is_visit, normalize_angle


def tgt(**kw):
    kw.setdefault("id", 1)
    kw.setdefault("position", (0.0, 0.0))
    kw.setdefault("initial_reward", 10.0)
    return Target(**kw)


@pytest.mark.parametrize(
    "kw, t, expected",
    [
        (dict(alpha=1.0, deadline=300.0), 0.0, 1.0),
        (dict(alpha=1.0, deadline=300.0), 300.0, 0.0),
        (dict(alpha=0.5, beta=1.0, deadline=10.0), 11.0, 0.5 * math.exp(-1.0)),
    ],
)
def test_discount_values(kw, t, expected):
    assert discount(tgt(**kw), t) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize(
    "lam, t, expected",
    [(10.0, 150.0, 5.0), (10.0, 0.0, 10.0), (12.0, 400.0, 0.0)],
)
def test_reward_at_linear(lam, t, expected):
    assert reward_at(tgt(initial_reward=lam, deadline=300.0), t) == pytest.approx(expected)


def test_reward_at_start_is_full_for_any_shape():
    assert reward_at(tgt(alpha=0.3, beta=0.2, deadline=5.0), 0.0) == 10.0


@pytest.mark.parametrize("deadline, T, expected", [(600.0, 300.0, 300.0), (300.0, 300.0, 300.0), (100.0, 300.0, 100.0)])
def test_effective_deadline(deadline, T, expected):
    assert effective_deadline(tgt(deadline=deadline), T) == expected


def test_distance():
    assert distance((0, 0), (3, 4)) == 5.0
    assert distance((2.5, -1), (2.5, -1)) == 0.0
    assert distance((1, 1), (4, 5)) == 5.0


@pytest.mark.parametrize(
    "p, u, v, dt, expected",
    [
        ((0, 0), 0.0, 1.0, 5.0, (5.0, 0.0)),
        ((0, 0), math.pi / 2, 2.0, 1.0, (0.0, 2.0)),
        ((1, 1), math.pi / 4, 1.0, math.sqrt(2.0), (2.0, 2.0)),
    ],
)
def test_advance_agent(p, u, v, dt, expected):
    assert advance_agent(p, u, v, dt) == pytest.approx(expected, abs=1e-12)


def test_is_visit_boundary_inclusive():
    assert is_visit((0.0, 0.0), tgt())
    assert not is_visit((1.0, 0.0), tgt(capture_radius=0.5))
    assert is_visit((0.5, 0.0), tgt(capture_radius=0.5))


def test_agent_heading_is_normalized():
    assert Agent(1, (0, 0), heading=-math.pi / 2).heading == pytest.approx(1.5 * math.pi)
    assert normalize_angle(-1e-300) == 0.0


def test_expiry_time():
    assert expiry_time(tgt(deadline=300.0), 1e-6) == 300.0
    assert expiry_time(tgt(alpha=0.5, beta=0.0), 1e-6) == math.inf
    t = expiry_time(tgt(alpha=0.5, beta=1.0, deadline=10.0), 1e-6)
    assert discount(tgt(alpha=0.5, beta=1.0, deadline=10.0), t) == pytest.approx(1e-6)


shapes = st.builds(
    lambda a, b, d: tgt(alpha=a, beta=b, deadline=d),
    st.floats(0.0, 1.0),
    st.floats(0.0, 5.0),
    st.floats(0.1, 1000.0),
)


@settings(max_examples=200, deadline=None)
@given(shapes, st.lists(st.floats(0.0, 5000.0), min_size=2, max_size=30))
def test_discount_non_increasing_and_bounded(target, times):
    values = [discount(target, t) for t in sorted(times)]
    assert all(0.0 <= v <= 1.0 for v in values)
    assert all(a >= b for a, b in zip(values, values[1:]))
    assert all(reward_at(target, t) <= target.initial_reward for t in times)


@given(shapes)
def test_discount_continuous_at_deadline(target):
    d = target.deadline
    assert discount(target, d) == pytest.approx(discount(target, math.nextafter(d, math.inf)), abs=1e-9)


@given(
    st.tuples(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3)),
    st.floats(0.0, 2 * math.pi),
    st.floats(0.01, 10.0),
    st.floats(0.0, 100.0),
)
def test_advance_agent_preserves_distance(p, u, v, dt):
    assert distance(p, advance_agent(p, u, v, dt)) == pytest.approx(v * dt, abs=1e-9)
