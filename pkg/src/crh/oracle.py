"""Independent ground truth for checking the controller.

* :func:`exhaustive_optimal` enumerates visit orders of a single agent.
* :func:`two_target_optimal` evaluates the closed-form two-target comparison.
* :func:`discretized_control_check` maximises the one-step objective over a
  uniform heading grid instead of the finite candidate set.
* :func:`active_set_bruteforce` samples the reachable circle densely.
"""
from __future__ import annotations

import itertools
import math
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .controller import MissionState, PlanningStep
from .mission import MissionSpec, Target, average_decay_rate, discount, distance


class OracleResult(NamedTuple):
    reward: float
    order: Tuple[int, ...]


class TwoTargetResult(NamedTuple):
    order: Optional[Tuple[int, int]]
    margin: float

    @property
    def tie(self) -> bool:
        return self.order is None


class GridResult(NamedTuple):
    value: float
    headings: Tuple[float, ...]


def _leg(cur, target: Target):
    """Straight leg from ``cur`` to the edge of the target's capture disk."""
    d = distance(cur, target.position)
    s = min(target.capture_radius, d)
    if d == 0.0:
        return 0.0, cur
    f = (d - s) / d
    return d - s, (cur[0] + f * (target.position[0] - cur[0]), cur[1] + f * (target.position[1] - cur[1]))


def order_reward(spec: MissionSpec, order: Sequence[int], agent_index: int = 0) -> float:
    """Reward of visiting ``order`` by straight legs from the agent's start."""
    agent = spec.agents[agent_index]
    cur, t, total = agent.position, 0.0, 0.0
    for tid in order:
        tgt = spec.target(tid)
        length, cur = _leg(cur, tgt)
        t += length / agent.speed
        if t <= spec.mission_time:
            total += tgt.initial_reward * discount(tgt, t)
    return total


def exhaustive_optimal(spec: MissionSpec, cap: int = 10) -> OracleResult:
    """Best single-agent visit order over all permutations.

    Depth-first enumeration in lexicographic order. A branch is cut only
    when even reaching every remaining target directly from the current
    point cannot beat the incumbent, so the result is exact; the first
    optimum met is the lexicographically smallest one.
    """
    if len(spec.agents) != 1:
        raise ValueError("exhaustive oracle supports a single agent")
    if len(spec.targets) > cap:
        raise ValueError(f"too many targets for enumeration ({len(spec.targets)} > {cap})")
    if any(t.appears_at > 0 for t in spec.targets):
        raise ValueError("exhaustive oracle needs every target known at time 0")
    agent = spec.agents[0]
    V, T = agent.speed, spec.mission_time
    targets = sorted(spec.targets, key=lambda t: t.id)
    if not targets:
        return OracleResult(0.0, ())

    def value(tgt, t):
        return tgt.initial_reward * discount(tgt, t) if t <= T else 0.0

    best = [-math.inf, ()]

    def beaten(value):
        b = best[0]
        return b == -math.inf or value > b + 1e-12 * max(1.0, abs(b))

    def dfs(cur, t, acc, remaining, prefix):
        if not remaining:
            if beaten(acc):
                best[0], best[1] = acc, tuple(prefix)
            return
        bound = acc + sum(value(g, t + _leg(cur, g)[0] / V) for g in remaining)
        if not beaten(bound):
            return
        for i, g in enumerate(remaining):
            length, nxt = _leg(cur, g)
            tt = t + length / V
            prefix.append(g.id)
            dfs(nxt, tt, acc + value(g, tt), remaining[:i] + remaining[i + 1:], prefix)
            prefix.pop()

    dfs(agent.position, 0.0, 0.0, targets, [])
    return OracleResult(float(best[0]), best[1])


def two_target_margin(spec: MissionSpec) -> float:
    """Reward of visiting the lower-id target first minus the reverse order.

    With linear decay this reduces to
    ``r1 * (d2 - d1 + d12) - r2 * (d1 - d2 + d12)`` where ``r = lambda / D``,
    so its sign decides the order without simulating either path.
    """
    if len(spec.agents) != 1 or len(spec.targets) != 2:
        raise ValueError("analytic form needs exactly one agent and two targets")
    a, b = sorted(spec.targets, key=lambda t: t.id)
    if a.alpha != 1.0 or b.alpha != 1.0:
        raise ValueError("analytic form requires linear decay")
    x = spec.agents[0].position
    d1, d2, d12 = distance(x, a.position), distance(x, b.position), distance(a.position, b.position)
    r1, r2 = a.initial_reward / a.deadline, b.initial_reward / b.deadline
    return r1 * (d2 - d1 + d12) - r2 * (d1 - d2 + d12)


def two_target_optimal(spec: MissionSpec, tie_tol: float = 1e-9) -> TwoTargetResult:
    m = two_target_margin(spec)
    a, b = sorted(t.id for t in spec.targets)
    if abs(m) < tie_tol:
        return TwoTargetResult(None, m)
    return TwoTargetResult((a, b) if m > 0 else (b, a), m)


def _grid_endpoints(step: PlanningStep, j: int, H: float, n: int):
    r = H * step.speeds[j]
    p = step.agent_pos[j]
    angles = 2.0 * math.pi * np.arange(n) / n
    return angles, [(p[0] + r * math.cos(u), p[1] + r * math.sin(u)) for u in angles]


def discretized_control_check(state: MissionState, spec: MissionSpec, n: int = 720) -> GridResult:
    """Best one-step objective over ``n`` uniform headings per agent.

    For two agents the full ``n x n`` product is maximised exactly: the
    objective only couples agents through targets collected at the end of
    the horizon, so headings are grouped by what they collect and each
    group pair is maximised agent by agent.
    """
    N = len(spec.agents)
    if n < 8:
        raise ValueError("grid needs at least 8 headings")
    if N > 2 or n > 720:
        raise ValueError("grid too large")
    step = PlanningStep(spec, state)
    H = step.horizon
    t1 = step.clock + H
    grids = [_grid_endpoints(step, j, H, n) for j in range(N)]

    groups: List[Dict[frozenset, List[int]]] = []
    for j in range(N):
        g: Dict[frozenset, List[int]] = {}
        for i, e in enumerate(grids[j][1]):
            g.setdefault(frozenset(step.captured_by([e])), []).append(i)
        groups.append(g)

    best = GridResult(-math.inf, ())
    for combo in itertools.product(*[sorted(g.items(), key=lambda kv: sorted(kv[0])) for g in groups]):
        gone = frozenset().union(*[c for c, _ in combo])
        value = sum(step.reward(k, t1) for k in gone)
        picks = []
        for j, (_, members) in enumerate(combo):
            pool = [int(k) for k in step.owned[j] if int(k) not in gone]
            top, arg = -math.inf, members[0]
            for i in members:
                v = step.tour(j, grids[j][1][i], t1, pool)[2] if pool else 0.0
                if v > top:
                    top, arg = v, i
            value += top
            picks.append(float(grids[j][0][arg]))
        if value > best.value:
            best = GridResult(float(value), tuple(picks))
    return best


def _plain_costs(spec: MissionSpec, live: Sequence[int]):
    """Rates and sparsity terms recomputed with plain Python loops."""
    cfg = spec.config
    tg = {i: spec.target(i) for i in live}
    rate = {i: average_decay_rate(tg[i], spec.mission_time) for i in live}
    zeta = {}
    for i in live:
        others = sorted((distance(tg[i].position, tg[l].position), l) for l in live if l != i)
        zeta[i] = sum(
            cfg.sparsity_gamma ** (n + 1) * d / rate[l]
            for n, (d, l) in enumerate(others[: cfg.sparsity_neighbors])
        )
    return tg, rate, zeta


def active_set_bruteforce(
    agent_index: int,
    state: MissionState,
    H: float,
    spec: MissionSpec,
    n: int = 10_000,
    tie_tol: float = 1e-6,
    pool: Optional[Sequence[int]] = None,
) -> frozenset:
    """Targets minimising travel cost at one of ``n`` points of the reachable circle."""
    if n < 100:
        raise ValueError("need at least 100 circle points")
    live = sorted(state.live_targets if pool is None else pool)
    tg, rate, zeta = _plain_costs(spec, sorted(state.live_targets))
    p = state.agent_positions[agent_index]
    r = H * spec.agents[agent_index].speed
    ang = 2.0 * math.pi * np.arange(n) / n
    xs, ys = p[0] + r * np.cos(ang), p[1] + r * np.sin(ang)
    cost = np.stack(
        [np.hypot(xs - tg[i].position[0], ys - tg[i].position[1]) / rate[i] + zeta[i] for i in live],
        axis=1,
    )
    best = cost.min(axis=1, keepdims=True)
    hit = (cost <= best + tie_tol).any(axis=0)
    return frozenset(i for i, h in zip(live, hit) if h)
