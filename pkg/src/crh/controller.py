"""Single control-evaluation step of the receding horizon controller.

Everything here is a pure function of a :class:`MissionState` plus the
static :class:`~crh.mission.MissionSpec`. :class:`PlanningStep` caches the
per-step quantities (target arrays, sparsity terms, partition) that the
public functions and the lookahead search share.
"""
from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .cooperation import TargetPartition, partition_targets
from .mission import (
    Agent,
    MissionSpec,
    Point,
    Target,
    average_decay_rate,
    discount,
    expiry_time,
    heading_to,
    normalize_angle,
)
from .validation import MissionComplete


@dataclass(frozen=True)
class MissionState:
    """Dynamic snapshot at a control instant.

    ``live_targets`` holds the unvisited targets the team currently knows
    about; ``collected`` maps visited target ids to their visit times.
    """

    clock: float
    agent_positions: Tuple[Point, ...]
    live_targets: FrozenSet[int]
    collected: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "agent_positions", tuple(tuple(map(float, p)) for p in self.agent_positions))
        object.__setattr__(self, "live_targets", frozenset(self.live_targets))
        overlap = self.live_targets & set(self.collected)
        if overlap:
            raise ValueError(f"targets both live and collected: {sorted(overlap)}")

    @classmethod
    def initial(cls, spec: MissionSpec) -> "MissionState":
        return cls(
            clock=0.0,
            agent_positions=tuple(a.position for a in spec.agents),
            live_targets=frozenset(t.id for t in spec.targets if t.appears_at <= 0.0),
        )


@dataclass(frozen=True)
class Candidate:
    target_id: int
    endpoint: Point
    heading: float
    # "active": closest point of an active target; "capture": direct heading
    # that lands inside a capture radius at the end of the horizon
    kind: str = "active"


@dataclass(frozen=True)
class ActiveSetResult:
    agent_id: int
    active_targets: FrozenSet[int]
    closest_points: Dict[int, Point]
    candidate_headings: Dict[int, float]


@dataclass(frozen=True)
class TourProjection:
    agent_id: int
    order: Tuple[int, ...]
    visit_times: Dict[int, float]
    reward: float = 0.0


@dataclass(frozen=True)
class ControlDecision:
    planning_horizon: float
    joint_candidates: Tuple[Tuple[float, ...], ...]
    chosen_headings: Tuple[float, ...]
    action_horizon: float
    objective_value: float
    chosen_targets: Tuple[int, ...] = ()
    nodes_expanded: int = 0
    depth_used: int = 0


def closest_point(agent_position: Sequence[float], target_position: Sequence[float], radius: float):
    """Point at ``radius`` from the agent along the ray toward the target.

    Returns ``(point, degenerate)``; ``degenerate`` is True when the agent
    sits on the target and the direction is undefined (angle 0 is used).
    """
    dx = target_position[0] - agent_position[0]
    dy = target_position[1] - agent_position[1]
    d = math.hypot(dx, dy)
    if d == 0.0:
        return (agent_position[0] + radius, agent_position[1]), True
    if d == radius:
        return (float(target_position[0]), float(target_position[1])), False
    s = radius / d
    return (agent_position[0] + s * dx, agent_position[1] + s * dy), False


def _discount_vec(alpha, beta, deadline, t):
    lin = 1.0 - (alpha / deadline) * t
    tail = (1.0 - alpha) * np.exp(-beta * np.maximum(t - deadline, 0.0))
    return np.clip(np.where(t <= deadline, lin, tail), 0.0, 1.0)


def _owns_arc(p, r, pos, rate, zeta, k, tol, max_intervals=200_000) -> bool:
    """Whether target ``k`` has the least cost at some point of the circle.

    Branch and bound over arcs. Along the circle each cost changes by at
    most ``1/rate`` per unit of arc length, so an arc is discarded once the
    lower bound of ``k`` exceeds the upper bound of the best rival at the
    arc midpoint. Arcs that stay undecided down to ``tol`` count as ties.
    """
    others = np.array([i for i in range(len(pos)) if i != k], dtype=int)
    if not len(others):
        return True
    n = 64
    mids = (np.arange(n) + 0.5) * (2.0 * math.pi / n)
    half = math.pi / n
    while len(mids):
        xs = p[0] + r * np.cos(mids)
        ys = p[1] + r * np.sin(mids)
        ck = np.hypot(xs - pos[k, 0], ys - pos[k, 1]) / rate[k] + zeta[k]
        co = np.hypot(xs[:, None] - pos[others, 0], ys[:, None] - pos[others, 1]) / rate[others] + zeta[others]
        rival = co.min(axis=1)
        if np.any(ck <= rival + tol * np.maximum(1.0, np.abs(rival))):
            return True
        h = r * half
        upper = (co + h / rate[others]).min(axis=1)
        open_ = ck - h / rate[k] <= upper
        if not open_.any():
            return False
        if h <= tol or 2 * open_.sum() > max_intervals:
            return True
        keep = mids[open_]
        half /= 2.0
        mids = np.concatenate([keep - half, keep + half])
    return False


def _may_win(p, r, pos, rate, zeta, n=256) -> np.ndarray:
    """Mask of targets not ruled out from being cheapest on the circle.

    One pass of the Lipschitz bound used by :func:`_owns_arc` over ``n``
    equal arcs, for all targets at once.
    """
    m = len(pos)
    if m < 2:
        return np.ones(m, dtype=bool)
    ang = (np.arange(n) + 0.5) * (2.0 * math.pi / n)
    xs, ys = p[0] + r * np.cos(ang), p[1] + r * np.sin(ang)
    inv = 1.0 / rate
    c = np.hypot(xs[:, None] - pos[None, :, 0], ys[:, None] - pos[None, :, 1]) * inv + zeta
    h = r * math.pi / n
    upper = c + h * inv
    order = np.argsort(upper, axis=1)
    first = np.take_along_axis(upper, order[:, :1], axis=1)[:, 0]
    second = np.take_along_axis(upper, order[:, 1:2], axis=1)[:, 0]
    rival = np.where(order[:, :1] == np.arange(m)[None, :], second[:, None], first[:, None])
    return ((c - h * inv) <= rival).any(axis=0)


def _nearest_win(p, r, pos, rate, zeta, k, min_width=1e-13) -> Optional[float]:
    """Angle closest to the bearing of target ``k`` at which ``k`` is the
    greedy first choice (cheapest, lowest index on ties); None if nowhere.

    Best-first search over arcs ordered by their angular distance from the
    bearing, discarding arcs where ``k`` provably loses (Lipschitz bound).
    """
    phi = math.atan2(pos[k, 1] - p[1], pos[k, 0] - p[0])
    inv = 1.0 / rate
    others = np.array([i for i in range(len(pos)) if i != k], dtype=int)

    def costs(delta):
        a = phi + delta
        x, y = p[0] + r * math.cos(a), p[1] + r * math.sin(a)
        return np.hypot(pos[:, 0] - x, pos[:, 1] - y) * inv + zeta

    def wins(c):
        return int(np.argmin(c)) == k

    if not len(others) or wins(costs(0.0)):
        return phi
    best = math.inf
    n = 128
    width = 2.0 * math.pi / n
    heap = []
    for i in range(n):
        lo = -math.pi + i * width
        hi = lo + width
        near = 0.0 if lo <= 0.0 <= hi else min(abs(lo), abs(hi))
        heap.append((near, lo, hi))
    heapq.heapify(heap)
    while heap:
        near, lo, hi = heapq.heappop(heap)
        if near >= best:
            break
        mid, h = 0.5 * (lo + hi), 0.5 * (hi - lo)
        c = costs(mid)
        slack = r * h
        if c[k] - slack * inv[k] > np.min(c[others] + slack * inv[others]):
            continue
        edge = lo if abs(lo) < abs(hi) else hi
        if wins(costs(edge)):
            best = min(best, abs(edge))
            continue
        if wins(c):
            best = min(best, abs(mid))
        if h < min_width:
            continue
        for a, b in ((lo, mid), (mid, hi)):
            nr = 0.0 if a <= 0.0 <= b else min(abs(a), abs(b))
            if nr < best:
                heapq.heappush(heap, (nr, a, b))
    if not math.isfinite(best):
        return None
    # recover the sign: the winning side is the one actually won
    for s in (1.0, -1.0):
        if wins(costs(s * best)):
            return phi + s * best
    return None


class PlanningStep:
    """Cached view of one (possibly hypothetical) control instant."""

    def __init__(self, spec: MissionSpec, state: MissionState):
        self.spec = spec
        self.state = state
        self.cfg = spec.config
        self.clock = float(state.clock)
        self.tol = self.cfg.tie_tolerance
        self.agents: Tuple[Agent, ...] = spec.agents
        self.agent_pos = np.asarray(state.agent_positions, dtype=float).reshape(len(self.agents), 2)
        self.speeds = np.array([a.speed for a in self.agents], dtype=float)

        by_id = {t.id: t for t in spec.targets}
        self.ids = np.array(sorted(state.live_targets), dtype=int)
        self.targets: List[Target] = [by_id[i] for i in self.ids]
        self.index = {int(i): k for k, i in enumerate(self.ids)}
        T = spec.mission_time
        self.pos = np.array([t.position for t in self.targets], dtype=float).reshape(-1, 2)
        self.lam = np.array([t.initial_reward for t in self.targets], dtype=float)
        self.rate = np.array([average_decay_rate(t, T) for t in self.targets], dtype=float)
        self.radius = np.array([t.capture_radius for t in self.targets], dtype=float)
        self.alpha = np.array([t.alpha for t in self.targets], dtype=float)
        self.beta = np.array([t.beta for t in self.targets], dtype=float)
        self.deadline = np.array([t.deadline for t in self.targets], dtype=float)

    # ------------------------------------------------------------------ basics
    @property
    def n_targets(self) -> int:
        return len(self.ids)

    def _require_targets(self):
        if self.n_targets == 0:
            raise MissionComplete()

    def reward(self, k: int, t: float) -> float:
        if t > self.spec.mission_time:
            return 0.0
        return self.lam[k] * discount(self.targets[k], t)

    @cached_property
    def zeta(self) -> np.ndarray:
        """Sparsity term of every live target, over the live set."""
        M = self.n_targets
        I = self.cfg.sparsity_neighbors
        gamma = self.cfg.sparsity_gamma
        z = np.zeros(M)
        m = min(I, M - 1)
        if M < 2 or m <= 0 or gamma == 0.0:
            return z
        diff = self.pos[:, None, :] - self.pos[None, :, :]
        dist = np.hypot(diff[..., 0], diff[..., 1])
        np.fill_diagonal(dist, np.inf)
        # ids are ascending, so a stable sort breaks distance ties by id
        order = np.argsort(dist, axis=1, kind="stable")[:, :m]
        weights = gamma ** np.arange(1, m + 1)
        rows = np.arange(M)[:, None]
        z = (weights[None, :] * dist[rows, order] / self.rate[order]).sum(axis=1)
        return z

    def eta(self, point: Sequence[float], idx: Optional[np.ndarray] = None) -> np.ndarray:
        """Travel cost of targets ``idx`` (default: all live) seen from ``point``."""
        if idx is None:
            idx = slice(None)
        d = np.hypot(self.pos[idx, 0] - point[0], self.pos[idx, 1] - point[1])
        return d / self.rate[idx] + self.zeta[idx]

    # ------------------------------------------------------------- horizons
    @cached_property
    def horizon(self) -> float:
        self._require_targets()
        best = math.inf
        for j in range(len(self.agents)):
            d = np.hypot(self.pos[:, 0] - self.agent_pos[j, 0], self.pos[:, 1] - self.agent_pos[j, 1])
            best = min(best, float(np.min((d - self.radius) / self.speeds[j])))
        return max(best, 0.0)

    @cached_property
    def partition(self) -> TargetPartition:
        tpos = {int(i): tuple(self.pos[k]) for k, i in enumerate(self.ids)}
        apos = {j: tuple(self.agent_pos[j]) for j in range(len(self.agents))}
        return partition_targets(tpos, apos, self.cfg.neighbor_count, self.cfg.cooperation_delta)

    @cached_property
    def owned(self) -> Tuple[np.ndarray, ...]:
        """Indices (into the live arrays) owned by each agent index."""
        owner = np.array([self.partition.assignment[int(i)] for i in self.ids], dtype=int)
        return tuple(np.flatnonzero(owner == j) for j in range(len(self.agents)))

    # ---------------------------------------------------------- active sets
    def active_indices(self, j: int, H: float, pool: Optional[np.ndarray] = None, exact: bool = True):
        """Indices in ``pool`` that have the least travel cost somewhere on
        the reachable circle, plus every pool target's closest point.

        A target cheapest at its own closest point is active outright. The
        rest are settled by :func:`_owns_arc`, because with unequal decay
        rates a target can win an arc of the circle away from that point.
        """
        self._require_targets()
        if pool is None:
            pool = np.arange(self.n_targets)
        pool = np.asarray(pool, dtype=int)
        r = H * self.speeds[j]
        p = self.agent_pos[j]
        pts = np.array([closest_point(p, self.pos[k], r)[0] for k in pool], dtype=float).reshape(-1, 2)
        ypool = self.pos[pool]
        rate, zeta = self.rate[pool], self.zeta[pool]
        diff = pts[:, None, :] - ypool[None, :, :]
        cost = np.hypot(diff[..., 0], diff[..., 1]) / rate[None, :] + zeta[None, :]
        own = np.diagonal(cost)
        best = cost.min(axis=1)
        ok = own <= best + self.tol * np.maximum(1.0, np.abs(best))
        if exact and r > 0.0:
            for i in np.flatnonzero(~ok):
                ok[i] = _owns_arc(p, r, ypool, rate, zeta, int(i), self.tol)
        return [int(k) for k, keep in zip(pool, ok) if keep], {int(k): tuple(pt) for k, pt in zip(pool, pts)}

    def candidate_pool(self, j: int) -> np.ndarray:
        own = self.owned[j]
        return own if len(own) else np.arange(self.n_targets)

    def capturable(self) -> List[int]:
        """Live indices some agent can capture at the end of the horizon."""
        H = self.horizon
        out = set()
        for j in range(len(self.agents)):
            p = self.agent_pos[j]
            d = np.hypot(self.pos[:, 0] - p[0], self.pos[:, 1] - p[1])
            out.update(int(k) for k in np.flatnonzero(d - self.radius <= H * self.speeds[j] + self.tol))
        return sorted(out)

    def candidates(self, j: int, H: Optional[float] = None) -> List[Candidate]:
        """Finite heading set for agent ``j``.

        The projected tour starts with whichever target is cheapest at the
        endpoint, so for each target of the agent's cell (all live targets
        when the cell is empty) the useful endpoint is the point of the
        reachable circle nearest to it among those where it comes first.
        That is its closest point whenever it passes the closest-point test.
        The search is repeated with every subset of the targets some agent
        can capture removed, and direct headings that end inside a capture
        radius are added.
        """
        H = self.horizon if H is None else H
        p = self.agent_pos[j]
        r = H * self.speeds[j]
        base = [int(k) for k in self.candidate_pool(j)]
        found: Dict[Tuple[int, int], Candidate] = {}
        if r > 0.0:
            cap = [k for k in self.capturable() if k in base]
            subsets = [()]
            if len(cap) <= 3:
                for size in range(1, len(cap) + 1):
                    subsets.extend(itertools.combinations(cap, size))
            else:
                subsets.extend((k,) for k in cap)
            for gone in subsets:
                pool = np.array([k for k in base if k not in gone], dtype=int)
                if not len(pool):
                    continue
                maybe = _may_win(p, r, self.pos[pool], self.rate[pool], self.zeta[pool])
                for li, k in enumerate(pool):
                    if not maybe[li]:
                        continue
                    a = _nearest_win(p, r, self.pos[pool], self.rate[pool], self.zeta[pool], li)
                    if a is None:
                        continue
                    pt, _ = closest_point(p, self.pos[k], r)
                    kind = "active"
                    if a != math.atan2(self.pos[k, 1] - p[1], self.pos[k, 0] - p[0]):
                        pt, kind = (p[0] + r * math.cos(a), p[1] + r * math.sin(a)), "arc"
                    found.setdefault((0 if kind == "active" else 1, int(k)), Candidate(int(self.ids[k]), tuple(map(float, pt)), heading_to(p, pt), kind))
        d = np.hypot(self.pos[:, 0] - p[0], self.pos[:, 1] - p[1])
        for k in np.flatnonzero(d - self.radius <= r + self.tol):
            k = int(k)
            if (0, k) in found:
                continue
            pt, _ = closest_point(p, self.pos[k], r)
            found[(0, k)] = Candidate(int(self.ids[k]), pt, heading_to(p, pt), "capture")
        if not found:
            pt, _ = closest_point(p, self.pos[base[0]], r)
            found[(0, base[0])] = Candidate(int(self.ids[base[0]]), pt, heading_to(p, pt), "active")
        out: List[Candidate] = []
        for key in sorted(found):
            c = found[key]
            if any(math.hypot(c.endpoint[0] - o.endpoint[0], c.endpoint[1] - o.endpoint[1]) <= self.tol for o in out):
                continue
            out.append(c)
        return out

    # -------------------------------------------------------------- rewards
    def captured_by(self, endpoints: Sequence[Sequence[float]]) -> List[int]:
        """Live target indices whose capture disk contains some endpoint."""
        hit = np.zeros(self.n_targets, dtype=bool)
        for e in endpoints:
            d = np.hypot(self.pos[:, 0] - e[0], self.pos[:, 1] - e[1])
            hit |= d <= self.radius + self.tol
        return [int(k) for k in np.flatnonzero(hit)]

    def immediate(self, endpoints, H: float) -> Tuple[float, List[int]]:
        caught = self.captured_by(endpoints)
        t = self.clock + H
        return float(sum(self.reward(k, t) for k in caught)), caught

    def tour(self, j: int, start: Sequence[float], start_time: float, pool: Iterable[int]):
        """Greedy min-travel-cost chaining through ``pool`` (live indices).

        Returns ``(order, times, reward)`` with ``order`` as live indices.
        Legs run centre to centre at the agent's speed; rewards are zero past
        the mission time or once a target's discount has hit zero.
        """
        rem = np.array(sorted(pool), dtype=int)
        order, times = [], []
        total = 0.0
        cur = (float(start[0]), float(start[1]))
        t = float(start_time)
        V = self.speeds[j]
        T = self.spec.mission_time
        while rem.size:
            d = np.hypot(self.pos[rem, 0] - cur[0], self.pos[rem, 1] - cur[1])
            cost = d / self.rate[rem] + self.zeta[rem]
            i = int(np.argmin(cost))
            k = int(rem[i])
            t += float(d[i]) / V
            order.append(k)
            times.append(t)
            if t <= T:
                total += self.lam[k] * discount(self.targets[k], t)
            cur = (self.pos[k, 0], self.pos[k, 1])
            rem = np.delete(rem, i)
        return order, times, total

    def reward_to_go(self, endpoints, captured: Iterable[int], H: float) -> float:
        gone = set(captured)
        t = self.clock + H
        total = 0.0
        for j in range(len(self.agents)):
            pool = [int(k) for k in self.owned[j] if int(k) not in gone]
            if pool:
                total += self.tour(j, endpoints[j], t, pool)[2]
        return total

    def objective(self, endpoints, H: Optional[float] = None) -> float:
        H = self.horizon if H is None else H
        ji, caught = self.immediate(endpoints, H)
        return ji + self.reward_to_go(endpoints, caught, H)

    def child(self, endpoints, captured: Iterable[int], H: float) -> "PlanningStep":
        """Hypothetical step reached after moving every agent to its endpoint."""
        t = self.clock + H
        gone = set(captured)
        eps = self.cfg.reward_epsilon
        live = frozenset(
            int(self.ids[k]) for k in range(self.n_targets)
            if k not in gone and expiry_time(self.targets[k], eps) > t
        )
        collected = dict(self.state.collected)
        for k in gone:
            collected[int(self.ids[k])] = t
        state = MissionState(t, tuple(tuple(map(float, e)) for e in endpoints), live, collected)
        return PlanningStep(self.spec, state)

    def endpoints_for(self, headings: Sequence[float], H: float) -> List[Point]:
        out = []
        for j, u in enumerate(headings):
            step = H * self.speeds[j]
            out.append((self.agent_pos[j, 0] + step * math.cos(u), self.agent_pos[j, 1] + step * math.sin(u)))
        return out

    # -------------------------------------------------------- action horizon
    def switch_time(self, j: int, heading: float) -> float:
        """First t > 0 at which agent ``j``'s nearest live target changes.

        Along a straight ray the difference of squared distances to two
        fixed points is affine in t, so each pair (current nearest, other)
        has at most one crossing. Pairs parallel to the ray never cross.
        """
        if self.n_targets < 2:
            return math.inf
        p = self.agent_pos[j]
        v = self.speeds[j] * np.array([math.cos(heading), math.sin(heading)])
        rel = p[None, :] - self.pos
        d2 = np.einsum("ij,ij->i", rel, rel)
        slope = rel @ v
        dmin = d2.min()
        tied = np.flatnonzero(d2 <= dmin + self.tol * max(1.0, dmin))
        a = int(tied[np.argmin(slope[tied])])
        c0 = d2[a] - d2
        c1 = 2.0 * (slope[a] - slope)
        with np.errstate(divide="ignore", invalid="ignore"):
            roots = np.where(c1 > 0.0, -c0 / c1, np.inf)
        roots[a] = np.inf
        roots = roots[roots > 1e-12]
        return float(roots.min()) if roots.size else math.inf

    def action_horizon(self, headings: Sequence[float], H: Optional[float] = None) -> float:
        H = self.horizon if H is None else H
        h = H
        for j, u in enumerate(headings):
            h = min(h, self.switch_time(j, u))
        return h


# ---------------------------------------------------------------------------
# Public single-purpose wrappers. ``spec`` supplies targets, agents, config.


def planning_horizon(state: MissionState, spec: MissionSpec) -> float:
    """Earliest time any agent could enter any live capture disk."""
    return PlanningStep(spec, state).horizon


def sparsity_factor(target_id: int, state: MissionState, spec: MissionSpec) -> float:
    step = PlanningStep(spec, state)
    return float(step.zeta[step.index[target_id]])


def travel_cost(point: Sequence[float], target_id: int, state: MissionState, spec: MissionSpec) -> float:
    step = PlanningStep(spec, state)
    k = step.index[target_id]
    return float(step.eta(point, np.array([k]))[0])


def active_targets(
    agent_index: int,
    state: MissionState,
    H: float,
    spec: MissionSpec,
    pool: Optional[Iterable[int]] = None,
    rule: str = "exact",
) -> ActiveSetResult:
    """Targets that have the least travel cost somewhere on the agent's
    reachable circle, with their closest points and headings.

    ``pool`` restricts the competition to the given target ids (all live
    targets by default). ``rule="closest_point"`` keeps only targets that
    are cheapest at their own closest point. That test is sufficient but
    not necessary: a target can win an arc of the circle that does not
    contain its closest point.
    """
    if rule not in ("exact", "closest_point"):
        raise ValueError(f"unknown rule {rule!r}")
    if H <= 0:
        raise ValueError("planning horizon must be positive")
    step = PlanningStep(spec, state)
    idx = None if pool is None else np.array(sorted(step.index[i] for i in pool), dtype=int)
    active, points = step.active_indices(agent_index, H, idx, exact=rule == "exact")
    p = step.agent_pos[agent_index]
    ids = [int(step.ids[k]) for k in active]
    return ActiveSetResult(
        agent_id=spec.agents[agent_index].id,
        active_targets=frozenset(ids),
        closest_points={int(step.ids[k]): points[k] for k in active},
        candidate_headings={int(step.ids[k]): heading_to(p, points[k]) for k in active},
    )


def project_tour(
    agent_index: int,
    start_point: Sequence[float],
    start_time: float,
    assigned: Iterable[int],
    state: MissionState,
    spec: MissionSpec,
) -> TourProjection:
    if start_time < state.clock:
        raise ValueError("tour cannot start before the current clock")
    step = PlanningStep(spec, state)
    pool = [step.index[i] for i in assigned]
    order, times, reward = step.tour(agent_index, start_point, start_time, pool)
    ids = tuple(int(step.ids[k]) for k in order)
    return TourProjection(spec.agents[agent_index].id, ids, dict(zip(ids, times)), reward)


def immediate_reward(joint_headings: Sequence[float], state: MissionState, H: float, spec: MissionSpec) -> float:
    step = PlanningStep(spec, state)
    return step.immediate(step.endpoints_for(joint_headings, H), H)[0]


def reward_to_go(joint_headings: Sequence[float], state: MissionState, H: float, spec: MissionSpec) -> float:
    step = PlanningStep(spec, state)
    ends = step.endpoints_for(joint_headings, H)
    _, caught = step.immediate(ends, H)
    return step.reward_to_go(ends, caught, H)


def visit_time_lower_bound(
    joint_headings: Sequence[float], state: MissionState, H: float, spec: MissionSpec
) -> Dict[Tuple[int, int], float]:
    """Direct-travel visit time estimate for every (target, agent) pair.

    Each agent is assumed to fly straight to each target from the end of
    the horizon; this never exceeds a tour-based estimate.
    """
    step = PlanningStep(spec, state)
    ends = step.endpoints_for(joint_headings, H)
    out = {}
    for j, e in enumerate(ends):
        for k, tid in enumerate(step.ids):
            d = math.hypot(step.pos[k, 0] - e[0], step.pos[k, 1] - e[1])
            out[(int(tid), spec.agents[j].id)] = state.clock + H + d / step.speeds[j]
    return out


def action_horizon(state: MissionState, chosen_headings: Sequence[float], H: float, spec: MissionSpec) -> float:
    return PlanningStep(spec, state).action_horizon(chosen_headings, H)
