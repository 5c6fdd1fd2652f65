"""Event-driven mission simulation.

The loop alternates control evaluation and straight-line motion. Motion
stops early at the first of: the action horizon, a capture, a target
appearance, a target entering sensing range, or a target expiring. All
event times along a leg are computed in closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional, Sequence, Set, Tuple

from .controller import ControlDecision, MissionState
from .lookahead import solve
from .mission import MissionSpec, Point, distance, expiry_time, heading_to, reward_at
from .validation import check_mission

EVENT_KINDS = (
    "control_evaluated",
    "target_visited",
    "target_appeared",
    "target_expired",
    "multiple_immediate_target",
    "mission_complete",
)

MAX_STEPS = 200_000


@dataclass(frozen=True)
class MissionEvent:
    time: float
    kind: str
    agent: Optional[int] = None
    target: Optional[int] = None
    reward: Optional[float] = None
    detail: Tuple[Tuple[str, object], ...] = ()


@dataclass(frozen=True)
class TrajectorySample:
    time: float
    agent: int
    x: float
    y: float
    heading: float


@dataclass
class MissionLog:
    events: List[MissionEvent] = field(default_factory=list)
    trajectories: Dict[int, List[TrajectorySample]] = field(default_factory=dict)
    total_reward: float = 0.0
    completion_time: float = 0.0

    def visits(self) -> List[MissionEvent]:
        return [e for e in self.events if e.kind == "target_visited"]

    def visit_order(self, agent: Optional[int] = None) -> List[int]:
        return [e.target for e in self.visits() if agent is None or e.agent == agent]

    @property
    def n_samples(self) -> int:
        return sum(len(v) for v in self.trajectories.values())


def total_reward(log: MissionLog) -> float:
    return float(sum(e.reward for e in log.visits()))


def sense_filter(state: MissionState, agent_index: int, spec: MissionSpec) -> Set[int]:
    """Live targets within the agent's sensing range (all of them without a range)."""
    agent = spec.agents[agent_index]
    if agent.sensing_range is None:
        return set(state.live_targets)
    p = state.agent_positions[agent_index]
    tol = spec.config.tie_tolerance
    return {
        tid for tid in state.live_targets
        if distance(p, spec.target(tid).position) <= agent.sensing_range + tol
    }


def entry_distance(p: Point, u: Tuple[float, float], y: Point, r: float, tol: float = 0.0) -> Optional[float]:
    """Arc length along the unit ray ``p + s*u`` at which it first enters the
    closed disk of radius ``r`` around ``y``; None if it never does ahead.

    A ray that misses the disk by at most ``tol`` counts as touching it at
    its point of closest approach.
    """
    wx, wy = y[0] - p[0], y[1] - p[1]
    proj = wx * u[0] + wy * u[1]
    px, py = wx - proj * u[0], wy - proj * u[1]
    perp = math.hypot(px, py)
    if perp <= r:
        s_in = proj - math.sqrt(r * r - perp * perp)
    elif perp <= r + tol:
        s_in = proj
    else:
        return None
    if s_in >= 0.0:
        return s_in
    return 0.0 if math.hypot(wx, wy) <= r + tol else None


Decider = Callable[[MissionState, MissionSpec], ControlDecision]


class _Mission:
    def __init__(self, spec: MissionSpec, decide: Decider):
        self.spec = spec
        self.decide = decide
        self.cfg = spec.config
        self.tol = self.cfg.tie_tolerance
        self.targets = {t.id: t for t in spec.targets}
        self.expiry = {t.id: expiry_time(t, self.cfg.reward_epsilon) for t in spec.targets}
        self.pos: List[Point] = [tuple(map(float, a.position)) for a in spec.agents]
        self.heading: List[float] = [a.heading for a in spec.agents]
        self.limited = any(a.sensing_range is not None for a in spec.agents)
        self.t = 0.0
        self.appeared: Set[int] = set()
        self.known: Set[int] = set()
        self.visited: Dict[int, float] = {}
        self.expired: Set[int] = set()
        self.pending = sorted((t.appears_at, t.id) for t in spec.targets)
        self.survey: Optional[List[Point]] = None
        self.scanned: Set[int] = set()
        self.log = MissionLog(trajectories={a.id: [] for a in spec.agents})

    # ----------------------------------------------------------- bookkeeping
    def emit(self, kind, **kw):
        self.log.events.append(MissionEvent(self.t, kind, **kw))

    def sample(self):
        for j, a in enumerate(self.spec.agents):
            p = self.pos[j]
            self.log.trajectories[a.id].append(TrajectorySample(self.t, a.id, p[0], p[1], self.heading[j]))

    def open_targets(self) -> List[int]:
        return sorted(i for i in self.appeared if i not in self.visited and i not in self.expired)

    def live(self) -> List[int]:
        return [i for i in self.open_targets() if i in self.known]

    def visit(self, tid: int, j: int):
        if tid in self.visited or tid in self.expired:
            return
        r = reward_at(self.targets[tid], self.t)
        self.visited[tid] = self.t
        self.log.total_reward += r
        self.emit("target_visited", agent=self.spec.agents[j].id, target=tid, reward=r)

    def sees(self, j: int, tid: int) -> bool:
        rng = self.spec.agents[j].sensing_range
        return rng is None or distance(self.pos[j], self.targets[tid].position) <= rng + self.tol

    def settle(self, forced: Sequence[Tuple[int, int]] = ()) -> bool:
        """Process everything happening at the current instant.

        Order: visits, appearances (and first sightings), expiries. Returns
        True if the known live set changed through a random event.
        """
        changed = False
        for j, tid in forced:
            self.visit(tid, j)
        self._detect_visits()
        while self.pending and self.pending[0][0] <= self.t:
            at, tid = self.pending.pop(0)
            self.appeared.add(tid)
            if at > 0.0:
                self.emit("target_appeared", target=tid)
                changed = True
        for tid in self.open_targets():
            if self.expiry[tid] <= self.t:
                # found already worthless: expire below without a sighting
                continue
            if tid not in self.known and any(self.sees(j, tid) for j in range(len(self.pos))):
                self.known.add(tid)
                if self.t > 0.0 and self.targets[tid].appears_at < self.t:
                    self.emit("target_appeared", target=tid, detail=(("cause", "sensed"),))
                changed = True
        self._detect_visits()
        for tid in self.open_targets():
            if self.expiry[tid] <= self.t:
                self.expired.add(tid)
                self.emit("target_expired", target=tid)
        return changed

    def _detect_visits(self):
        for j in range(len(self.pos)):
            for tid in self.open_targets():
                tgt = self.targets[tid]
                if distance(self.pos[j], tgt.position) <= tgt.capture_radius + self.tol:
                    self.visit(tid, j)

    # -------------------------------------------------------------- motion
    def next_event(self, velocity: Sequence[Tuple[float, float]], dt: float):
        """Earliest interruption in (0, dt]; returns (time, forced visits)."""
        best = dt
        hits: List[Tuple[float, int, int]] = []
        for j, (vx, vy) in enumerate(velocity):
            speed = math.hypot(vx, vy)
            if speed == 0.0:
                continue
            u = (vx / speed, vy / speed)
            for tid in self.open_targets():
                tgt = self.targets[tid]
                s = entry_distance(self.pos[j], u, tgt.position, tgt.capture_radius, self.tol)
                if s is not None and s <= speed * dt + self.tol:
                    hits.append((min(s / speed, dt), j, tid))
                rng = self.spec.agents[j].sensing_range
                if tid not in self.known and rng is not None:
                    s = entry_distance(self.pos[j], u, tgt.position, rng)
                    if s is not None and 0.0 < s / speed < best:
                        best = s / speed
        for te, _, _ in hits:
            best = min(best, te)
        for at, _ in self.pending:
            if self.t < at <= self.t + best:
                best = at - self.t
        for tid in self.open_targets():
            if tid in self.known and self.t < self.expiry[tid] <= self.t + best:
                best = self.expiry[tid] - self.t
        slack = 1e-12 * max(1.0, best)
        forced = sorted((j, tid) for te, j, tid in hits if te <= best + slack)
        return best, forced

    def move(self, velocity, dt: float, forced):
        for j, (vx, vy) in enumerate(velocity):
            x, y = self.pos[j]
            self.pos[j] = (x + vx * dt, y + vy * dt)
        self.t += dt
        self.sample()
        return self.settle(forced)

    def _survey_points(self) -> List[Point]:
        """Lattice whose sensing disks cover the whole space.

        Cells have side ``r * sqrt(2)`` for the smallest sensing range
        ``r``, so a sensor at a cell centre reaches the cell corners.
        """
        box = self.spec.space_extent
        r = min(a.sensing_range for a in self.spec.agents if a.sensing_range is not None)
        side = r * math.sqrt(2.0)
        nx = max(1, math.ceil((box.xmax - box.xmin) / side))
        ny = max(1, math.ceil((box.ymax - box.ymin) / side))
        wx, wy = (box.xmax - box.xmin) / nx, (box.ymax - box.ymin) / ny
        return [
            (box.xmin + (i + 0.5) * wx, box.ymin + (k + 0.5) * wy)
            for k in range(ny)
            for i in range(nx)
        ]

    def idle_velocity(self):
        """Velocities when no live target is known.

        With limited sensing and undiscovered targets, each agent heads for
        the nearest survey point nobody has reached yet (claimed in agent id
        order); otherwise agents hold position. Returns the velocities and
        the time until the first agent reaches its survey point.
        """
        undiscovered = self.limited and any(t not in self.known for t in self.open_targets())
        vel = [(0.0, 0.0)] * len(self.pos)
        if not undiscovered:
            return vel, math.inf
        if self.survey is None:
            self.survey = self._survey_points()
            self.scanned = set()
        eta = math.inf
        claimed: Set[int] = set()
        for j, a in enumerate(self.spec.agents):
            todo = [i for i in range(len(self.survey)) if i not in self.scanned]
            if not todo:
                break
            free = [i for i in todo if i not in claimed] or todo
            i = min(free, key=lambda i: (distance(self.pos[j], self.survey[i]), i))
            claimed.add(i)
            d = distance(self.pos[j], self.survey[i])
            h = heading_to(self.pos[j], self.survey[i])
            self.heading[j] = h
            vel[j] = (a.speed * math.cos(h), a.speed * math.sin(h))
            eta = min(eta, d / a.speed)
        return vel, eta

    def mark_surveyed(self):
        if self.survey is None:
            return
        for i, w in enumerate(self.survey):
            if i not in self.scanned and any(distance(p, w) <= 1e-6 * max(1.0, abs(w[0]) + abs(w[1])) for p in self.pos):
                self.scanned.add(i)

    # ---------------------------------------------------------------- loop
    def run(self) -> MissionLog:
        T = self.spec.mission_time
        self.sample()
        self.settle()
        for _ in range(MAX_STEPS):
            if self.t >= T:
                break
            live = self.live()
            if live:
                state = MissionState(self.t, tuple(self.pos), frozenset(live), dict(self.visited))
                dec = self.decide(state, self.spec)
                self.emit(
                    "control_evaluated",
                    detail=(
                        ("planning_horizon", dec.planning_horizon),
                        ("action_horizon", dec.action_horizon),
                        ("headings", tuple(dec.chosen_headings)),
                        ("targets", tuple(dec.chosen_targets)),
                    ),
                )
                self.heading = list(dec.chosen_headings)
                vel = [
                    (a.speed * math.cos(u), a.speed * math.sin(u))
                    for a, u in zip(self.spec.agents, dec.chosen_headings)
                ]
                dt = dec.action_horizon
                switch = dec.action_horizon < dec.planning_horizon
            else:
                self.mark_surveyed()
                vel, dt = self.idle_velocity()
                if self.pending:
                    dt = min(dt, self.pending[0][0] - self.t)
                if not math.isfinite(dt):
                    break
                switch = False
            dt = min(dt, T - self.t)
            te, forced = self.next_event(vel, dt)
            random_event = self.move(vel, te, forced)
            if switch and te >= dt and not forced and not random_event:
                self.emit("multiple_immediate_target")
        else:
            raise RuntimeError("mission exceeded the control step limit")

        self.emit("mission_complete")
        self.log.completion_time = min(self.t, T)
        if self.spec.return_to_base:
            self._return_to_base()
        return self.log

    def _return_to_base(self):
        base = self.spec.base
        for j, a in enumerate(self.spec.agents):
            d = distance(self.pos[j], base)
            if d <= self.tol:
                continue
            h = heading_to(self.pos[j], base)
            self.log.trajectories[a.id].append(
                TrajectorySample(self.t + d / a.speed, a.id, base[0], base[1], h)
            )


def run_mission(spec: MissionSpec, decide: Optional[Decider] = None, config=None) -> MissionLog:
    """Simulate a whole mission with the receding horizon controller.

    ``config`` overrides ``spec.config``; ``decide`` replaces the default
    lookahead solver (same signature as :func:`crh.lookahead.solve`).
    """
    if config is not None:
        spec = replace(spec, config=config)
    check_mission(spec)
    return _Mission(spec, decide or solve).run()
