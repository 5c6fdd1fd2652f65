"""Mission documents, trajectory CSV and run summaries.

A mission document is JSON with top-level keys ``space``, ``base``,
``mission_time``, ``targets``, ``agents`` and ``control`` (plus optional
``return_to_base`` and ``metadata``). Field names follow the dataclasses in
:mod:`crh.mission`; omitted optional fields take their defaults.
"""
from __future__ import annotations

import bisect
import csv
import io
import json
import math
from dataclasses import asdict, fields
from typing import Any, Dict, List, Optional

from .engine import MissionLog
from .mission import Agent, ControllerConfig, MissionSpec, SpaceExtent, Target, reward_at
from .validation import MissionValidationError, check_mission

_TARGET_FIELDS = {f.name for f in fields(Target)}
_AGENT_FIELDS = {f.name for f in fields(Agent)}
_CONTROL_FIELDS = {f.name for f in fields(ControllerConfig)}
_INT_CONTROL = {"lookahead_depth", "sparsity_neighbors", "neighbor_count", "node_budget"}


class _Reader:
    """Collects field-path errors while pulling typed values out of JSON."""

    def __init__(self):
        self.errors: List[str] = []

    def number(self, obj: dict, key: str, path: str, default=None, integer: bool = False):
        if key not in obj:
            if default is None:
                self.errors.append(f"{path}.{key}: missing field")
            return default
        v = obj[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            self.errors.append(f"{path}.{key}: expected a number")
            return default
        if integer:
            if isinstance(v, float) and not v.is_integer():
                self.errors.append(f"{path}.{key}: expected an integer")
                return default
            return int(v)
        if not math.isfinite(v):
            self.errors.append(f"{path}.{key}: must be finite")
            return default
        return float(v)

    def point(self, obj: dict, key: str, path: str):
        v = obj.get(key)
        if v is None:
            self.errors.append(f"{path}.{key}: missing field")
            return None
        if (
            not isinstance(v, (list, tuple))
            or len(v) != 2
            or any(isinstance(c, bool) or not isinstance(c, (int, float)) for c in v)
        ):
            self.errors.append(f"{path}.{key}: expected [x, y]")
            return None
        return (float(v[0]), float(v[1]))

    def unknown(self, obj: dict, allowed, path: str):
        for k in sorted(set(obj) - set(allowed)):
            self.errors.append(f"{path}.{k}: unknown field")


def mission_from_dict(doc: Any) -> MissionSpec:
    """Build and validate a :class:`MissionSpec` from a parsed document."""
    r = _Reader()
    if not isinstance(doc, dict):
        raise MissionValidationError(["$: expected an object"])
    r.unknown(doc, {"space", "base", "mission_time", "targets", "agents", "control", "return_to_base", "metadata"}, "$")

    space = doc.get("space")
    box = None
    if not isinstance(space, dict):
        r.errors.append("space: missing or not an object")
    else:
        r.unknown(space, {"xmin", "ymin", "xmax", "ymax"}, "space")
        vals = [r.number(space, k, "space") for k in ("xmin", "ymin", "xmax", "ymax")]
        if None not in vals:
            box = SpaceExtent(*vals)

    base = r.point(doc, "base", "$") if "base" in doc else (box.center if box else None)
    mission_time = r.number(doc, "mission_time", "$", default=1000.0)

    targets = []
    raw_targets = doc.get("targets", [])
    if not isinstance(raw_targets, list):
        r.errors.append("targets: expected a list")
        raw_targets = []
    for k, t in enumerate(raw_targets):
        p = f"targets[{k}]"
        if not isinstance(t, dict):
            r.errors.append(f"{p}: expected an object")
            continue
        r.unknown(t, _TARGET_FIELDS, p)
        tid = r.number(t, "id", p, integer=True)
        pos = r.point(t, "position", p)
        lam = r.number(t, "initial_reward", p)
        extra = {
            key: r.number(t, key, p, default=getattr(Target, key))
            for key in ("alpha", "beta", "deadline", "capture_radius", "appears_at")
            if key in t
        }
        if tid is not None and pos is not None and lam is not None:
            targets.append(Target(tid, pos, lam, **{k: v for k, v in extra.items() if v is not None}))

    agents = []
    raw_agents = doc.get("agents", [])
    if not isinstance(raw_agents, list):
        r.errors.append("agents: expected a list")
        raw_agents = []
    for k, a in enumerate(raw_agents):
        p = f"agents[{k}]"
        if not isinstance(a, dict):
            r.errors.append(f"{p}: expected an object")
            continue
        r.unknown(a, _AGENT_FIELDS, p)
        aid = r.number(a, "id", p, integer=True)
        pos = r.point(a, "position", p)
        extra = {key: r.number(a, key, p, default=1.0 if key == "speed" else 0.0) for key in ("speed", "heading") if key in a}
        if a.get("sensing_range") is not None:
            extra["sensing_range"] = r.number(a, "sensing_range", p)
        if aid is not None and pos is not None:
            agents.append(Agent(aid, pos, **{k: v for k, v in extra.items() if v is not None}))

    control = doc.get("control", {})
    cfg = ControllerConfig()
    if not isinstance(control, dict):
        r.errors.append("control: expected an object")
    else:
        r.unknown(control, _CONTROL_FIELDS, "control")
        kw = {}
        for key in sorted(set(control) & _CONTROL_FIELDS):
            v = r.number(control, key, "control", default=getattr(cfg, key), integer=key in _INT_CONTROL)
            kw[key] = v
        cfg = ControllerConfig(**kw)

    rtb = doc.get("return_to_base", False)
    if not isinstance(rtb, bool):
        r.errors.append("return_to_base: expected true or false")
        rtb = False
    meta = doc.get("metadata", {})
    if not isinstance(meta, dict) or any(not isinstance(v, str) for v in meta.values()):
        r.errors.append("metadata: expected an object of strings")
        meta = {}

    if r.errors or box is None or base is None or mission_time is None:
        raise MissionValidationError(r.errors or ["space: invalid"])
    spec = MissionSpec(box, base, mission_time, targets, agents, cfg, rtb, dict(meta))
    return check_mission(spec)


def parse_mission(text: str) -> MissionSpec:
    """Parse and validate a mission document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MissionValidationError([f"$: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"]) from None
    return mission_from_dict(doc)


def mission_to_dict(spec: MissionSpec) -> Dict[str, Any]:
    box = spec.space_extent
    doc: Dict[str, Any] = {
        "space": {"xmin": box.xmin, "ymin": box.ymin, "xmax": box.xmax, "ymax": box.ymax},
        "base": list(spec.base),
        "mission_time": spec.mission_time,
        "targets": [],
        "agents": [],
        "control": asdict(spec.config),
        "return_to_base": spec.return_to_base,
        "metadata": spec.meta,
    }
    for t in spec.targets:
        d = asdict(t)
        d["position"] = list(t.position)
        doc["targets"].append(d)
    for a in spec.agents:
        d = asdict(a)
        d["position"] = list(a.position)
        if a.sensing_range is None:
            del d["sensing_range"]
        doc["agents"].append(d)
    return doc


def write_mission(spec: MissionSpec) -> str:
    """Serialise ``spec``; :func:`parse_mission` gives back an equal spec."""
    return json.dumps(mission_to_dict(spec), indent=2) + "\n"


def write_trajectory(log: MissionLog) -> str:
    """Trajectory samples and events as CSV, ordered by time.

    Sample rows have an empty ``event`` column; event rows carry the agent
    position at that instant when the event names an agent. Visits read
    ``target_visited:<id>``.
    """
    rows = []
    times = {}
    for aid in sorted(log.trajectories):
        samples = log.trajectories[aid]
        times[aid] = [s.time for s in samples]
        for s in samples:
            rows.append((s.time, 0, aid, s.x, s.y, s.heading, ""))
    for e in log.events:
        kind = e.kind if e.target is None else f"{e.kind}:{e.target}"
        x = y = h = None
        if e.agent is not None and times.get(e.agent):
            i = bisect.bisect_right(times[e.agent], e.time) - 1
            if i >= 0:
                s = log.trajectories[e.agent][i]
                x, y, h = s.x, s.y, s.heading
        rows.append((e.time, 1, e.agent, x, y, h, kind))
    rows.sort(key=lambda r: (r[0], r[1]))

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["time", "agent", "x", "y", "heading", "event"])
    for t, _, aid, x, y, h, ev in rows:
        w.writerow([
            f"{t:.6f}",
            "" if aid is None else aid,
            "" if x is None else f"{x:.6f}",
            "" if y is None else f"{y:.6f}",
            "" if h is None else f"{h:.6f}",
            ev,
        ])
    return buf.getvalue()


def summary_dict(log: MissionLog, spec: MissionSpec, tour_length: Optional[int] = None) -> Dict[str, Any]:
    visits = {}
    for e in log.visits():
        visits[str(e.target)] = {"agent": e.agent, "time": e.time, "reward": e.reward}
    doc: Dict[str, Any] = {
        "total_reward": log.total_reward,
        "completion_time": log.completion_time,
        "targets_visited": len(visits),
        "targets_total": len(spec.targets),
        "visits": visits,
        "config": asdict(spec.config),
        "mission_time": spec.mission_time,
        "agents": len(spec.agents),
    }
    if spec.meta:
        doc["metadata"] = spec.meta
    if tour_length is not None:
        doc["tour_length"] = tour_length
    return doc


def write_summary(log: MissionLog, spec: MissionSpec, tour_length: Optional[int] = None) -> str:
    """Deterministic JSON summary (sorted keys, fixed float formatting)."""
    return json.dumps(summary_dict(log, spec, tour_length), indent=2, sort_keys=True) + "\n"


def replay_reward(log: MissionLog, spec: MissionSpec) -> float:
    """Total reward recomputed from the logged visit times."""
    return float(sum(reward_at(spec.target(e.target), e.time) for e in log.visits()))
