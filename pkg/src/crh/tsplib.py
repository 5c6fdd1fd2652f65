"""Loading symmetric TSPLIB instances as single-agent missions.

Only ``EUC_2D`` coordinates are supported. Distances for tour-length
reporting follow the TSPLIB convention ``nint(sqrt(dx^2 + dy^2))``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from typing import Dict, List, Optional, Sequence, Tuple

from .mission import Agent, ControllerConfig, MissionSpec, SpaceExtent, Target

SUPPORTED_EDGE_WEIGHTS = ("EUC_2D",)


class UnsupportedInstance(ValueError):
    pass


@dataclass(frozen=True)
class TspInstance:
    name: str
    edge_weight_type: str
    nodes: Tuple[Tuple[int, float, float], ...]


@dataclass(frozen=True)
class RewardPolicy:
    """How a routing instance becomes a reward collection mission.

    Every node gets reward ``initial_reward`` with linear decay and a shared
    deadline of ``deadline_factor`` times the length of a nearest-neighbour
    tour from node 1, so any sensible tour still collects positive reward.
    ``deadline`` overrides the factor when given.
    """

    initial_reward: float = 1.0
    deadline_factor: float = 10.0
    deadline: Optional[float] = None


def read_tsplib(text: str) -> TspInstance:
    header: Dict[str, str] = {}
    nodes: List[Tuple[int, float, float]] = []
    in_coords = False
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line == "EOF":
            break
        if in_coords:
            parts = line.split()
            if len(parts) < 3:
                if parts and parts[0].isalpha():
                    break
                raise ValueError(f"bad coordinate line: {line!r}")
            try:
                nodes.append((int(parts[0]), float(parts[1]), float(parts[2])))
            except ValueError:
                if parts[0].replace("_", "").isalpha():
                    break
                raise ValueError(f"bad coordinate line: {line!r}") from None
            continue
        if line.startswith("NODE_COORD_SECTION"):
            in_coords = True
            continue
        if ":" in line:
            key, _, value = line.partition(":")
            header[key.strip().upper()] = value.strip()
    ewt = header.get("EDGE_WEIGHT_TYPE", "").upper()
    if ewt not in SUPPORTED_EDGE_WEIGHTS:
        raise UnsupportedInstance(f"unsupported EDGE_WEIGHT_TYPE {ewt or '(missing)'}; only EUC_2D is implemented")
    if not nodes:
        raise ValueError("no NODE_COORD_SECTION entries")
    dim = header.get("DIMENSION")
    if dim is not None and int(dim) != len(nodes):
        raise ValueError(f"DIMENSION {dim} but {len(nodes)} coordinates")
    return TspInstance(header.get("NAME", "unnamed"), ewt, tuple(nodes))


def nint_distance(p: Sequence[float], q: Sequence[float]) -> int:
    return int(math.floor(math.hypot(p[0] - q[0], p[1] - q[1]) + 0.5))


def tour_length(points: Sequence[Sequence[float]], order: Sequence[int]) -> int:
    """Closed tour length over ``order`` (indices into ``points``), nint legs."""
    if len(order) < 2:
        return 0
    return sum(nint_distance(points[order[i]], points[order[(i + 1) % len(order)]]) for i in range(len(order)))


def nearest_neighbor_length(points: Sequence[Sequence[float]], start: int = 0) -> float:
    """Euclidean length of the closed nearest-neighbour tour from ``start``."""
    rest = set(range(len(points))) - {start}
    cur, total = start, 0.0
    while rest:
        nxt = min(rest, key=lambda i: (math.dist(points[cur], points[i]), i))
        total += math.dist(points[cur], points[nxt])
        rest.discard(nxt)
        cur = nxt
    return total + math.dist(points[cur], points[start])


def instance_to_mission(
    inst: TspInstance,
    policy: RewardPolicy = RewardPolicy(),
    config: ControllerConfig = ControllerConfig(),
) -> MissionSpec:
    pts = [(x, y) for _, x, y in inst.nodes]
    D = policy.deadline if policy.deadline is not None else policy.deadline_factor * nearest_neighbor_length(pts)
    xs, ys = [p[0] for p in pts], [p[1] for p in pts]
    pad = 1.0
    box = SpaceExtent(min(xs) - pad, min(ys) - pad, max(xs) + pad, max(ys) + pad)
    start = pts[0]
    # the agent starts on node 1, which is therefore collected at time 0
    targets = [
        Target(nid, (x, y), policy.initial_reward, alpha=1.0, beta=1.0, deadline=D, capture_radius=0.0)
        for nid, x, y in inst.nodes
    ]
    return MissionSpec(
        space_extent=box,
        base=start,
        mission_time=D,
        targets=targets,
        agents=[Agent(1, start)],
        config=config,
        metadata={"name": inst.name, "edge_weight_type": inst.edge_weight_type},
    )


def parse_tsplib(text: str, reward_policy: RewardPolicy = RewardPolicy(), config: ControllerConfig = ControllerConfig()) -> MissionSpec:
    """Parse a TSPLIB document straight into a mission."""
    return instance_to_mission(read_tsplib(text), reward_policy, config)


def visit_order_length(spec: MissionSpec, order: Sequence[int]) -> int:
    """TSPLIB length of the closed tour visiting target ids in ``order``."""
    index = {t.id: k for k, t in enumerate(spec.targets)}
    pts = [t.position for t in spec.targets]
    return tour_length(pts, [index[i] for i in order])


def known_optima() -> Dict[str, int]:
    text = resources.files("crh").joinpath("data/optima.json").read_text()
    return {k: int(v) for k, v in json.loads(text).items()}


def bundled_instance(name: str) -> str:
    return resources.files("crh").joinpath(f"data/{name}.tsp").read_text()
