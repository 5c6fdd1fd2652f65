"""Splitting responsibility for targets between agents.

Each target has a neighbour set of its ``b`` closest agents. An agent's
relative distance to a target is its share of the summed neighbour
distances, and the relative proximity function maps that share to a
responsibility level in [0, 1]. A target is owned by the agent with the
highest proximity.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Mapping, Sequence

import numpy as np

from .mission import Point, distance


@dataclass(frozen=True)
class ProximityTable:
    target_ids: tuple
    agent_ids: tuple
    direct_distances: np.ndarray
    relative_distances: np.ndarray
    proximities: np.ndarray


@dataclass(frozen=True)
class TargetPartition:
    assignment: Dict[int, int]
    sizes: Dict[int, int]

    def owned_by(self, agent_id: int) -> List[int]:
        return sorted(t for t, a in self.assignment.items() if a == agent_id)


def neighbor_set(target_position: Point, agent_positions: Mapping[int, Point], b: int) -> List[int]:
    """Ids of the ``min(b, N)`` closest agents, nearest first, ties by id."""
    if not agent_positions:
        raise ValueError("no agents")
    if b < 1:
        raise ValueError("neighbour count must be >= 1")
    ranked = sorted(agent_positions, key=lambda j: (distance(target_position, agent_positions[j]), j))
    return ranked[:b]


def relative_distance(c: Mapping[int, float], agent_id: int, neighbors: Sequence[int]) -> float:
    """``c[agent] / sum(c[k] for k in neighbors)``, or 1 for non-neighbours."""
    if agent_id not in neighbors:
        return 1.0
    total = sum(c[k] for k in neighbors)
    if total <= 0.0:
        return 0.0
    return c[agent_id] / total


def proximity(delta: float, cooperation_delta: float) -> float:
    if delta <= cooperation_delta:
        return 1.0
    if delta > 1.0 - cooperation_delta:
        return 0.0
    return (1.0 - cooperation_delta - delta) / (1.0 - 2.0 * cooperation_delta)


def proximity_table(
    target_positions: Mapping[int, Point],
    agent_positions: Mapping[int, Point],
    b: int,
    cooperation_delta: float,
) -> ProximityTable:
    tids = tuple(sorted(target_positions))
    aids = tuple(sorted(agent_positions))
    c = np.zeros((len(tids), len(aids)))
    rel = np.ones_like(c)
    prox = np.zeros_like(c)
    for r, t in enumerate(tids):
        dists = {j: distance(target_positions[t], agent_positions[j]) for j in aids}
        members = neighbor_set(target_positions[t], agent_positions, b)
        for col, j in enumerate(aids):
            c[r, col] = dists[j]
            rel[r, col] = relative_distance(dists, j, members)
            prox[r, col] = proximity(rel[r, col], cooperation_delta)
    return ProximityTable(tids, aids, c, rel, prox)


def partition_targets(
    target_positions: Mapping[int, Point],
    agent_positions: Mapping[int, Point],
    b: int = 2,
    cooperation_delta: float = 0.0,
) -> TargetPartition:
    """Give every target to the agent with the largest proximity value.

    Equal proximities go to the agent with the smaller direct distance, then
    to the lower agent id, so the result always covers every target.
    """
    if not agent_positions:
        raise ValueError("no agents")
    table = proximity_table(target_positions, agent_positions, b, cooperation_delta)
    assignment = {}
    for r, t in enumerate(table.target_ids):
        best = min(
            range(len(table.agent_ids)),
            key=lambda col: (-table.proximities[r, col], table.direct_distances[r, col], table.agent_ids[col]),
        )
        assignment[t] = table.agent_ids[best]
    sizes = {j: 0 for j in table.agent_ids}
    for j in assignment.values():
        sizes[j] += 1
    return TargetPartition(assignment, sizes)
