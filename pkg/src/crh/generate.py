"""Seeded random missions.

All randomness comes from numpy's PCG64 bit generator seeded with the
64-bit ``seed``, so a parameter set reproduces the same mission on every
platform.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .mission import Agent, ControllerConfig, MissionSpec, SpaceExtent, Target


@dataclass(frozen=True)
class RandomMissionParams:
    target_count: int = 20
    agent_count: int = 2
    space_extent: SpaceExtent = SpaceExtent(0.0, 0.0, 300.0, 300.0)
    cluster_count: int = 0
    reward_low: float = 10.0
    reward_high: float = 20.0
    deadline_low: float = 300.0
    deadline_high: float = 600.0
    appearance_fraction: float = 0.0
    seed: int = 0
    mission_time: float = 1000.0
    alpha: float = 1.0
    beta: float = 1.0
    capture_radius: float = 0.0
    speed: float = 1.0
    sensing_range: Optional[float] = None
    # None puts agents on the base (the space centre)
    agent_positions: Optional[tuple] = None
    config: ControllerConfig = field(default_factory=ControllerConfig)

    def __post_init__(self):
        if self.target_count < 1 or self.agent_count < 1:
            raise ValueError("target_count and agent_count must be >= 1")
        if self.cluster_count < 0:
            raise ValueError("cluster_count must be >= 0")
        if self.reward_low > self.reward_high or self.deadline_low > self.deadline_high:
            raise ValueError("low bound exceeds high bound")
        if not 0.0 <= self.appearance_fraction <= 1.0:
            raise ValueError("appearance_fraction must lie in [0, 1]")


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def cluster_spread(box: SpaceExtent, cluster_count: int) -> float:
    return box.max_dimension / (4.0 * math.sqrt(cluster_count))


def gen_random(params: RandomMissionParams) -> MissionSpec:
    """Draw a mission; a pure function of ``params``.

    Targets are uniform over the space, or drawn from ``cluster_count``
    isotropic Gaussians with uniform centres (targets assigned to clusters
    round-robin, positions clipped to the space).
    """
    p = params
    box = p.space_extent
    rng = _rng(p.seed)
    n = p.target_count
    lo = np.array([box.xmin, box.ymin])
    hi = np.array([box.xmax, box.ymax])
    if p.cluster_count == 0:
        pos = rng.uniform(lo, hi, size=(n, 2))
    else:
        centers = rng.uniform(lo, hi, size=(p.cluster_count, 2))
        sigma = cluster_spread(box, p.cluster_count)
        which = np.arange(n) % p.cluster_count
        pos = np.clip(centers[which] + rng.normal(0.0, sigma, size=(n, 2)), lo, hi)
    lam = rng.uniform(p.reward_low, p.reward_high, size=n)
    dead = rng.uniform(p.deadline_low, p.deadline_high, size=n)
    appear = np.zeros(n)
    n_late = int(round(p.appearance_fraction * n))
    if n_late:
        late = rng.choice(n, size=n_late, replace=False)
        appear[late] = rng.uniform(0.0, p.mission_time / 2.0, size=n_late)
        # a draw of exactly 0 would make the target known from the start
        appear[late] = np.maximum(appear[late], np.nextafter(0.0, 1.0))

    base = box.center
    targets = [
        Target(
            i + 1,
            (float(pos[i, 0]), float(pos[i, 1])),
            float(lam[i]),
            alpha=p.alpha,
            beta=p.beta,
            deadline=float(dead[i]),
            capture_radius=p.capture_radius,
            appears_at=float(appear[i]),
        )
        for i in range(n)
    ]
    starts = p.agent_positions or [base] * p.agent_count
    if len(starts) != p.agent_count:
        raise ValueError("agent_positions must have one entry per agent")
    agents = [
        Agent(j + 1, (float(s[0]), float(s[1])), speed=p.speed, sensing_range=p.sensing_range)
        for j, s in enumerate(starts)
    ]
    meta = {"generator": "pcg64", "seed": str(p.seed), "clusters": str(p.cluster_count)}
    return MissionSpec(box, base, p.mission_time, targets, agents, p.config, metadata=meta)
