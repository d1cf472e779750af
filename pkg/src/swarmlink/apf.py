"""Artificial potential field velocity commands for the approach phase.

Attraction is linear in the distance to the goal; repulsion is inverse-square
inside a sensing sphere and exactly zero at or beyond its radius (the boundary
discontinuity is intentional; `smooth_shell` optionally tapers it).  Forces are
interpreted as velocity commands and the summed command is clamped to v_max.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

PROXIMITY_EPS = 1e-6  # m; below this the repulsion magnitude saturates


class ObstacleKind(str, Enum):
    DRONE = "drone"
    HAND = "hand"


@dataclass(frozen=True)
class Obstacle:
    position: np.ndarray
    kind: ObstacleKind = ObstacleKind.DRONE


@dataclass(frozen=True)
class ApfParams:
    k_att: float = 0.8      # 1/s
    k_rep: float = 0.02     # m^3/s
    radius: float = 0.5     # m
    v_max: float = 0.47     # m/s
    smooth_shell: bool = False

    def __post_init__(self) -> None:
        for name in ("k_att", "k_rep", "radius", "v_max"):
            v = getattr(self, name)
            if not v > 0.0:
                raise ValueError(f"{name} must be positive, got {v}")


def attractive_force(pos, goal, k_att: float) -> np.ndarray:
    """Pull toward the goal, proportional to the separation: k_att·(goal − pos)."""
    return k_att * (np.asarray(goal, dtype=float) - np.asarray(pos, dtype=float))


def repulsive_force(
    pos, obstacles: list[Obstacle], p: ApfParams, events: list | None = None
) -> np.ndarray:
    """Sum of inverse-square pushes from obstacles inside the sensing sphere.

    Each obstacle closer than p.radius contributes k_rep·û/d² along the unit
    vector û from obstacle to drone.  An obstacle within PROXIMITY_EPS saturates
    at k_rep/eps² and appends a proximity-violation event to `events` if given.
    """
    pos = np.asarray(pos, dtype=float)
    total = np.zeros(3)
    for obs in obstacles:
        delta = pos - np.asarray(obs.position, dtype=float)
        d = float(np.linalg.norm(delta))
        if d >= p.radius:
            continue
        if d < PROXIMITY_EPS:
            # coincident obstacle: direction undefined, push along +z at the cap
            if events is not None:
                events.append(
                    {
                        "type": "proximity_violation",
                        "obstacle": obs.kind.value,
                        "distance": d,
                    }
                )
            unit = delta / d if d > 0.0 else np.array([0.0, 0.0, 1.0])
            total += (p.k_rep / PROXIMITY_EPS**2) * unit
            continue
        scale = p.k_rep / d**2
        if p.smooth_shell:
            scale *= 1.0 - (d / p.radius) ** 2
        total += scale * (delta / d)
    return total


def apf_command(
    pos, goal, obstacles: list[Obstacle], p: ApfParams, events: list | None = None
) -> np.ndarray:
    """Clamped velocity command: attraction plus repulsion, rescaled to |v| <= v_max."""
    cmd = attractive_force(pos, goal, p.k_att) + repulsive_force(
        pos, obstacles, p, events=events
    )
    speed = float(np.linalg.norm(cmd))
    if speed > p.v_max:
        cmd = cmd * (p.v_max / speed)
    return cmd
