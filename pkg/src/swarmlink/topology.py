"""Impedance link graphs: Star, Ring and Tree wirings plus formation offsets.

Wiring convention (n drones, hand node = HAND):
  star: hand-d0, hand-d1, ..., hand-d(n-1)                     (n edges)
  ring: hand-d0 plus cycle d0-d1-...-d(n-1)-d0                 (n+1 edges, n>=3;
        n=2 degenerates to hand-d0, d0-d1; n=1 to hand-d0)
  tree: hand-d0, d0-d1, ..., d0-d(n-1)  (depth-2, root d0)     (n edges)

Formation offsets place drones evenly on a horizontal circle of radius
`spacing` at `height` above the hand anchor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .impedance import ImpedanceParams

HAND = -1  # node id of the hand anchor; drones are 0..n-1

DEFAULT_SPACING = 0.3
DEFAULT_HEIGHT = 0.4


class TopologyKind(str, Enum):
    STAR = "star"
    RING = "ring"
    TREE = "tree"


@dataclass(frozen=True)
class Edge:
    a: int
    b: int
    params: ImpedanceParams

    def is_hand_edge(self) -> bool:
        return self.a == HAND or self.b == HAND

    def other(self, node: int) -> int:
        if node == self.a:
            return self.b
        if node == self.b:
            return self.a
        raise KeyError(f"node {node} not on edge ({self.a}, {self.b})")


@dataclass(frozen=True)
class LinkGraph:
    kind: TopologyKind
    n_drones: int
    spacing: float
    height: float
    edges: tuple[Edge, ...]
    offsets: np.ndarray = field(repr=False)  # (n, 3) desired displacement from hand

    def edges_of(self, drone: int) -> list[Edge]:
        return [e for e in self.edges if drone in (e.a, e.b)]

    def is_connected(self) -> bool:
        seen = {HAND}
        frontier = [HAND]
        while frontier:
            node = frontier.pop()
            for e in self.edges:
                if node in (e.a, e.b):
                    nxt = e.other(node)
                    if nxt not in seen:
                        seen.add(nxt)
                        frontier.append(nxt)
        return all(d in seen for d in range(self.n_drones))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "drones": self.n_drones,
            "spacing_m": self.spacing,
            "height_m": self.height,
            "edges": [
                {
                    "a": "hand" if e.a == HAND else e.a,
                    "b": "hand" if e.b == HAND else e.b,
                    "params": {
                        "M": e.params.mass,
                        "D": e.params.damping,
                        "K": e.params.stiffness,
                        "K_v": e.params.velocity_gain,
                    },
                }
                for e in self.edges
            ],
            "offsets": [list(map(float, o)) for o in self.offsets],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LinkGraph":
        def node(v):
            return HAND if v == "hand" else int(v)

        edges = tuple(
            Edge(
                a=node(e["a"]),
                b=node(e["b"]),
                params=ImpedanceParams(
                    mass=e["params"]["M"],
                    damping=e["params"]["D"],
                    stiffness=e["params"]["K"],
                    velocity_gain=e["params"]["K_v"],
                ),
            )
            for e in d["edges"]
        )
        offsets = np.array(d["offsets"], dtype=float)
        offsets.setflags(write=False)
        return cls(
            kind=TopologyKind(d["kind"]),
            n_drones=int(d["drones"]),
            spacing=float(d["spacing_m"]),
            height=float(d["height_m"]),
            edges=edges,
            offsets=offsets,
        )


def formation_offsets(n: int, spacing: float, height: float) -> np.ndarray:
    """Evenly spaced slots on a horizontal circle of radius `spacing`, `height` above the hand."""
    angles = 2.0 * math.pi * np.arange(n) / n
    out = np.column_stack(
        [spacing * np.cos(angles), spacing * np.sin(angles), np.full(n, float(height))]
    )
    out.setflags(write=False)
    return out


def build_topology(
    kind: TopologyKind | str,
    n: int,
    spacing: float = DEFAULT_SPACING,
    height: float = DEFAULT_HEIGHT,
    params: ImpedanceParams | None = None,
    drone_drone_params: ImpedanceParams | None = None,
) -> LinkGraph:
    """Wire up the link graph for `n` drones plus the hand.

    Drone-drone edges reuse the hand-edge params unless `drone_drone_params`
    overrides them.
    """
    kind = TopologyKind(kind)
    if n < 1:
        raise ValueError(f"need at least one drone, got {n}")
    if spacing <= 0.0:
        raise ValueError(f"spacing must be positive, got {spacing}")
    if params is None:
        from .impedance import DEFAULT_MASS, DEFAULT_STIFFNESS, critically_damped

        params = critically_damped(DEFAULT_MASS, DEFAULT_STIFFNESS)
    dd = drone_drone_params if drone_drone_params is not None else params

    pairs: list[tuple[int, int, ImpedanceParams]]
    if kind is TopologyKind.STAR or n == 1:
        pairs = [(HAND, i, params) for i in range(n)]
    elif kind is TopologyKind.RING:
        pairs = [(HAND, 0, params)]
        pairs += [(i, (i + 1) % n, dd) for i in range(n)]
        if n == 2:  # cycle over two nodes would duplicate the edge
            pairs = [(HAND, 0, params), (0, 1, dd)]
    else:  # TREE
        pairs = [(HAND, 0, params)]
        pairs += [(0, i, dd) for i in range(1, n)]

    edges = tuple(Edge(a=a, b=b, params=p) for a, b, p in pairs)
    graph = LinkGraph(
        kind=kind,
        n_drones=n,
        spacing=spacing,
        height=height,
        edges=edges,
        offsets=formation_offsets(n, spacing, height),
    )
    assert graph.is_connected()
    return graph


def desired_position(graph: LinkGraph, drone: int, hand_pose) -> np.ndarray:
    """Formation slot of `drone` for the given hand position."""
    if not 0 <= drone < graph.n_drones:
        raise KeyError(f"unknown drone index {drone}")
    return np.asarray(hand_pose, dtype=float) + graph.offsets[drone]
