"""Impedance-coupled drone swarm simulator with haptic pattern codec and live steering."""

from .apf import ApfParams, Obstacle, ObstacleKind, apf_command, attractive_force, repulsive_force
from .impedance import (
    DiscreteLink,
    DerivedLinkConstants,
    ImpedanceParams,
    LinkState,
    NotCriticallyDamped,
    critically_damped,
    derive_constants,
    discretize,
    hand_force,
    step_link,
)
from .patterns import (
    MotionDirection,
    PatternConfig,
    PatternSchedule,
    SurfaceKind,
    classify_contact,
    decode_label,
    encode_label,
    encode_pattern,
    encode_pattern_by_label,
)
from .topology import HAND, Edge, LinkGraph, TopologyKind, build_topology, desired_position
from .trajectory import ReferenceTrajectory, square_trajectory

__version__ = "0.1.0"

__all__ = [
    "ApfParams",
    "DerivedLinkConstants",
    "DiscreteLink",
    "Edge",
    "HAND",
    "ImpedanceParams",
    "LinkGraph",
    "LinkState",
    "MotionDirection",
    "NotCriticallyDamped",
    "Obstacle",
    "ObstacleKind",
    "PatternConfig",
    "PatternSchedule",
    "ReferenceTrajectory",
    "SurfaceKind",
    "TopologyKind",
    "apf_command",
    "attractive_force",
    "build_topology",
    "classify_contact",
    "critically_damped",
    "decode_label",
    "derive_constants",
    "desired_position",
    "discretize",
    "encode_label",
    "encode_pattern",
    "encode_pattern_by_label",
    "hand_force",
    "repulsive_force",
    "square_trajectory",
    "step_link",
]
