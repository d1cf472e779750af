"""Vibrotactile surface/direction pattern codec.

Twelve patterns = 3 surfaces x 4 motion directions.  The surface selects the
carrier frequency (soft 3.3 Hz, elastic 8 Hz, rigid 100 Hz); the direction
selects the temporal structure across the three fingertip actuators:

  right    staggered onsets finger 0 -> 1 -> 2
  left     staggered onsets finger 2 -> 1 -> 0
  forward  simultaneous onsets, amplitude ramp low -> high within the burst
  backward simultaneous onsets, amplitude ramp high -> low

Labels are two-letter codes: surface initial (S/E/R) + direction initial
(F/B/R/L), e.g. "RR" = rigid surface, rightward motion.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

import numpy as np

N_FINGERS = 3


class SurfaceKind(str, Enum):
    SOFT = "soft"
    ELASTIC = "elastic"
    RIGID = "rigid"

    @property
    def frequency_hz(self) -> float:
        return _SURFACE_FREQ[self]

    @property
    def code(self) -> str:
        return self.value[0].upper()


_SURFACE_FREQ = {
    SurfaceKind.SOFT: 3.3,
    SurfaceKind.ELASTIC: 8.0,
    SurfaceKind.RIGID: 100.0,
}


class MotionDirection(str, Enum):
    FORWARD = "forward"
    BACKWARD = "backward"
    RIGHT = "right"
    LEFT = "left"

    @property
    def code(self) -> str:
        return self.value[0].upper()


_SURFACE_BY_CODE = {s.code: s for s in SurfaceKind}
_DIRECTION_BY_CODE = {d.code: d for d in MotionDirection}

ALL_LABELS = tuple(s.code + d.code for s in SurfaceKind for d in MotionDirection)


@dataclass(frozen=True)
class PatternConfig:
    inter_onset_ms: int = 150
    burst_ms: int = 300
    ramp_levels: tuple[float, float, float] = (0.4, 0.7, 1.0)
    sweep_amplitude: float = 1.0

    def __post_init__(self) -> None:
        if self.inter_onset_ms <= 0:
            raise ValueError("inter_onset_ms must be positive")
        if self.burst_ms <= 0:
            raise ValueError("burst_ms must be positive")


@dataclass(frozen=True)
class ActuatorEvent:
    onset_ms: int
    duration_ms: int
    frequency_hz: float
    amplitude: float


@dataclass(frozen=True)
class PatternSchedule:
    label: str
    actuators: tuple[tuple[ActuatorEvent, ...], ...]  # one timeline per finger

    def duration_ms(self) -> int:
        ends = [
            ev.onset_ms + ev.duration_ms for line in self.actuators for ev in line
        ]
        return max(ends) if ends else 0

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "actuators": [
                [
                    {
                        "onset_ms": ev.onset_ms,
                        "duration_ms": ev.duration_ms,
                        "frequency_hz": ev.frequency_hz,
                        "amplitude": ev.amplitude,
                    }
                    for ev in line
                ]
                for line in self.actuators
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "PatternSchedule":
        return cls(
            label=d["label"],
            actuators=tuple(
                tuple(ActuatorEvent(**ev) for ev in line) for line in d["actuators"]
            ),
        )

    @classmethod
    def from_json(cls, s: str) -> "PatternSchedule":
        return cls.from_dict(json.loads(s))


def encode_label(surface: SurfaceKind, direction: MotionDirection) -> str:
    return surface.code + direction.code


def decode_label(label: str) -> tuple[SurfaceKind, MotionDirection]:
    if (
        not isinstance(label, str)
        or len(label) != 2
        or label[0] not in _SURFACE_BY_CODE
        or label[1] not in _DIRECTION_BY_CODE
    ):
        raise KeyError(f"unknown pattern label {label!r}")
    return _SURFACE_BY_CODE[label[0]], _DIRECTION_BY_CODE[label[1]]


def encode_pattern(
    surface: SurfaceKind,
    direction: MotionDirection,
    cfg: PatternConfig | None = None,
) -> PatternSchedule:
    """Build the per-finger event timelines for one surface x direction pattern."""
    cfg = cfg or PatternConfig()
    freq = surface.frequency_hz
    lines: list[tuple[ActuatorEvent, ...]] = []

    if direction in (MotionDirection.RIGHT, MotionDirection.LEFT):
        order = range(N_FINGERS)
        if direction is MotionDirection.LEFT:
            order = reversed(range(N_FINGERS))
        onset_by_finger = {f: i * cfg.inter_onset_ms for i, f in enumerate(order)}
        for f in range(N_FINGERS):
            lines.append(
                (
                    ActuatorEvent(
                        onset_ms=onset_by_finger[f],
                        duration_ms=cfg.burst_ms,
                        frequency_hz=freq,
                        amplitude=cfg.sweep_amplitude,
                    ),
                )
            )
    else:
        levels = cfg.ramp_levels
        if direction is MotionDirection.BACKWARD:
            levels = tuple(reversed(levels))
        seg = cfg.burst_ms // len(levels)
        segs = [seg] * len(levels)
        segs[-1] += cfg.burst_ms - seg * len(levels)  # absorb rounding remainder
        for _ in range(N_FINGERS):
            events = []
            onset = 0
            for amp, dur in zip(levels, segs):
                events.append(
                    ActuatorEvent(
                        onset_ms=onset,
                        duration_ms=dur,
                        frequency_hz=freq,
                        amplitude=amp,
                    )
                )
                onset += dur
            lines.append(tuple(events))

    return PatternSchedule(label=encode_label(surface, direction), actuators=tuple(lines))


def encode_pattern_by_label(label: str, cfg: PatternConfig | None = None) -> PatternSchedule:
    surface, direction = decode_label(label)
    return encode_pattern(surface, direction, cfg)


DEAD_BAND = 0.02  # m/s; slower hand motion emits no pattern


def classify_contact(
    hand_velocity, surface: SurfaceKind, v_dead: float = DEAD_BAND
) -> tuple[SurfaceKind, MotionDirection] | None:
    """Map hand velocity to a motion direction; None below the dead-band.

    Dominant horizontal axis wins: +x right, -x left, +y forward, -y backward.
    """
    v = np.asarray(hand_velocity, dtype=float)
    vx, vy = float(v[0]), float(v[1])
    if float(np.hypot(vx, vy)) <= v_dead:
        return None
    if abs(vx) >= abs(vy):
        direction = MotionDirection.RIGHT if vx > 0 else MotionDirection.LEFT
    else:
        direction = MotionDirection.FORWARD if vy > 0 else MotionDirection.BACKWARD
    return surface, direction
