"""Wire schemas for the steering service: snapshots out, commands in.

One JSON object per WebSocket text frame.  Unknown fields and unknown command
types are rejected; malformed commands produce an error frame
{"error": ..., "detail": ...} and leave the connection open.  Full field
documentation lives in docs/protocol.md.
"""

from __future__ import annotations

import math
from typing import Literal, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .impedance import ImpedanceParams
from .topology import HAND

SCHEMA_VERSION = 1

IMPEDANCE_ZETA_TOL = 1e-6  # stricter than the engine: recompute_D is the ergonomic path


class _Cmd(BaseModel):
    model_config = ConfigDict(extra="forbid")


class SetHandTarget(_Cmd):
    type: Literal["set_hand_target"]
    x: float
    y: float
    z: float


class SetTopology(_Cmd):
    type: Literal["set_topology"]
    kind: Literal["star", "ring", "tree"]


class SetImpedance(_Cmd):
    type: Literal["set_impedance"]
    M: float = Field(gt=0)
    K: float = Field(gt=0)
    D: float | None = Field(default=None, ge=0)
    K_v: float = Field(default=3.0, ge=0)
    recompute_D: bool = False

    @model_validator(mode="after")
    def _critically_damped(self) -> "SetImpedance":
        if self.recompute_D:
            return self
        if self.D is None:
            raise ValueError("D required unless recompute_D is true")
        zeta = self.D / (2.0 * math.sqrt(self.M * self.K))
        if abs(zeta - 1.0) > IMPEDANCE_ZETA_TOL:
            raise ValueError(
                f"not critically damped: zeta={zeta:.6g}; send recompute_D=true to solve for D"
            )
        return self

    def params(self) -> ImpedanceParams:
        d = 2.0 * math.sqrt(self.M * self.K) if self.recompute_D else self.D
        return ImpedanceParams(mass=self.M, damping=d, stiffness=self.K, velocity_gain=self.K_v)


class TriggerPattern(_Cmd):
    type: Literal["trigger_pattern"]
    label: str


class Engage(_Cmd):
    type: Literal["engage"]


class Disengage(_Cmd):
    type: Literal["disengage"]


class Pause(_Cmd):
    type: Literal["pause"]


class Resume(_Cmd):
    type: Literal["resume"]


class SetSpeed(_Cmd):
    type: Literal["set_speed"]
    factor: float = Field(gt=0)


class CommandMessage(BaseModel):
    model_config = ConfigDict(extra="forbid")
    command: Union[
        SetHandTarget,
        SetTopology,
        SetImpedance,
        TriggerPattern,
        Engage,
        Disengage,
        Pause,
        Resume,
        SetSpeed,
    ] = Field(discriminator="type")


def parse_command(raw: dict):
    """Validate a raw command dict; raises pydantic.ValidationError / ValueError."""
    return CommandMessage(command=raw).command


def build_snapshot(world, paused: bool, speed: float, events: list) -> dict:
    """Read-only view of the world at one tick, serializable as one JSON frame."""
    return {
        "schema_version": SCHEMA_VERSION,
        "tick": int(world.tick),
        "t": world.tick * world.dt,
        "hand": {
            "position": [float(v) for v in world.hand_pos],
            "velocity": [float(v) for v in world.hand_vel],
        },
        "drones": [
            {
                "id": d,
                "phase": world.phases[d].label,
                "position": [float(v) for v in world.pos[d]],
                "velocity": [float(v) for v in world.vel[d]],
            }
            for d in range(world.n)
        ],
        "active_pattern": world.active_pattern,
        "events": events,
        "topology": {
            "kind": world.graph.kind.value,
            "edges": [
                ["hand" if e.a == HAND else e.a, "hand" if e.b == HAND else e.b]
                for e in world.graph.edges
            ],
            "offsets": [[float(v) for v in row] for row in world.graph.offsets],
        },
        "paused": paused,
        "speed": speed,
    }
