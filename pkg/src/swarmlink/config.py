"""Scenario configuration: one JSON document describing a full simulation run."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .apf import ApfParams
from .impedance import (
    DEFAULT_MASS,
    DEFAULT_STIFFNESS,
    DEFAULT_VELOCITY_GAIN,
    ImpedanceParams,
    critically_damped,
)
from .topology import DEFAULT_HEIGHT, DEFAULT_SPACING, TopologyKind


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class TopologyConfig:
    kind: TopologyKind = TopologyKind.STAR
    drones: int = 3
    spacing_m: float = DEFAULT_SPACING
    height_m: float = DEFAULT_HEIGHT


@dataclass(frozen=True)
class PlantConfig:
    tau: float = 0.3            # s, first-order velocity tracking constant
    v_max: float = 1.0          # m/s
    a_max: float = 2.0          # m/s^2
    noise_sigma: float = 0.005  # m, per-axis position noise std per tick

    def __post_init__(self) -> None:
        if self.tau <= 0 or self.v_max <= 0 or self.a_max <= 0:
            raise ConfigError("plant tau/v_max/a_max must be positive")
        if self.noise_sigma < 0:
            raise ConfigError("noise_sigma must be >= 0")


@dataclass(frozen=True)
class ControllerConfig:
    dt: float = 0.01
    k_p: float = 0.8              # 1/s, position gain of the velocity command
    attach_radius_m: float = 0.05
    attach_dwell_s: float = 0.5
    mode: str = "impedance"       # "impedance" | "apf" (apf tracks the slot all run)

    def __post_init__(self) -> None:
        if self.dt <= 0:
            raise ConfigError("dt must be positive")
        if self.mode not in ("impedance", "apf"):
            raise ConfigError(f"unknown controller mode {self.mode!r}")


@dataclass(frozen=True)
class HandConfig:
    """Hand motion source.

    type "static":   holds `position`.
    type "square":   square path in the XY plane (see bench.square_trajectory),
                     held at the start corner for `settle_s` first.
    type "step":     holds `position`, teleports to `target` at `at_s` (reported
                     hand velocity stays zero: a setpoint change, not a motion).
    type "recorded": replays per-tick (position, velocity) rows from `path`.
    """

    type: str = "static"
    position: tuple[float, float, float] = (0.0, 0.0, 1.0)
    target: tuple[float, float, float] = (0.5, 0.0, 1.0)
    at_s: float = 1.0
    side_m: float = 1.2
    peak_speed: float = 0.65
    accel: float = 1.3
    dwell_s: float | None = None  # None -> solved so lap mean speed is 0.18 m/s
    laps: int = 1
    settle_s: float = 2.0
    path: str | None = None

    def __post_init__(self) -> None:
        if self.type not in ("static", "square", "step", "recorded"):
            raise ConfigError(f"unknown hand source {self.type!r}")


@dataclass(frozen=True)
class ScenarioConfig:
    topology: TopologyConfig = field(default_factory=TopologyConfig)
    impedance: ImpedanceParams = field(
        default_factory=lambda: critically_damped(
            DEFAULT_MASS, DEFAULT_STIFFNESS, DEFAULT_VELOCITY_GAIN
        )
    )
    drone_drone_impedance: ImpedanceParams | None = None
    apf: ApfParams = field(default_factory=ApfParams)
    plant: PlantConfig = field(default_factory=PlantConfig)
    controller: ControllerConfig = field(default_factory=ControllerConfig)
    hand: HandConfig = field(default_factory=HandConfig)
    duration_s: float = 10.0
    seed: int = 0
    start_at_slots: bool = True   # spawn at formation slots in Follow phase
    engage_at_s: float = 0.0      # Idle -> Approach trigger when not starting at slots
    spawn: tuple[tuple[float, float, float], ...] | None = None

    def n_ticks(self) -> int:
        return int(round(self.duration_s / self.controller.dt))


def _impedance_from_dict(d: dict, what: str) -> ImpedanceParams:
    allowed = {"M", "K", "D", "K_v"}
    unknown = set(d) - allowed
    if unknown:
        raise ConfigError(f"unknown {what} keys: {sorted(unknown)}")
    if "M" not in d or "K" not in d:
        raise ConfigError(f"{what} requires M and K")
    kv = float(d.get("K_v", DEFAULT_VELOCITY_GAIN))
    if "D" in d:
        return ImpedanceParams(
            mass=float(d["M"]), damping=float(d["D"]), stiffness=float(d["K"]), velocity_gain=kv
        )
    return critically_damped(float(d["M"]), float(d["K"]), kv)


def _impedance_to_dict(p: ImpedanceParams) -> dict:
    return {"M": p.mass, "D": p.damping, "K": p.stiffness, "K_v": p.velocity_gain}


_SECTION_KEYS = {
    "topology",
    "impedance",
    "drone_drone_impedance",
    "apf",
    "plant",
    "controller",
    "hand",
    "duration_s",
    "seed",
    "start_at_slots",
    "engage_at_s",
    "spawn",
}


def _build_section(cls, d: dict, what: str, tuple_fields: tuple[str, ...] = ()):
    names = set(cls.__dataclass_fields__)
    unknown = set(d) - names
    if unknown:
        raise ConfigError(f"unknown {what} keys: {sorted(unknown)}")
    kwargs = dict(d)
    for tf in tuple_fields:
        if tf in kwargs and kwargs[tf] is not None:
            kwargs[tf] = tuple(kwargs[tf])
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad {what} section: {exc}") from exc


def scenario_from_dict(d: dict) -> ScenarioConfig:
    unknown = set(d) - _SECTION_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    topo_d = dict(d.get("topology", {}))
    if "kind" in topo_d:
        try:
            topo_d["kind"] = TopologyKind(topo_d["kind"])
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    topology = _build_section(TopologyConfig, topo_d, "topology")
    if topology.drones < 1:
        raise ConfigError("topology.drones must be >= 1")

    impedance = (
        _impedance_from_dict(d["impedance"], "impedance")
        if "impedance" in d
        else ScenarioConfig().impedance
    )
    dd = (
        _impedance_from_dict(d["drone_drone_impedance"], "drone_drone_impedance")
        if d.get("drone_drone_impedance")
        else None
    )
    apf_d = dict(d.get("apf", {}))
    apf_d = {
        {"radius_m": "radius"}.get(k, k): v for k, v in apf_d.items()
    }  # external key is radius_m
    apf = _build_section(ApfParams, apf_d, "apf")
    plant = _build_section(PlantConfig, dict(d.get("plant", {})), "plant")
    controller = _build_section(ControllerConfig, dict(d.get("controller", {})), "controller")
    hand = _build_section(
        HandConfig, dict(d.get("hand", {})), "hand", tuple_fields=("position", "target")
    )
    spawn = d.get("spawn")
    if spawn is not None:
        spawn = tuple(tuple(float(v) for v in row) for row in spawn)
        if len(spawn) != topology.drones:
            raise ConfigError("spawn must list one position per drone")

    return ScenarioConfig(
        topology=topology,
        impedance=impedance,
        drone_drone_impedance=dd,
        apf=apf,
        plant=plant,
        controller=controller,
        hand=hand,
        duration_s=float(d.get("duration_s", 10.0)),
        seed=int(d.get("seed", 0)),
        start_at_slots=bool(d.get("start_at_slots", True)),
        engage_at_s=float(d.get("engage_at_s", 0.0)),
        spawn=spawn,
    )


def scenario_to_dict(c: ScenarioConfig) -> dict:
    out = {
        "topology": {
            "kind": c.topology.kind.value,
            "drones": c.topology.drones,
            "spacing_m": c.topology.spacing_m,
            "height_m": c.topology.height_m,
        },
        "impedance": _impedance_to_dict(c.impedance),
        "apf": {
            "k_att": c.apf.k_att,
            "k_rep": c.apf.k_rep,
            "radius_m": c.apf.radius,
            "v_max": c.apf.v_max,
            "smooth_shell": c.apf.smooth_shell,
        },
        "plant": {
            "tau": c.plant.tau,
            "v_max": c.plant.v_max,
            "a_max": c.plant.a_max,
            "noise_sigma": c.plant.noise_sigma,
        },
        "controller": {
            "dt": c.controller.dt,
            "k_p": c.controller.k_p,
            "attach_radius_m": c.controller.attach_radius_m,
            "attach_dwell_s": c.controller.attach_dwell_s,
            "mode": c.controller.mode,
        },
        "hand": {
            "type": c.hand.type,
            "position": list(c.hand.position),
            "target": list(c.hand.target),
            "at_s": c.hand.at_s,
            "side_m": c.hand.side_m,
            "peak_speed": c.hand.peak_speed,
            "accel": c.hand.accel,
            "dwell_s": c.hand.dwell_s,
            "laps": c.hand.laps,
            "settle_s": c.hand.settle_s,
            "path": c.hand.path,
        },
        "duration_s": c.duration_s,
        "seed": c.seed,
        "start_at_slots": c.start_at_slots,
        "engage_at_s": c.engage_at_s,
    }
    if c.drone_drone_impedance is not None:
        out["drone_drone_impedance"] = _impedance_to_dict(c.drone_drone_impedance)
    if c.spawn is not None:
        out["spawn"] = [list(row) for row in c.spawn]
    return out


def load_scenario(path: str | Path) -> ScenarioConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    return scenario_from_dict(raw)


def save_scenario(c: ScenarioConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(c), indent=2, sort_keys=True) + "\n")
