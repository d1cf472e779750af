"""Deterministic fixed-timestep swarm world.

Per tick: hand source -> phase machine -> controller -> plant.  Drones approach
their formation slots under the potential field, then follow the hand through
the impedance link graph.  Identical (config, seed, hand input) always yields
an identical trace.

Follow-phase realization: references chain outward from the hand along the
link graph.  The hand link gives drone 0 a reference of hand + offset minus
the link's propagated deviation; each drone-drone link anchors the deeper
drone to its parent's *reference* point the same way, with the link driven by
the anchor's reference velocity (the same velocity-coupling force as the hand
link).  Per-hop lag is therefore K_v·v/K in steady motion, so deeper
topologies (ring chain, tree leaves) track worse than the star, as on the
physical system.  The commanded velocity is a position-loop term plus exact
velocity and acceleration feed-forward of the reference.
"""

from __future__ import annotations

import math
from enum import IntEnum

import numpy as np

from .apf import Obstacle, ObstacleKind, apf_command
from .config import ControllerConfig, HandConfig, PlantConfig, ScenarioConfig
from .impedance import LinkState, discretize, hand_force, step_link
from .topology import HAND, build_topology, desired_position
from .trace import PHASE_LABELS, Trace
from .trajectory import square_trajectory

STALL_SPEED = 1e-3      # m/s; APF command below this counts as a stall
STALL_SECONDS = 2.0


class Phase(IntEnum):
    IDLE = 0
    APPROACH = 1
    ATTACH = 2
    FOLLOW = 3

    @property
    def label(self) -> str:
        return PHASE_LABELS[int(self)]


# ---------------------------------------------------------------------------
# hand sources


class HandSource:
    """Supplies the hand (position, velocity) for each tick."""

    def initial(self) -> np.ndarray:
        raise NotImplementedError

    def sample(self, tick: int, dt: float) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError


class StaticHand(HandSource):
    def __init__(self, position):
        self.position = np.asarray(position, dtype=float)

    def initial(self) -> np.ndarray:
        return self.position.copy()

    def sample(self, tick, dt):
        return self.position.copy(), np.zeros(3)


class StepHand(HandSource):
    """Setpoint teleport: position jumps at `at_s`, reported velocity stays zero."""

    def __init__(self, position, target, at_s: float):
        self.p0 = np.asarray(position, dtype=float)
        self.p1 = np.asarray(target, dtype=float)
        self.at_s = at_s

    def initial(self) -> np.ndarray:
        return self.p0.copy()

    def sample(self, tick, dt):
        pos = self.p1 if tick * dt >= self.at_s else self.p0
        return pos.copy(), np.zeros(3)


class SquareHand(HandSource):
    """Square reference path, held at the start corner for `settle_s` first."""

    def __init__(self, trajectory, settle_s: float = 0.0):
        self.trajectory = trajectory
        self.settle_s = settle_s

    def initial(self) -> np.ndarray:
        return self.trajectory.position_at(0.0)

    def sample(self, tick, dt):
        t = tick * dt - self.settle_s
        return self.trajectory.position_at(t), self.trajectory.velocity_at(t)


class RecordedHand(HandSource):
    """Replays per-tick (position, velocity) rows; holds the last row afterwards."""

    def __init__(self, rows):
        if not rows:
            raise ValueError("recorded hand stream is empty")
        self.rows = rows

    def initial(self) -> np.ndarray:
        return self.rows[0][0].copy()

    def sample(self, tick, dt):
        pos, vel = self.rows[min(tick, len(self.rows) - 1)]
        return pos.copy(), vel.copy()


class LiveHand(HandSource):
    """Target-following source for interactive steering.

    The position low-passes toward the latest target (smoothing time constant
    `smoothing_s`) so discrete drag updates produce a finite hand velocity.
    """

    def __init__(self, position, smoothing_s: float = 0.1):
        self.pos = np.asarray(position, dtype=float).copy()
        self.target = self.pos.copy()
        self.smoothing_s = smoothing_s

    def set_target(self, target) -> None:
        self.target = np.asarray(target, dtype=float).copy()

    def initial(self) -> np.ndarray:
        return self.pos.copy()

    def sample(self, tick, dt):
        alpha = 1.0 - math.exp(-dt / self.smoothing_s) if dt > 0 else 0.0
        new = self.pos + alpha * (self.target - self.pos)
        vel = (new - self.pos) / dt if dt > 0 else np.zeros(3)
        self.pos = new
        return new.copy(), vel


def hand_source_from_config(hand: HandConfig, dt: float) -> HandSource:
    if hand.type == "static":
        return StaticHand(hand.position)
    if hand.type == "step":
        return StepHand(hand.position, hand.target, hand.at_s)
    if hand.type == "square":
        traj = square_trajectory(
            side=hand.side_m,
            peak_speed=hand.peak_speed,
            dwell=hand.dwell_s,
            laps=hand.laps,
            accel=hand.accel,
            origin=hand.position,
        )
        return SquareHand(traj, settle_s=hand.settle_s)
    if hand.type == "recorded":
        from .trace import read_hand_log

        if hand.path is None:
            raise ValueError("recorded hand source needs a path")
        return RecordedHand(read_hand_log(hand.path))
    raise ValueError(f"unknown hand source {hand.type!r}")


# ---------------------------------------------------------------------------
# plant


def plant_step(pos, vel, cmd, plant: PlantConfig, dt: float, rng=None):
    """First-order velocity tracking with speed/acceleration limits and position noise."""
    cmd = np.asarray(cmd, dtype=float)
    speed = float(np.linalg.norm(cmd))
    if speed > plant.v_max:
        cmd = cmd * (plant.v_max / speed)
    dv = (cmd - vel) * (dt / plant.tau)
    dv_norm = float(np.linalg.norm(dv))
    if dv_norm > plant.a_max * dt:
        dv = dv * (plant.a_max * dt / dv_norm)
    vel = vel + dv
    speed = float(np.linalg.norm(vel))
    if speed > plant.v_max:
        vel = vel * (plant.v_max / speed)
    pos = pos + vel * dt
    if rng is not None and plant.noise_sigma > 0.0:
        pos = pos + rng.normal(0.0, plant.noise_sigma, 3)
    if pos[2] < 0.0:
        pos = pos.copy()
        pos[2] = 0.0
    return pos, vel


# ---------------------------------------------------------------------------
# world


class World:
    def __init__(self, config: ScenarioConfig, hand_source: HandSource | None = None):
        self.config = config
        ctl = config.controller
        self.dt = ctl.dt
        self.graph = build_topology(
            config.topology.kind,
            config.topology.drones,
            spacing=config.topology.spacing_m,
            height=config.topology.height_m,
            params=config.impedance,
            drone_drone_params=config.drone_drone_impedance,
        )
        self.links = [discretize(e.params, self.dt) for e in self.graph.edges]
        self.hand_source = hand_source or hand_source_from_config(config.hand, self.dt)
        self.rng = np.random.default_rng(config.seed)

        # live parameter/topology switches replace these (config stays frozen)
        self.impedance_params = config.impedance
        self.dd_params = config.drone_drone_impedance
        self.plan = reference_plan(self.graph)

        n = self.graph.n_drones
        self.n = n
        self.tick = 0
        self.hand_pos = self.hand_source.initial()
        self.hand_vel = np.zeros(3)
        self.hand_acc = np.zeros(3)
        self._prev_hand_vel = np.zeros(3)

        self.engaged = bool(config.start_at_slots)
        if config.spawn is not None:
            self.pos = np.array(config.spawn, dtype=float)
        elif config.start_at_slots:
            self.pos = self.hand_pos + np.array(self.graph.offsets)
        else:
            # parked on the ground under the slots
            self.pos = self.hand_pos + np.array(self.graph.offsets)
            self.pos[:, 2] = 0.0
        self.vel = np.zeros((n, 3))
        if config.start_at_slots and config.controller.mode == "impedance":
            self.phases = [Phase.FOLLOW] * n
        elif config.start_at_slots:
            self.phases = [Phase.APPROACH] * n
        else:
            self.phases = [Phase.IDLE] * n
        self.link_states = [LinkState.zero(3) for _ in self.graph.edges]
        self.attach_ticks = [0] * n
        self.stall_ticks = [0] * n
        self.events: list[dict] = []
        self.active_pattern: str | None = None
        self._pattern_end_tick = 0
        self._auto_engaged = self.engaged

    # -- events ------------------------------------------------------------

    def emit(self, type_: str, **data) -> None:
        self.events.append({"tick": int(self.tick), "t": self.tick * self.dt, "type": type_, **data})

    def engage(self) -> None:
        if not self.engaged:
            self.engaged = True
            self.emit("engage")

    def disengage(self) -> None:
        if self.engaged:
            self.engaged = False
            self.emit("disengage")

    def trigger_pattern(self, schedule) -> None:
        self.active_pattern = schedule.label
        self._pattern_end_tick = self.tick + int(
            math.ceil(schedule.duration_ms() / 1000.0 / self.dt)
        )
        self.emit("pattern_triggered", label=schedule.label, schedule=schedule.to_dict())

    def slot(self, drone: int) -> np.ndarray:
        return desired_position(self.graph, drone, self.hand_pos)

    def _rebuild_graph(self, kind) -> None:
        c = self.config.topology
        self.graph = build_topology(
            kind,
            c.drones,
            spacing=c.spacing_m,
            height=c.height_m,
            params=self.impedance_params,
            drone_drone_params=self.dd_params,
        )
        self.links = [discretize(e.params, self.dt) for e in self.graph.edges]
        self.link_states = [LinkState.zero(3) for _ in self.graph.edges]
        self.plan = reference_plan(self.graph)

    def set_topology(self, kind) -> None:
        self._rebuild_graph(kind)
        self.emit("topology_changed", kind=self.graph.kind.value)

    def set_impedance(self, params, drone_drone=None) -> None:
        self.impedance_params = params
        if drone_drone is not None:
            self.dd_params = drone_drone
        self._rebuild_graph(self.graph.kind)
        self.emit(
            "impedance_changed",
            M=params.mass,
            D=params.damping,
            K=params.stiffness,
            K_v=params.velocity_gain,
        )

    # -- per-tick pipeline ---------------------------------------------------

    def _edge_active(self, edge) -> bool:
        # an edge is live when the drone it gives a reference to is following;
        # edges outside the reference plan (ring's closing edge) stay inert
        for d, ei, _ in self.plan:
            if self.graph.edges[ei] is edge:
                return self.phases[d] == Phase.FOLLOW
        return False

    def step(self) -> np.ndarray:
        """Advance one tick; returns the commanded velocities used this tick."""
        if (
            not self.engaged
            and not self._auto_engaged
            and self.tick * self.dt >= self.config.engage_at_s
        ):
            self._auto_engaged = True
            self.engage()
        hand_pos, hand_vel = self.hand_source.sample(self.tick, self.dt)
        self.hand_pos = hand_pos
        if self.tick == 0:
            self.hand_acc = np.zeros(3)
        else:
            self.hand_acc = (hand_vel - self._prev_hand_vel) / self.dt
        self.hand_vel = hand_vel
        self._prev_hand_vel = hand_vel

        phase_transition(self)
        cmds = controller_tick(self)
        for d in range(self.n):
            self.pos[d], self.vel[d] = plant_step(
                self.pos[d], self.vel[d], cmds[d], self.config.plant, self.dt, self.rng
            )
        self.tick += 1
        if self.active_pattern is not None and self.tick >= self._pattern_end_tick:
            self.active_pattern = None
        return cmds


def phase_transition(world: World) -> None:
    """Idle -> Approach -> Attach -> Follow, plus any -> Idle on disengage."""
    ctl = world.config.controller
    dwell_ticks = int(round(ctl.attach_dwell_s / world.dt))
    for d in range(world.n):
        ph = world.phases[d]
        new = ph
        if not world.engaged:
            new = Phase.IDLE
        elif ctl.mode == "apf":
            new = Phase.APPROACH
        elif ph == Phase.IDLE:
            new = Phase.APPROACH
        elif ph == Phase.APPROACH:
            if np.linalg.norm(world.pos[d] - world.slot(d)) < ctl.attach_radius_m:
                new = Phase.ATTACH
                world.attach_ticks[d] = 0
        elif ph == Phase.ATTACH:
            world.attach_ticks[d] += 1
            if world.attach_ticks[d] >= dwell_ticks:
                new = Phase.FOLLOW
        if new != ph:
            world.phases[d] = new
            world.emit("phase_change", drone=d, frm=ph.label, to=new.label)
    # link states live on edges; zero any edge that is not active
    for ei, edge in enumerate(world.graph.edges):
        if not world._edge_active(edge):
            world.link_states[ei] = LinkState.zero(3)


def reference_plan(graph) -> list[tuple[int, int, int]]:
    """Dependency-ordered (drone, edge_index, anchor_node) chain from the hand.

    Star/tree: breadth-first from the hand.  Ring: single file along the cycle
    (hand-d0, then d0-d1-...-d(n-1)); the cycle-closing edge carries no
    reference and stays inert.  Every drone appears exactly once.
    """
    from .topology import TopologyKind

    index_of = {}
    for ei, e in enumerate(graph.edges):
        index_of[(e.a, e.b)] = ei
        index_of[(e.b, e.a)] = ei

    plan: list[tuple[int, int, int]] = []
    if graph.kind is TopologyKind.RING and graph.n_drones >= 2:
        plan.append((0, index_of[(HAND, 0)], HAND))
        for d in range(1, graph.n_drones):
            plan.append((d, index_of[(d - 1, d)], d - 1))
        return plan

    assigned = {HAND}
    frontier = [HAND]
    while frontier:
        node = frontier.pop(0)
        for ei, e in enumerate(graph.edges):
            if node not in (e.a, e.b):
                continue
            nxt = e.other(node)
            if nxt in assigned:
                continue
            assigned.add(nxt)
            plan.append((nxt, ei, node))
            frontier.append(nxt)
    return plan


def controller_tick(world: World) -> np.ndarray:
    """Per-drone commanded velocities; steps the active impedance links."""
    n = world.n
    ctl = world.config.controller
    plant = world.config.plant
    offsets = world.graph.offsets
    cmds = np.zeros((n, 3))

    # reference chain: (position, velocity, acceleration) per drone in Follow
    ref_pos = [None] * n
    ref_vel = [None] * n
    ref_acc = [None] * n
    for d, ei, anchor in world.plan:
        edge = world.graph.edges[ei]
        if not world._edge_active(edge) or world.phases[d] != Phase.FOLLOW:
            continue
        if anchor == HAND:
            a_pos, a_vel, a_acc = world.hand_pos, world.hand_vel, world.hand_acc
            a_off = 0.0
        elif ref_pos[anchor] is not None:
            a_pos, a_vel, a_acc = ref_pos[anchor], ref_vel[anchor], ref_acc[anchor]
            a_off = offsets[anchor]
        else:
            # parent not following yet: anchor to its slot, moving with the hand
            a_pos = world.hand_pos + offsets[anchor]
            a_vel, a_acc = world.hand_vel, world.hand_acc
            a_off = offsets[anchor]
        p = edge.params
        f = hand_force(p.velocity_gain, a_vel)
        s = step_link(world.links[ei], world.link_states[ei], f)
        world.link_states[ei] = s
        # exact link-state second derivative, for acceleration feed-forward
        sdd = (f - p.damping * s.dv - p.stiffness * s.dx) / p.mass
        ref_pos[d] = a_pos + (offsets[d] - a_off) - s.dx
        ref_vel[d] = a_vel - s.dv
        ref_acc[d] = a_acc - sdd

    apf_events: list = []
    for d in range(n):
        ph = world.phases[d]
        if ph == Phase.IDLE:
            continue
        if ph in (Phase.APPROACH, Phase.ATTACH):
            goal = world.slot(d)
            obstacles = [Obstacle(position=world.hand_pos, kind=ObstacleKind.HAND)]
            obstacles += [
                Obstacle(position=world.pos[j], kind=ObstacleKind.DRONE)
                for j in range(n)
                if j != d
            ]
            apf_events.clear()
            cmd = apf_command(world.pos[d], goal, obstacles, world.config.apf, events=apf_events)
            for e in apf_events:
                world.emit(
                    "proximity_violation",
                    drone=d,
                    **{k: v for k, v in e.items() if k != "type"},
                )
            _detect_stall(world, d, cmd, goal, ctl)
            cmds[d] = cmd
        else:  # FOLLOW
            if ref_pos[d] is None:
                target, v_ff, a_ff = world.slot(d), world.hand_vel, world.hand_acc
            else:
                target, v_ff, a_ff = ref_pos[d], ref_vel[d], ref_acc[d]
            cmd = ctl.k_p * (target - world.pos[d]) + v_ff + plant.tau * a_ff
            speed = float(np.linalg.norm(cmd))
            if speed > plant.v_max:
                cmd = cmd * (plant.v_max / speed)
            cmds[d] = cmd
    return cmds


def _detect_stall(world: World, d: int, cmd, goal, ctl: ControllerConfig) -> None:
    far = float(np.linalg.norm(world.pos[d] - goal)) > max(ctl.attach_radius_m, 0.05)
    if far and float(np.linalg.norm(cmd)) < STALL_SPEED:
        world.stall_ticks[d] += 1
        if world.stall_ticks[d] == int(round(STALL_SECONDS / world.dt)):
            world.emit("local_minimum_stall", drone=d)
    else:
        world.stall_ticks[d] = 0


def run_scenario(
    config: ScenarioConfig,
    hand_source: HandSource | None = None,
    n_ticks: int | None = None,
) -> Trace:
    """Run a configured scenario and return its trace."""
    from .config import scenario_to_dict

    world = World(config, hand_source=hand_source)
    if n_ticks is None:
        n_ticks = config.n_ticks()
    n = world.n
    ticks = np.arange(n_ticks, dtype=np.int64)
    hand = np.zeros((n_ticks, 3))
    phases = np.zeros((n_ticks, n), dtype=np.int64)
    pos = np.zeros((n_ticks, n, 3))
    vel = np.zeros((n_ticks, n, 3))
    cmd = np.zeros((n_ticks, n, 3))
    for k in range(n_ticks):
        pre_pos = world.pos.copy()
        pre_vel = world.vel.copy()
        cmds = world.step()
        hand[k] = world.hand_pos
        phases[k] = [int(p) for p in world.phases]
        pos[k] = pre_pos
        vel[k] = pre_vel
        cmd[k] = cmds
    return Trace(
        dt=world.dt,
        n_drones=n,
        ticks=ticks,
        hand=hand,
        phases=phases,
        pos=pos,
        vel=vel,
        cmd=cmd,
        events=world.events,
        config=scenario_to_dict(config),
    )
