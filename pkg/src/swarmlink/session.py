"""Shared command application and session replay.

The live server records per-tick hand states plus every applied command; a
recorded session replays through the same code paths, so with the seed
preserved the drone trace reproduces exactly.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .config import load_scenario, scenario_to_dict
from .patterns import encode_pattern_by_label
from .protocol import (
    Disengage,
    Engage,
    Pause,
    Resume,
    SetHandTarget,
    SetImpedance,
    SetSpeed,
    SetTopology,
    TriggerPattern,
    parse_command,
)
from .sim import RecordedHand, World
from .trace import Trace, read_command_log, read_hand_log


def apply_sim_command(world: World, cmd, live_hand=None) -> None:
    """Apply one validated command to the world at a tick boundary.

    Pause/resume/speed are pacing concerns handled by the serving loop, not
    world state; they are accepted and ignored here so replays can share the
    code path.
    """
    if isinstance(cmd, SetHandTarget):
        if live_hand is not None:
            live_hand.set_target((cmd.x, cmd.y, cmd.z))
    elif isinstance(cmd, SetTopology):
        world.set_topology(cmd.kind)
    elif isinstance(cmd, SetImpedance):
        world.set_impedance(cmd.params())
    elif isinstance(cmd, TriggerPattern):
        world.trigger_pattern(encode_pattern_by_label(cmd.label))
    elif isinstance(cmd, Engage):
        world.engage()
    elif isinstance(cmd, Disengage):
        world.disengage()
    elif isinstance(cmd, (Pause, Resume, SetSpeed)):
        pass
    else:
        raise TypeError(f"unhandled command {type(cmd).__name__}")


def replay_session(session_dir: str | Path) -> Trace:
    """Re-run a recorded session deterministically from its config + logs."""
    session_dir = Path(session_dir)
    config = load_scenario(session_dir / "config.json")
    hand_rows = read_hand_log(session_dir / "hand.jsonl")
    commands = read_command_log(session_dir / "commands.jsonl")

    world = World(config, hand_source=RecordedHand(hand_rows))
    by_tick: dict[int, list] = {}
    for tick, raw in commands:
        by_tick.setdefault(tick, []).append(parse_command(raw))

    n_ticks = len(hand_rows)
    n = world.n
    ticks = np.arange(n_ticks, dtype=np.int64)
    hand = np.zeros((n_ticks, 3))
    phases = np.zeros((n_ticks, n), dtype=np.int64)
    pos = np.zeros((n_ticks, n, 3))
    vel = np.zeros((n_ticks, n, 3))
    cmd_arr = np.zeros((n_ticks, n, 3))
    for k in range(n_ticks):
        for c in by_tick.get(k, ()):
            apply_sim_command(world, c)
        pre_pos = world.pos.copy()
        pre_vel = world.vel.copy()
        cmds = world.step()
        hand[k] = world.hand_pos
        phases[k] = [int(p) for p in world.phases]
        pos[k] = pre_pos
        vel[k] = pre_vel
        cmd_arr[k] = cmds
    return Trace(
        dt=world.dt,
        n_drones=n,
        ticks=ticks,
        hand=hand,
        phases=phases,
        pos=pos,
        vel=vel,
        cmd=cmd_arr,
        events=world.events,
        config=scenario_to_dict(config),
    )
