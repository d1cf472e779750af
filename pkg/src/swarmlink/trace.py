"""Per-tick simulation record and its CSV / JSON-lines interchange formats."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

CSV_HEADER = (
    "tick,t,hand_x,hand_y,hand_z,drone_id,phase,"
    "x,y,z,vx,vy,vz,cmd_vx,cmd_vy,cmd_vz"
)

PHASE_LABELS = ("idle", "approach", "attach", "follow")
_PHASE_INDEX = {name: i for i, name in enumerate(PHASE_LABELS)}


def _fmt(x: float) -> str:
    # repr() is the shortest round-trip form; identical bytes for identical floats
    return repr(float(x))


@dataclass
class Trace:
    """One row per drone per tick; events in a sidecar JSON-lines list."""

    dt: float
    n_drones: int
    ticks: np.ndarray          # (nt,)
    hand: np.ndarray           # (nt, 3)
    phases: np.ndarray         # (nt, n) int
    pos: np.ndarray            # (nt, n, 3)
    vel: np.ndarray            # (nt, n, 3)
    cmd: np.ndarray            # (nt, n, 3)
    events: list = field(default_factory=list)
    config: dict | None = None

    @property
    def n_ticks(self) -> int:
        return len(self.ticks)

    def times(self) -> np.ndarray:
        return self.ticks * self.dt

    def csv_lines(self):
        yield CSV_HEADER
        for i, tick in enumerate(self.ticks):
            t = _fmt(tick * self.dt)
            hx, hy, hz = (_fmt(v) for v in self.hand[i])
            for d in range(self.n_drones):
                row = [
                    str(int(tick)),
                    t,
                    hx,
                    hy,
                    hz,
                    str(d),
                    PHASE_LABELS[int(self.phases[i, d])],
                ]
                row += [_fmt(v) for v in self.pos[i, d]]
                row += [_fmt(v) for v in self.vel[i, d]]
                row += [_fmt(v) for v in self.cmd[i, d]]
                yield ",".join(row)

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w") as fh:
            for line in self.csv_lines():
                fh.write(line + "\n")

    def write_events(self, path: str | Path) -> None:
        with open(path, "w") as fh:
            for e in self.events:
                fh.write(json.dumps(e, sort_keys=True) + "\n")

    @classmethod
    def read_csv(cls, path: str | Path, dt: float | None = None) -> "Trace":
        lines = Path(path).read_text().splitlines()
        if not lines or lines[0] != CSV_HEADER:
            raise ValueError(f"{path}: not a trace CSV (bad header)")
        body = [ln.split(",") for ln in lines[1:] if ln]
        if not body:
            raise ValueError(f"{path}: empty trace")
        drone_ids = sorted({int(r[5]) for r in body})
        n = len(drone_ids)
        if drone_ids != list(range(n)):
            raise ValueError(f"{path}: non-contiguous drone ids {drone_ids}")
        if len(body) % n != 0:
            raise ValueError(f"{path}: row count not a multiple of drone count")
        nt = len(body) // n
        ticks = np.empty(nt, dtype=np.int64)
        hand = np.empty((nt, 3))
        phases = np.empty((nt, n), dtype=np.int64)
        pos = np.empty((nt, n, 3))
        vel = np.empty((nt, n, 3))
        cmd = np.empty((nt, n, 3))
        inferred_dt = dt
        for i in range(nt):
            block = body[i * n : (i + 1) * n]
            ticks[i] = int(block[0][0])
            hand[i] = [float(v) for v in block[0][2:5]]
            if inferred_dt is None and int(block[0][0]) > 0:
                inferred_dt = float(block[0][1]) / int(block[0][0])
            for row in block:
                d = int(row[5])
                phases[i, d] = _PHASE_INDEX[row[6]]
                pos[i, d] = [float(v) for v in row[7:10]]
                vel[i, d] = [float(v) for v in row[10:13]]
                cmd[i, d] = [float(v) for v in row[13:16]]
        return cls(
            dt=inferred_dt if inferred_dt is not None else 0.01,
            n_drones=n,
            ticks=ticks,
            hand=hand,
            phases=phases,
            pos=pos,
            vel=vel,
            cmd=cmd,
        )


class TraceWriter:
    """Streaming writer used by the live server's --record mode."""

    def __init__(self, directory: str | Path, n_drones: int, dt: float, config: dict | None = None):
        self.dir = Path(directory)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.n_drones = n_drones
        self.dt = dt
        self._trace = open(self.dir / "trace.csv", "w")
        self._trace.write(CSV_HEADER + "\n")
        self._events = open(self.dir / "events.jsonl", "w")
        self._hand = open(self.dir / "hand.jsonl", "w")
        self._commands = open(self.dir / "commands.jsonl", "w")
        if config is not None:
            (self.dir / "config.json").write_text(
                json.dumps(config, indent=2, sort_keys=True) + "\n"
            )

    def write_tick(self, tick, t, hand_pos, hand_vel, phases, pos, vel, cmd) -> None:
        t_s = _fmt(t)
        hx, hy, hz = (_fmt(v) for v in hand_pos)
        for d in range(self.n_drones):
            row = [str(int(tick)), t_s, hx, hy, hz, str(d), PHASE_LABELS[int(phases[d])]]
            row += [_fmt(v) for v in pos[d]]
            row += [_fmt(v) for v in vel[d]]
            row += [_fmt(v) for v in cmd[d]]
            self._trace.write(",".join(row) + "\n")
        self._hand.write(
            json.dumps(
                {
                    "tick": int(tick),
                    "pos": [float(v) for v in hand_pos],
                    "vel": [float(v) for v in hand_vel],
                },
                sort_keys=True,
            )
            + "\n"
        )

    def write_event(self, event: dict) -> None:
        self._events.write(json.dumps(event, sort_keys=True) + "\n")

    def write_command(self, tick: int, command: dict) -> None:
        self._commands.write(
            json.dumps({"tick": int(tick), "command": command}, sort_keys=True) + "\n"
        )

    def close(self) -> None:
        for fh in (self._trace, self._events, self._hand, self._commands):
            fh.close()


def read_hand_log(path: str | Path) -> list[tuple[np.ndarray, np.ndarray]]:
    rows = []
    for line in Path(path).read_text().splitlines():
        if not line:
            continue
        d = json.loads(line)
        rows.append((np.array(d["pos"], dtype=float), np.array(d["vel"], dtype=float)))
    return rows


def read_command_log(path: str | Path) -> list[tuple[int, dict]]:
    out = []
    p = Path(path)
    if not p.exists():
        return out
    for line in p.read_text().splitlines():
        if not line:
            continue
        d = json.loads(line)
        out.append((int(d["tick"]), d["command"]))
    return out
