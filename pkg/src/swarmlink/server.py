"""Live steering service: real-time simulation, snapshot streaming, commands.

One asyncio task owns the world and steps it at wall-clock rate times the
speed factor.  Connection handlers never touch the world: commands go through
an ordered queue drained at tick boundaries; snapshots are broadcast through
per-connection latest-wins queues, so a slow client skips intermediate frames
but never sees reordered ones.
"""

from __future__ import annotations

import asyncio
import json
import time
from contextlib import asynccontextmanager
from pathlib import Path

import pydantic
from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import HTMLResponse
from fastapi.staticfiles import StaticFiles

from .config import ScenarioConfig, scenario_to_dict
from .protocol import build_snapshot, parse_command, Pause, Resume, SetSpeed, SetHandTarget
from .session import apply_sim_command
from .sim import LiveHand, World
from .trace import TraceWriter

DEFAULT_SNAPSHOT_HZ = 30.0
HAND_SMOOTHING_S = 0.1

_FALLBACK_PAGE = """<!doctype html>
<html><head><title>swarmlink</title></head>
<body><h1>swarmlink steering server</h1>
<p>No UI bundle found. Build the frontend (<code>cd frontend && npm run build</code>)
and restart, or connect a WebSocket client to <code>/ws</code>.</p></body></html>
"""


class SimService:
    """Owns the world; serializes all mutation through the command queue."""

    def __init__(
        self,
        config: ScenarioConfig,
        speed: float = 1.0,
        snapshot_hz: float = DEFAULT_SNAPSHOT_HZ,
        record_dir: str | Path | None = None,
    ):
        self.config = config
        self.hand = LiveHand(config.hand.position, smoothing_s=HAND_SMOOTHING_S)
        self.world = World(config, hand_source=self.hand)
        self.speed = speed
        self.snapshot_hz = snapshot_hz
        self.paused = False
        self.commands: asyncio.Queue = asyncio.Queue()
        self.subscribers: set[asyncio.Queue] = set()
        self._event_cursor = 0
        self._task: asyncio.Task | None = None
        self._writer: TraceWriter | None = None
        if record_dir is not None:
            self._writer = TraceWriter(
                record_dir,
                n_drones=self.world.n,
                dt=self.world.dt,
                config=scenario_to_dict(config),
            )

    # -- pub/sub -------------------------------------------------------------

    def subscribe(self) -> asyncio.Queue:
        q: asyncio.Queue = asyncio.Queue(maxsize=1)
        self.subscribers.add(q)
        return q

    def unsubscribe(self, q: asyncio.Queue) -> None:
        self.subscribers.discard(q)

    def _broadcast(self, snapshot: dict) -> None:
        frame = json.dumps(snapshot)
        for q in self.subscribers:
            if q.full():  # slow client: drop the stale frame, keep the latest
                try:
                    q.get_nowait()
                except asyncio.QueueEmpty:
                    pass
            q.put_nowait(frame)

    # -- command handling ------------------------------------------------------

    def _drain_commands(self) -> None:
        while True:
            try:
                cmd = self.commands.get_nowait()
            except asyncio.QueueEmpty:
                return
            if isinstance(cmd, Pause):
                self.paused = True
            elif isinstance(cmd, Resume):
                self.paused = False
            elif isinstance(cmd, SetSpeed):
                self.speed = cmd.factor
            else:
                apply_sim_command(self.world, cmd, live_hand=self.hand)
            if self._writer is not None and not isinstance(cmd, SetHandTarget):
                # hand motion is captured per tick in hand.jsonl; structural
                # commands replay from the command log
                self._writer.write_command(self.world.tick, cmd.model_dump())

    def _step_ticks(self, n: int) -> None:
        for _ in range(n):
            self._drain_commands()
            if self.paused:
                return
            pre_pos = self.world.pos.copy()
            pre_vel = self.world.vel.copy()
            cmds = self.world.step()
            if self._writer is not None:
                k = self.world.tick - 1
                self._writer.write_tick(
                    k,
                    k * self.world.dt,
                    self.world.hand_pos,
                    self.world.hand_vel,
                    [int(p) for p in self.world.phases],
                    pre_pos,
                    pre_vel,
                    cmds,
                )

    def snapshot(self) -> dict:
        events = self.world.events[self._event_cursor :]
        self._event_cursor = len(self.world.events)
        if self._writer is not None:
            for e in events:
                self._writer.write_event(e)
        if self._event_cursor > 10_000:  # already broadcast/recorded; cap memory
            del self.world.events[: self._event_cursor]
            self._event_cursor = 0
        return build_snapshot(self.world, paused=self.paused, speed=self.speed, events=events)

    # -- main loop -------------------------------------------------------------

    async def run(self) -> None:
        dt = self.world.dt
        interval = 1.0 / self.snapshot_hz
        carry = 0.0
        last = time.monotonic()
        try:
            while True:
                await asyncio.sleep(interval)
                now = time.monotonic()
                elapsed = now - last
                last = now
                if not self.paused:
                    # bound catch-up to 4 nominal intervals to avoid a death spiral
                    budget = min(elapsed, 4.0 * interval) * self.speed + carry
                    n = int(budget / dt)
                    carry = budget - n * dt
                    self._step_ticks(n)
                else:
                    self._drain_commands()
                self._broadcast(self.snapshot())
        except asyncio.CancelledError:
            pass
        finally:
            if self._writer is not None:
                self._writer.close()

    def start(self) -> None:
        self._task = asyncio.create_task(self.run())

    async def stop(self) -> None:
        if self._task is not None:
            self._task.cancel()
            try:
                await self._task
            except asyncio.CancelledError:
                pass
            self._task = None


def default_static_dir() -> Path | None:
    candidate = Path(__file__).resolve().parents[2] / "frontend" / "static"
    return candidate if (candidate / "index.html").exists() else None


def create_app(
    config: ScenarioConfig,
    speed: float = 1.0,
    snapshot_hz: float = DEFAULT_SNAPSHOT_HZ,
    record_dir: str | Path | None = None,
    static_dir: str | Path | None = None,
) -> FastAPI:
    service = SimService(config, speed=speed, snapshot_hz=snapshot_hz, record_dir=record_dir)

    @asynccontextmanager
    async def lifespan(_: FastAPI):
        service.start()
        try:
            yield
        finally:
            await service.stop()

    app = FastAPI(title="swarmlink steering server", lifespan=lifespan)
    app.state.service = service

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket) -> None:
        await ws.accept()
        queue = service.subscribe()
        last_tick_sent = -1
        last_paused = None

        async def sender() -> None:
            nonlocal last_tick_sent, last_paused
            while True:
                frame = await queue.get()
                snap = json.loads(frame)
                fresh = snap["tick"] > last_tick_sent
                toggled = snap["paused"] != last_paused
                if fresh or toggled:
                    last_tick_sent = max(last_tick_sent, snap["tick"])
                    last_paused = snap["paused"]
                    await ws.send_text(frame)

        send_task = asyncio.create_task(sender())
        try:
            while True:
                text = await ws.receive_text()
                try:
                    raw = json.loads(text)
                    if not isinstance(raw, dict):
                        raise ValueError("command frame must be a JSON object")
                    cmd = parse_command(raw)
                except (json.JSONDecodeError, ValueError, pydantic.ValidationError) as exc:
                    detail = str(exc)
                    if isinstance(exc, pydantic.ValidationError):
                        msgs = [e.get("msg", "") for e in exc.errors()]
                        detail = "; ".join(msgs) or detail
                    await ws.send_text(
                        json.dumps({"error": "invalid_command", "detail": detail})
                    )
                    continue
                await service.commands.put(cmd)
        except WebSocketDisconnect:
            pass
        finally:
            send_task.cancel()
            service.unsubscribe(queue)

    static = Path(static_dir) if static_dir is not None else default_static_dir()
    if static is not None and static.is_dir():
        app.mount("/", StaticFiles(directory=static, html=True), name="ui")
    else:

        @app.get("/")
        async def index() -> HTMLResponse:
            return HTMLResponse(_FALLBACK_PAGE)

    return app


def serve(
    config: ScenarioConfig,
    bind: str = "127.0.0.1:8000",
    speed: float = 1.0,
    record_dir: str | Path | None = None,
    static_dir: str | Path | None = None,
) -> None:
    """Run the steering server until interrupted."""
    import uvicorn

    host, _, port = bind.rpartition(":")
    app = create_app(config, speed=speed, record_dir=record_dir, static_dir=static_dir)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port), log_level="info")
