// Single reducer over connection + snapshot + control events.  Rendering reads
// the ViewModel and never extrapolates: the scene shows only the latest
// snapshot's data (a dropped connection freezes it).

import type {
  Command,
  PatternSchedule,
  Snapshot,
  TopologyName,
  Vec3,
} from "./types.js";

export const TRAIL_LENGTH = 150;

export type ConnectionStatus = "connecting" | "connected" | "reconnecting";

export interface SliderState {
  M: number;
  K: number;
  K_v: number;
}

export interface ActivePattern {
  schedule: PatternSchedule;
  startedAtMs: number; // wall clock when the trigger event arrived
}

export interface ViewModel {
  status: ConnectionStatus;
  snapshot: Snapshot | null;
  trails: Map<number, Vec3[]>;
  selectedTopology: TopologyName;
  sliders: SliderState;
  selectedPattern: string;
  activePattern: ActivePattern | null;
  lastError: string | null;
  log: string[];
}

export function initialViewModel(): ViewModel {
  return {
    status: "connecting",
    snapshot: null,
    trails: new Map(),
    selectedTopology: "star",
    sliders: { M: 1.9, K: 20.88, K_v: 3.0 },
    selectedPattern: "RR",
    activePattern: null,
    lastError: null,
    log: [],
  };
}

export type UiEvent =
  | { kind: "open" }
  | { kind: "close" }
  | { kind: "snapshot"; snapshot: Snapshot; nowMs: number }
  | { kind: "error_frame"; detail: string }
  | { kind: "select_topology"; topology: TopologyName }
  | { kind: "slider"; field: keyof SliderState; value: number }
  | { kind: "select_pattern"; label: string };

export function reduce(vm: ViewModel, ev: UiEvent): ViewModel {
  switch (ev.kind) {
    case "open":
      return { ...vm, status: "connected", lastError: null };
    case "close":
      return { ...vm, status: "reconnecting" };
    case "error_frame":
      return { ...vm, lastError: ev.detail, log: pushLog(vm.log, `error: ${ev.detail}`) };
    case "select_topology":
      return { ...vm, selectedTopology: ev.topology };
    case "slider":
      return { ...vm, sliders: { ...vm.sliders, [ev.field]: ev.value } };
    case "select_pattern":
      return { ...vm, selectedPattern: ev.label };
    case "snapshot":
      return applySnapshot(vm, ev.snapshot, ev.nowMs);
  }
}

function applySnapshot(vm: ViewModel, snap: Snapshot, nowMs: number): ViewModel {
  const trails = new Map(vm.trails);
  for (const d of snap.drones) {
    const prev = trails.get(d.id) ?? [];
    const next = [...prev, d.position];
    if (next.length > TRAIL_LENGTH) next.splice(0, next.length - TRAIL_LENGTH);
    trails.set(d.id, next);
  }

  let activePattern = vm.activePattern;
  let log = vm.log;
  for (const e of snap.events) {
    if (e.type === "pattern_triggered" && e.schedule) {
      activePattern = { schedule: e.schedule, startedAtMs: nowMs };
    }
    log = pushLog(log, `t=${e.t.toFixed(2)} ${e.type}${e.label ? " " + e.label : ""}`);
  }
  if (snap.active_pattern === null && activePattern !== null) {
    const total = scheduleDurationMs(activePattern.schedule);
    if (nowMs - activePattern.startedAtMs > total) activePattern = null;
  }

  return {
    ...vm,
    snapshot: snap,
    trails,
    activePattern,
    selectedTopology: snap.topology.kind,
  };
}

function pushLog(log: string[], line: string): string[] {
  const next = [...log, line];
  if (next.length > 60) next.splice(0, next.length - 60);
  return next;
}

export function scheduleDurationMs(schedule: PatternSchedule): number {
  let end = 0;
  for (const line of schedule.actuators) {
    for (const ev of line) end = Math.max(end, ev.onset_ms + ev.duration_ms);
  }
  return end;
}

// actuator widget intensity in [0, 1] for each finger at `elapsedMs`
export function actuatorLevels(pattern: ActivePattern | null, nowMs: number): number[] {
  if (!pattern) return [0, 0, 0];
  const elapsed = nowMs - pattern.startedAtMs;
  return pattern.schedule.actuators.map((line) => {
    for (const ev of line) {
      if (elapsed >= ev.onset_ms && elapsed < ev.onset_ms + ev.duration_ms) {
        return ev.amplitude;
      }
    }
    return 0;
  });
}

// frequency class of the playing pattern, for flash styling (100 Hz is
// rendered as a "high" style rather than a literal flash rate)
export function frequencyClass(pattern: ActivePattern | null): "none" | "low" | "mid" | "high" {
  if (!pattern) return "none";
  const f = pattern.schedule.actuators.flat()[0]?.frequency_hz ?? 0;
  if (f >= 50) return "high";
  if (f >= 6) return "mid";
  return f > 0 ? "low" : "none";
}

export function statusLine(vm: ViewModel): string {
  if (vm.status !== "connected") return vm.status;
  if (!vm.snapshot) return "connected (waiting for snapshots)";
  const s = vm.snapshot;
  const paused = s.paused ? " | paused" : "";
  return `tick ${s.tick} | t=${s.t.toFixed(2)} s | x${s.speed}${paused}`;
}

export interface PendingSend {
  command: Command;
  queuedAtMs: number;
}

export const SEND_QUEUE_TTL_MS = 2000;

// messages sent while disconnected wait for reconnect, then expire
export function expireQueue(queue: PendingSend[], nowMs: number): PendingSend[] {
  return queue.filter((p) => nowMs - p.queuedAtMs <= SEND_QUEUE_TTL_MS);
}
