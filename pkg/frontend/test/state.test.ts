import { describe, expect, it } from "vitest";

import {
  actuatorLevels,
  expireQueue,
  frequencyClass,
  initialViewModel,
  reduce,
  scheduleDurationMs,
  statusLine,
  TRAIL_LENGTH,
  type ViewModel,
} from "../src/state.js";
import type { Snapshot } from "../src/types.js";

function snapshot(tick: number, extra: Partial<Snapshot> = {}): Snapshot {
  return {
    schema_version: 1,
    tick,
    t: tick / 100,
    hand: { position: [0, 0, 1], velocity: [0, 0, 0] },
    drones: [
      { id: 0, phase: "follow", position: [0.3, tick / 1000, 1.4], velocity: [0, 0, 0] },
      { id: 1, phase: "follow", position: [-0.3, 0, 1.4], velocity: [0, 0, 0] },
    ],
    active_pattern: null,
    events: [],
    topology: {
      kind: "star",
      edges: [
        ["hand", 0],
        ["hand", 1],
      ],
      offsets: [
        [0.3, 0, 0.4],
        [-0.3, 0, 0.4],
      ],
    },
    paused: false,
    speed: 1,
    ...extra,
  };
}

const RR_SCHEDULE = {
  label: "RR",
  actuators: [
    [{ onset_ms: 0, duration_ms: 300, frequency_hz: 100, amplitude: 1 }],
    [{ onset_ms: 150, duration_ms: 300, frequency_hz: 100, amplitude: 1 }],
    [{ onset_ms: 300, duration_ms: 300, frequency_hz: 100, amplitude: 1 }],
  ],
};

describe("connection lifecycle", () => {
  it("tracks open/close transitions", () => {
    let vm = initialViewModel();
    expect(vm.status).toBe("connecting");
    vm = reduce(vm, { kind: "open" });
    expect(vm.status).toBe("connected");
    vm = reduce(vm, { kind: "close" });
    expect(vm.status).toBe("reconnecting");
    expect(statusLine(vm)).toBe("reconnecting");
  });

  it("error frames surface in lastError", () => {
    const vm = reduce(initialViewModel(), { kind: "error_frame", detail: "not critically damped" });
    expect(vm.lastError).toContain("not critically damped");
  });
});

describe("snapshot application", () => {
  it("stores the latest snapshot and extends trails", () => {
    let vm = initialViewModel();
    for (let k = 0; k < 5; k++) {
      vm = reduce(vm, { kind: "snapshot", snapshot: snapshot(k), nowMs: k * 33 });
    }
    expect(vm.snapshot?.tick).toBe(4);
    expect(vm.trails.get(0)?.length).toBe(5);
  });

  it("bounds trails to TRAIL_LENGTH", () => {
    let vm = initialViewModel();
    for (let k = 0; k < TRAIL_LENGTH + 40; k++) {
      vm = reduce(vm, { kind: "snapshot", snapshot: snapshot(k), nowMs: k });
    }
    expect(vm.trails.get(0)?.length).toBe(TRAIL_LENGTH);
  });

  it("follows the server topology (reload reconstructs from next snapshot)", () => {
    let vm = initialViewModel();
    vm = reduce(vm, { kind: "select_topology", topology: "ring" });
    const snap = snapshot(9, { topology: { ...snapshot(9).topology, kind: "tree" } });
    vm = reduce(vm, { kind: "snapshot", snapshot: snap, nowMs: 0 });
    expect(vm.selectedTopology).toBe("tree");
  });

  it("shows paused state in the status line", () => {
    let vm = reduce(initialViewModel(), { kind: "open" });
    vm = reduce(vm, { kind: "snapshot", snapshot: snapshot(7, { paused: true }), nowMs: 0 });
    expect(statusLine(vm)).toContain("paused");
  });
});

describe("pattern playback", () => {
  function withPattern(nowMs: number): ViewModel {
    const snap = snapshot(10, {
      active_pattern: "RR",
      events: [{ tick: 10, t: 0.1, type: "pattern_triggered", label: "RR", schedule: RR_SCHEDULE }],
    });
    return reduce(initialViewModel(), { kind: "snapshot", snapshot: snap, nowMs });
  }

  it("animates actuators in onset order 0 -> 1 -> 2", () => {
    const started = 1000;
    const vm = withPattern(started);
    expect(actuatorLevels(vm.activePattern, started + 50)).toEqual([1, 0, 0]);
    expect(actuatorLevels(vm.activePattern, started + 200)).toEqual([1, 1, 0]);
    expect(actuatorLevels(vm.activePattern, started + 350)).toEqual([0, 1, 1]);
    expect(actuatorLevels(vm.activePattern, started + 620)).toEqual([0, 0, 0]);
  });

  it("reports the frequency class for flash styling", () => {
    const vm = withPattern(0);
    expect(frequencyClass(vm.activePattern)).toBe("high");
    expect(frequencyClass(null)).toBe("none");
  });

  it("knows the schedule duration", () => {
    expect(scheduleDurationMs(RR_SCHEDULE)).toBe(600);
  });

  it("clears the pattern after it finishes", () => {
    let vm = withPattern(1000);
    const later = snapshot(40, { active_pattern: null });
    vm = reduce(vm, { kind: "snapshot", snapshot: later, nowMs: 1000 + 700 });
    expect(vm.activePattern).toBeNull();
  });
});

describe("offline send queue", () => {
  it("drops queued commands after 2 s", () => {
    const queue = [
      { command: { type: "pause" } as const, queuedAtMs: 0 },
      { command: { type: "resume" } as const, queuedAtMs: 1500 },
    ];
    const alive = expireQueue(queue, 2600);
    expect(alive.map((p) => p.command.type)).toEqual(["resume"]);
  });
});
