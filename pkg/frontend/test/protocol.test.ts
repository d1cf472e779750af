import { describe, expect, it } from "vitest";

import {
  encodeCommand,
  handTarget,
  isErrorFrame,
  isSnapshot,
  parseFrame,
  recomputedDamping,
  setImpedance,
  setTopology,
  triggerPattern,
} from "../src/protocol.js";

const SNAPSHOT = {
  schema_version: 1,
  tick: 12,
  t: 0.12,
  hand: { position: [0, 0, 1], velocity: [0, 0, 0] },
  drones: [
    { id: 0, phase: "follow", position: [0.3, 0, 1.4], velocity: [0, 0, 0] },
  ],
  active_pattern: null,
  events: [],
  topology: { kind: "star", edges: [["hand", 0]], offsets: [[0.3, 0, 0.4]] },
  paused: false,
  speed: 1,
};

describe("frame parsing", () => {
  it("accepts a well-formed snapshot", () => {
    const frame = parseFrame(JSON.stringify(SNAPSHOT));
    expect(frame && isSnapshot(frame)).toBe(true);
  });

  it("accepts an error frame", () => {
    const frame = parseFrame(JSON.stringify({ error: "invalid_command", detail: "nope" }));
    expect(frame && isErrorFrame(frame)).toBe(true);
  });

  it("rejects garbage and wrong schema versions", () => {
    expect(parseFrame("{oops")).toBeNull();
    expect(parseFrame("42")).toBeNull();
    expect(parseFrame(JSON.stringify({ ...SNAPSHOT, schema_version: 2 }))).toBeNull();
  });
});

describe("commands", () => {
  it("builds hand targets from world coordinates", () => {
    expect(handTarget([0.5, -0.2, 1.1])).toEqual({
      type: "set_hand_target",
      x: 0.5,
      y: -0.2,
      z: 1.1,
    });
  });

  it("topology selection maps directly to the wire kind", () => {
    expect(setTopology("tree")).toEqual({ type: "set_topology", kind: "tree" });
  });

  it("slider changes always request recomputed damping", () => {
    const cmd = setImpedance(1.9, 20.88, 3.0);
    expect(cmd).toEqual({
      type: "set_impedance",
      M: 1.9,
      K: 20.88,
      K_v: 3.0,
      recompute_D: true,
    });
  });

  it("shows the critically damped D for the current sliders", () => {
    expect(recomputedDamping(1, 1)).toBe(2);
    expect(recomputedDamping(1.9, 20.88)).toBeCloseTo(12.597, 3);
  });

  it("pattern triggers carry the two-letter label", () => {
    expect(triggerPattern("RR")).toEqual({ type: "trigger_pattern", label: "RR" });
  });

  it("encodes to single-object JSON frames", () => {
    expect(JSON.parse(encodeCommand({ type: "pause" }))).toEqual({ type: "pause" });
  });
});
