// Frame parsing and command construction. Pure functions, unit-tested.

import type { Command, ErrorFrame, Snapshot, TopologyName, Vec3 } from "./types.js";

export function parseFrame(text: string): Snapshot | ErrorFrame | null {
  let msg: unknown;
  try {
    msg = JSON.parse(text);
  } catch {
    return null;
  }
  if (typeof msg !== "object" || msg === null) return null;
  if (isSnapshot(msg)) return msg;
  if (isErrorFrame(msg)) return msg;
  return null;
}

export function isSnapshot(msg: object): msg is Snapshot {
  const m = msg as Partial<Snapshot>;
  return (
    m.schema_version === 1 &&
    typeof m.tick === "number" &&
    typeof m.t === "number" &&
    Array.isArray(m.drones) &&
    m.hand !== undefined &&
    m.topology !== undefined
  );
}

export function isErrorFrame(msg: object): msg is ErrorFrame {
  const m = msg as Partial<ErrorFrame>;
  return typeof m.error === "string" && typeof m.detail === "string";
}

export function handTarget(pos: Vec3): Command {
  return { type: "set_hand_target", x: pos[0], y: pos[1], z: pos[2] };
}

export function setTopology(kind: TopologyName): Command {
  return { type: "set_topology", kind };
}

// sliders expose (M, K, K_v); the server recomputes D for critical damping
export function setImpedance(M: number, K: number, K_v: number): Command {
  return { type: "set_impedance", M, K, K_v, recompute_D: true };
}

export function recomputedDamping(M: number, K: number): number {
  return 2 * Math.sqrt(M * K);
}

export function triggerPattern(label: string): Command {
  return { type: "trigger_pattern", label };
}

export function encodeCommand(cmd: Command): string {
  return JSON.stringify(cmd);
}
