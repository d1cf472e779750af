// Mirrors docs/protocol.md. One JSON object per WebSocket text frame.

export type Vec3 = [number, number, number];

export type PhaseName = "idle" | "approach" | "attach" | "follow";
export type TopologyName = "star" | "ring" | "tree";

export interface DroneSnapshot {
  id: number;
  phase: PhaseName;
  position: Vec3;
  velocity: Vec3;
}

export interface ActuatorEvent {
  onset_ms: number;
  duration_ms: number;
  frequency_hz: number;
  amplitude: number;
}

export interface PatternSchedule {
  label: string;
  actuators: ActuatorEvent[][];
}

export interface SimEvent {
  tick: number;
  t: number;
  type: string;
  label?: string;
  schedule?: PatternSchedule;
  [key: string]: unknown;
}

export interface Snapshot {
  schema_version: number;
  tick: number;
  t: number;
  hand: { position: Vec3; velocity: Vec3 };
  drones: DroneSnapshot[];
  active_pattern: string | null;
  events: SimEvent[];
  topology: {
    kind: TopologyName;
    edges: Array<[number | "hand", number | "hand"]>;
    offsets: Vec3[];
  };
  paused: boolean;
  speed: number;
}

export interface ErrorFrame {
  error: string;
  detail: string;
}

export type Command =
  | { type: "set_hand_target"; x: number; y: number; z: number }
  | { type: "set_topology"; kind: TopologyName }
  | {
      type: "set_impedance";
      M: number;
      K: number;
      K_v: number;
      recompute_D: true;
    }
  | { type: "trigger_pattern"; label: string }
  | { type: "engage" }
  | { type: "disengage" }
  | { type: "pause" }
  | { type: "resume" }
  | { type: "set_speed"; factor: number };

export const PATTERN_LABELS = [
  "SF", "SB", "SR", "SL",
  "EF", "EB", "ER", "EL",
  "RF", "RB", "RR", "RL",
] as const;
