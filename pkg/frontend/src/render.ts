// Canvas drawing: two orthographic views plus the actuator widget.

import { worldToScreen, type Viewport } from "./coords.js";
import { actuatorLevels, frequencyClass, type ViewModel } from "./state.js";
import type { Snapshot, Vec3 } from "./types.js";

const PHASE_COLORS: Record<string, string> = {
  idle: "#8a8a8a",
  approach: "#d9a404",
  attach: "#27a0c9",
  follow: "#2fae4a",
};

const HAND_COLOR = "#e4572e";
const EDGE_COLOR = "rgba(120, 140, 170, 0.8)";
const TRAIL_COLOR = "rgba(47, 174, 74, 0.25)";

export function viewportFor(canvas: HTMLCanvasElement, axes: "xy" | "xz", snap: Snapshot | null): Viewport {
  const center: Vec3 = snap ? [...snap.hand.position] : [0, 0, 1];
  if (axes === "xz") center[1] = 0;
  return {
    widthPx: canvas.width,
    heightPx: canvas.height,
    center,
    pxPerMeter: Math.min(canvas.width, canvas.height) / 3.0, // ~3 m across
    axes,
  };
}

export function renderView(canvas: HTMLCanvasElement, axes: "xy" | "xz", vm: ViewModel): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  drawFrameDecor(ctx, canvas, axes);
  const snap = vm.snapshot;
  if (!snap) return;
  const vp = viewportFor(canvas, axes, snap);

  // trails first, underneath everything
  ctx.strokeStyle = TRAIL_COLOR;
  ctx.lineWidth = 1;
  for (const trail of vm.trails.values()) {
    ctx.beginPath();
    trail.forEach((p, i) => {
      const [x, y] = worldToScreen(vp, p);
      if (i === 0) ctx.moveTo(x, y);
      else ctx.lineTo(x, y);
    });
    ctx.stroke();
  }

  // link edges per the server-declared wiring
  const positionOf = (node: number | "hand"): Vec3 =>
    node === "hand"
      ? snap.hand.position
      : snap.drones.find((d) => d.id === node)?.position ?? snap.hand.position;
  ctx.strokeStyle = EDGE_COLOR;
  ctx.lineWidth = 1.5;
  for (const [a, b] of snap.topology.edges) {
    const [x1, y1] = worldToScreen(vp, positionOf(a));
    const [x2, y2] = worldToScreen(vp, positionOf(b));
    ctx.beginPath();
    ctx.moveTo(x1, y1);
    ctx.lineTo(x2, y2);
    ctx.stroke();
  }

  // hand marker
  const [hx, hy] = worldToScreen(vp, snap.hand.position);
  ctx.fillStyle = HAND_COLOR;
  ctx.beginPath();
  ctx.arc(hx, hy, 7, 0, 2 * Math.PI);
  ctx.fill();
  ctx.fillStyle = "#333";
  ctx.font = "11px sans-serif";
  ctx.fillText("hand", hx + 9, hy - 6);

  // drones, phase-coded
  for (const d of snap.drones) {
    const [x, y] = worldToScreen(vp, d.position);
    ctx.fillStyle = PHASE_COLORS[d.phase] ?? "#000";
    ctx.beginPath();
    ctx.arc(x, y, 6, 0, 2 * Math.PI);
    ctx.fill();
    ctx.fillStyle = "#333";
    ctx.fillText(String(d.id), x + 8, y + 4);
  }
}

function drawFrameDecor(ctx: CanvasRenderingContext2D, canvas: HTMLCanvasElement, axes: "xy" | "xz"): void {
  ctx.strokeStyle = "#e3e3e3";
  ctx.strokeRect(0.5, 0.5, canvas.width - 1, canvas.height - 1);
  ctx.fillStyle = "#999";
  ctx.font = "11px sans-serif";
  ctx.fillText(axes === "xy" ? "top view (x right, y up)" : "side view (x right, z up)", 8, 14);
}

export function renderActuators(container: HTMLElement, vm: ViewModel, nowMs: number): void {
  const levels = actuatorLevels(vm.activePattern, nowMs);
  const cls = frequencyClass(vm.activePattern);
  const dots = container.querySelectorAll<HTMLElement>(".actuator");
  dots.forEach((dot, i) => {
    const level = levels[i] ?? 0;
    dot.style.opacity = String(0.15 + 0.85 * level);
    dot.dataset.freq = cls;
  });
  const label = container.querySelector<HTMLElement>(".active-label");
  if (label) {
    label.textContent = vm.activePattern ? vm.activePattern.schedule.label : "-";
  }
}
