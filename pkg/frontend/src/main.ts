// Entry point: wires the connection, reducer, controls and render loop.

import { screenToWorld } from "./coords.js";
import {
  handTarget,
  recomputedDamping,
  setImpedance,
  setTopology,
  triggerPattern,
} from "./protocol.js";
import { renderActuators, renderView, viewportFor } from "./render.js";
import { initialViewModel, reduce, statusLine, type UiEvent } from "./state.js";
import { Connection } from "./ws.js";
import { PATTERN_LABELS, type TopologyName, type Vec3 } from "./types.js";

const DRAG_SEND_HZ = 30;

let vm = initialViewModel();

function dispatch(ev: UiEvent): void {
  vm = reduce(vm, ev);
}

const wsUrl = `${location.protocol === "https:" ? "wss" : "ws"}://${location.host}/ws`;
const connection = new Connection(wsUrl, {
  onOpen: () => dispatch({ kind: "open" }),
  onClose: () => dispatch({ kind: "close" }),
  onSnapshot: (snapshot) => dispatch({ kind: "snapshot", snapshot, nowMs: Date.now() }),
  onErrorFrame: (frame) => dispatch({ kind: "error_frame", detail: frame.detail }),
});

// --- canvases and hand dragging -------------------------------------------------

const topCanvas = document.getElementById("top-view") as HTMLCanvasElement;
const sideCanvas = document.getElementById("side-view") as HTMLCanvasElement;

let lastDragSent = 0;

function bindDrag(canvas: HTMLCanvasElement, axes: "xy" | "xz"): void {
  let dragging = false;
  const sendTarget = (ev: PointerEvent) => {
    const now = performance.now();
    if (now - lastDragSent < 1000 / DRAG_SEND_HZ) return;
    lastDragSent = now;
    const rect = canvas.getBoundingClientRect();
    const px = ((ev.clientX - rect.left) / rect.width) * canvas.width;
    const py = ((ev.clientY - rect.top) / rect.height) * canvas.height;
    const ref: Vec3 = vm.snapshot ? vm.snapshot.hand.position : [0, 0, 1];
    const vp = viewportFor(canvas, axes, vm.snapshot);
    connection.send(handTarget(screenToWorld(vp, px, py, ref)));
  };
  canvas.addEventListener("pointerdown", (ev) => {
    dragging = true;
    canvas.setPointerCapture(ev.pointerId);
    sendTarget(ev);
  });
  canvas.addEventListener("pointermove", (ev) => {
    if (dragging) sendTarget(ev);
  });
  const stop = () => (dragging = false);
  canvas.addEventListener("pointerup", stop);
  canvas.addEventListener("pointercancel", stop);
}

bindDrag(topCanvas, "xy");
bindDrag(sideCanvas, "xz");

// --- control panel ---------------------------------------------------------------

const topologySelect = document.getElementById("topology") as HTMLSelectElement;
topologySelect.addEventListener("change", () => {
  const kind = topologySelect.value as TopologyName;
  dispatch({ kind: "select_topology", topology: kind });
  connection.send(setTopology(kind));
});

const sliderIds = ["M", "K", "K_v"] as const;
const dampingLabel = document.getElementById("damping-value") as HTMLElement;

function sendImpedance(): void {
  const { M, K, K_v } = vm.sliders;
  connection.send(setImpedance(M, K, K_v));
}

for (const field of sliderIds) {
  const input = document.getElementById(`slider-${field}`) as HTMLInputElement;
  const label = document.getElementById(`value-${field}`) as HTMLElement;
  const refresh = () => {
    const value = parseFloat(input.value);
    dispatch({ kind: "slider", field, value });
    label.textContent = value.toFixed(2);
    dampingLabel.textContent = recomputedDamping(vm.sliders.M, vm.sliders.K).toFixed(2);
  };
  input.addEventListener("input", refresh);
  input.addEventListener("change", () => {
    refresh();
    sendImpedance();
  });
  refresh();
}

const patternSelect = document.getElementById("pattern") as HTMLSelectElement;
for (const label of PATTERN_LABELS) {
  const option = document.createElement("option");
  option.value = label;
  option.textContent = label;
  patternSelect.appendChild(option);
}
patternSelect.value = "RR";
patternSelect.addEventListener("change", () =>
  dispatch({ kind: "select_pattern", label: patternSelect.value }),
);

(document.getElementById("trigger-pattern") as HTMLButtonElement).addEventListener(
  "click",
  () => connection.send(triggerPattern(vm.selectedPattern)),
);

for (const [id, type] of [
  ["engage", "engage"],
  ["disengage", "disengage"],
  ["pause", "pause"],
  ["resume", "resume"],
] as const) {
  (document.getElementById(id) as HTMLButtonElement).addEventListener("click", () =>
    connection.send({ type }),
  );
}

const speedInput = document.getElementById("speed") as HTMLInputElement;
speedInput.addEventListener("change", () =>
  connection.send({ type: "set_speed", factor: parseFloat(speedInput.value) }),
);

// --- render loop -------------------------------------------------------------------

const statusEl = document.getElementById("status") as HTMLElement;
const bannerEl = document.getElementById("banner") as HTMLElement;
const actuatorsEl = document.getElementById("actuators") as HTMLElement;
const logEl = document.getElementById("event-log") as HTMLElement;

function frame(): void {
  renderView(topCanvas, "xy", vm);
  renderView(sideCanvas, "xz", vm);
  renderActuators(actuatorsEl, vm, Date.now());
  statusEl.textContent = statusLine(vm);
  bannerEl.hidden = vm.status === "connected";
  if (vm.lastError) {
    statusEl.textContent += ` | ${vm.lastError}`;
  }
  const tail = vm.log.slice(-12);
  logEl.textContent = tail.join("\n");
  requestAnimationFrame(frame);
}

requestAnimationFrame(frame);
