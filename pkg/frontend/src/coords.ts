// World <-> screen transforms for the two orthographic canvases.
// Top-down view maps world XY, side view maps world XZ. +x is screen-right in
// both; +y (top view) and +z (side view) are screen-up.

import type { Vec3 } from "./types.js";

export type ViewAxes = "xy" | "xz";

export interface Viewport {
  widthPx: number;
  heightPx: number;
  center: Vec3; // world point drawn at the canvas centre
  pxPerMeter: number;
  axes: ViewAxes;
}

function planar(v: Vec3, axes: ViewAxes): [number, number] {
  return axes === "xy" ? [v[0], v[1]] : [v[0], v[2]];
}

export function worldToScreen(vp: Viewport, world: Vec3): [number, number] {
  const [wx, wu] = planar(world, vp.axes);
  const [cx, cu] = planar(vp.center, vp.axes);
  return [
    vp.widthPx / 2 + (wx - cx) * vp.pxPerMeter,
    vp.heightPx / 2 - (wu - cu) * vp.pxPerMeter,
  ];
}

// `reference` supplies the out-of-plane coordinate the 2D view cannot see
export function screenToWorld(vp: Viewport, px: number, py: number, reference: Vec3): Vec3 {
  const [cx, cu] = planar(vp.center, vp.axes);
  const wx = cx + (px - vp.widthPx / 2) / vp.pxPerMeter;
  const wu = cu - (py - vp.heightPx / 2) / vp.pxPerMeter;
  if (vp.axes === "xy") return [wx, wu, reference[2]];
  return [wx, reference[1], wu];
}
