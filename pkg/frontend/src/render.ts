// ============================================================================
// RENDER - top-down room, avatar, trail, compass ribbon, panels
// ============================================================================
//
// Drawing goes through the small Surface interface so tests can record
// every call; the browser build wraps a CanvasRenderingContext2D in the
// same interface. renderRoom returns the pose it drew (null when it
// drew none), which is the hook the no-extrapolation check hangs off.

import type { Pose, ViewStore } from "./state.js";

export interface Style {
  readonly color: string;
  readonly width?: number;
}

export interface Surface {
  readonly width: number;
  readonly height: number;
  clear(): void;
  rect(x: number, y: number, w: number, h: number, style: Style): void;
  line(x1: number, y1: number, x2: number, y2: number, style: Style): void;
  circle(x: number, y: number, r: number, style: Style): void;
  polyline(points: Array<readonly [number, number]>, style: Style): void;
  text(s: string, x: number, y: number, style: Style): void;
}

export interface RoomSize {
  readonly widthMeters: number;
  readonly heightMeters: number;
}

const ROOM_STYLE: Style = { color: "#39424e", width: 2 };
const TRAIL_STYLE: Style = { color: "#3d7dd8", width: 2 };
const AVATAR_STYLE: Style = { color: "#e8eaed" };
const ARROW_STYLE: Style = { color: "#f2b134", width: 3 };
const RIBBON_STYLE: Style = { color: "#8a919c", width: 1 };
const TEXT_STYLE: Style = { color: "#c6cad1" };
const BANNER_STYLE: Style = { color: "#e05252" };
const PENDING_STYLE: Style = { color: "#f2b134" };

const ARROW_LEN_PX = 18;
const AVATAR_RADIUS_PX = 6;
const RIBBON_Y_PX = 16;
const RIBBON_PX_PER_DEG = 2;

function signedDelta(deg: number): number {
  const d = ((deg + 180) % 360 + 360) % 360 - 180;
  return d === -180 ? 180 : d;
}

/** World meters to canvas pixels; world +y is up, canvas +y is down. */
export function worldToCanvas(
  pose: { x: number; y: number },
  surface: { width: number; height: number },
  room: RoomSize,
): [number, number] {
  const scale =
    0.9 * Math.min(surface.width / room.widthMeters, surface.height / room.heightMeters);
  return [surface.width / 2 + pose.x * scale, surface.height / 2 - pose.y * scale];
}

/** Draw one frame. Returns the server snapshot that was drawn, if any. */
export function renderRoom(view: ViewStore, surface: Surface, room: RoomSize): Pose | null {
  surface.clear();

  const [x0, y0] = worldToCanvas({ x: -room.widthMeters / 2, y: room.heightMeters / 2 }, surface, room);
  const [x1, y1] = worldToCanvas({ x: room.widthMeters / 2, y: -room.heightMeters / 2 }, surface, room);
  surface.rect(x0, y0, x1 - x0, y1 - y0, ROOM_STYLE);

  if (!view.connected) {
    // no live data: banner instead of a stale avatar
    const queued = view.outbox.length;
    surface.text(
      queued > 0 ? `disconnected - reconnecting (${queued} queued)` : "disconnected - reconnecting",
      surface.width / 2,
      surface.height / 2,
      BANNER_STYLE,
    );
    return null;
  }

  if (view.trail.length >= 2) {
    surface.polyline(
      view.trail.map((p) => worldToCanvas(p, surface, room)),
      TRAIL_STYLE,
    );
  }

  const pose = view.latest;
  if (pose === null) return null;

  const [cx, cy] = worldToCanvas(pose, surface, room);
  surface.circle(cx, cy, AVATAR_RADIUS_PX, AVATAR_STYLE);
  const yawRad = (pose.yaw * Math.PI) / 180;
  surface.line(
    cx,
    cy,
    cx + ARROW_LEN_PX * Math.sin(yawRad),
    cy - ARROW_LEN_PX * Math.cos(yawRad),
    ARROW_STYLE,
  );

  // first-person strip: cardinal marks slide as the avatar turns
  surface.line(0, RIBBON_Y_PX, surface.width, RIBBON_Y_PX, RIBBON_STYLE);
  const cardinals: Array<[string, number]> = [["N", 0], ["E", 90], ["S", 180], ["W", 270]];
  for (const [label, deg] of cardinals) {
    const offset = signedDelta(deg - pose.yaw) * RIBBON_PX_PER_DEG;
    const px = surface.width / 2 + offset;
    if (px >= 0 && px <= surface.width) {
      surface.text(label, px, RIBBON_Y_PX - 4, TEXT_STYLE);
    }
  }

  // panels: calibration (server truth, pending edits marked), activity
  const calib = view.displayedCalibration();
  if (calib !== null) {
    surface.text(
      `M ${calib.m_pixels}  K ${calib.k_seconds_per_meter}`,
      8,
      surface.height - 24,
      TEXT_STYLE,
    );
  }
  if (view.hasPendingEdits()) {
    surface.text("pending...", 8, surface.height - 12, PENDING_STYLE);
  }
  const latest = view.ticker[view.ticker.length - 1];
  if (latest !== undefined) {
    const blurb =
      latest.kind === "mouse-move"
        ? `mouse ${latest.dx > 0 ? "+" : ""}${latest.dx} px`
        : `key ${latest.key} ${latest.duration.toFixed(3)} s`;
    surface.text(blurb, 8, 32, TEXT_STYLE);
  }
  if (view.lastError !== null) {
    surface.text(view.lastError, 8, 44, BANNER_STYLE);
  }
  return pose;
}
