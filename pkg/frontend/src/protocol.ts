// ============================================================================
// PROTOCOL - the WebSocket message surface of the sensor service
// Text frames are JSON, one message each. Binary frames carry raw sensor
// bytes and never originate from this client. These shapes are a
// compatibility contract; parse defensively and drop what does not fit.
// ============================================================================

export interface Calibration {
  /** pixels emitted per turn unit */
  readonly m_pixels: number;
  /** key-hold seconds per meter of displacement */
  readonly k_seconds_per_meter: number;
}

export interface StateMessage {
  readonly type: "state";
  readonly t: number;
  readonly x: number;
  readonly y: number;
  readonly yaw: number;
}

export interface MouseEventMessage {
  readonly type: "event";
  readonly kind: "mouse-move";
  readonly t: number;
  readonly dx: number;
}

export interface KeyEventMessage {
  readonly type: "event";
  readonly kind: "key-hold";
  readonly t: number;
  readonly key: string;
  readonly duration: number;
}

export interface AckMessage {
  readonly type: "ack";
  readonly op: string;
  readonly calibration?: Calibration;
}

export interface MetricsMessage {
  readonly type: "metrics";
  readonly metrics: Record<string, unknown>;
  readonly calibration: Calibration;
}

export interface ErrorMessage {
  readonly type: "error";
  readonly reason: string;
}

export type HidEventMessage = MouseEventMessage | KeyEventMessage;

export type ServerMessage =
  | StateMessage
  | HidEventMessage
  | AckMessage
  | MetricsMessage
  | ErrorMessage;

function isFiniteNumber(v: unknown): v is number {
  return typeof v === "number" && Number.isFinite(v);
}

function isCalibration(v: unknown): v is Calibration {
  if (typeof v !== "object" || v === null) return false;
  const c = v as Record<string, unknown>;
  return isFiniteNumber(c.m_pixels) && isFiniteNumber(c.k_seconds_per_meter);
}

/** Parse one text frame; null for anything that is not a valid message. */
export function parseServerMessage(text: string): ServerMessage | null {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch {
    return null;
  }
  if (typeof raw !== "object" || raw === null) return null;
  const msg = raw as Record<string, unknown>;
  switch (msg.type) {
    case "state":
      if (
        isFiniteNumber(msg.t) &&
        isFiniteNumber(msg.x) &&
        isFiniteNumber(msg.y) &&
        isFiniteNumber(msg.yaw)
      ) {
        return { type: "state", t: msg.t, x: msg.x, y: msg.y, yaw: msg.yaw };
      }
      return null;
    case "event":
      if (msg.kind === "mouse-move" && isFiniteNumber(msg.t) && isFiniteNumber(msg.dx)) {
        return { type: "event", kind: "mouse-move", t: msg.t, dx: msg.dx };
      }
      if (
        msg.kind === "key-hold" &&
        isFiniteNumber(msg.t) &&
        typeof msg.key === "string" &&
        isFiniteNumber(msg.duration)
      ) {
        return {
          type: "event",
          kind: "key-hold",
          t: msg.t,
          key: msg.key,
          duration: msg.duration,
        };
      }
      return null;
    case "ack":
      if (typeof msg.op !== "string") return null;
      if (msg.calibration === undefined) return { type: "ack", op: msg.op };
      if (!isCalibration(msg.calibration)) return null;
      return { type: "ack", op: msg.op, calibration: msg.calibration };
    case "metrics":
      if (
        typeof msg.metrics === "object" &&
        msg.metrics !== null &&
        isCalibration(msg.calibration)
      ) {
        return {
          type: "metrics",
          metrics: msg.metrics as Record<string, unknown>,
          calibration: msg.calibration,
        };
      }
      return null;
    case "error":
      return typeof msg.reason === "string" ? { type: "error", reason: msg.reason } : null;
    default:
      return null;
  }
}

// ---- client to server ------------------------------------------------------

export function authMessage(token: string): string {
  return JSON.stringify({ type: "auth", token });
}

/** Either field may be omitted to keep the server's current value. */
export function setCalibrationMessage(edit: { m?: number; k?: number }): string {
  const msg: Record<string, unknown> = { type: "control", op: "set-calibration" };
  if (edit.m !== undefined) msg.m = edit.m;
  if (edit.k !== undefined) msg.k = edit.k;
  return JSON.stringify(msg);
}

export function injectTurnMessage(turnDeg: number): string {
  return JSON.stringify({ type: "control", op: "inject-motion", turn: turnDeg });
}

export function injectStepMessage(dxMeters: number, dyMeters: number): string {
  return JSON.stringify({ type: "control", op: "inject-motion", step: [dxMeters, dyMeters] });
}

export function resetMessage(): string {
  return JSON.stringify({ type: "control", op: "reset" });
}

export function getMetricsMessage(): string {
  return JSON.stringify({ type: "control", op: "get-metrics" });
}
