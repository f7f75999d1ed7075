// ============================================================================
// VIEW STATE - everything the console knows, fed only by server messages
// ============================================================================
//
// Two rules shape this store:
//   * the rendered pose is always a snapshot the server sent, never an
//     interpolation or extrapolation; newer snapshots simply replace
//     older ones (latest wins, nothing is queued)
//   * calibration numbers on screen are the server's, not the sliders';
//     a slider edit is held as a visibly pending value until the server
//     acks it or echoes it back through metrics

import type {
  Calibration,
  HidEventMessage,
  ServerMessage,
} from "./protocol.js";

export interface Pose {
  readonly t: number;
  readonly x: number;
  readonly y: number;
  readonly yaw: number;
}

const TICKER_LIMIT = 20;
const TRAIL_LIMIT = 256;

export class ViewStore {
  /** newest server snapshot; the only pose render may draw */
  latest: Pose | null = null;
  /** recent snapshot positions, oldest first, for the motion trail */
  trail: Pose[] = [];
  /** last few HID events for the activity ticker, newest last */
  ticker: HidEventMessage[] = [];
  /** last metrics payload, verbatim */
  metrics: Record<string, unknown> | null = null;
  /** calibration as the server last confirmed it */
  ackedCalibration: Calibration | null = null;
  /** slider edits awaiting a server ack, shown marked in the panel */
  pendingCalibration: { m?: number; k?: number } = {};
  /** last error reason, for the status line */
  lastError: string | null = null;

  connected = false;
  /** control messages composed while disconnected; shown, then flushed */
  outbox: string[] = [];

  private transport: ((text: string) => void) | null = null;

  /** Wire up a live socket; flushes anything queued while offline. */
  attach(send: (text: string) => void): void {
    this.transport = send;
    this.connected = true;
    const queued = this.outbox.splice(0);
    for (const text of queued) send(text);
  }

  detach(): void {
    this.transport = null;
    this.connected = false;
  }

  /** Send a control message now, or queue it visibly while offline. */
  send(text: string): void {
    if (this.connected && this.transport) {
      this.transport(text);
    } else {
      this.outbox.push(text);
    }
  }

  apply(msg: ServerMessage): void {
    switch (msg.type) {
      case "state": {
        const pose: Pose = { t: msg.t, x: msg.x, y: msg.y, yaw: msg.yaw };
        this.latest = pose;
        this.trail.push(pose);
        if (this.trail.length > TRAIL_LIMIT) this.trail.shift();
        break;
      }
      case "event":
        this.ticker.push(msg);
        if (this.ticker.length > TICKER_LIMIT) this.ticker.shift();
        break;
      case "ack":
        if (msg.calibration) {
          this.ackedCalibration = msg.calibration;
          this.pendingCalibration = {};
        }
        break;
      case "metrics":
        this.metrics = msg.metrics;
        // the metrics echo is as authoritative as an ack
        this.ackedCalibration = msg.calibration;
        break;
      case "error":
        this.lastError = msg.reason;
        break;
    }
  }

  /** The calibration the panel shows: server truth only. */
  displayedCalibration(): Calibration | null {
    return this.ackedCalibration;
  }

  hasPendingEdits(): boolean {
    return (
      this.pendingCalibration.m !== undefined || this.pendingCalibration.k !== undefined
    );
  }
}
