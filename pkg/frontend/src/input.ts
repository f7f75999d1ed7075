// ============================================================================
// OPERATOR INPUT - gestures to control messages
// ============================================================================
//
// drag of p pixels        -> inject-motion turn of p / pixelsPerDegree
// direction key held s    -> inject-motion step of speed * s meters
// calibration slider      -> set-calibration (held as pending until acked)
//
// Messages go through ViewStore.send, so input while disconnected lands
// in the visible outbox instead of being dropped.

import {
  injectStepMessage,
  injectTurnMessage,
  setCalibrationMessage,
} from "./protocol.js";
import type { ViewStore } from "./state.js";

export interface InputSettings {
  /** view sensitivity used to translate a drag into degrees */
  pixelsPerDegree: number;
  /** walking speed used to translate a key hold into meters */
  speedMps: number;
}

export type Direction = "forward" | "backward" | "left" | "right";

export class OperatorInput {
  private dragPx = 0;

  constructor(
    private readonly store: ViewStore,
    private readonly settings: InputSettings,
  ) {
    if (!(settings.pixelsPerDegree > 0)) throw new Error("pixelsPerDegree must be positive");
    if (!(settings.speedMps > 0)) throw new Error("speedMps must be positive");
  }

  /** Accumulate pointer movement while a drag gesture is in progress. */
  dragBy(px: number): void {
    this.dragPx += px;
  }

  /** Finish the gesture: the whole drag becomes exactly one turn message. */
  endDrag(): void {
    const px = this.dragPx;
    this.dragPx = 0;
    if (px === 0) return;
    this.store.send(injectTurnMessage(px / this.settings.pixelsPerDegree));
  }

  /** A direction key released after `seconds` of being held. */
  keyHeld(direction: Direction, seconds: number): void {
    if (!(seconds > 0)) return;
    const d = this.settings.speedMps * seconds;
    const step: Record<Direction, [number, number]> = {
      forward: [0, d],
      backward: [0, -d],
      right: [d, 0],
      left: [-d, 0],
    };
    const [dx, dy] = step[direction];
    this.store.send(injectStepMessage(dx, dy));
  }

  /** Commit the pixels-per-turn-unit slider. */
  sliderM(value: number): void {
    this.store.pendingCalibration = { ...this.store.pendingCalibration, m: value };
    this.store.send(setCalibrationMessage({ m: value }));
  }

  /** Commit the key-seconds-per-meter slider. */
  sliderK(value: number): void {
    this.store.pendingCalibration = { ...this.store.pendingCalibration, k: value };
    this.store.send(setCalibrationMessage({ k: value }));
  }
}
