import { describe, expect, it } from "vitest";

import { OperatorInput } from "../src/input.js";
import { ViewStore } from "../src/state.js";

function liveSetup(settings = { pixelsPerDegree: 1, speedMps: 1 }) {
  const store = new ViewStore();
  const wire: string[] = [];
  store.attach((text) => wire.push(text));
  return { store, wire, input: new OperatorInput(store, settings) };
}

describe("drag to turn", () => {
  it("a whole drag becomes exactly one turn message", () => {
    const { wire, input } = liveSetup();
    input.dragBy(40);
    input.dragBy(30);
    input.dragBy(20);
    input.endDrag();
    expect(wire.length).toBe(1);
    expect(JSON.parse(wire[0])).toEqual({ type: "control", op: "inject-motion", turn: 90 });
  });

  it("sensitivity divides pixels into degrees", () => {
    const { wire, input } = liveSetup({ pixelsPerDegree: 2, speedMps: 1 });
    input.dragBy(-90);
    input.endDrag();
    expect(JSON.parse(wire[0]).turn).toBe(-45);
  });

  it("a drag that went nowhere sends nothing", () => {
    const { wire, input } = liveSetup();
    input.dragBy(15);
    input.dragBy(-15);
    input.endDrag();
    expect(wire).toEqual([]);
  });

  it("ending a drag resets the accumulator", () => {
    const { wire, input } = liveSetup();
    input.dragBy(10);
    input.endDrag();
    input.dragBy(5);
    input.endDrag();
    expect(wire.map((w) => JSON.parse(w).turn)).toEqual([10, 5]);
  });
});

describe("direction keys to steps", () => {
  it("forward held 2 s at 1 m/s steps 2 m ahead", () => {
    const { wire, input } = liveSetup();
    input.keyHeld("forward", 2);
    expect(JSON.parse(wire[0])).toEqual({ type: "control", op: "inject-motion", step: [0, 2] });
  });

  it("each direction points the right way", () => {
    const { wire, input } = liveSetup({ pixelsPerDegree: 1, speedMps: 0.5 });
    input.keyHeld("backward", 1);
    input.keyHeld("left", 1);
    input.keyHeld("right", 1);
    expect(wire.map((w) => JSON.parse(w).step)).toEqual([
      [0, -0.5],
      [-0.5, 0],
      [0.5, 0],
    ]);
  });

  it("a zero-length hold sends nothing", () => {
    const { wire, input } = liveSetup();
    input.keyHeld("forward", 0);
    expect(wire).toEqual([]);
  });
});

describe("calibration sliders", () => {
  it("emit set-calibration and mark the edit pending", () => {
    const { store, wire, input } = liveSetup();
    input.sliderM(200);
    expect(JSON.parse(wire[0])).toEqual({ type: "control", op: "set-calibration", m: 200 });
    expect(store.hasPendingEdits()).toBe(true);
    input.sliderK(0.5);
    expect(JSON.parse(wire[1])).toEqual({ type: "control", op: "set-calibration", k: 0.5 });
  });
});

describe("disconnected input", () => {
  it("lands in the visible outbox instead of vanishing", () => {
    const store = new ViewStore();
    const input = new OperatorInput(store, { pixelsPerDegree: 1, speedMps: 1 });
    input.dragBy(30);
    input.endDrag();
    input.keyHeld("forward", 1);
    expect(store.outbox.length).toBe(2);

    const wire: string[] = [];
    store.attach((text) => wire.push(text));
    expect(wire.length).toBe(2);
  });
});

describe("settings validation", () => {
  it("rejects non-positive sensitivities", () => {
    const store = new ViewStore();
    expect(() => new OperatorInput(store, { pixelsPerDegree: 0, speedMps: 1 })).toThrow();
    expect(() => new OperatorInput(store, { pixelsPerDegree: 1, speedMps: -2 })).toThrow();
  });
});
