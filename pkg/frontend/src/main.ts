// Browser entry: wires the store, input mapping and renderer to a real
// WebSocket and canvas. Messages are parked in a queue as they arrive
// and applied between frames, so the render path never sees state
// mutate mid-frame.

import { OperatorInput } from "./input.js";
import { authMessage, getMetricsMessage, parseServerMessage } from "./protocol.js";
import type { ServerMessage } from "./protocol.js";
import { renderRoom } from "./render.js";
import type { Style, Surface } from "./render.js";
import { ViewStore } from "./state.js";

const ROOM = { widthMeters: 10, heightMeters: 10 };

class CanvasSurface implements Surface {
  constructor(private readonly ctx: CanvasRenderingContext2D) {}

  get width(): number {
    return this.ctx.canvas.width;
  }
  get height(): number {
    return this.ctx.canvas.height;
  }
  clear(): void {
    this.ctx.fillStyle = "#14171c";
    this.ctx.fillRect(0, 0, this.width, this.height);
  }
  rect(x: number, y: number, w: number, h: number, style: Style): void {
    this.ctx.strokeStyle = style.color;
    this.ctx.lineWidth = style.width ?? 1;
    this.ctx.strokeRect(x, y, w, h);
  }
  line(x1: number, y1: number, x2: number, y2: number, style: Style): void {
    this.ctx.strokeStyle = style.color;
    this.ctx.lineWidth = style.width ?? 1;
    this.ctx.beginPath();
    this.ctx.moveTo(x1, y1);
    this.ctx.lineTo(x2, y2);
    this.ctx.stroke();
  }
  circle(x: number, y: number, r: number, style: Style): void {
    this.ctx.fillStyle = style.color;
    this.ctx.beginPath();
    this.ctx.arc(x, y, r, 0, 2 * Math.PI);
    this.ctx.fill();
  }
  polyline(points: Array<readonly [number, number]>, style: Style): void {
    if (points.length < 2) return;
    this.ctx.strokeStyle = style.color;
    this.ctx.lineWidth = style.width ?? 1;
    this.ctx.beginPath();
    this.ctx.moveTo(points[0][0], points[0][1]);
    for (const [x, y] of points.slice(1)) this.ctx.lineTo(x, y);
    this.ctx.stroke();
  }
  text(s: string, x: number, y: number, style: Style): void {
    this.ctx.fillStyle = style.color;
    this.ctx.font = "12px system-ui, sans-serif";
    this.ctx.fillText(s, x, y);
  }
}

function main(): void {
  const canvas = document.getElementById("room") as HTMLCanvasElement;
  const surface = new CanvasSurface(canvas.getContext("2d")!);
  const store = new ViewStore();
  const input = new OperatorInput(store, { pixelsPerDegree: 2, speedMps: 1 });
  const inbox: ServerMessage[] = [];

  function connect(): void {
    // ?server=host:port points the page at a pipeline served elsewhere,
    // e.g. when this page comes from a static dev server
    const server = new URLSearchParams(location.search).get("server") ?? location.host;
    const socket = new WebSocket(`ws://${server}/ws`);
    socket.addEventListener("open", () => {
      store.attach((text) => socket.send(text));
      const token = new URLSearchParams(location.search).get("token");
      if (token) socket.send(authMessage(token));
      socket.send(getMetricsMessage());
    });
    socket.addEventListener("message", (event) => {
      if (typeof event.data !== "string") return;
      const msg = parseServerMessage(event.data);
      if (msg) inbox.push(msg);
    });
    socket.addEventListener("close", () => {
      store.detach();
      setTimeout(connect, 1000);
    });
  }

  // drag to turn
  let dragging = false;
  let lastX = 0;
  canvas.addEventListener("pointerdown", (e) => {
    dragging = true;
    lastX = e.clientX;
  });
  canvas.addEventListener("pointermove", (e) => {
    if (!dragging) return;
    input.dragBy(e.clientX - lastX);
    lastX = e.clientX;
  });
  addEventListener("pointerup", () => {
    if (!dragging) return;
    dragging = false;
    input.endDrag();
  });

  // direction keys to steps, measured by hold time
  const KEYMAP: Record<string, "forward" | "backward" | "left" | "right"> = {
    w: "forward",
    s: "backward",
    a: "left",
    d: "right",
  };
  const downAt = new Map<string, number>();
  addEventListener("keydown", (e) => {
    if (e.key in KEYMAP && !downAt.has(e.key)) downAt.set(e.key, performance.now());
  });
  addEventListener("keyup", (e) => {
    const start = downAt.get(e.key);
    if (start === undefined) return;
    downAt.delete(e.key);
    input.keyHeld(KEYMAP[e.key], (performance.now() - start) / 1000);
  });

  // calibration sliders commit on release
  const mSlider = document.getElementById("m-slider") as HTMLInputElement | null;
  const kSlider = document.getElementById("k-slider") as HTMLInputElement | null;
  mSlider?.addEventListener("change", () => input.sliderM(Number(mSlider.value)));
  kSlider?.addEventListener("change", () => input.sliderK(Number(kSlider.value)));

  function frame(): void {
    for (const msg of inbox.splice(0)) store.apply(msg);
    renderRoom(store, surface, ROOM);
    requestAnimationFrame(frame);
  }
  connect();
  requestAnimationFrame(frame);
}

addEventListener("load", main);
