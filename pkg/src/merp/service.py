"""WebSocket service exposing the pipeline to interactive clients.

One process hosts one room and one avatar.  Clients connect to ``/ws``
and speak JSON text messages; raw sensor bytes travel as binary
messages.  Events are forwarded losslessly in merge order; pose
snapshots are collapsed to the latest one per processed batch, so a
slow client sees a current pose rather than a growing backlog.

Client to server:
    {"type": "auth", "token": "..."}                      first message when a token is configured
    {"type": "control", "op": "set-calibration", "m": 120.0, "k": 0.8}
    {"type": "control", "op": "inject-motion", "turn": 90.0}
    {"type": "control", "op": "inject-motion", "step": [0.0, 2.0]}
    {"type": "control", "op": "reset"}
    {"type": "control", "op": "get-metrics"}
    binary frame                                           raw sensor wire bytes

Server to client:
    {"type": "ack", "op": "...", "calibration": {...}}
    {"type": "event", "t": ..., "kind": "mouse-move", "dx": ...}
    {"type": "event", "t": ..., "kind": "key-hold", "key": "w", "duration": ...}
    {"type": "state", "t": ..., "x": ..., "y": ..., "yaw": ...}
    {"type": "metrics", "metrics": {...}, "calibration": {...}}
    {"type": "error", "reason": "..."}
"""

from __future__ import annotations

import asyncio
import contextlib
import json
import time

from starlette.applications import Starlette
from starlette.routing import WebSocketRoute
from starlette.websockets import WebSocket, WebSocketDisconnect

from .config import Settings
from .hid import event_record
from .pipeline import PipelineResult, Snapshot

AUTH_CLOSE_CODE = 4401


def _state_msg(snap: Snapshot) -> dict:
    return {"type": "state", "t": snap.t, "x": snap.x, "y": snap.y, "yaw": snap.heading_deg}


class SensorService:
    """Shared pipeline plus the set of connected clients.

    With a ``source`` the service also ingests sensor bytes from that
    path (a serial device node or a capture file) in the background; a
    device paces itself by arrival, a file is drained and then flushed.
    """

    def __init__(self, settings: Settings | None = None, *, source: str | None = None) -> None:
        self.settings = settings if settings is not None else Settings()
        self.pipeline = self.settings.pipeline()
        self.source = source
        self._clients: set[WebSocket] = set()
        self._source_task: asyncio.Task | None = None

    def app(self) -> Starlette:
        return Starlette(
            routes=[WebSocketRoute("/ws", self._endpoint)],
            lifespan=self._lifespan,
        )

    @contextlib.asynccontextmanager
    async def _lifespan(self, app: Starlette):
        if self.source is not None:
            self._source_task = asyncio.create_task(self._pump_source())
        try:
            yield
        finally:
            if self._source_task is not None:
                self._source_task.cancel()
                try:
                    await self._source_task
                except asyncio.CancelledError:
                    pass
                self._source_task = None

    async def _pump_source(self) -> None:
        assert self.source is not None
        loop = asyncio.get_running_loop()
        fh = await loop.run_in_executor(None, lambda: open(self.source, "rb"))
        try:
            while True:
                chunk = await loop.run_in_executor(None, fh.read, 4096)
                if not chunk:
                    break
                await self._on_bytes(chunk)
        finally:
            await loop.run_in_executor(None, fh.close)
        await self._broadcast_result(self.pipeline.finish())

    async def _endpoint(self, ws: WebSocket) -> None:
        await ws.accept()
        if not await self._authenticate(ws):
            return
        self._clients.add(ws)
        try:
            while True:
                message = await ws.receive()
                if message["type"] == "websocket.disconnect":
                    break
                if message.get("bytes") is not None:
                    await self._on_bytes(message["bytes"])
                elif message.get("text") is not None:
                    await self._on_text(ws, message["text"])
        except WebSocketDisconnect:
            pass
        finally:
            self._clients.discard(ws)

    async def _authenticate(self, ws: WebSocket) -> bool:
        if not self.settings.auth_token:
            return True
        try:
            first = await ws.receive_text()
            msg = json.loads(first)
        except (WebSocketDisconnect, json.JSONDecodeError):
            await ws.close(code=AUTH_CLOSE_CODE)
            return False
        if msg.get("type") != "auth" or msg.get("token") != self.settings.auth_token:
            await ws.send_json({"type": "error", "reason": "authentication failed"})
            await ws.close(code=AUTH_CLOSE_CODE)
            return False
        await ws.send_json({"type": "ack", "op": "auth"})
        return True

    async def _on_bytes(self, data: bytes) -> None:
        before = time.perf_counter_ns()
        result = self.pipeline.feed_bytes(data)
        self.pipeline.metrics.observe_latency((time.perf_counter_ns() - before) / 1_000.0)
        await self._broadcast_result(result)

    async def _on_text(self, ws: WebSocket, text: str) -> None:
        try:
            msg = json.loads(text)
        except json.JSONDecodeError:
            await ws.send_json({"type": "error", "reason": "malformed JSON"})
            return
        if msg.get("type") == "auth":
            # token already checked (or not required); idempotent ack
            await ws.send_json({"type": "ack", "op": "auth"})
            return
        if msg.get("type") != "control":
            await ws.send_json({"type": "error", "reason": "unknown message type"})
            return
        await self._on_control(ws, msg)

    async def _on_control(self, ws: WebSocket, msg: dict) -> None:
        op = msg.get("op")
        if op == "set-calibration":
            try:
                calibration = self.pipeline.set_calibration(
                    m_pixels=msg.get("m"), k_seconds_per_meter=msg.get("k")
                )
            except ValueError as exc:
                await ws.send_json({"type": "error", "reason": str(exc)})
                return
            await ws.send_json(
                {"type": "ack", "op": op, "calibration": calibration}
            )
        elif op == "inject-motion":
            try:
                if "turn" in msg:
                    result = self.pipeline.inject_turn(float(msg["turn"]))
                elif "step" in msg:
                    dx, dy = msg["step"]
                    result = self.pipeline.inject_step(float(dx), float(dy))
                else:
                    await ws.send_json(
                        {"type": "error", "reason": "inject-motion needs turn or step"}
                    )
                    return
            except (ValueError, TypeError) as exc:
                await ws.send_json({"type": "error", "reason": str(exc)})
                return
            await ws.send_json({"type": "ack", "op": op})
            await self._broadcast_result(result)
        elif op == "reset":
            self.pipeline.reset()
            await ws.send_json({"type": "ack", "op": op})
            await self._broadcast(_state_msg(self._current_snapshot()))
        elif op == "get-metrics":
            await ws.send_json(
                {
                    "type": "metrics",
                    "metrics": self.pipeline.metrics.as_dict(),
                    "calibration": self.pipeline.calibration(),
                }
            )
        else:
            await ws.send_json({"type": "error", "reason": f"unknown op {op!r}"})

    def _current_snapshot(self) -> Snapshot:
        state = self.pipeline.state()
        return Snapshot(
            t=self.pipeline.last_sample_time,
            x=state.x,
            y=state.y,
            heading_deg=state.heading_deg,
        )

    async def _broadcast_result(self, result: PipelineResult) -> None:
        for event in result.events:
            await self._broadcast({"type": "event", **event_record(event)})
        # latest-wins: only the newest pose matters to a viewer
        if result.snapshots:
            await self._broadcast(_state_msg(result.snapshots[-1]))

    async def _broadcast(self, msg: dict) -> None:
        dead: list[WebSocket] = []
        for client in self._clients:
            try:
                await client.send_json(msg)
            except (WebSocketDisconnect, RuntimeError):
                dead.append(client)
        for client in dead:
            self._clients.discard(client)


def create_app(settings: Settings | None = None, *, source: str | None = None) -> Starlette:
    """App factory; each call makes an independent room."""
    return SensorService(settings, source=source).app()
