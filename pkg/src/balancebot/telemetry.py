"""Live telemetry: streams state frames to cockpit clients over WebSocket
and accepts reference/gain/pause/resume/reset commands back.

The simulation advances on one asyncio task, paced to wall clock by absolute
deadlines (drift-corrected). Connection handling is concurrent; the only
crossing points are a command mailbox drained at tick boundaries and a
bounded per-client frame queue (frames to a congested client are dropped,
the loop never blocks on a slow reader).
"""

import asyncio
import json
from collections import deque
from dataclasses import dataclass

from websockets.asyncio.server import serve as ws_serve
from websockets.exceptions import ConnectionClosed

from balancebot.control import GainSet
from balancebot.errors import BalancebotError, ConfigError, ControllerError
from balancebot.simloop import EpisodeRuntime, Scenario, TraceRow

DEFAULT_PORT = 8765
DEFAULT_PUBLISH_HZ = 50.0

_FRAME_FIELDS = (
    "t", "p", "theta", "p_dot", "theta_dot",
    "x_est", "v_est", "d", "d_prime", "u", "reference",
)

_GAIN_FIELDS = ("k_err", "k_d", "k_dd", "k_v")


class ProtocolError(BalancebotError):
    """Malformed or unknown inbound message; the connection stays open."""


@dataclass(frozen=True)
class TelemetryFrame:
    t: float
    p: float
    theta: float
    p_dot: float
    theta_dot: float
    x_est: float
    v_est: float
    d: float
    d_prime: float
    u: float
    reference: float


def frame_from_row(row: TraceRow) -> TelemetryFrame:
    return TelemetryFrame(
        t=row.t, p=row.p, theta=row.theta, p_dot=row.p_dot,
        theta_dot=row.theta_dot, x_est=row.x_est, v_est=row.v_est,
        d=row.d, d_prime=row.d_prime, u=row.u, reference=row.reference,
    )


def _fmt(v: float) -> str:
    # canonical number form: up to 6 decimals, trailing zeros trimmed,
    # so 0.0 serializes as 0 and -0.0 normalizes to 0
    s = f"{v:.6f}".rstrip("0").rstrip(".")
    if s in ("-0", ""):
        s = "0"
    return s


def encode_frame(frame: TelemetryFrame) -> str:
    """One-line state message; a given frame always encodes to the same bytes."""
    parts = ['"type":"state"']
    for name in _FRAME_FIELDS:
        parts.append(f'"{name}":{_fmt(getattr(frame, name))}')
    return "{" + ",".join(parts) + "}"


def encode_error(msg: str) -> str:
    return json.dumps({"type": "error", "msg": msg}, separators=(",", ":"))


@dataclass(frozen=True)
class SetReference:
    value: float


@dataclass(frozen=True)
class SetGains:
    gains: GainSet


@dataclass(frozen=True)
class Pause:
    pass


@dataclass(frozen=True)
class Resume:
    pass


@dataclass(frozen=True)
class Reset:
    pass


def decode_command(text: str, ref_range: float):
    """Parse one inbound message; set_reference is clamped to +-ref_range."""
    try:
        obj = json.loads(text)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ProtocolError(f"not valid JSON: {exc}")
    if not isinstance(obj, dict) or "type" not in obj:
        raise ProtocolError("message must be an object with a 'type' field")
    kind = obj["type"]
    if kind == "set_reference":
        value = obj.get("value")
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ProtocolError("set_reference requires a numeric 'value'")
        clamped = min(max(float(value), -ref_range), ref_range)
        _check_only_keys(obj, {"type", "value"})
        return SetReference(value=clamped)
    if kind == "set_gains":
        gains = obj.get("gains")
        if not isinstance(gains, dict):
            raise ProtocolError("set_gains requires a 'gains' object")
        values = {}
        for field in _GAIN_FIELDS:
            v = gains.get(field)
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ProtocolError(f"set_gains requires numeric '{field}'")
            values[field] = float(v)
        _check_only_keys(gains, set(_GAIN_FIELDS), where="gains")
        _check_only_keys(obj, {"type", "gains"})
        try:
            return SetGains(gains=GainSet(**values))
        except ConfigError as exc:
            raise ProtocolError(str(exc))
    if kind == "pause":
        _check_only_keys(obj, {"type"})
        return Pause()
    if kind == "resume":
        _check_only_keys(obj, {"type"})
        return Resume()
    if kind == "reset":
        _check_only_keys(obj, {"type"})
        return Reset()
    raise ProtocolError(f"unknown command type {kind!r}")


def _check_only_keys(obj, allowed, where=None):
    extra = set(obj) - allowed
    if extra:
        suffix = f" in '{where}'" if where else ""
        raise ProtocolError(f"unexpected field {sorted(extra)[0]!r}{suffix}")


class TelemetryServer:
    """Runs one episode paced to wall clock and bridges it to clients."""

    def __init__(self, scenario: Scenario, port: int = DEFAULT_PORT,
                 publish_hz: float = DEFAULT_PUBLISH_HZ):
        if scenario.reference.mode != "live":
            raise ConfigError("serving requires reference mode live")
        if not publish_hz > 0:
            raise ConfigError("telemetry violates publish_hz > 0")
        self.scenario = scenario
        self.port = port
        self.publish_every = max(1, round(1.0 / (scenario.tick * publish_hz)))
        self.runtime = EpisodeRuntime(scenario)
        self.paused = False
        self._queues = set()
        self._mailbox = deque()
        self._stop = asyncio.Event()

    # -- connection side ----------------------------------------------------

    async def _sender(self, websocket, queue):
        try:
            while True:
                await websocket.send(await queue.get())
        except ConnectionClosed:
            pass

    async def _handler(self, websocket):
        queue = asyncio.Queue(maxsize=64)
        self._queues.add(queue)
        sender = asyncio.create_task(self._sender(websocket, queue))
        try:
            async for message in websocket:
                try:
                    command = decode_command(message, self.scenario.reference.range)
                except ProtocolError as exc:
                    await websocket.send(encode_error(str(exc)))
                    continue
                self._mailbox.append((command, websocket))
        except ConnectionClosed:
            pass
        finally:
            self._queues.discard(queue)
            sender.cancel()

    def _broadcast(self, text: str) -> None:
        for queue in self._queues:
            try:
                queue.put_nowait(text)
            except asyncio.QueueFull:
                pass  # congested client: drop the frame, never stall the loop

    @staticmethod
    async def _send_safely(websocket, text: str) -> None:
        try:
            await websocket.send(text)
        except ConnectionClosed:
            pass

    # -- simulation side ----------------------------------------------------

    def _apply_commands(self) -> None:
        # runs between ticks only, so a command never tears a tick
        while self._mailbox:
            command, websocket = self._mailbox.popleft()
            if isinstance(command, SetReference):
                self.runtime.live_reference = command.value
            elif isinstance(command, SetGains):
                try:
                    self.runtime.set_gains(command.gains)
                except ControllerError as exc:
                    asyncio.get_running_loop().create_task(
                        self._send_safely(websocket, encode_error(str(exc)))
                    )
            elif isinstance(command, Pause):
                self.paused = True
            elif isinstance(command, Resume):
                if not self.runtime.fallen:
                    self.paused = False
            elif isinstance(command, Reset):
                self.runtime.reset()
                self.paused = False

    async def _sim_loop(self) -> None:
        clock = asyncio.get_running_loop().time
        anchor_time = clock()
        anchor_n = self.runtime.n
        while not self._stop.is_set():
            self._apply_commands()
            if self.paused or self.runtime.fallen:
                await asyncio.sleep(0.02)
                anchor_time = clock()
                anchor_n = self.runtime.n
                continue
            for _ in range(self.publish_every):
                n = self.runtime.n
                row = self.runtime.step_once()
                if row.terminal:
                    self._broadcast(encode_error(f"fallen at t={_fmt(row.t)}"))
                    self.paused = True
                    break
                if n % self.publish_every == 0:
                    self._broadcast(encode_frame(frame_from_row(row)))
            deadline = anchor_time + (self.runtime.n - anchor_n) * self.scenario.tick
            delay = deadline - clock()
            if delay > 0:
                await asyncio.sleep(delay)

    async def run(self) -> None:
        """Serve until cancelled; the simulation advances with or without clients."""
        async with ws_serve(self._handler, "0.0.0.0", self.port):
            await self._sim_loop()

    def stop(self) -> None:
        self._stop.set()


def serve_scenario(scenario: Scenario, port: int = DEFAULT_PORT,
                   publish_hz: float = DEFAULT_PUBLISH_HZ) -> None:
    """Blocking entry point for the CLI serve command."""
    server = TelemetryServer(scenario, port=port, publish_hz=publish_hz)
    asyncio.run(server.run())
