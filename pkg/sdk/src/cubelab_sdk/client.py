"""Client for the cube session service.

Speaks the length-prefixed JSON protocol and mirrors the environment's tool
surface one call per round trip: make_move, submit_moves, get_observation,
apply_view_transformation, call_planner, call_golden_planner, plus the
final_answer convention that closes the session and asks the server for the
authoritative pass/fail verdict.

The SDK never simulates the cube locally; every semantic answer comes back
over the wire. Local step/move counters exist purely as mirrors and are
reconciled against every server status payload.
"""

from __future__ import annotations

import base64
import json
import socket
import struct
from dataclasses import dataclass, field
from io import BytesIO
from PIL import Image

TOOL_NAMES = ("make_move", "submit_moves", "get_observation",
              "apply_view_transformation", "call_planner", "call_golden_planner",
              "final_answer")


class SdkError(Exception):
    pass


class ConnectionRefused(SdkError):
    pass


class ProtocolVersionMismatch(SdkError):
    """The server answered with frames this SDK does not understand."""


class ServerError(SdkError):
    """An error response; `code` is stable, str() preserves the server text."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class ToolCall:
    name: str
    args: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in TOOL_NAMES:
            raise ValueError(f"unknown tool {self.name!r}")


@dataclass
class ToolResult:
    name: str
    kind: str                     # text | image | reward | rewards | status
    text: str | None = None
    image: Image.Image | None = None
    reward: float | None = None
    rewards: list[float] | None = None
    status: str | None = None
    payload: dict = field(default_factory=dict)

    def brief(self) -> str:
        if self.kind == "image":
            return f"<image {self.image.size[0]}x{self.image.size[1]}>"
        if self.kind == "reward":
            return f"reward = {self.reward}"
        if self.kind == "rewards":
            return f"rewards = {self.rewards}"
        if self.kind == "text":
            return self.text or ""
        return f"status = {self.status}"


def _send(sock: socket.socket, message: dict) -> None:
    data = json.dumps(message).encode()
    sock.sendall(struct.pack(">I", len(data)) + data)


def _recv(sock: socket.socket) -> dict:
    header = b""
    while len(header) < 4:
        chunk = sock.recv(4 - len(header))
        if not chunk:
            raise ProtocolVersionMismatch("server closed the stream mid-exchange")
        header += chunk
    (length,) = struct.unpack(">I", header)
    body = b""
    while len(body) < length:
        chunk = sock.recv(length - len(body))
        if not chunk:
            raise ProtocolVersionMismatch("server closed the stream mid-frame")
        body += chunk
    try:
        message = json.loads(body)
    except json.JSONDecodeError as exc:
        raise ProtocolVersionMismatch(f"unparseable frame from server: {exc}") from exc
    if not isinstance(message, dict) or "kind" not in message:
        raise ProtocolVersionMismatch("frame lacks a message kind")
    return message


class ClientSession:
    """One live episode owned by this client. Not thread-safe by design."""

    def __init__(self, sock: socket.socket, session_id: str, spec: dict, status: dict):
        self._sock = sock
        self.session_id = session_id
        self.spec = dict(spec)
        self.tier = status.get("tier", spec.get("tier", "full_symbolic"))
        self.status = status.get("status", "running")
        self.steps_used = int(status.get("steps_used", 0))
        self.moves_made = int(status.get("moves_made", 0))
        self.last_observation: ToolResult | None = None
        self.closed = False

    # -- lifecycle -----------------------------------------------------------

    @staticmethod
    def connect(address: tuple[str, int] | str, spec: dict) -> "ClientSession":
        if isinstance(address, str):
            host, _, port = address.partition(":")
            address = (host, int(port))
        try:
            sock = socket.create_connection(address)
        except OSError as exc:
            raise ConnectionRefused(f"cannot reach {address}: {exc}") from exc
        _send(sock, {"kind": "create_session", "payload": spec})
        reply = _recv(sock)
        if reply["kind"] == "error":
            sock.close()
            payload = reply.get("payload", {})
            raise ServerError(payload.get("code", "UNKNOWN"), payload.get("message", ""))
        if reply["kind"] != "status" or "session" not in reply:
            sock.close()
            raise ProtocolVersionMismatch(f"unexpected reply kind {reply['kind']!r}")
        return ClientSession(sock, reply["session"], spec, reply.get("payload", {}))

    def close(self) -> dict:
        """Close the episode; returns the server's final record payload."""
        if self.closed:
            return {"status": self.status}
        reply = self._round_trip({"kind": "close", "session": self.session_id})
        payload = reply.get("payload", {})
        self.status = payload.get("status", self.status)
        self.closed = True
        self._sock.close()
        return payload

    # -- tool surface -----------------------------------------------------------

    def tool(self, name: str, args: dict | None = None) -> ToolResult:
        call = ToolCall(name, args or {})
        if call.name == "final_answer":
            verdict = self.final_answer(call.args.get("answer", ""))
            return ToolResult(name=name, kind="status", status=verdict.get("status"),
                              payload=verdict)
        reply = self._round_trip({"kind": "action", "session": self.session_id,
                                  "payload": {"name": call.name, "args": call.args}})
        return self._decode_result(call.name, reply)

    def make_move(self, move: str) -> float:
        return self.tool("make_move", {"move": move}).reward

    def submit_moves(self, moves: list[str]) -> list[float]:
        return self.tool("submit_moves", {"moves": list(moves)}).rewards

    def get_observation(self) -> ToolResult:
        result = self.tool("get_observation")
        self.last_observation = result
        return result

    def apply_view_transformation(self, direction: str) -> ToolResult:
        return self.tool("apply_view_transformation", {"direction": direction})

    def call_planner(self, representation: str) -> str:
        return self.tool("call_planner", {"representation": representation}).text

    def call_golden_planner(self, representation: str) -> str:
        return self.tool("call_golden_planner", {"representation": representation}).text

    def step_boundary(self) -> str:
        reply = self._round_trip({"kind": "action", "session": self.session_id,
                                  "payload": {"name": "step_boundary"}})
        self._reconcile(reply.get("payload", {}))
        return self.status

    def final_answer(self, answer: str = "") -> dict:
        """Close and return the authoritative verdict; `answer` is recorded
        client-side only (callers conventionally pass an empty string)."""
        payload = self.close()
        payload.setdefault("answer", answer)
        return payload

    # -- internals ----------------------------------------------------------------

    def _round_trip(self, message: dict) -> dict:
        if self.closed:
            raise SdkError("session already closed")
        _send(self._sock, message)
        reply = _recv(self._sock)
        if reply["kind"] == "error":
            payload = reply.get("payload", {})
            raise ServerError(payload.get("code", "UNKNOWN"), payload.get("message", ""))
        return reply

    def _reconcile(self, payload: dict) -> None:
        self.status = payload.get("status", self.status)
        if "steps_used" in payload:
            self.steps_used = int(payload["steps_used"])
        if "moves_made" in payload:
            self.moves_made = int(payload["moves_made"])

    def _decode_result(self, name: str, reply: dict) -> ToolResult:
        payload = reply.get("payload", {})
        kind = reply.get("kind")
        if kind == "reward":
            self._reconcile(payload)
            if "reward" in payload:
                return ToolResult(name=name, kind="reward",
                                  reward=float(payload["reward"]),
                                  status=payload.get("status"), payload=payload)
            return ToolResult(name=name, kind="rewards",
                              rewards=[float(r) for r in payload.get("rewards", [])],
                              status=payload.get("status"), payload=payload)
        if kind == "observation":
            if payload.get("format") == "png_base64":
                image = Image.open(BytesIO(base64.b64decode(payload["data"])))
                return ToolResult(name=name, kind="image", image=image.convert("RGB"),
                                  payload={k: v for k, v in payload.items() if k != "data"})
            return ToolResult(name=name, kind="text", text=payload.get("data"),
                              payload=payload)
        if kind == "status":
            self._reconcile(payload)
            return ToolResult(name=name, kind="status", status=payload.get("status"),
                              payload=payload)
        raise ProtocolVersionMismatch(f"unexpected response kind {kind!r}")
