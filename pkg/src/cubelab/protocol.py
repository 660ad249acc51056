"""Wire protocol: length-prefixed JSON messages over a local socket.

Framing: a 4-byte big-endian payload length followed by that many bytes of
UTF-8 JSON. Every request yields exactly one response. Message kinds:

  requests   create_session | action | close
  responses  status | reward | observation | error

Images travel as base64 PNG inside observation payloads. Error responses carry
a stable `code` (BAD_MESSAGE, SESSION_NOT_FOUND, SESSION_TERMINATED,
WRONG_TIER, TOOL_UNAVAILABLE, BAD_ARGS, INTERNAL) plus a human-readable
message; a malformed request never kills the connection.
"""

from __future__ import annotations

import json
import socket
import struct

MAX_MESSAGE = 32 * 1024 * 1024


class ProtocolError(Exception):
    pass


def send_message(sock: socket.socket, message: dict) -> None:
    data = json.dumps(message).encode()
    sock.sendall(struct.pack(">I", len(data)) + data)


def recv_message(sock: socket.socket) -> dict | None:
    """One framed message, or None on a cleanly closed stream."""
    header = _recv_exact(sock, 4)
    if header is None:
        return None
    (length,) = struct.unpack(">I", header)
    if length > MAX_MESSAGE:
        raise ProtocolError(f"frame of {length} bytes exceeds the {MAX_MESSAGE} cap")
    data = _recv_exact(sock, length)
    if data is None:
        raise ProtocolError("stream closed mid-frame")
    try:
        return json.loads(data)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"frame is not valid JSON: {exc}") from exc


def _recv_exact(sock: socket.socket, n: int) -> bytes | None:
    buf = b""
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            return None if not buf else None
        buf += chunk
    return buf


def error_message(code: str, message: str, session: str | None = None) -> dict:
    out = {"kind": "error", "payload": {"code": code, "message": message}}
    if session is not None:
        out["session"] = session
    return out
