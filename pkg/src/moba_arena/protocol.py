"""Gateway wire protocol: 4-byte big-endian length prefix + JSON payload.

Message types: HELLO, HELLO_OK, REQ_RESET, REQ_STEP, RESP_QUAD, ERR, CLOSE.
Every payload carries `type`; session messages carry `game_id`/`player_id`
fields where applicable.
"""

from __future__ import annotations

import json
import socket
import struct

PROTOCOL_VERSION = 1
MAX_FRAME_BYTES = 16 * 1024 * 1024

MSG_HELLO = "HELLO"
MSG_HELLO_OK = "HELLO_OK"
MSG_REQ_RESET = "REQ_RESET"
MSG_REQ_STEP = "REQ_STEP"
MSG_RESP_QUAD = "RESP_QUAD"
MSG_ERR = "ERR"
MSG_CLOSE = "CLOSE"


class ProtocolError(RuntimeError):
    pass


def encode_frame(payload: dict) -> bytes:
    body = json.dumps(payload, separators=(",", ":")).encode("utf-8")
    if len(body) > MAX_FRAME_BYTES:
        raise ProtocolError(f"frame too large: {len(body)} bytes")
    return struct.pack(">I", len(body)) + body


def read_exact(sock: socket.socket, count: int) -> bytes | None:
    chunks = []
    remaining = count
    while remaining > 0:
        chunk = sock.recv(remaining)
        if not chunk:
            return None
        chunks.append(chunk)
        remaining -= len(chunk)
    return b"".join(chunks)


def read_frame(sock: socket.socket) -> dict | None:
    """One framed JSON message; None on clean EOF."""
    header = read_exact(sock, 4)
    if header is None:
        return None
    (length,) = struct.unpack(">I", header)
    if length == 0 or length > MAX_FRAME_BYTES:
        raise ProtocolError(f"invalid frame length {length}")
    body = read_exact(sock, length)
    if body is None:
        raise ProtocolError("connection closed mid-frame")
    try:
        payload = json.loads(body.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ProtocolError(f"malformed frame payload: {exc}") from exc
    if not isinstance(payload, dict) or "type" not in payload:
        raise ProtocolError("frame payload must be an object with a 'type'")
    return payload


def send_frame(sock: socket.socket, payload: dict) -> None:
    sock.sendall(encode_frame(payload))
