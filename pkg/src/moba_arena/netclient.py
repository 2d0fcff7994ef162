"""Minimal in-repo gateway client (the loopback harness used by tests/CLI).

Mirrors the published load_game/reset/step/num_agents surface over the wire
protocol; observation vectors come back as numpy arrays.
"""

from __future__ import annotations

import socket

import numpy as np

from moba_arena.protocol import (MSG_CLOSE, MSG_ERR, MSG_HELLO, MSG_HELLO_OK,
                                 MSG_REQ_RESET, MSG_REQ_STEP, MSG_RESP_QUAD,
                                 PROTOCOL_VERSION, ProtocolError, read_frame,
                                 send_frame)


class GatewayClientError(RuntimeError):
    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(f"[{code}] {message}")


class EnvClient:
    """One handle = one session = one match configuration."""

    def __init__(self, sock: socket.socket, num_agents: int):
        self._sock = sock
        self.num_agents = num_agents
        self._closed = False
        self._done = False

    @staticmethod
    def load_game(game_config: dict, host: str = "127.0.0.1", port: int = 9331,
                  timeout_s: float = 30.0) -> "EnvClient":
        sock = socket.create_connection((host, port), timeout=timeout_s)
        send_frame(sock, {"type": MSG_HELLO, "protocol_version": PROTOCOL_VERSION,
                          "game_config": game_config})
        reply = read_frame(sock)
        if reply is None:
            raise ProtocolError("gateway closed during hello")
        if reply["type"] == MSG_ERR:
            raise GatewayClientError(reply.get("code", "?"), reply.get("message", ""))
        if reply["type"] != MSG_HELLO_OK:
            raise ProtocolError(f"unexpected hello reply {reply['type']!r}")
        return EnvClient(sock, int(reply["num_agents"]))

    def _request(self, payload: dict):
        if self._closed:
            raise GatewayClientError("closed", "handle is closed")
        send_frame(self._sock, payload)
        reply = read_frame(self._sock)
        if reply is None:
            raise ProtocolError("gateway closed the connection")
        if reply["type"] == MSG_ERR:
            raise GatewayClientError(reply.get("code", "?"), reply.get("message", ""))
        if reply["type"] != MSG_RESP_QUAD:
            raise ProtocolError(f"unexpected reply type {reply['type']!r}")
        obs = [np.asarray(o, dtype=np.float32) for o in reply["obs"]]
        reward = list(reply["reward"])
        done = list(reply["done"])
        info = reply["info"]
        for entry in info:
            entry["observation"] = np.asarray(entry["observation"], dtype=np.float32)
            entry["legal_action"] = np.asarray(entry["legal_action"], dtype=np.int8)
            entry["sub_action_mask"] = np.asarray(entry["sub_action_mask"], dtype=np.int8)
        self._done = all(done)
        return obs, reward, done, info

    def reset(self, seed: int | None = None):
        payload = {"type": MSG_REQ_RESET}
        if seed is not None:
            payload["seed"] = seed
        quad = self._request(payload)
        self._done = False
        return quad

    def step(self, actions):
        if self._done:
            raise GatewayClientError("done", "step after episode done")
        serial = []
        for action in actions:
            serial.append(action.as_list() if hasattr(action, "as_list")
                          else [int(v) for v in action])
        return self._request({"type": MSG_REQ_STEP, "actions": serial})

    def close(self) -> None:
        if not self._closed:
            try:
                send_frame(self._sock, {"type": MSG_CLOSE})
            except OSError:
                pass
            self._sock.close()
            self._closed = True
