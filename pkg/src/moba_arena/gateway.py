"""TCP gateway exposing the env over the wire protocol.

One client session = one match configuration = one logical stream; sessions
run on independent threads with no shared mutable state. A client that
stalls longer than the step timeout aborts its episode as a draw.
"""

from __future__ import annotations

import socket
import socketserver
import threading

from moba_arena.config import ConfigurationError, MatchConfig
from moba_arena.env import Arena1v1Env
from moba_arena.protocol import (MSG_CLOSE, MSG_ERR, MSG_HELLO, MSG_HELLO_OK,
                                 MSG_REQ_RESET, MSG_REQ_STEP, MSG_RESP_QUAD,
                                 PROTOCOL_VERSION, ProtocolError, read_frame,
                                 send_frame)

DEFAULT_STEP_TIMEOUT_S = 10.0


def _quad_payload(env: Arena1v1Env, obs, rewards, dones, infos) -> dict:
    info_out = []
    for info in infos:
        info_out.append({
            "observation": [float(v) for v in info["observation"]],
            "legal_action": [int(v) for v in info["legal_action"]],
            "sub_action_mask": [[int(v) for v in row]
                                for row in info["sub_action_mask"]],
            "done": int(info["done"]),
            "frame_no": int(info["frame_no"]),
            "reward": float(info["reward"]),
            "game_id": info["game_id"],
            "player_id": info["player_id"],
            "raw_state": info["raw_state"],
        })
    return {
        "type": MSG_RESP_QUAD,
        "game_id": env.state.game_id,
        "obs": [[float(v) for v in o] for o in obs],
        "reward": [float(r) for r in rewards],
        "done": [bool(d) for d in dones],
        "info": info_out,
    }


def _build_env(game_config: dict) -> Arena1v1Env:
    config = MatchConfig(
        camp0_hero=game_config.get("camp0_hero", "diaochan"),
        camp1_hero=game_config.get("camp1_hero", "diaochan"),
        seed=int(game_config.get("seed", 0)),
        time_limit_s=game_config.get("time_limit_s"),
    )
    from moba_arena.heroes import get_hero

    get_hero(config.camp0_hero)               # fail fast on unknown heroes
    get_hero(config.camp1_hero)
    controllers = {}
    for camp_str, spec in (game_config.get("opponents") or {}).items():
        camp = int(camp_str)
        if camp not in (0, 1):
            raise ConfigurationError(f"opponent camp must be 0 or 1, got {camp}")
        if not isinstance(spec, str) or not spec.startswith("bt:"):
            raise ConfigurationError(f"unsupported opponent spec {spec!r}")
        from moba_arena.bt import make_bt_controller

        hero = config.hero_for_camp(camp)
        controllers[camp] = make_bt_controller(hero, int(spec.split(":", 1)[1]))
    return Arena1v1Env(config, controllers=controllers)


class _SessionHandler(socketserver.BaseRequestHandler):
    def handle(self) -> None:
        sock: socket.socket = self.request
        sock.settimeout(self.server.step_timeout_s)
        env: Arena1v1Env | None = None
        try:
            while True:
                try:
                    frame = read_frame(sock)
                except socket.timeout:
                    # Stalled client: abort the episode as a draw.
                    if env is not None and env.state is not None:
                        env.close()
                    send_frame(sock, {"type": MSG_ERR, "code": "timeout",
                                      "message": "step timeout; episode aborted as draw"})
                    return
                if frame is None:
                    return
                kind = frame.get("type")
                if kind == MSG_HELLO:
                    if int(frame.get("protocol_version", -1)) != PROTOCOL_VERSION:
                        send_frame(sock, {"type": MSG_ERR, "code": "version",
                                          "message": f"protocol version mismatch; "
                                                     f"server speaks {PROTOCOL_VERSION}"})
                        return
                    try:
                        env = _build_env(frame.get("game_config") or {})
                    except ConfigurationError as exc:
                        send_frame(sock, {"type": MSG_ERR, "code": "config",
                                          "message": str(exc)})
                        return
                    send_frame(sock, {"type": MSG_HELLO_OK,
                                      "protocol_version": PROTOCOL_VERSION,
                                      "num_agents": env.num_agents})
                elif kind == MSG_REQ_RESET:
                    if env is None:
                        raise ProtocolError("REQ_RESET before HELLO")
                    seed = frame.get("seed")
                    quad = env.reset(seed=None if seed is None else int(seed))
                    send_frame(sock, _quad_payload(env, *quad))
                elif kind == MSG_REQ_STEP:
                    if env is None or env.state is None:
                        raise ProtocolError("REQ_STEP before REQ_RESET")
                    try:
                        quad = env.step(frame.get("actions") or [])
                    except Exception as exc:
                        send_frame(sock, {"type": MSG_ERR, "code": "step",
                                          "message": str(exc)})
                        return
                    send_frame(sock, _quad_payload(env, *quad))
                elif kind == MSG_CLOSE:
                    return
                else:
                    raise ProtocolError(f"unknown message type {kind!r}")
        except ProtocolError as exc:
            try:
                send_frame(sock, {"type": MSG_ERR, "code": "protocol",
                                  "message": str(exc)})
            except OSError:
                pass
        except (ConnectionResetError, BrokenPipeError):
            pass
        finally:
            if env is not None:
                env.close()


class GatewayServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, bind: tuple[str, int],
                 step_timeout_s: float = DEFAULT_STEP_TIMEOUT_S):
        super().__init__(bind, _SessionHandler)
        self.step_timeout_s = step_timeout_s


def gateway_serve(host: str = "127.0.0.1", port: int = 9331,
                  step_timeout_s: float = DEFAULT_STEP_TIMEOUT_S,
                  background: bool = False) -> GatewayServer:
    server = GatewayServer((host, port), step_timeout_s=step_timeout_s)
    if background:
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
        return server
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return server
