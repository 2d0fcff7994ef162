import json
import socket
import struct
import threading

import numpy as np
import pytest

from moba_arena.actions import Action
from moba_arena.gateway import GatewayServer
from moba_arena.netclient import EnvClient, GatewayClientError
from moba_arena.observe import TOTAL_WIDTH
from moba_arena.protocol import (MSG_ERR, PROTOCOL_VERSION, ProtocolError,
                                 encode_frame, read_frame, send_frame)


@pytest.fixture
def server():
    srv = GatewayServer(("127.0.0.1", 0), step_timeout_s=2.0)
    thread = threading.Thread(target=srv.serve_forever, daemon=True)
    thread.start()
    yield srv
    srv.shutdown()
    srv.server_close()


def _port(server):
    return server.server_address[1]


def test_frame_codec_roundtrip():
    payload = {"type": "X", "vals": [1, 2.5, "s"]}
    frame = encode_frame(payload)
    assert struct.unpack(">I", frame[:4])[0] == len(frame) - 4
    a, b = socket.socketpair()
    a.sendall(frame)
    assert read_frame(b) == payload
    a.close()
    b.close()


def test_reset_returns_layout_widths(server):
    client = EnvClient.load_game({"camp0_hero": "diaochan",
                                  "camp1_hero": "diaochan", "seed": 4},
                                 port=_port(server))
    obs, rewards, dones, infos = client.reset()
    assert len(obs) == 2 and client.num_agents == 2
    assert obs[0].shape == (TOTAL_WIDTH,)
    assert rewards == [0.0, 0.0]
    assert len(infos[0]["legal_action"]) == 83
    assert np.asarray(infos[0]["sub_action_mask"]).shape == (11, 5)
    client.close()


def test_step_quadruple_and_done(server):
    client = EnvClient.load_game({"seed": 4}, port=_port(server))
    client.reset()
    obs, rewards, dones, infos = client.step([Action(), Action()])
    assert dones == [False, False]
    assert infos[0]["frame_no"] == 4
    assert infos[0]["player_id"] == "player_0"
    client.close()


def test_wire_obs_bit_exact(server):
    """The JSON float round-trip preserves observation values bit-exactly."""
    from moba_arena.config import MatchConfig
    from moba_arena.env import Arena1v1Env

    client = EnvClient.load_game({"seed": 9}, port=_port(server))
    remote_obs = client.reset()[0]
    local_obs = Arena1v1Env(MatchConfig(seed=9)).reset()[0]
    assert np.array_equal(remote_obs[0], local_obs[0])
    client.close()


def test_malformed_frame_gets_err_and_close(server):
    sock = socket.create_connection(("127.0.0.1", _port(server)), timeout=5)
    sock.sendall(struct.pack(">I", 7) + b"garbage")
    reply = read_frame(sock)
    assert reply["type"] == MSG_ERR and reply["code"] == "protocol"
    assert sock.recv(1) == b""                # server closed the session
    sock.close()


def test_version_mismatch_rejected(server):
    sock = socket.create_connection(("127.0.0.1", _port(server)), timeout=5)
    send_frame(sock, {"type": "HELLO", "protocol_version": 99,
                      "game_config": {}})
    reply = read_frame(sock)
    assert reply["type"] == MSG_ERR and reply["code"] == "version"
    sock.close()


def test_bad_config_rejected(server):
    with pytest.raises(GatewayClientError) as err:
        EnvClient.load_game({"camp0_hero": "nosuch"}, port=_port(server))
    assert err.value.code == "config"


def test_two_sessions_identical_transcripts(server):
    transcripts = []
    for _ in range(2):
        client = EnvClient.load_game({"seed": 21}, port=_port(server))
        quad = client.reset()
        rows = [quad[0][0].tobytes()]
        for _step in range(5):
            obs, rewards, dones, infos = client.step([Action(), Action()])
            rows.append(obs[0].tobytes())
            rows.append(json.dumps(rewards).encode())
        transcripts.append(b"".join(rows))
        client.close()
    assert transcripts[0] == transcripts[1]


def test_concurrent_sessions_are_isolated(server):
    clients = [EnvClient.load_game({"seed": 33}, port=_port(server))
               for _ in range(3)]
    quads = [c.reset() for c in clients]
    digests = {q[3][0]["raw_state"] for q in quads}
    assert len(digests) == 1                  # same seed -> same state
    for c in clients:
        c.step([Action(), Action()])
    for c in clients:
        c.close()


def test_step_timeout_aborts_session(server):
    sock = socket.create_connection(("127.0.0.1", _port(server)), timeout=10)
    send_frame(sock, {"type": "HELLO", "protocol_version": PROTOCOL_VERSION,
                      "game_config": {"seed": 1}})
    read_frame(sock)                           # HELLO_OK
    send_frame(sock, {"type": "REQ_RESET"})
    read_frame(sock)                           # RESP_QUAD
    # Stall past the 2 s server step timeout.
    reply = read_frame(sock)                   # server-initiated ERR
    assert reply["type"] == MSG_ERR and reply["code"] == "timeout"
    sock.close()


def test_step_before_reset_is_protocol_error(server):
    sock = socket.create_connection(("127.0.0.1", _port(server)), timeout=5)
    send_frame(sock, {"type": "HELLO", "protocol_version": PROTOCOL_VERSION,
                      "game_config": {"seed": 1}})
    read_frame(sock)
    send_frame(sock, {"type": "REQ_STEP", "actions": [[0] * 6, [0] * 6]})
    reply = read_frame(sock)
    assert reply["type"] == MSG_ERR
    sock.close()


def test_bt_opponent_session(server):
    client = EnvClient.load_game({"seed": 2, "opponents": {"1": "bt:1"}},
                                 port=_port(server))
    client.reset()
    for _ in range(10):
        obs, rewards, dones, infos = client.step([Action(), Action()])
    client.close()
