"""Versioned binary checkpoints: topology, flat parameters, Adam moments."""

from __future__ import annotations

import hashlib
import json

import numpy as np

from moba_arena.nn.adam import Adam
from moba_arena.nn.net import PolicyNet

FORMAT_VERSION = 1


def save_checkpoint(path: str, net: PolicyNet, meta: dict | None = None,
                    adam: Adam | None = None) -> str:
    topology = {
        "obs_dim": net.obs_dim,
        "hidden": net.hidden,
        "memory": net.memory,
        "recurrent": net.recurrent,
    }
    arrays = {
        "format": np.array(FORMAT_VERSION),
        "topology": np.frombuffer(json.dumps(topology).encode(), dtype=np.uint8),
        "params": net.flat(),
        "version": np.array(net.version),
        "meta": np.frombuffer(json.dumps(meta or {}).encode(), dtype=np.uint8),
    }
    if adam is not None:
        arrays["adam_m"] = adam.m
        arrays["adam_v"] = adam.v
        arrays["adam_t"] = np.array(adam.t)
        arrays["adam_lr"] = np.array(adam.lr)
    with open(path, "wb") as handle:
        np.savez(handle, **arrays)
    return file_digest(path)


def load_checkpoint(path: str) -> tuple[PolicyNet, dict, dict | None]:
    with np.load(path) as data:
        if int(data["format"]) != FORMAT_VERSION:
            raise ValueError(f"unsupported checkpoint format {int(data['format'])}")
        topology = json.loads(bytes(data["topology"]).decode())
        net = PolicyNet(**topology)
        net.set_flat(data["params"])
        net.version = int(data["version"])
        meta = json.loads(bytes(data["meta"]).decode())
        adam_state = None
        if "adam_m" in data:
            adam_state = {"m": data["adam_m"], "v": data["adam_v"],
                          "t": int(data["adam_t"]), "lr": float(data["adam_lr"])}
    return net, meta, adam_state


def file_digest(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()
