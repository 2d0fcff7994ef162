"""Multi-head masked policy/value network with hand-derived gradients.

Fixed topology: obs -> two tanh layers of `hidden` -> optional GRU memory
cell of `memory` -> six action heads + scalar value. Implemented directly in
numpy (float64) with explicit backward passes; correctness is enforced by
finite-difference checks rather than by an autograd framework.
"""

from __future__ import annotations

import numpy as np

from moba_arena.actions import HEAD_NAMES, HEAD_SIZES

OBS_DIM = 385
ACTION_HEADS = tuple(zip(HEAD_NAMES, HEAD_SIZES))
NEG_INF = -1e30


def masked_softmax(logits: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Softmax over legal entries; illegal entries get probability exactly 0."""
    legal = mask.astype(bool)
    if not legal.any(axis=-1).all():
        raise ValueError("masked_softmax: a row has no legal entries")
    shifted = np.where(legal, logits, NEG_INF)
    shifted = shifted - shifted.max(axis=-1, keepdims=True)
    weights = np.exp(shifted) * legal
    return weights / weights.sum(axis=-1, keepdims=True)


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-x))


class PolicyNet:
    """Parameters live in a name->array dict; `flat`/`set_flat` give one vector."""

    def __init__(self, obs_dim: int = OBS_DIM, hidden: int = 256, memory: int = 128,
                 recurrent: bool = False, seed: int = 0):
        self.obs_dim = obs_dim
        self.hidden = hidden
        self.memory = memory
        self.recurrent = recurrent
        self.version = 0
        rng = np.random.default_rng(seed)
        head_in = memory if recurrent else hidden

        def dense(fan_in, fan_out, scale=1.0):
            bound = scale * np.sqrt(6.0 / (fan_in + fan_out))
            return rng.uniform(-bound, bound, size=(fan_in, fan_out))

        self.params: dict[str, np.ndarray] = {
            "W1": dense(obs_dim, hidden), "b1": np.zeros(hidden),
            "W2": dense(hidden, hidden), "b2": np.zeros(hidden),
        }
        if recurrent:
            for gate in ("z", "r", "h"):
                self.params[f"Wg{gate}"] = dense(hidden, memory)
                self.params[f"Ug{gate}"] = dense(memory, memory)
                self.params[f"bg{gate}"] = np.zeros(memory)
        for name, size in ACTION_HEADS:
            self.params[f"Wh_{name}"] = dense(head_in, size, scale=0.01)
            self.params[f"bh_{name}"] = np.zeros(size)
        self.params["Wv"] = dense(head_in, 1, scale=0.1)
        self.params["bv"] = np.zeros(1)
        self._order = sorted(self.params)

    # -- parameter vector ---------------------------------------------------

    def flat(self) -> np.ndarray:
        return np.concatenate([self.params[k].ravel() for k in self._order])

    def set_flat(self, vec: np.ndarray) -> None:
        offset = 0
        for key in self._order:
            shape = self.params[key].shape
            size = self.params[key].size
            self.params[key] = vec[offset:offset + size].reshape(shape).copy()
            offset += size
        assert offset == vec.size

    def zero_grads(self) -> dict[str, np.ndarray]:
        return {k: np.zeros_like(v) for k, v in self.params.items()}

    def grads_flat(self, grads: dict[str, np.ndarray]) -> np.ndarray:
        return np.concatenate([grads[k].ravel() for k in self._order])

    def clone(self) -> "PolicyNet":
        other = PolicyNet(self.obs_dim, self.hidden, self.memory, self.recurrent)
        other.set_flat(self.flat())
        other.version = self.version
        return other

    def initial_memory(self, batch: int = 1) -> np.ndarray:
        return np.zeros((batch, self.memory))

    # -- forward ------------------------------------------------------------

    def _trunk(self, obs: np.ndarray):
        p = self.params
        a1 = obs @ p["W1"] + p["b1"]
        h1 = np.tanh(a1)
        a2 = h1 @ p["W2"] + p["b2"]
        h2 = np.tanh(a2)
        return h2, (obs, h1, h2)

    def _gru(self, f: np.ndarray, h: np.ndarray):
        p = self.params
        z = _sigmoid(f @ p["Wgz"] + h @ p["Ugz"] + p["bgz"])
        r = _sigmoid(f @ p["Wgr"] + h @ p["Ugr"] + p["bgr"])
        rh = r * h
        hc = np.tanh(f @ p["Wgh"] + rh @ p["Ugh"] + p["bgh"])
        h_new = (1.0 - z) * h + z * hc
        return h_new, (f, h, z, r, rh, hc)

    def _heads(self, feat: np.ndarray, masks: dict[str, np.ndarray]):
        p = self.params
        probs = {}
        logits = {}
        for name, _size in ACTION_HEADS:
            logit = feat @ p[f"Wh_{name}"] + p[f"bh_{name}"]
            logits[name] = logit
            probs[name] = masked_softmax(logit, masks[name])
        value = (feat @ p["Wv"] + p["bv"])[:, 0]
        return probs, logits, value

    def forward(self, obs: np.ndarray, masks: dict[str, np.ndarray],
                mem_in: np.ndarray | None = None):
        """Batch forward: obs [B, D], masks per head [B, n].

        Returns (probs, value, mem_out, cache).
        """
        obs = np.atleast_2d(np.asarray(obs, dtype=np.float64))
        f, trunk_cache = self._trunk(obs)
        gru_cache = None
        if self.recurrent:
            if mem_in is None:
                mem_in = self.initial_memory(obs.shape[0])
            feat, gru_cache = self._gru(f, np.asarray(mem_in, dtype=np.float64))
            mem_out = feat
        else:
            feat = f
            mem_out = np.zeros((obs.shape[0], self.memory))
        probs, logits, value = self._heads(feat, masks)
        cache = (trunk_cache, gru_cache, feat, probs, masks)
        return probs, value, mem_out, cache

    # -- backward -----------------------------------------------------------

    def backward(self, cache, dlogits: dict[str, np.ndarray], dvalue: np.ndarray,
                 grads: dict[str, np.ndarray]):
        """Accumulate grads; returns (dfeat_extra_unused, dmem_in).

        `dlogits` are gradients w.r.t. pre-softmax logits per head (callers
        fold the masked-softmax jacobian in), `dvalue` w.r.t. the value.
        """
        trunk_cache, gru_cache, feat, _probs, _masks = cache
        p = self.params
        dfeat = dvalue[:, None] @ p["Wv"].T
        grads["Wv"] += feat.T @ dvalue[:, None]
        grads["bv"] += dvalue.sum(axis=0, keepdims=True)[0]
        for name, _size in ACTION_HEADS:
            dl = dlogits[name]
            grads[f"Wh_{name}"] += feat.T @ dl
            grads[f"bh_{name}"] += dl.sum(axis=0)
            dfeat += dl @ p[f"Wh_{name}"].T

        if self.recurrent:
            df, dmem = self._gru_backward(gru_cache, dfeat, grads)
        else:
            df, dmem = dfeat, None
        self._trunk_backward(trunk_cache, df, grads)
        return dmem

    def backward_with_memory(self, cache, dlogits, dvalue, grads,
                             dmem_out: np.ndarray):
        """Recurrent backward step: the GRU hidden state doubles as mem_out,
        so gradient flowing back from the next timestep adds to the head
        feature gradient. Returns d loss / d mem_in."""
        trunk_cache, gru_cache, feat, _probs, _masks = cache
        p = self.params
        dfeat = dvalue[:, None] @ p["Wv"].T
        grads["Wv"] += feat.T @ dvalue[:, None]
        grads["bv"] += dvalue.sum(axis=0, keepdims=True)[0]
        for name, _size in ACTION_HEADS:
            dl = dlogits[name]
            grads[f"Wh_{name}"] += feat.T @ dl
            grads[f"bh_{name}"] += dl.sum(axis=0)
            dfeat += dl @ p[f"Wh_{name}"].T
        dfeat += dmem_out
        df, dmem_in = self._gru_backward(gru_cache, dfeat, grads)
        self._trunk_backward(trunk_cache, df, grads)
        return dmem_in

    def _trunk_backward(self, cache, dh2: np.ndarray, grads) -> None:
        obs, h1, h2 = cache
        p = self.params
        da2 = dh2 * (1.0 - h2 * h2)
        grads["W2"] += h1.T @ da2
        grads["b2"] += da2.sum(axis=0)
        dh1 = da2 @ p["W2"].T
        da1 = dh1 * (1.0 - h1 * h1)
        grads["W1"] += obs.T @ da1
        grads["b1"] += da1.sum(axis=0)

    def _gru_backward(self, cache, dh_new: np.ndarray, grads):
        f, h, z, r, rh, hc = cache
        p = self.params
        dz = dh_new * (hc - h)
        dhc = dh_new * z
        dh = dh_new * (1.0 - z)
        dah = dhc * (1.0 - hc * hc)
        grads["Wgh"] += f.T @ dah
        grads["Ugh"] += rh.T @ dah
        grads["bgh"] += dah.sum(axis=0)
        drh = dah @ p["Ugh"].T
        dr = drh * h
        dh += drh * r
        dar = dr * r * (1.0 - r)
        grads["Wgr"] += f.T @ dar
        grads["Ugr"] += h.T @ dar
        grads["bgr"] += dar.sum(axis=0)
        dh += dar @ p["Ugr"].T
        daz = dz * z * (1.0 - z)
        grads["Wgz"] += f.T @ daz
        grads["Ugz"] += h.T @ daz
        grads["bgz"] += daz.sum(axis=0)
        dh += daz @ p["Ugz"].T
        df = dah @ p["Wgh"].T + dar @ p["Wgr"].T + daz @ p["Wgz"].T
        return df, dh


def policy_forward(net: PolicyNet, obs: np.ndarray, masks: dict[str, np.ndarray],
                   mem_in: np.ndarray | None = None):
    """Masked head distributions, value, and memory for one observation batch."""
    probs, value, mem_out, _cache = net.forward(obs, masks, mem_in)
    return probs, value, mem_out


class QNet:
    """Trunk + one Q head over the button space (the DQN baseline)."""

    def __init__(self, obs_dim: int = OBS_DIM, hidden: int = 256,
                 n_actions: int = HEAD_SIZES[0], seed: int = 0):
        rng = np.random.default_rng(seed)

        def dense(fan_in, fan_out, scale=1.0):
            bound = scale * np.sqrt(6.0 / (fan_in + fan_out))
            return rng.uniform(-bound, bound, size=(fan_in, fan_out))

        self.n_actions = n_actions
        self.params = {
            "W1": dense(obs_dim, hidden), "b1": np.zeros(hidden),
            "W2": dense(hidden, hidden), "b2": np.zeros(hidden),
            "Wq": dense(hidden, n_actions, scale=0.1), "bq": np.zeros(n_actions),
        }
        self._order = sorted(self.params)

    def flat(self) -> np.ndarray:
        return np.concatenate([self.params[k].ravel() for k in self._order])

    def set_flat(self, vec: np.ndarray) -> None:
        offset = 0
        for key in self._order:
            size = self.params[key].size
            self.params[key] = vec[offset:offset + size].reshape(self.params[key].shape).copy()
            offset += size

    def zero_grads(self):
        return {k: np.zeros_like(v) for k, v in self.params.items()}

    def grads_flat(self, grads):
        return np.concatenate([grads[k].ravel() for k in self._order])

    def forward(self, obs: np.ndarray):
        obs = np.atleast_2d(np.asarray(obs, dtype=np.float64))
        p = self.params
        a1 = obs @ p["W1"] + p["b1"]
        h1 = np.tanh(a1)
        a2 = h1 @ p["W2"] + p["b2"]
        h2 = np.tanh(a2)
        q = h2 @ p["Wq"] + p["bq"]
        return q, (obs, h1, h2)

    def backward(self, cache, dq: np.ndarray, grads) -> None:
        obs, h1, h2 = cache
        p = self.params
        grads["Wq"] += h2.T @ dq
        grads["bq"] += dq.sum(axis=0)
        dh2 = dq @ p["Wq"].T
        da2 = dh2 * (1.0 - h2 * h2)
        grads["W2"] += h1.T @ da2
        grads["b2"] += da2.sum(axis=0)
        dh1 = da2 @ p["W2"].T
        da1 = dh1 * (1.0 - h1 * h1)
        grads["W1"] += obs.T @ da1
        grads["b1"] += da1.sum(axis=0)
