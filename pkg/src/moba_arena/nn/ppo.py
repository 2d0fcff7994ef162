"""Dual-clip PPO loss with exact gradients for the fixed topology.

Per sample with ratio r = exp(logp_new - logp_old) and advantage A:
  standard surrogate  s = min(r*A, clip(r, 1-eps, 1+eps)*A)
  dual-clip surrogate s = s            if A >= 0
                        = max(s, c*A)  otherwise
loss = -mean(s) + value_coef * mean((V - return)^2) - entropy_coef * mean(H)

Joint log-probabilities and entropies sum over the heads consumed by each
sample's button (the stored `consumed` flags).
"""

from __future__ import annotations

import numpy as np

from moba_arena.actions import HEAD_NAMES
from moba_arena.nn.net import PolicyNet


class TrainingError(RuntimeError):
    pass


def _gather_logp(probs: np.ndarray, actions: np.ndarray) -> np.ndarray:
    picked = probs[np.arange(len(actions)), actions]
    return np.log(np.maximum(picked, 1e-300))


def _entropy(probs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    logp = np.log(np.where(probs > 0.0, probs, 1.0))
    return -(probs * logp).sum(axis=-1), logp


def _surrogate(ratio: np.ndarray, adv: np.ndarray, epsilon: float, c: float,
               dual_clip: bool) -> tuple[np.ndarray, np.ndarray]:
    """Returns (surrogate, d surrogate / d ratio)."""
    pos = adv >= 0.0
    s = np.where(pos, adv * np.minimum(ratio, 1.0 + epsilon),
                 adv * np.maximum(ratio, 1.0 - epsilon))
    ds = np.where(pos, adv * (ratio < 1.0 + epsilon),
                  adv * (ratio > 1.0 - epsilon))
    if dual_clip:
        floor = c * adv
        floored = (~pos) & (s < floor)
        s = np.where(floored, floor, s)
        ds = np.where(floored, 0.0, ds)
    return s, ds


def ppo_loss(net: PolicyNet, batch: dict, epsilon: float = 0.2, c: float = 3.0,
             dual_clip: bool = True, value_coef: float = 0.5,
             entropy_coef: float = 0.01, compute_grads: bool = True):
    """Flat-batch loss (+ gradients). Batch keys: obs [N,D], masks {head: [N,n]},
    actions [N,6], consumed [N,6], old_logp [N], advantages [N], returns [N],
    and mem_in [N,M] when the network is recurrent."""
    obs = np.asarray(batch["obs"], dtype=np.float64)
    actions = np.asarray(batch["actions"], dtype=np.int64)
    consumed = np.asarray(batch["consumed"], dtype=np.float64)
    old_logp = np.asarray(batch["old_logp"], dtype=np.float64)
    adv = np.asarray(batch["advantages"], dtype=np.float64)
    returns = np.asarray(batch["returns"], dtype=np.float64)
    for name, arr in (("advantages", adv), ("old_logp", old_logp), ("returns", returns)):
        if not np.isfinite(arr).all():
            bad = int(np.flatnonzero(~np.isfinite(arr))[0])
            raise TrainingError(f"non-finite {name} at batch index {bad}")
    n = len(obs)

    probs, value, _mem, cache = net.forward(obs, batch["masks"],
                                            batch.get("mem_in"))

    logp_heads = {}
    entropies = {}
    logp_tables = {}
    logp_new = np.zeros(n)
    joint_entropy = np.zeros(n)
    for hi, name in enumerate(HEAD_NAMES):
        lp = _gather_logp(probs[name], actions[:, hi])
        ent, logp_table = _entropy(probs[name])
        logp_heads[name] = lp
        entropies[name] = ent
        logp_tables[name] = logp_table
        logp_new += consumed[:, hi] * lp
        joint_entropy += consumed[:, hi] * ent

    ratio = np.exp(logp_new - old_logp)
    surrogate, ds_dr = _surrogate(ratio, adv, epsilon, c, dual_clip)
    value_err = value - returns
    policy_loss = -surrogate.mean()
    value_loss = value_coef * (value_err ** 2).mean()
    entropy_mean = joint_entropy.mean()
    loss = policy_loss + value_loss - entropy_coef * entropy_mean

    stats = {
        "loss": float(loss),
        "policy_loss": float(policy_loss),
        "value_loss": float(value_loss),
        "entropy": float(entropy_mean),
        "ratio_mean": float(ratio.mean()),
        "surrogate_mean": float(surrogate.mean()),
    }
    if not compute_grads:
        return loss, None, stats

    # d loss / d logp_new, shared by every consumed head.
    dlogp = (-1.0 / n) * ds_dr * ratio
    dvalue = value_coef * 2.0 * value_err / n
    dlogits = {}
    for hi, name in enumerate(HEAD_NAMES):
        p = probs[name]
        onehot = np.zeros_like(p)
        onehot[np.arange(n), actions[:, hi]] = 1.0
        coeff_pg = (dlogp * consumed[:, hi])[:, None]
        dl = (onehot - p) * coeff_pg
        coeff_ent = ((-entropy_coef / n) * consumed[:, hi])[:, None]
        dl += coeff_ent * (-p * (logp_tables[name] + entropies[name][:, None]))
        dlogits[name] = dl

    grads = net.zero_grads()
    net.backward(cache, dlogits, dvalue, grads)
    return loss, grads, stats


def ppo_loss_recurrent(net: PolicyNet, seq_batch: dict, epsilon: float = 0.2,
                       c: float = 3.0, dual_clip: bool = True,
                       value_coef: float = 0.5, entropy_coef: float = 0.01,
                       compute_grads: bool = True):
    """Sequence variant: obs [B,T,D], per-head masks [B,T,n], mem0 [B,M].

    The memory cell is unrolled for T steps and gradients flow through time.
    """
    obs = np.asarray(seq_batch["obs"], dtype=np.float64)
    batch, steps = obs.shape[0], obs.shape[1]
    n = batch * steps

    mem = np.asarray(seq_batch["mem0"], dtype=np.float64)
    caches = []
    probs_seq = []
    values = np.zeros((batch, steps))
    for t in range(steps):
        masks_t = {name: seq_batch["masks"][name][:, t] for name in HEAD_NAMES}
        probs, value, mem, cache = net.forward(obs[:, t], masks_t, mem)
        caches.append(cache)
        probs_seq.append(probs)
        values[:, t] = value

    actions = np.asarray(seq_batch["actions"], dtype=np.int64)      # [B,T,6]
    consumed = np.asarray(seq_batch["consumed"], dtype=np.float64)  # [B,T,6]
    old_logp = np.asarray(seq_batch["old_logp"], dtype=np.float64)  # [B,T]
    adv = np.asarray(seq_batch["advantages"], dtype=np.float64)
    returns = np.asarray(seq_batch["returns"], dtype=np.float64)

    logp_new = np.zeros((batch, steps))
    joint_entropy = np.zeros((batch, steps))
    per_step = []
    for t in range(steps):
        tables = {}
        for hi, name in enumerate(HEAD_NAMES):
            lp = _gather_logp(probs_seq[t][name], actions[:, t, hi])
            ent, logp_table = _entropy(probs_seq[t][name])
            tables[name] = (lp, ent, logp_table)
            logp_new[:, t] += consumed[:, t, hi] * lp
            joint_entropy[:, t] += consumed[:, t, hi] * ent
        per_step.append(tables)

    ratio = np.exp(logp_new - old_logp)
    surrogate, ds_dr = _surrogate(ratio, adv, epsilon, c, dual_clip)
    value_err = values - returns
    loss = (-surrogate.mean()
            + value_coef * (value_err ** 2).mean()
            - entropy_coef * joint_entropy.mean())
    stats = {"loss": float(loss), "entropy": float(joint_entropy.mean()),
             "ratio_mean": float(ratio.mean())}
    if not compute_grads:
        return loss, None, stats

    dlogp = (-1.0 / n) * ds_dr * ratio
    dvalue_all = value_coef * 2.0 * value_err / n
    grads = net.zero_grads()
    dmem = np.zeros((batch, net.memory))
    for t in range(steps - 1, -1, -1):
        dlogits = {}
        for hi, name in enumerate(HEAD_NAMES):
            p = probs_seq[t][name]
            lp, ent, logp_table = per_step[t][name]
            onehot = np.zeros_like(p)
            onehot[np.arange(batch), actions[:, t, hi]] = 1.0
            coeff_pg = (dlogp[:, t] * consumed[:, t, hi])[:, None]
            dl = (onehot - p) * coeff_pg
            coeff_ent = ((-entropy_coef / n) * consumed[:, t, hi])[:, None]
            dl += coeff_ent * (-p * (logp_table + ent[:, None]))
            dlogits[name] = dl
        dmem_prev = net.backward_with_memory(caches[t], dlogits, dvalue_all[:, t],
                                             grads, dmem)
        dmem = dmem_prev
    return loss, grads, stats
