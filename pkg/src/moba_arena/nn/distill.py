"""Student-driven distillation loss: per-head KL(teacher || student) + value fit."""

from __future__ import annotations

import numpy as np

from moba_arena.actions import HEAD_NAMES
from moba_arena.nn.net import PolicyNet


def _kl(p_teacher: np.ndarray, p_student: np.ndarray) -> np.ndarray:
    # Both distributions share the same legal support (same masks).
    log_t = np.log(np.where(p_teacher > 0.0, p_teacher, 1.0))
    log_s = np.log(np.where(p_student > 0.0, p_student, 1.0))
    return (p_teacher * (log_t - log_s)).sum(axis=-1)


def distill_loss(student: PolicyNet, batch: dict, value_coef: float = 0.5,
                 compute_grads: bool = True):
    """Batch keys: obs, masks, consumed [N,6], teacher_probs {head: [N,n]},
    teacher_values [N]. Returns (loss, grads, stats); the KL term is exactly
    0 when student and teacher distributions coincide."""
    obs = np.asarray(batch["obs"], dtype=np.float64)
    consumed = np.asarray(batch["consumed"], dtype=np.float64)
    n = len(obs)
    probs, value, _mem, cache = student.forward(obs, batch["masks"],
                                                batch.get("mem_in"))
    kl_total = np.zeros(n)
    for hi, name in enumerate(HEAD_NAMES):
        kl_total += consumed[:, hi] * _kl(batch["teacher_probs"][name], probs[name])
    value_err = value - np.asarray(batch["teacher_values"], dtype=np.float64)
    kl_mean = kl_total.mean()
    loss = kl_mean + value_coef * (value_err ** 2).mean()
    stats = {"loss": float(loss), "kl": float(kl_mean),
             "value_mse": float((value_err ** 2).mean())}
    if not compute_grads:
        return loss, None, stats

    dvalue = value_coef * 2.0 * value_err / n
    dlogits = {}
    for hi, name in enumerate(HEAD_NAMES):
        scale = (consumed[:, hi] / n)[:, None]
        dlogits[name] = scale * (probs[name] - batch["teacher_probs"][name])
    grads = student.zero_grads()
    student.backward(cache, dlogits, dvalue, grads)
    return loss, grads, stats
