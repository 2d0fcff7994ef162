"""Central finite-difference verification of the hand-derived gradients."""

from __future__ import annotations

import numpy as np


def grad_check(net, loss_fn, n_coords: int = 200, fd_step: float = 1e-4,
               seed: int = 0) -> float:
    """Max relative error between analytic and central-difference gradients.

    `loss_fn(compute_grads)` evaluates the loss on a fixed batch with the
    network's current parameters, returning (loss, grads_dict_or_None, stats).
    Relative error uses an absolute floor of 1 so near-zero coordinates are
    compared absolutely.
    """
    _loss, grads, _stats = loss_fn(compute_grads=True)
    analytic = net.grads_flat(grads)
    theta = net.flat()
    rng = np.random.default_rng(seed)
    coords = rng.choice(theta.size, size=min(n_coords, theta.size), replace=False)

    worst = 0.0
    try:
        for k in coords:
            saved = theta[k]
            theta[k] = saved + fd_step
            net.set_flat(theta)
            loss_plus = loss_fn(compute_grads=False)[0]
            theta[k] = saved - fd_step
            net.set_flat(theta)
            loss_minus = loss_fn(compute_grads=False)[0]
            theta[k] = saved
            fd = (loss_plus - loss_minus) / (2.0 * fd_step)
            denom = max(1.0, abs(fd), abs(analytic[k]))
            worst = max(worst, abs(fd - analytic[k]) / denom)
    finally:
        net.set_flat(theta)
    return worst
