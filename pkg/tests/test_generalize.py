import numpy as np
import pytest

from moba_arena.actions import HEAD_NAMES, HEAD_SIZES
from moba_arena.config import ConfigurationError
from moba_arena.generalize import DistillConfig, TaskSet, distill, heldout_kl
from moba_arena.nn.distill import distill_loss
from moba_arena.nn.net import PolicyNet


def test_taskset_validation():
    with pytest.raises(ConfigurationError):
        TaskSet(tasks=())
    with pytest.raises(ConfigurationError):
        TaskSet(tasks=(("diaochan", "nosuch"),))
    with pytest.raises(ConfigurationError):
        TaskSet(tasks=(("diaochan", "luna"),), weights=(0.5, 0.5))


def test_task_sampling_frequency_within_3_sigma():
    task_set = TaskSet(tasks=(("diaochan", "diaochan"),
                              ("diaochan", "luna"),
                              ("diaochan", "luban")),
                       weights=(0.5, 0.3, 0.2))
    rng = np.random.default_rng(0)
    n = 10_000
    counts = np.zeros(3)
    for _ in range(n):
        counts[task_set.sample(rng)] += 1
    for k, p in enumerate(task_set.probabilities()):
        sigma = np.sqrt(n * p * (1 - p))
        assert abs(counts[k] - n * p) <= 3 * sigma


def _random_masks_batch(rng, n):
    masks = {}
    for name, size in zip(HEAD_NAMES, HEAD_SIZES):
        m = (rng.random((n, size)) > 0.3).astype(np.int8)
        m[:, 0] = 1
        masks[name] = m
    return masks


def test_distill_kl_identity_when_parameters_coincide():
    rng = np.random.default_rng(1)
    teacher = PolicyNet(obs_dim=30, hidden=16, memory=8, seed=5)
    student = teacher.clone()
    n = 12
    obs = rng.normal(size=(n, 30))
    masks = _random_masks_batch(rng, n)
    teacher_probs, teacher_values, _, _ = teacher.forward(obs, masks)
    batch = {"obs": obs, "masks": masks,
             "consumed": np.ones((n, 6)),
             "teacher_probs": teacher_probs,
             "teacher_values": teacher_values}
    loss, grads, stats = distill_loss(student, batch)
    assert stats["kl"] == 0.0
    assert stats["value_mse"] == 0.0
    assert loss == 0.0


def test_distill_loss_decreases():
    rng = np.random.default_rng(2)
    teacher = PolicyNet(obs_dim=30, hidden=16, memory=8, seed=6)
    student = PolicyNet(obs_dim=30, hidden=16, memory=8, seed=7)
    n = 64
    obs = rng.normal(size=(n, 30))
    masks = _random_masks_batch(rng, n)
    teacher_probs, teacher_values, _, _ = teacher.forward(obs, masks)
    batch = {"obs": obs, "masks": masks, "consumed": np.ones((n, 6)),
             "teacher_probs": teacher_probs, "teacher_values": teacher_values}
    from moba_arena.nn.adam import Adam

    adam = Adam(student.flat().size, lr=3e-3)
    losses = []
    for _ in range(60):
        loss, grads, _ = distill_loss(student, batch)
        student.set_flat(adam.step(student.flat(), student.grads_flat(grads)))
        losses.append(loss)
    assert losses[-1] < 0.1 * losses[0]


def test_distill_requires_teachers():
    with pytest.raises(ConfigurationError):
        distill({}, None, DistillConfig(steps=10))


def test_distill_rejects_unknown_task_heroes():
    teacher = PolicyNet(seed=0)
    with pytest.raises(ConfigurationError):
        distill({("diaochan", "martian"): teacher}, None, DistillConfig(steps=10))


@pytest.mark.slow
def test_self_distillation_near_fixed_point():
    """Teacher == student: on-policy KL stays ~0 through a short run."""
    teacher = PolicyNet(seed=11)
    student = teacher.clone()
    student = distill({("diaochan", "diaochan"): teacher}, student,
                      DistillConfig(steps=600, batch_size=128, lr=1e-4,
                                    time_limit_s=30, seed=3))
    kl = heldout_kl(student, teacher, ("diaochan", "diaochan"), n_states=150,
                    seed=77, time_limit_s=30)
    assert kl < 1e-3


def test_transfer_report_degenerate_rows_match():
    from moba_arena.generalize import transfer_report

    model = "bt:1"
    report = transfer_report({"direct": model, "multitask": model,
                              "distilled": model},
                             axis="vary-opponent", fixed_hero="diaochan",
                             heroes=["diaochan", "luna"], n_per_cell=2,
                             seeds=(0,), time_limit_s=60)
    rows = report["rows"]
    assert len(rows) == 3
    assert rows["direct"]["mean"] == rows["multitask"]["mean"] == rows["distilled"]["mean"]
