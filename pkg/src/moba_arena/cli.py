"""arena: gateway server, BT calibration, training, and evaluation commands."""

from __future__ import annotations

import argparse
import json
import os
import sys

import yaml


def _parse_bind(bind: str) -> tuple[str, int]:
    host, _, port = bind.rpartition(":")
    return host or "127.0.0.1", int(port)


def _parse_task(task: str) -> tuple[str, str]:
    target, _, opponent = task.partition(":")
    if not opponent:
        raise SystemExit(f"task must look like target:opponent, got {task!r}")
    return target.lower(), opponent.lower()


def cmd_serve(args) -> None:
    from moba_arena.gateway import gateway_serve

    host, port = _parse_bind(args.bind)
    print(f"gateway listening on {host}:{port}")
    gateway_serve(host, port, step_timeout_s=args.step_timeout)


def cmd_calibrate_bt(args) -> None:
    from moba_arena.bt import calibrate_ladder

    heroes = [h.lower() for h in args.heroes] if args.heroes else None
    report = calibrate_ladder(heroes, n_matches=args.n, seed=args.seed,
                              time_limit_s=args.time_limit)
    for pair in report["pairs"]:
        flag = "ok" if pair["ok"] else "FAIL"
        print(f"{pair['hero']}: bt:{pair['high']} vs bt:{pair['low']} "
              f"win rate {pair['win_rate']:.3f} (need >= {pair['required']}) [{flag}]")
    if not report["passed"]:
        raise SystemExit(f"ladder calibration failed on {report['failing_pair']}")
    print("ladder calibration passed")


def cmd_selfplay(args) -> None:
    from moba_arena.train.learner import TrainConfig, Trainer

    cfg = TrainConfig(hero=args.hero.lower(), opponent=args.opponent,
                      total_samples=args.steps, workers=args.envs,
                      seed=args.seed, ckpt_dir=args.ckpt,
                      log_path=os.path.join(args.ckpt, "train.jsonl") if args.ckpt else None,
                      eval_every=args.eval_every, use_masks=not args.no_masks,
                      recurrent=args.recurrent, time_limit_s=args.time_limit)
    trainer = Trainer(cfg)
    try:
        trainer.run()
    finally:
        trainer.close()
    print(f"trained {trainer.samples} samples over {trainer.iteration} iterations")


def cmd_eval(args) -> None:
    from moba_arena.evalarena.matches import run_matches

    stats = run_matches(args.a, args.b, task=_parse_task(args.task), n=args.n,
                        paired_seeds=not args.unpaired, seed=args.seed,
                        time_limit_s=args.time_limit, workers=args.workers)
    reward_a, reward_b = stats.mean_reward()
    hurt_a, hurt_b = stats.mean_hurt_per_frame()
    print(json.dumps({
        "n": stats.n,
        "win_rate_a": round(stats.win_rate_a, 4),
        "win_rate_std": round(stats.win_rate_std, 4),
        "mean_reward": [round(reward_a, 3), round(reward_b, 3)],
        "mean_hurt_per_frame": [round(hurt_a, 5), round(hurt_b, 5)],
    }, indent=2))


def cmd_matrix(args) -> None:
    from moba_arena.evalarena.matrix import task_matrix, write_matrix_csv

    axis = "vary-opponent" if args.axis == "opponent" else "vary-target"
    cells = task_matrix(args.model, axis, args.fixed.lower(), n_per_cell=args.n,
                        opponent_level=args.level, seed=args.seed,
                        time_limit_s=args.time_limit, workers=args.workers)
    for cell in cells:
        print(f"{cell['task']}: {cell['win_rate']:.3f} +- {cell['std']:.3f}")
    if args.out:
        write_matrix_csv(cells, args.out)
        print(f"wrote {args.out}")


def cmd_multitask(args) -> None:
    from moba_arena.generalize import TaskSet, multitask_train
    from moba_arena.train.learner import TrainConfig

    with open(args.tasks, "r", encoding="utf-8") as handle:
        payload = yaml.safe_load(handle)
    tasks = tuple((t[0].lower(), t[1].lower()) for t in payload["tasks"])
    task_set = TaskSet(tasks=tasks,
                       opponent_level=int(payload.get("opponent_level", 1)))
    cfg = TrainConfig(hero=tasks[0][0], total_samples=args.steps,
                      workers=args.envs, seed=args.seed, ckpt_dir=args.ckpt,
                      time_limit_s=args.time_limit)
    net, trainer = multitask_train(task_set, cfg)
    print(f"multitask training done: {trainer.samples} samples, "
          f"{len(task_set.tasks)} tasks")


def cmd_distill(args) -> None:
    from moba_arena.generalize import DistillConfig, distill
    from moba_arena.train.checkpoint import load_checkpoint, save_checkpoint

    teachers = {}
    for name in sorted(os.listdir(args.teachers)):
        if not name.endswith(".npz"):
            continue
        net, meta, _ = load_checkpoint(os.path.join(args.teachers, name))
        task = meta.get("task")
        if not task:
            raise SystemExit(f"teacher {name} lacks a 'task' in its metadata")
        teachers[(task[0], task[1])] = net
    student = distill(teachers, None, DistillConfig(steps=args.steps, seed=args.seed))
    out = args.out or os.path.join(args.teachers, "student.npz")
    save_checkpoint(out, student, meta={"distilled_from": len(teachers)})
    print(f"student written to {out}")


def cmd_transfer_report(args) -> None:
    from moba_arena.generalize import transfer_report

    models = {}
    for spec in args.models:
        name, _, path = spec.partition("=")
        models[name] = path
    axis = "vary-opponent" if args.axis == "opponent" else "vary-target"
    report = transfer_report(models, axis, args.fixed.lower(), n_per_cell=args.n,
                             seeds=tuple(range(args.seeds)), workers=args.workers)
    print(json.dumps(report, indent=2))


def cmd_bench(args) -> None:
    from moba_arena.train.bench import scaling_curve

    counts = [int(v) for v in args.envs.split(",")]
    curve = scaling_curve(counts, args.duration, seed=args.seed)
    print(f"{'envs':>6} {'steps/h':>14} {'samples/h':>14}")
    for row in curve:
        print(f"{row['n_envs']:>6} {row['steps_per_hour']:>14.0f} "
              f"{row['samples_per_hour']:>14.0f}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            json.dump(curve, handle, indent=2)
        print(f"wrote {args.out}")


def cmd_replay(args) -> None:
    from moba_arena.replay import verify_replay

    count = verify_replay(args.file)
    print(f"verified {count} records bit-exactly")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="arena")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="run the gateway service")
    p.add_argument("--bind", default="127.0.0.1:9331")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--step-timeout", type=float, default=10.0)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("calibrate-bt", help="assert BT ladder monotonicity")
    p.add_argument("--heroes", nargs="*")
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--time-limit", type=int, default=600)
    p.set_defaults(func=cmd_calibrate_bt)

    p = sub.add_parser("selfplay", help="self-play PPO training")
    p.add_argument("--envs", type=int, default=2)
    p.add_argument("--hero", default="diaochan")
    p.add_argument("--opponent", default="mirror")
    p.add_argument("--steps", type=int, default=1_000_000)
    p.add_argument("--ckpt", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eval-every", type=int, default=10)
    p.add_argument("--no-masks", action="store_true")
    p.add_argument("--recurrent", action="store_true")
    p.add_argument("--time-limit", type=int, default=480)
    p.set_defaults(func=cmd_selfplay)

    p = sub.add_parser("eval", help="head-to-head matches")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--task", required=True, help="target:opponent hero ids")
    p.add_argument("--n", type=int, default=98)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--unpaired", action="store_true")
    p.add_argument("--time-limit", type=int, default=600)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("matrix", help="20-hero task matrix for one model")
    p.add_argument("--model", required=True)
    p.add_argument("--axis", choices=("opponent", "target"), required=True)
    p.add_argument("--fixed", required=True)
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--level", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--time-limit", type=int, default=600)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("multitask", help="multi-task training over a task file")
    p.add_argument("--tasks", required=True)
    p.add_argument("--steps", type=int, default=500_000)
    p.add_argument("--envs", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ckpt", default=None)
    p.add_argument("--time-limit", type=int, default=480)
    p.set_defaults(func=cmd_multitask)

    p = sub.add_parser("distill", help="student-driven distillation from teachers")
    p.add_argument("--teachers", required=True)
    p.add_argument("--steps", type=int, default=20_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_distill)

    p = sub.add_parser("transfer-report", help="direct/multitask/distilled comparison")
    p.add_argument("--models", nargs="+", required=True, help="name=path pairs")
    p.add_argument("--axis", choices=("opponent", "target"), required=True)
    p.add_argument("--fixed", required=True)
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--seeds", type=int, default=5)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_transfer_report)

    p = sub.add_parser("bench", help="throughput scaling curve")
    p.add_argument("--envs", default="1,2,4,8")
    p.add_argument("--duration", type=float, default=20.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("replay", help="verify a replay log bit-exactly")
    p.add_argument("file")
    p.set_defaults(func=cmd_replay)

    return parser


def main(argv=None) -> None:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.func(args)


if __name__ == "__main__":
    main(sys.argv[1:])
