"""Command-line front end.

Every command writes its CSV artifacts into one output directory plus a
manifest.json that echoes the configuration, the seeds, the package
version, and SHA-1 hashes of each artifact, so a rerun with the same
config and seed can be verified byte-for-byte. Manifests carry no
timestamps for exactly that reason.

Exit codes: 0 success, 2 configuration problem, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

import numpy as np

from . import __version__
from .config import (SCHEMA_VERSION, ConfigError, apply_overrides,
                     build_experiment, check_for_command, echo_as_dict,
                     parse_config_file, parse_config_text)
from .learn import (CurveRow, MLPPolicy, PolicySpec, bootstrap_ci,
                    controller_for, reward_action_rate, robustness_rows,
                    task_reward_fn, train, write_learning_csv,
                    write_robustness_csv)
from .multirate import run_episode, sweep_beta, write_sweep_csv
from .muscles import (MuscleParams, beta_from_damping, derive_geometry,
                      fl_curve, fp_curve, fv_curve)
from .serialize import fmt_float, write_csv


# ------------------------------------------------------------- manifests

def _sha1_file(path):
    h = hashlib.sha1()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(out_dir, command, cfg, seeds, outputs):
    doc = {
        "command": command,
        "schema_version": SCHEMA_VERSION,
        "package_version": __version__,
        "config": echo_as_dict(cfg.echo),
        "seeds": [int(s) for s in seeds],
        "outputs": {name: _sha1_file(os.path.join(out_dir, name))
                    for name in sorted(outputs)},
    }
    canon = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    doc["content_hash"] = hashlib.sha1(canon.encode()).hexdigest()
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


# ---------------------------------------------------------- policy files

def save_policy_json(path, result):
    doc = {"n_in": result.spec.n_in, "n_out": result.spec.n_out,
           "hidden": list(result.spec.hidden),
           "params": [float(x) for x in result.policy.get_params()]}
    with open(path, "w", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_policy_json(path):
    with open(path) as fh:
        doc = json.load(fh)
    spec = PolicySpec(n_in=int(doc["n_in"]), n_out=int(doc["n_out"]),
                      hidden=tuple(int(h) for h in doc["hidden"]))
    return MLPPolicy(spec, np.asarray(doc["params"], dtype=float))


# ------------------------------------------------------------- commands

def scripted_policy(cfg):
    """Fallback when no trained policy is supplied: the pd actuator tracks
    the task reference (hold target, or a ramp at the walk target
    velocity), direct torque idles at zero, and the muscle pair holds half
    excitation on both sides."""
    task = cfg.task
    if cfg.actuator == "pd":
        lo, hi = task.plant.joint_range
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        if task.name == "walk":
            def ref(t):
                return min(max(task.q0 + task.reward.v_target * t, lo), hi)
        elif task.name == "hold":
            def ref(t):
                return task.reward.hold_target
        else:
            def ref(t):
                return mid

        def policy(obs, t):
            u = (ref(t) - mid) / half
            return (min(max(u, -1.0), 1.0),)
        return policy
    if cfg.actuator == "torque":
        return lambda obs, t: (0.0,)
    return lambda obs, t: (0.0, 0.0)


def cmd_simulate(cfg, args, out_dir):
    task = cfg.task
    ctl = controller_for(cfg.actuator, task.plant, cfg.muscle,
                         task.torque_k_scale,
                         floor_damping_on=task.floor_damping_on,
                         pd_gains=task.pd_gains,
                         k_damp_floor=task.k_damp_floor)
    policy = (args.loaded_policy if args.loaded_policy is not None
              else scripted_policy(cfg))
    w_act = task.reward.w_act
    trace = run_episode(
        task.plant, ctl, policy, task.rates, task.horizon,
        init_state=task.plant.init_state(q=task.q0),
        reward_task_fn=task_reward_fn(task),
        reward_action_fn=lambda a, b: reward_action_rate(a, b, w_act))
    trace.to_csv(os.path.join(out_dir, "trace.csv"))
    print(f"simulate: task={task.name} actuator={cfg.actuator} "
          f"rows={len(trace.t)} return={fmt_float(trace.return_)}")
    return ["trace.csv"], ()


def aggregate_curves(curves):
    """Per-generation mean over seeds of each learning-curve column."""
    if not curves or not curves[0]:
        return []
    n_gen = min(len(c) for c in curves)
    return [CurveRow(
        generation=g,
        mean_return=float(np.mean([c[g].mean_return for c in curves])),
        max_return=float(np.mean([c[g].max_return for c in curves])),
        mean_episode_len=float(np.mean([c[g].mean_episode_len
                                        for c in curves])))
        for g in range(n_gen)]


def cmd_train(cfg, args, out_dir):
    outputs = []
    curves = []
    for seed in cfg.seeds:
        res = train(cfg.task, cfg.actuator, cfg.trainer, cfg.noise,
                    seed=seed, muscle_params=cfg.muscle)
        cname = f"curve_seed{seed}.csv"
        write_learning_csv(res.curve, os.path.join(out_dir, cname))
        pname = f"policy_seed{seed}.json"
        save_policy_json(os.path.join(out_dir, pname), res)
        outputs += [cname, pname]
        curves.append(res.curve)
        if res.curve:
            print(f"train: seed={seed} "
                  f"first mean_return={fmt_float(res.curve[0].mean_return)} "
                  f"last mean_return={fmt_float(res.curve[-1].mean_return)}")
        else:
            print(f"train: seed={seed} (0 generations)")
    write_learning_csv(aggregate_curves(curves),
                       os.path.join(out_dir, "curve_mean.csv"))
    outputs.append("curve_mean.csv")
    return outputs, cfg.seeds


def cmd_sweep_beta(cfg, args, out_dir):
    p = cfg.muscle or MuscleParams()
    # the sweep probes the real-backend loop: floor damping on, fine steps
    rows = sweep_beta(params=p, betas=cfg.sweep_betas, freqs=cfg.sweep_freqs,
                      horizon=cfg.sweep_horizon,
                      settle_time=cfg.sweep_settle, hardware_faithful=True)
    write_sweep_csv(rows, os.path.join(out_dir, "sweep.csv"))
    k_damp = (cfg.muscle_k_damp if cfg.muscle_k_damp is not None
              else cfg.k_damp_floor)
    rec = beta_from_damping(k_damp, derive_geometry(p).a1, p.f_max)
    n_stable = sum(r.stable for r in rows)
    print(f"sweep-beta: {len(rows)} cells, {n_stable} stable")
    print(f"recommended beta = {fmt_float(rec)} "
          f"(emulates viscous damping k_damp = {fmt_float(k_damp)})")
    return ["sweep.csv"], ()


def cmd_eval_robustness(cfg, args, out_dir):
    rows = robustness_rows(cfg.task, actuators=cfg.actuators,
                           seeds=cfg.seeds, train_cfg=cfg.trainer,
                           noise=cfg.noise, n_episodes=cfg.eval_episodes,
                           muscle_params=cfg.muscle)
    write_robustness_csv(rows, os.path.join(out_dir, "robustness.csv"))
    for act in cfg.actuators:
        srs = [r.success_rate for r in rows if r.actuator == act]
        rets = [r.mean_return for r in rows if r.actuator == act]
        slo, shi = bootstrap_ci(srs)
        rlo, rhi = bootstrap_ci(rets)
        print(f"{act}: success_rate mean={fmt_float(float(np.mean(srs)))} "
              f"ci95=[{fmt_float(slo)}, {fmt_float(shi)}] "
              f"mean_return mean={fmt_float(float(np.mean(rets)))} "
              f"ci95=[{fmt_float(rlo)}, {fmt_float(rhi)}]")
    return ["robustness.csv"], cfg.seeds


def cmd_export_curves(cfg, args, out_dir):
    p = cfg.muscle or MuscleParams()
    n = 301
    ls = np.linspace(p.l_min, p.l_max, n)
    vs = np.linspace(-1.2, (p.fv_max - 1.0) + 0.2, n)
    rows = [[float(l), fl_curve(float(l), p), fp_curve(float(l), p),
             float(v), fv_curve(float(v), p)] for l, v in zip(ls, vs)]
    write_csv(os.path.join(out_dir, "curves.csv"),
              ["l", "fl", "fp", "v_bar", "fv"], rows)
    print(f"export-curves: {n} samples per curve")
    return ["curves.csv"], ()


_HANDLERS = {
    "simulate": cmd_simulate,
    "train": cmd_train,
    "sweep-beta": cmd_sweep_beta,
    "eval-robustness": cmd_eval_robustness,
    "export-curves": cmd_export_curves,
}


# ---------------------------------------------------------------- entry

def build_parser():
    ap = argparse.ArgumentParser(
        prog="musclebench",
        description="Benchmark antagonistic muscle-pair actuation against "
                    "pd and direct-torque control on desk-scale plants.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="experiment config file")
        p.add_argument("--out", help="output directory (overrides config)")
        p.add_argument("--seed", type=int,
                       help="replace the training seed list with one seed")
        p.add_argument("--actuator", choices=("pd", "torque", "muscle"))
        p.add_argument("--task", choices=("walk", "hop", "hold"))
        p.add_argument("--mode", choices=("ideal-sim", "hardware-faithful"))
        p.set_defaults(loaded_policy=None)

    ps = sub.add_parser("simulate",
                        help="one clean episode -> trace.csv")
    common(ps)
    ps.add_argument("--policy", help="policy JSON produced by train")
    common(sub.add_parser(
        "train", help="cross-entropy policy search -> learning curves "
                      "and policy JSON per seed"))
    common(sub.add_parser(
        "sweep-beta", help="velocity-gain stability map -> sweep.csv"))
    common(sub.add_parser(
        "eval-robustness", help="train and evaluate actuators on fresh "
                                "seeds -> robustness.csv"))
    common(sub.add_parser(
        "export-curves", help="sample the actuator force curves -> "
                              "curves.csv"))
    return ap


def entry(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config is not None:
            raw = parse_config_file(args.config)
        else:
            raw = parse_config_text(f"schema_version = {SCHEMA_VERSION}\n",
                                    "<defaults>")
        raw = apply_overrides(raw, seed=args.seed, out=args.out,
                              actuator=args.actuator, task=args.task,
                              mode=args.mode)
        cfg = build_experiment(raw)
        check_for_command(raw, cfg, args.command)
        if getattr(args, "policy", None):
            try:
                args.loaded_policy = load_policy_json(args.policy)
            except (OSError, ValueError, KeyError, TypeError) as exc:
                raise ConfigError(args.policy, 1,
                                  f"unreadable policy file: {exc}")
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        os.makedirs(cfg.out_dir, exist_ok=True)
        outputs, seeds = _HANDLERS[args.command](cfg, args, cfg.out_dir)
        write_manifest(cfg.out_dir, args.command, cfg, seeds, outputs)
        print(f"wrote {len(outputs)} artifact(s) + manifest.json "
              f"to {cfg.out_dir}")
        return 0
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def main():
    raise SystemExit(entry())
