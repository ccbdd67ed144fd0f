"""End-to-end command-line behavior: artifacts, manifests, exit codes."""

import hashlib
import json
import math
import os
from pathlib import Path

import pytest

from musclebench.cli import entry
from musclebench.muscles import (MuscleParams, beta_from_damping,
                                 derive_geometry)
from musclebench.serialize import fmt_float

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def read_csv(path):
    lines = Path(path).read_text().splitlines()
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    return header, rows


def write_cfg(tmp_path, body, name="exp.cfg"):
    p = tmp_path / name
    p.write_text("schema_version = 1\n" + body)
    return str(p)


TINY_TRAIN = """
[task]
name = hold
horizon = 1.0
[train]
population = 8
generations = 3
seeds = 0 1 2
"""


# ------------------------------------------------------------ exit codes

def test_bad_config_exits_2_with_anchored_message(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "[actuator]\ntype = torque\n")
    assert entry(["simulate", "--config", cfg,
                  "--out", str(tmp_path / "o")]) == 2
    err = capsys.readouterr().err
    assert err.startswith("error: ")
    assert f"{cfg}:3" in err
    assert "k_scale" in err


def test_missing_config_file_exits_2(tmp_path, capsys):
    assert entry(["simulate", "--config", str(tmp_path / "absent.cfg"),
                  "--out", str(tmp_path / "o")]) == 2
    assert "error:" in capsys.readouterr().err


def test_unknown_key_points_at_its_line(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "[task]\nname = hold\nspeed = 4\n")
    assert entry(["simulate", "--config", cfg,
                  "--out", str(tmp_path / "o")]) == 2
    err = capsys.readouterr().err
    assert f"{cfg}:4" in err
    assert "unknown key 'speed'" in err


def test_unreadable_policy_file_exits_2(tmp_path, capsys):
    bad = tmp_path / "p.json"
    bad.write_text("{broken")
    assert entry(["simulate", "--out", str(tmp_path / "o"),
                  "--policy", str(bad)]) == 2
    assert "unreadable policy file" in capsys.readouterr().err


# -------------------------------------------------------------- simulate

def test_simulate_writes_trace_and_manifest(tmp_path):
    out = tmp_path / "sim"
    assert entry(["simulate", "--out", str(out)]) == 0
    header, rows = read_csv(out / "trace.csv")
    assert header == ["t", "q", "q_dot", "z", "z_dot", "tau", "act_0",
                      "r_task", "r_act", "done"]
    assert len(rows) == 600  # 3 s at dt = 5 ms
    man = json.loads((out / "manifest.json").read_text())
    assert man["command"] == "simulate"
    assert man["schema_version"] == 1
    assert set(man["outputs"]) == {"trace.csv"}
    digest = hashlib.sha1((out / "trace.csv").read_bytes()).hexdigest()
    assert man["outputs"]["trace.csv"] == digest
    assert "time" not in " ".join(man).lower()


def test_simulate_rerun_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert entry(["simulate", "--out", str(a), "--actuator", "muscle"]) == 0
    assert entry(["simulate", "--out", str(b), "--actuator", "muscle"]) == 0
    assert (a / "trace.csv").read_bytes() == (b / "trace.csv").read_bytes()
    ma = json.loads((a / "manifest.json").read_text())
    mb = json.loads((b / "manifest.json").read_text())
    assert ma["outputs"] == mb["outputs"]


def test_pd_regulation_example_converges_to_the_setpoint(tmp_path):
    out = tmp_path / "reg"
    assert entry(["simulate", "--config",
                  str(CONFIGS / "pd_hold_regulation.cfg"),
                  "--out", str(out)]) == 0
    _, rows = read_csv(out / "trace.csv")
    q_final = float(rows[-1][1])
    assert abs(q_final - 0.8) < 1e-3
    # and it genuinely moved: it started at the joint midpoint, not 0.8
    assert abs(float(rows[0][1]) - 0.8) > 0.5


# ----------------------------------------------------------------- train

def test_train_fans_out_per_seed_and_aggregates(tmp_path):
    cfg = write_cfg(tmp_path, TINY_TRAIN)
    out = tmp_path / "tr"
    assert entry(["train", "--config", cfg, "--out", str(out)]) == 0
    names = sorted(os.listdir(out))
    assert names == ["curve_mean.csv", "curve_seed0.csv", "curve_seed1.csv",
                     "curve_seed2.csv", "manifest.json", "policy_seed0.json",
                     "policy_seed1.json", "policy_seed2.json"]
    header, mean_rows = read_csv(out / "curve_mean.csv")
    assert header == ["generation", "mean_return", "max_return",
                      "mean_episode_len"]
    per_seed = [read_csv(out / f"curve_seed{s}.csv")[1] for s in (0, 1, 2)]
    assert all(len(r) == 3 for r in per_seed)
    for g, row in enumerate(mean_rows):
        assert int(row[0]) == g
        for col in (1, 2, 3):
            expect = sum(float(r[g][col]) for r in per_seed) / 3.0
            assert math.isclose(float(row[col]), expect, rel_tol=1e-8)
    man = json.loads((out / "manifest.json").read_text())
    assert man["seeds"] == [0, 1, 2]
    assert len(man["outputs"]) == 7


def test_train_seed_flag_overrides_the_seed_list(tmp_path):
    cfg = write_cfg(tmp_path, TINY_TRAIN)
    out = tmp_path / "tr1"
    assert entry(["train", "--config", cfg, "--out", str(out),
                  "--seed", "5"]) == 0
    assert sorted(os.listdir(out)) == ["curve_mean.csv", "curve_seed5.csv",
                                       "manifest.json", "policy_seed5.json"]


def test_train_rerun_is_byte_identical(tmp_path):
    cfg = write_cfg(tmp_path, TINY_TRAIN)
    a, b = tmp_path / "a", tmp_path / "b"
    assert entry(["train", "--config", cfg, "--out", str(a)]) == 0
    assert entry(["train", "--config", cfg, "--out", str(b)]) == 0
    for name in ("curve_seed0.csv", "curve_mean.csv", "policy_seed1.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_trained_policy_feeds_back_into_simulate(tmp_path):
    cfg = write_cfg(tmp_path, TINY_TRAIN)
    out = tmp_path / "tr"
    assert entry(["train", "--config", cfg, "--out", str(out),
                  "--seed", "0"]) == 0
    sim = tmp_path / "sim"
    assert entry(["simulate", "--config", cfg, "--out", str(sim),
                  "--policy", str(out / "policy_seed0.json")]) == 0
    _, rows = read_csv(sim / "trace.csv")
    assert len(rows) > 0


# ------------------------------------------------------------ sweep-beta

def test_sweep_single_cell_and_recommended_beta(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "[sweep]\nbetas = 0.36\nfreqs = 500\n"
                              "horizon = 3.0\nsettle = 1.5\n")
    out = tmp_path / "sw"
    assert entry(["sweep-beta", "--config", cfg, "--out", str(out)]) == 0
    header, rows = read_csv(out / "sweep.csv")
    assert header == ["beta", "controller_hz", "amplitude", "stable"]
    assert len(rows) == 1
    assert rows[0][0] == "0.36"
    assert rows[0][3] == "1"
    p = MuscleParams()
    rec = beta_from_damping(0.08, derive_geometry(p).a1, p.f_max)
    assert f"recommended beta = {fmt_float(rec)}" in capsys.readouterr().out


def test_sweep_recommendation_follows_config_k_damp(tmp_path, capsys):
    cfg = write_cfg(tmp_path,
                    "[actuator]\ntype = muscle\n[muscle]\n"
                    "beta_source = from-damping\nk_damp = 0.3\n"
                    "[sweep]\nbetas = 0.36\nfreqs = 500\n"
                    "horizon = 3.0\nsettle = 1.5\n")
    out = tmp_path / "sw"
    assert entry(["sweep-beta", "--config", cfg, "--out", str(out)]) == 0
    p = MuscleParams()
    rec = beta_from_damping(0.3, derive_geometry(p).a1, p.f_max)
    assert f"recommended beta = {fmt_float(rec)}" in capsys.readouterr().out


# ------------------------------------------------------- eval-robustness

def test_eval_robustness_writes_table_and_ci_summary(tmp_path, capsys):
    cfg = write_cfg(tmp_path, """
[task]
name = hold
horizon = 1.0
[actuator]
type = pd
k_scale = 5.0
[train]
population = 8
generations = 2
seeds = 0 1
actuators = pd torque
eval_episodes = 4
""")
    out = tmp_path / "rob"
    assert entry(["eval-robustness", "--config", cfg,
                  "--out", str(out)]) == 0
    header, rows = read_csv(out / "robustness.csv")
    assert header == ["seed", "actuator", "success_rate", "mean_return"]
    assert [(r[0], r[1]) for r in rows] == [("0", "pd"), ("1", "pd"),
                                            ("0", "torque"), ("1", "torque")]
    text = capsys.readouterr().out
    assert "pd: success_rate mean=" in text
    assert "torque: success_rate mean=" in text
    assert "ci95=[" in text


def test_eval_robustness_with_torque_requires_k_scale(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "[train]\nactuators = muscle torque\n")
    assert entry(["eval-robustness", "--config", cfg,
                  "--out", str(tmp_path / "o")]) == 2
    assert "k_scale" in capsys.readouterr().err


# -------------------------------------------------------- export-curves

def test_export_curves_schema_and_anchors(tmp_path):
    out = tmp_path / "cv"
    assert entry(["export-curves", "--out", str(out)]) == 0
    header, rows = read_csv(out / "curves.csv")
    assert header == ["l", "fl", "fp", "v_bar", "fv"]
    assert len(rows) == 301
    p = MuscleParams()
    assert float(rows[0][0]) == p.l_min
    assert float(rows[-1][0]) == p.l_max
    assert float(rows[0][1]) == 0.0       # force-length vanishes at l_min
    assert float(rows[-1][1]) == 0.0      # ... and at l_max
    assert float(rows[0][3]) == -1.2
    assert float(rows[0][4]) == 0.0       # force-velocity clamps at fast
    assert float(rows[-1][4]) == p.fv_max  # ... lengthening plateau
