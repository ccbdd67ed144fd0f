"""Line-oriented experiment configuration.

The format is deliberately tiny so error messages can point at the exact
line: `[section]` headers, `key = value` pairs, `#` comments. Unknown
sections and keys are rejected (strict schema, versioned), and cross-field
rules (actuator/muscle pairing, rate consistency, required scales) are
enforced at build time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .actuators import PDGains
from .learn import NoiseAndDR, RewardConfig, Task, TrainerConfig, make_task
from .muscles import MuscleParams, beta_from_damping, derive_geometry
from .multirate import SWEEP_FREQS, RateConfig
from .plants import HopperPlant


class ConfigError(Exception):
    """Configuration problem anchored to a file location."""

    def __init__(self, path, line, message):
        self.path = path
        self.line = line
        self.message = message
        super().__init__(f"{path}:{line}: {message}")


@dataclass
class RawConfig:
    """Parsed but untyped: values as strings with their line numbers."""

    path: str
    top: dict          # key -> (raw value, line)
    sections: dict     # section -> {key -> (raw value, line)}
    section_lines: dict


def parse_config_text(text: str, path: str = "<config>") -> RawConfig:
    top = {}
    sections = {}
    section_lines = {}
    current = None
    for i, raw_line in enumerate(text.splitlines(), 1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]") or len(line) < 3:
                raise ConfigError(path, i,
                                  f"malformed section header {line!r}")
            name = line[1:-1].strip()
            if name in sections:
                raise ConfigError(path, i, f"duplicate section [{name}]")
            sections[name] = {}
            section_lines[name] = i
            current = name
            continue
        if "=" not in line:
            raise ConfigError(path, i,
                              f"expected 'key = value', got {line!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if not key:
            raise ConfigError(path, i, "empty key before '='")
        target = top if current is None else sections[current]
        if key in target:
            where = "top level" if current is None else f"[{current}]"
            raise ConfigError(path, i, f"duplicate key {key!r} in {where}")
        target[key] = (val, i)
    return RawConfig(path=path, top=top, sections=sections,
                     section_lines=section_lines)


def parse_config_file(path) -> RawConfig:
    with open(path) as fh:
        return parse_config_text(fh.read(), path=str(path))


# ------------------------------------------------------------ typed schema

def _float(raw, path, line, key):
    try:
        v = float(raw)
    except ValueError:
        raise ConfigError(path, line, f"{key} expects a number, got {raw!r}")
    if not math.isfinite(v):
        raise ConfigError(path, line, f"{key} must be finite, got {raw!r}")
    return v


def _int(raw, path, line, key):
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(path, line,
                          f"{key} expects an integer, got {raw!r}")


def _bool(raw, path, line, key):
    if raw == "true":
        return True
    if raw == "false":
        return False
    raise ConfigError(path, line,
                      f"{key} expects true or false, got {raw!r}")


def _str(raw, path, line, key):
    return raw


class _Enum:
    def __init__(self, *allowed):
        self.allowed = allowed

    def __call__(self, raw, path, line, key):
        if raw not in self.allowed:
            raise ConfigError(
                path, line, f"{key} must be one of "
                f"{', '.join(self.allowed)}; got {raw!r}")
        return raw


def _floats(raw, path, line, key):
    parts = raw.split()
    if not parts:
        raise ConfigError(path, line, f"{key} expects at least one number")
    return tuple(_float(p, path, line, key) for p in parts)


def _ints(raw, path, line, key):
    parts = raw.split()
    if not parts:
        raise ConfigError(path, line, f"{key} expects at least one integer")
    return tuple(_int(p, path, line, key) for p in parts)


def _range2(raw, path, line, key):
    vals = _floats(raw, path, line, key)
    if len(vals) != 2:
        raise ConfigError(path, line,
                          f"{key} expects exactly two numbers 'lo hi'")
    return vals


class _Words:
    def __init__(self, *allowed):
        self.allowed = allowed

    def __call__(self, raw, path, line, key):
        parts = tuple(raw.split())
        if not parts:
            raise ConfigError(path, line, f"{key} expects at least one value")
        for p in parts:
            if p not in self.allowed:
                raise ConfigError(
                    path, line, f"{key} entries must be one of "
                    f"{', '.join(self.allowed)}; got {p!r}")
        return parts


_PENDULUM_KEYS = ("inertia", "mgd", "joint_damping", "phi_min", "phi_max",
                  "tau_abs_max")
_HOPPER_KEYS = ("body_mass", "r", "leg_rest_length", "leg_inertia", "g",
                "ground_height", "q_min", "q_max", "tau_abs_max")

SCHEMA = {
    "plant": {"type": _Enum("pendulum", "hopper"),
              **{k: _float for k in set(_PENDULUM_KEYS + _HOPPER_KEYS)}},
    "actuator": {"type": _Enum("pd", "torque", "muscle"),
                 "mode": _Enum("ideal-sim", "hardware-faithful"),
                 "k_stiff": _float, "k_damp": _float, "k_scale": _float,
                 "k_damp_floor": _float},
    "muscle": {"l_min": _float, "l_max": _float, "fv_max": _float,
               "fp_max": _float, "lce_min": _float, "lce_max": _float,
               "f_max": _float, "tau_act": _float, "beta": _float,
               "k_damp": _float,
               "beta_source": _Enum("explicit", "from-damping")},
    "rates": {"policy_hz": _float, "controller_hz": _float,
              "physics_dt": _float, "substeps": _int},
    "train": {"population": _int, "elite_frac": _float, "generations": _int,
              "init_std": _float, "noise_decay": _float, "min_std": _float,
              "n_workers": _int, "randomize": _bool, "seeds": _ints,
              "actuators": _Words("pd", "torque", "muscle"),
              "eval_episodes": _int},
    "noise_dr": {
        "noise_joint_pos": _float, "noise_joint_vel": _float,
        "noise_muscle_len": _float, "noise_muscle_vel": _float,
        "noise_muscle_act": _float, "noise_muscle_force": _float,
        "noise_base_lin_vel": _float, "noise_base_ang_vel": _float,
        "noise_gravity": _float,
        "dr_init_joint_pos": _range2, "dr_init_muscle_act": _range2,
        "dr_friction": _range2, "dr_joint_damping": _range2,
        "dr_push": _range2, "dr_mass_shift": _range2},
    "task": {"name": _Enum("walk", "hop", "hold"), "horizon": _float,
             "v_target": _float, "sigma": _float, "hop_gain": _float,
             "hop_clip": _range2, "w_act": _float, "hold_target": _float,
             "q0": _float, "stop_limit": _float},
    "output": {"directory": _str},
    "sweep": {"betas": _floats, "freqs": _floats, "horizon": _float,
              "settle": _float},
}

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully built experiment: typed objects plus a canonical echo of the
    configuration for reproduction manifests."""

    task: Task
    actuator: str
    mode: str
    pd_gains: PDGains
    k_scale: float | None
    k_damp_floor: float
    muscle: MuscleParams | None
    muscle_k_damp: float | None
    rates: RateConfig
    trainer: TrainerConfig
    seeds: tuple
    actuators: tuple
    eval_episodes: int
    noise: NoiseAndDR
    out_dir: str
    sweep_betas: tuple
    sweep_freqs: tuple
    sweep_horizon: float
    sweep_settle: float
    echo: tuple  # ((section, ((key, value), ...)), ...) in file order


def _typed_sections(raw: RawConfig) -> dict:
    """Validate against the schema; returns {section: {key: typed value}}."""
    if "schema_version" not in raw.top:
        raise ConfigError(raw.path, 1,
                          "missing required top-level key schema_version")
    sv_raw, sv_line = raw.top["schema_version"]
    sv = _int(sv_raw, raw.path, sv_line, "schema_version")
    if sv != SCHEMA_VERSION:
        raise ConfigError(raw.path, sv_line,
                          f"unsupported schema_version {sv}; this build "
                          f"reads version {SCHEMA_VERSION}")
    for key, (_, line) in raw.top.items():
        if key != "schema_version":
            raise ConfigError(raw.path, line,
                              f"unknown top-level key {key!r}; only "
                              "schema_version may appear before a section")
    typed = {}
    for name, entries in raw.sections.items():
        if name not in SCHEMA:
            raise ConfigError(
                raw.path, raw.section_lines[name],
                f"unknown section [{name}]; expected one of "
                f"{', '.join(sorted(SCHEMA))}")
        sec_schema = SCHEMA[name]
        typed[name] = {}
        for key, (val, line) in entries.items():
            if key not in sec_schema:
                raise ConfigError(
                    raw.path, line,
                    f"unknown key {key!r} in [{name}]; expected one of "
                    f"{', '.join(sorted(sec_schema))}")
            typed[name][key] = sec_schema[key](val, raw.path, line, key)
    return typed


def _line_of(raw: RawConfig, section: str, key: str | None = None):
    if key is not None and key in raw.sections.get(section, {}):
        return raw.sections[section][key][1]
    return raw.section_lines.get(section, 1)


def _wrap_value_error(fn, raw, section, key=None):
    try:
        return fn()
    except ValueError as exc:
        raise ConfigError(raw.path, _line_of(raw, section, key), str(exc))


def build_experiment(raw: RawConfig) -> ExperimentConfig:
    typed = _typed_sections(raw)

    def sec(name):
        return typed.get(name, {})

    def get(name, key, default):
        return sec(name).get(key, default)

    # ---- task & reward
    t = sec("task")
    task_name = t.get("name", "hold")
    reward_kw = {k: t[k] for k in ("v_target", "sigma", "hop_gain",
                                   "hop_clip", "w_act", "hold_target")
                 if k in t}
    reward = _wrap_value_error(lambda: RewardConfig(**reward_kw), raw, "task")
    if "horizon" in t and not t["horizon"] > 0.0:
        raise ConfigError(raw.path, _line_of(raw, "task", "horizon"),
                          f"horizon must be > 0, got {t['horizon']}")
    task = _wrap_value_error(
        lambda: make_task(task_name, reward=reward,
                          horizon=t.get("horizon")), raw, "task")
    if "q0" in t:
        task = replace(task, q0=t["q0"])
    if "stop_limit" in t:
        task = replace(task, stop_limit=t["stop_limit"])

    # ---- plant
    p = dict(sec("plant"))
    if p:
        expected = "hopper" if isinstance(task.plant, HopperPlant) \
            else "pendulum"
        ptype = p.pop("type", expected)
        if ptype != expected:
            raise ConfigError(
                raw.path, _line_of(raw, "plant", "type"),
                f"task {task.name!r} runs on a {expected} plant, but "
                f"[plant] declares type = {ptype}")
        allowed = _HOPPER_KEYS if ptype == "hopper" else _PENDULUM_KEYS
        for key in p:
            if key not in allowed:
                raise ConfigError(
                    raw.path, _line_of(raw, "plant", key),
                    f"{key!r} is not a {ptype} constant; expected one of "
                    f"{', '.join(allowed)}")
        plant = _wrap_value_error(lambda: replace(task.plant, **p),
                                  raw, "plant")
        task = replace(task, plant=plant)

    # ---- actuator
    a = sec("actuator")
    actuator = a.get("type", "pd")
    mode = a.get("mode", "ideal-sim")
    pd_gains = _wrap_value_error(
        lambda: PDGains(k_stiff=a.get("k_stiff", 2.0),
                        k_damp=a.get("k_damp", 0.05)), raw, "actuator")
    k_scale = a.get("k_scale")
    if actuator == "torque" and k_scale is None:
        raise ConfigError(
            raw.path, _line_of(raw, "actuator", "type"),
            "actuator type torque requires k_scale (no default: it sets "
            "the torque per unit action)")
    k_damp_floor = a.get("k_damp_floor", 0.08)

    # ---- muscle (present iff the actuator is a muscle pair)
    m = sec("muscle")
    if actuator == "muscle" and "muscle" not in raw.sections:
        raise ConfigError(
            raw.path, _line_of(raw, "actuator", "type"),
            "actuator type muscle requires a [muscle] section")
    if actuator != "muscle" and "muscle" in raw.sections:
        raise ConfigError(
            raw.path, _line_of(raw, "muscle"),
            f"[muscle] section requires actuator type muscle "
            f"(actuator is {actuator})")
    muscle = None
    muscle_k_damp = m.get("k_damp")
    if actuator == "muscle":
        fields = {k: m[k] for k in ("l_min", "l_max", "fv_max", "fp_max",
                                    "lce_min", "lce_max", "f_max", "tau_act",
                                    "beta") if k in m}
        lo, hi = task.plant.joint_range
        fields["phi_min"], fields["phi_max"] = lo, hi
        beta_source = m.get("beta_source", "explicit")
        if beta_source == "from-damping":
            if "beta" in m:
                raise ConfigError(
                    raw.path, _line_of(raw, "muscle", "beta"),
                    "beta conflicts with beta_source = from-damping; the "
                    "velocity gain is derived from k_damp")
            if muscle_k_damp is None:
                raise ConfigError(
                    raw.path, _line_of(raw, "muscle", "beta_source"),
                    "beta_source = from-damping requires k_damp")
            fields.pop("beta", None)
            base = _wrap_value_error(lambda: MuscleParams(**fields),
                                     raw, "muscle")
            geom = derive_geometry(base)
            beta = _wrap_value_error(
                lambda: beta_from_damping(muscle_k_damp, geom.a1,
                                          base.f_max), raw, "muscle",
                "k_damp")
            muscle = replace(base, beta=beta)
        else:
            muscle = _wrap_value_error(lambda: MuscleParams(**fields),
                                       raw, "muscle")

    # ---- rates
    r = sec("rates")
    if mode == "hardware-faithful":
        defaults = dict(policy_hz=50.0, controller_hz=500.0,
                        physics_dt=0.0002, substeps_per_control=100)
    else:
        defaults = dict(policy_hz=50.0, controller_hz=500.0,
                        physics_dt=0.005, substeps_per_control=4)
    if "policy_hz" in r:
        defaults["policy_hz"] = r["policy_hz"]
    if "controller_hz" in r:
        defaults["controller_hz"] = r["controller_hz"]
    if "physics_dt" in r:
        defaults["physics_dt"] = r["physics_dt"]
    if "substeps" in r:
        defaults["substeps_per_control"] = r["substeps"]
    rates = _wrap_value_error(lambda: RateConfig(**defaults), raw, "rates")
    period = rates.physics_dt * rates.substeps_per_control
    if abs(period - 1.0 / rates.policy_hz) > 1e-9:
        raise ConfigError(
            raw.path, _line_of(raw, "rates", "physics_dt"),
            f"physics_dt * substeps = {period:.9g} must equal the policy "
            f"period {1.0 / rates.policy_hz:.9g}")
    task = replace(task, rates=rates,
                   floor_damping_on=(mode == "hardware-faithful"),
                   pd_gains=pd_gains, k_damp_floor=k_damp_floor)
    if k_scale is not None:
        task = replace(task, torque_k_scale=k_scale)

    # ---- trainer
    tr = sec("train")
    trainer_kw = {k: tr[k] for k in ("population", "elite_frac",
                                     "generations", "init_std",
                                     "noise_decay", "min_std", "n_workers",
                                     "randomize") if k in tr}
    trainer = _wrap_value_error(lambda: TrainerConfig(**trainer_kw),
                                raw, "train")
    seeds = tr.get("seeds", (0,))
    actuators = tr.get("actuators", ("muscle", "torque"))
    eval_episodes = tr.get("eval_episodes", 20)
    if eval_episodes < 1:
        raise ConfigError(raw.path, _line_of(raw, "train", "eval_episodes"),
                          f"eval_episodes must be >= 1, got {eval_episodes}")

    # ---- noise & randomization
    nd = sec("noise_dr")
    noise = _wrap_value_error(lambda: NoiseAndDR(**nd), raw, "noise_dr")

    # ---- output, sweep
    out_dir = get("output", "directory", "out")
    sw = sec("sweep")
    sweep_betas = sw.get("betas", (0.36, 0.66))
    sweep_freqs = sw.get("freqs", SWEEP_FREQS)
    sweep_horizon = sw.get("horizon", 4.0)
    sweep_settle = sw.get("settle", 2.0)
    if not 0.0 < sweep_settle < sweep_horizon:
        raise ConfigError(raw.path, _line_of(raw, "sweep", "settle"),
                          f"settle must lie in (0, horizon), got "
                          f"{sweep_settle} with horizon {sweep_horizon}")

    echo = _build_echo(raw, typed)
    return ExperimentConfig(
        task=task, actuator=actuator, mode=mode, pd_gains=pd_gains,
        k_scale=k_scale, k_damp_floor=k_damp_floor, muscle=muscle,
        muscle_k_damp=muscle_k_damp, rates=rates, trainer=trainer,
        seeds=tuple(seeds), actuators=tuple(actuators),
        eval_episodes=eval_episodes, noise=noise, out_dir=out_dir,
        sweep_betas=tuple(sweep_betas), sweep_freqs=tuple(sweep_freqs),
        sweep_horizon=sweep_horizon, sweep_settle=sweep_settle, echo=echo)


def _build_echo(raw: RawConfig, typed: dict) -> tuple:
    echo = [("schema_version", SCHEMA_VERSION)]
    out = [("", tuple(echo))]
    for name in raw.sections:
        pairs = tuple((k, typed[name][k]) for k in raw.sections[name])
        out.append((name, pairs))
    return tuple(out)


def echo_as_dict(echo: tuple) -> dict:
    """Manifest-friendly nested dict of the configuration echo."""
    d = {}
    for section, pairs in echo:
        if section == "":
            for k, v in pairs:
                d[k] = v
        else:
            d[section] = {k: _jsonable(v) for k, v in pairs}
    return d


def _jsonable(v):
    if isinstance(v, tuple):
        return list(v)
    return v


def load_experiment(path=None, text=None) -> ExperimentConfig:
    """Build from a file path, a literal text, or pure defaults."""
    if path is not None:
        raw = parse_config_file(path)
    else:
        raw = parse_config_text(text if text is not None
                                else f"schema_version = {SCHEMA_VERSION}\n")
    return build_experiment(raw)


def check_for_command(raw: RawConfig, cfg: ExperimentConfig, command: str):
    """Requirements that only bind once the subcommand is known."""
    if command == "eval-robustness" and "torque" in cfg.actuators \
            and cfg.k_scale is None:
        raise ConfigError(
            raw.path, _line_of(raw, "train", "actuators"),
            "eval-robustness compares a torque actuator, which requires "
            "k_scale in [actuator] (no default: it sets the torque per "
            "unit action)")


def apply_overrides(raw: RawConfig, *, seed=None, out=None, actuator=None,
                    task=None, mode=None) -> RawConfig:
    """Fold command-line flags into the raw config before building; flag
    errors anchor to the pseudo-location '<flag>'."""

    def put(section, key, value, flag):
        raw.sections.setdefault(section, {})
        raw.section_lines.setdefault(section, f"--{flag}")
        raw.sections[section][key] = (value, f"--{flag}")

    if seed is not None:
        put("train", "seeds", str(seed), "seed")
    if out is not None:
        put("output", "directory", out, "out")
    if actuator is not None:
        put("actuator", "type", actuator, "actuator")
        if actuator == "muscle":
            raw.sections.setdefault("muscle", {})
            raw.section_lines.setdefault("muscle", "--actuator")
        elif "muscle" in raw.sections:
            del raw.sections["muscle"]
    if task is not None:
        put("task", "name", task, "task")
    if mode is not None:
        put("actuator", "mode", mode, "mode")
    return raw
