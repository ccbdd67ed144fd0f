"""Rewards, observation noise, episode randomization, a cross-entropy
policy trainer, and the robustness evaluation protocol.

Tasks are desk-scale: velocity tracking on a flywheel-like joint ("walk"),
vertical hopping ("hop"), and posture holding against gravity ("hold").
Training is a population search over the parameters of a small saturating
network; every random draw descends from one master seed, so runs are
bit-reproducible.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .actuators import (
    MuscleController,
    PDController,
    PDGains,
    TorqueController,
    TorqueLimits,
)
from .muscles import MuscleParams, MuscleState
from .multirate import RateConfig, default_observe, run_episode
from .plants import HopperPlant, PendulumPlant
from .serialize import write_csv


# ---------------------------------------------------------------- rewards

@dataclass(frozen=True)
class RewardConfig:
    """Task reward constants.

    Velocity tracking and posture rewards are Gaussian bumps with
    sensitivity sigma; the hop reward exponentiates the clipped upward
    velocity and is handled in log form so huge gains cannot overflow.
    """

    v_target: float = 1.0           # [m/s or rad/s] tracked velocity
    sigma: float = 0.25             # [-] tracking sensitivity
    hop_gain: float = 10.0          # [-] exponent scale on upward speed
    hop_clip: tuple = (0.0, 10.0)   # [m/s] clip band for the hop exponent
    w_act: float = 0.004            # [-] action-rate penalty weight
    hold_target: float = 0.8        # [rad] posture target

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma > 0.0):
            raise ValueError(f"sigma must be > 0, got {self.sigma}")
        if not (math.isfinite(self.w_act) and self.w_act >= 0.0):
            raise ValueError(f"w_act must be >= 0, got {self.w_act}")
        lo, hi = self.hop_clip
        if not lo < hi:
            raise ValueError(f"hop_clip needs lo < hi, got {self.hop_clip}")
        if not math.isfinite(self.hop_gain):
            raise ValueError(f"hop_gain must be finite, got {self.hop_gain}")


def reward_walk(v_x: float, cfg: RewardConfig) -> float:
    """Gaussian bump on the velocity error; 1 on target, (0, 1] always."""
    err = cfg.v_target - v_x
    return math.exp(-err * err / cfg.sigma)


def log_reward_hop(v_z: float, cfg: RewardConfig) -> float:
    """Exponent of the hop reward: gain times the clipped upward speed."""
    lo, hi = cfg.hop_clip
    return cfg.hop_gain * min(max(v_z, lo), hi)


def reward_hop(v_z: float, cfg: RewardConfig) -> float:
    """exp(gain * clip(v_z)); >= 1 since the clip floor is zero."""
    return math.exp(log_reward_hop(v_z, cfg))


def reward_action_rate(a_t, a_t1, w_act: float) -> float:
    """Quadratic penalty on the change between consecutive actions."""
    a = np.asarray(a_t, dtype=float)
    b = np.asarray(a_t1, dtype=float)
    if a.shape != b.shape:
        raise ValueError(
            f"action dim mismatch: {a.shape} vs {b.shape}")
    d = b - a
    return -w_act * float(np.dot(d, d))


def reward_hold(q: float, cfg: RewardConfig) -> float:
    """Gaussian bump on the posture error around hold_target."""
    err = cfg.hold_target - q
    return math.exp(-err * err / cfg.sigma)


# ---------------------------------------------------- noise & randomization

@dataclass(frozen=True)
class NoiseAndDR:
    """Uniform observation-noise half-ranges and episode-randomization
    ranges. All draws are additive to the nominal value; ranges that a
    plant cannot express (ground friction on these single-joint rigs, body
    mass on the pendulum, angular-rate and gravity-direction channels the
    desk plants do not observe) are still drawn so random streams stay
    aligned across plants, then dropped.
    """

    noise_joint_pos: float = 0.01       # [rad]
    noise_joint_vel: float = 0.075      # [rad/s]
    noise_muscle_len: float = 0.01      # [-]
    noise_muscle_vel: float = 1.0       # [-]
    noise_muscle_act: float = 0.01      # [-]
    noise_muscle_force: float = 1.0     # [-]
    noise_base_lin_vel: float = 0.02    # [m/s]
    noise_base_ang_vel: float = 0.05    # [rad/s] (no desk channel yet)
    noise_gravity: float = 0.05         # [-] (no desk channel yet)

    dr_init_joint_pos: tuple = (-1.0, 1.0)    # [rad]
    dr_init_muscle_act: tuple = (0.5, 1.0)    # [-]
    dr_friction: tuple = (0.5, 1.25)          # [-] drawn, no desk surface
    dr_joint_damping: tuple = (0.0, 0.09)     # [N m s/rad]
    dr_push: tuple = (-1.5, 1.5)              # [m/s] velocity delta
    dr_mass_shift: tuple = (-0.5, 1.2)        # [kg]
    seed: int = 0

    def __post_init__(self):
        for name in ("noise_joint_pos", "noise_joint_vel", "noise_muscle_len",
                     "noise_muscle_vel", "noise_muscle_act",
                     "noise_muscle_force", "noise_base_lin_vel",
                     "noise_base_ang_vel", "noise_gravity"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0.0):
                raise ValueError(f"{name} must be >= 0, got {v}")
        for name in ("dr_init_joint_pos", "dr_init_muscle_act", "dr_friction",
                     "dr_joint_damping", "dr_push", "dr_mass_shift"):
            lo, hi = getattr(self, name)
            if not lo <= hi:
                raise ValueError(f"{name} needs lo <= hi, got ({lo}, {hi})")

    @staticmethod
    def zero() -> "NoiseAndDR":
        """No noise and degenerate ranges: identical, unperturbed episodes."""
        z = (0.0, 0.0)
        return NoiseAndDR(
            noise_joint_pos=0.0, noise_joint_vel=0.0, noise_muscle_len=0.0,
            noise_muscle_vel=0.0, noise_muscle_act=0.0, noise_muscle_force=0.0,
            noise_base_lin_vel=0.0, noise_base_ang_vel=0.0, noise_gravity=0.0,
            dr_init_joint_pos=z, dr_init_muscle_act=z, dr_friction=z,
            dr_joint_damping=z, dr_push=z, dr_mass_shift=z)


def observation_kinds(state, mstate) -> list:
    """Channel kinds matching the default observation layout."""
    kinds = ["joint_pos", "joint_vel"]
    if hasattr(state, "z"):
        kinds += ["base_pos", "base_lin_vel"]
    if mstate is not None:
        kinds += (["muscle_len"] * 2 + ["muscle_vel"] * 2
                  + ["muscle_act"] * 2 + ["muscle_force"] * 2)
    return kinds


def noise_half_ranges(kinds, cfg: NoiseAndDR) -> np.ndarray:
    by_kind = {
        "joint_pos": cfg.noise_joint_pos,
        "joint_vel": cfg.noise_joint_vel,
        "base_pos": 0.0,  # body height has no noise channel
        "base_lin_vel": cfg.noise_base_lin_vel,
        "muscle_len": cfg.noise_muscle_len,
        "muscle_vel": cfg.noise_muscle_vel,
        "muscle_act": cfg.noise_muscle_act,
        "muscle_force": cfg.noise_muscle_force,
    }
    return np.array([by_kind[k] for k in kinds])


def observe(plant, state, mstate, cfg: NoiseAndDR | None = None,
            rng=None) -> np.ndarray:
    """Observation vector with per-channel additive uniform noise."""
    obs = np.asarray(default_observe(plant, state, mstate), dtype=float)
    if cfg is None or rng is None:
        return obs
    h = noise_half_ranges(observation_kinds(state, mstate), cfg)
    return obs + rng.uniform(-h, h)


@dataclass(frozen=True)
class EpisodeSetup:
    """One randomized episode: perturbed plant, start state, initial
    activations, and scheduled velocity pushes (time, delta)."""

    plant: object
    init_state: object
    m_act0: tuple
    pushes: tuple


def randomize_episode(plant, cfg: NoiseAndDR, seed=None, *, horizon: float,
                      q0: float = 0.0, n_pushes: int = 1) -> EpisodeSetup:
    """Draw one episode's randomization.

    Draw order is fixed (init pos, two activations, friction, damping,
    mass, then pushes) regardless of plant type so a given seed yields the
    same stream on every rig; draws a plant cannot express are dropped.
    Activations are clamped to [0, 1]; the start angle stays strictly
    inside the joint range. Pushes land in the middle half of the episode.
    """
    rng = np.random.default_rng(cfg.seed if seed is None else seed)
    dq0 = rng.uniform(*cfg.dr_init_joint_pos)
    act = (rng.uniform(*cfg.dr_init_muscle_act),
           rng.uniform(*cfg.dr_init_muscle_act))
    rng.uniform(*cfg.dr_friction)  # no friction surface on these plants
    damp = rng.uniform(*cfg.dr_joint_damping)
    mass = rng.uniform(*cfg.dr_mass_shift)
    pushes = []
    for _ in range(n_pushes):
        t_push = rng.uniform(0.25 * horizon, 0.75 * horizon)
        dv = rng.uniform(*cfg.dr_push)
        if dv != 0.0:
            pushes.append((t_push, dv))

    if isinstance(plant, PendulumPlant):
        plant = replace(plant, joint_damping=plant.joint_damping + damp)
    elif isinstance(plant, HopperPlant):
        plant = replace(plant, body_mass=plant.body_mass + mass)
    lo, hi = plant.joint_range
    margin = 0.05 * (hi - lo)
    q_init = min(max(q0 + dq0, lo + margin), hi - margin)
    m0 = tuple(min(max(a, 0.0), 1.0) for a in act)
    return EpisodeSetup(plant=plant, init_state=plant.init_state(q=q_init),
                        m_act0=m0, pushes=tuple(pushes))


# ---------------------------------------------------------------- policies

@dataclass(frozen=True)
class PolicySpec:
    """Feedforward network shape: empty hidden = linear map. The output
    activation saturates smoothly so actions always land in (-1, 1)."""

    n_in: int
    n_out: int
    hidden: tuple = (32,)

    def __post_init__(self):
        if self.n_in < 1:
            raise ValueError(f"n_in must be >= 1, got {self.n_in}")
        if self.n_out < 1:
            raise ValueError(f"n_out must be >= 1, got {self.n_out}")
        if any(h < 1 for h in self.hidden):
            raise ValueError(f"hidden sizes must be >= 1, got {self.hidden}")


def n_params(spec: PolicySpec) -> int:
    dims = (spec.n_in, *spec.hidden, spec.n_out)
    return sum((dims[i] + 1) * dims[i + 1] for i in range(len(dims) - 1))


class MLPPolicy:
    """tanh network over a flat parameter vector; callable as (obs, t)."""

    def __init__(self, spec: PolicySpec, params=None):
        self.spec = spec
        n = n_params(spec)
        if params is None:
            params = np.zeros(n)
        params = np.asarray(params, dtype=float)
        if params.shape != (n,):
            raise ValueError(
                f"parameter vector must have shape ({n},), got {params.shape}")
        self._params = params.copy()
        self._layers = []
        dims = (spec.n_in, *spec.hidden, spec.n_out)
        k = 0
        for i in range(len(dims) - 1):
            fan_in, fan_out = dims[i], dims[i + 1]
            w = params[k:k + fan_in * fan_out].reshape(fan_out, fan_in)
            k += fan_in * fan_out
            b = params[k:k + fan_out]
            k += fan_out
            self._layers.append((w, b))

    def get_params(self) -> np.ndarray:
        return self._params.copy()

    def __call__(self, obs, t) -> np.ndarray:
        x = np.asarray(obs, dtype=float)
        if x.shape != (self.spec.n_in,):
            raise ValueError(
                f"observation length {x.shape} does not match policy input "
                f"({self.spec.n_in},)")
        for w, b in self._layers:
            x = np.tanh(w @ x + b)
        return x


# ------------------------------------------------------------------ tasks

@dataclass(frozen=True)
class Task:
    """A plant plus reward/termination semantics and loop rates."""

    name: str
    plant: object
    horizon: float
    reward: RewardConfig
    q0: float = 0.0
    rates: RateConfig = field(default_factory=RateConfig.ideal_sim)
    torque_k_scale: float = 5.0
    stop_limit: float = 0.5       # [s] at a hard stop counts as a fall
    reward_fn: object = None      # optional override: (plant, state) -> r
    floor_damping_on: bool = False  # real-actuator mode: extra damping
    pd_gains: object = None       # PDGains override for the pd actuator
    k_damp_floor: float = 0.08    # [N m s/rad] backend floor damping


def make_task(name: str, reward: RewardConfig | None = None,
              horizon: float | None = None) -> Task:
    if name == "walk":
        return Task(name="walk",
                    plant=PendulumPlant(inertia=0.05, mgd=0.0,
                                        joint_damping=0.1),
                    horizon=horizon or 3.0,
                    reward=reward or RewardConfig(v_target=1.0), q0=-2.0)
    if name == "hop":
        return Task(name="hop", plant=HopperPlant(), horizon=horizon or 3.0,
                    reward=reward or RewardConfig())
    if name == "hold":
        return Task(name="hold",
                    plant=PendulumPlant(inertia=0.05, mgd=5.0),
                    horizon=horizon or 3.0, reward=reward or RewardConfig())
    raise ValueError(f"unknown task {name!r}; expected walk, hop or hold")


def task_reward_fn(task: Task):
    if task.reward_fn is not None:
        return task.reward_fn
    cfg = task.reward
    if task.name == "walk":
        return lambda plant, s: reward_walk(s.q_dot, cfg)
    if task.name == "hop":
        # log form keeps returns desk-scale; monotone in the raw reward
        return lambda plant, s: log_reward_hop(s.z_dot, cfg)
    if task.name == "hold":
        return lambda plant, s: reward_hold(s.q, cfg)
    raise ValueError(f"task {task.name!r} has no reward defined")


def is_fallen(plant, state, stop_limit: float = 0.5) -> bool:
    """Fall = parked on a hard stop too long, or (hopper) body collapsed
    below 40% of the rest leg length."""
    if state.stop_time > stop_limit:
        return True
    if hasattr(state, "z"):
        if state.z - plant.ground_height < 0.4 * plant.leg_rest_length:
            return True
    return False


_ACTION_DIM = {"pd": 1, "torque": 1, "muscle": 2}


def action_dim(actuator: str) -> int:
    if actuator not in _ACTION_DIM:
        raise ValueError(
            f"unknown actuator {actuator!r}; expected pd, torque or muscle")
    return _ACTION_DIM[actuator]


def controller_for(actuator: str, plant, muscle_params: MuscleParams | None
                   = None, torque_k_scale: float = 5.0,
                   floor_damping_on: bool = False, pd_gains=None,
                   k_damp_floor: float = 0.08):
    action_dim(actuator)
    if actuator == "pd":
        return PDController(pd_gains or PDGains(),
                            TorqueLimits(tau_abs_max=plant.tau_abs_max,
                                         k_damp_floor=k_damp_floor),
                            cmd_range=plant.joint_range,
                            floor_damping_on=floor_damping_on)
    if actuator == "torque":
        return TorqueController(
            TorqueLimits(tau_abs_max=plant.tau_abs_max,
                         k_scale=torque_k_scale,
                         k_damp_floor=k_damp_floor),
            floor_damping_on=floor_damping_on)
    p = muscle_params or MuscleParams()
    lo, hi = plant.joint_range
    if (p.phi_min, p.phi_max) != (lo, hi):
        p = replace(p, phi_min=lo, phi_max=hi)
    return MuscleController(p, TorqueLimits(tau_abs_max=plant.tau_abs_max,
                                            k_damp_floor=k_damp_floor),
                            floor_damping_on=floor_damping_on)


def obs_dim(task: Task, actuator: str) -> int:
    mstate = MuscleState() if actuator == "muscle" else None
    return len(default_observe(task.plant, task.plant.init_state(), mstate))


# ---------------------------------------------------------------- rollouts

@dataclass(frozen=True)
class RolloutResult:
    return_: float
    policy_steps: int
    survived_steps: int
    total_steps: int


def rollout(task: Task, actuator: str, policy, seed,
            noise: NoiseAndDR | None = None, randomize: bool = True,
            muscle_params: MuscleParams | None = None) -> RolloutResult:
    """One seeded episode; the seed fans out into independent streams for
    episode randomization and observation noise."""
    noise = noise or NoiseAndDR()
    ss = (seed if isinstance(seed, np.random.SeedSequence)
          else np.random.SeedSequence(seed))
    ss_dr, ss_obs = ss.spawn(2)
    if randomize:
        setup = randomize_episode(task.plant, noise, seed=ss_dr,
                                  horizon=task.horizon, q0=task.q0)
    else:
        setup = EpisodeSetup(plant=task.plant,
                             init_state=task.plant.init_state(q=task.q0),
                             m_act0=(0.0, 0.0), pushes=())
    ctl = controller_for(actuator, setup.plant, muscle_params,
                         task.torque_k_scale,
                         floor_damping_on=task.floor_damping_on,
                         pd_gains=task.pd_gains,
                         k_damp_floor=task.k_damp_floor)
    rng_obs = np.random.default_rng(ss_obs)
    init_m = (MuscleState(m_act=setup.m_act0) if actuator == "muscle"
              else None)
    w_act = task.reward.w_act
    trace = run_episode(
        setup.plant, ctl, policy, task.rates, task.horizon,
        init_state=setup.init_state, init_mstate=init_m,
        observe_fn=lambda pl, s, m: observe(pl, s, m, noise, rng_obs),
        reward_task_fn=task_reward_fn(task),
        reward_action_fn=lambda a, b: reward_action_rate(a, b, w_act),
        terminate_fn=lambda pl, s, t: is_fallen(pl, s, task.stop_limit),
        pushes=setup.pushes)
    total = int(round(task.horizon / task.rates.physics_dt))
    survived = len(trace.t) - int(trace.done[-1]) if len(trace.t) else 0
    return RolloutResult(return_=trace.return_,
                         policy_steps=trace.policy_steps,
                         survived_steps=survived, total_steps=total)


# ---------------------------------------------------------------- trainer

@dataclass(frozen=True)
class TrainerConfig:
    """Cross-entropy search over policy parameters: sample a population
    around the mean, keep the elite fraction, re-center, decay the
    exploration noise geometrically."""

    population: int = 64
    elite_frac: float = 0.125
    generations: int = 30
    init_std: float = 0.5
    noise_decay: float = 0.97
    min_std: float = 0.02
    n_workers: int = 1
    randomize: bool = True

    def __post_init__(self):
        if self.population < 8:
            raise ValueError(
                f"population must be >= 8, got {self.population}")
        if not 0.0 < self.elite_frac <= 1.0:
            raise ValueError(
                f"elite_frac must be in (0, 1], got {self.elite_frac}")
        if self.generations < 0:
            raise ValueError(
                f"generations must be >= 0, got {self.generations}")
        if not self.init_std > 0.0:
            raise ValueError(f"init_std must be > 0, got {self.init_std}")
        if not 0.0 < self.noise_decay <= 1.0:
            raise ValueError(
                f"noise_decay must be in (0, 1], got {self.noise_decay}")
        if self.min_std < 0.0:
            raise ValueError(f"min_std must be >= 0, got {self.min_std}")
        if self.n_workers < 1:
            raise ValueError(f"n_workers must be >= 1, got {self.n_workers}")


@dataclass(frozen=True)
class CurveRow:
    generation: int
    mean_return: float
    max_return: float
    mean_episode_len: float


@dataclass(frozen=True)
class TrainResult:
    policy: MLPPolicy
    spec: PolicySpec
    curve: list
    seed: int


def train(task: Task, actuator: str, cfg: TrainerConfig | None = None,
          noise: NoiseAndDR | None = None, seed: int = 0,
          policy_spec: PolicySpec | None = None,
          muscle_params: MuscleParams | None = None) -> TrainResult:
    """Evolve policy parameters; returns the final mean policy and one
    learning-curve row per generation. Bit-reproducible under (seed,
    configs); worker count only changes wall time."""
    cfg = cfg or TrainerConfig()
    noise = noise or NoiseAndDR()
    spec = policy_spec or PolicySpec(n_in=obs_dim(task, actuator),
                                     n_out=action_dim(actuator))
    n = n_params(spec)
    ss = np.random.SeedSequence(seed)
    ss_param, ss_roll = ss.spawn(2)
    param_rng = np.random.default_rng(ss_param)
    gen_ss = ss_roll.spawn(cfg.generations) if cfg.generations else []
    n_elite = max(1, int(round(cfg.population * cfg.elite_frac)))
    mean = np.zeros(n)
    curve = []

    def eval_member(args):
        theta, member_ss = args
        return rollout(task, actuator, MLPPolicy(spec, theta), member_ss,
                       noise, randomize=cfg.randomize,
                       muscle_params=muscle_params)

    for g in range(cfg.generations):
        std = max(cfg.init_std * cfg.noise_decay ** g, cfg.min_std)
        thetas = mean + std * param_rng.standard_normal((cfg.population, n))
        member_ss = gen_ss[g].spawn(cfg.population)
        jobs = list(zip(thetas, member_ss))
        if cfg.n_workers > 1:
            with ThreadPoolExecutor(max_workers=cfg.n_workers) as pool:
                results = list(pool.map(eval_member, jobs))
        else:
            results = [eval_member(j) for j in jobs]
        rets = np.array([r.return_ for r in results])
        if not np.all(np.isfinite(rets)):
            bad = int(np.flatnonzero(~np.isfinite(rets))[0])
            raise RuntimeError(
                f"non-finite return {rets[bad]} in generation {g}, member "
                f"{bad} (seed {seed}): check reward and plant configuration")
        elite = np.argsort(rets)[-n_elite:]
        mean = thetas[elite].mean(axis=0)
        curve.append(CurveRow(
            generation=g, mean_return=float(rets.mean()),
            max_return=float(rets.max()),
            mean_episode_len=float(np.mean(
                [r.policy_steps for r in results]))))
    return TrainResult(policy=MLPPolicy(spec, mean), spec=spec, curve=curve,
                       seed=seed)


# ------------------------------------------------------------- evaluation

@dataclass(frozen=True)
class EvalResult:
    success_rate: float
    mean_return: float
    returns: tuple


def evaluate(task: Task, actuator: str, policy,
             noise: NoiseAndDR | None = None, n_episodes: int = 100,
             seed: int = 0, randomize: bool = True,
             muscle_params: MuscleParams | None = None) -> EvalResult:
    """Fresh-seed episodes; success rate = fraction of scheduled physics
    steps survived before a fall, pooled across episodes."""
    if n_episodes < 1:
        raise ValueError(f"n_episodes must be >= 1, got {n_episodes}")
    noise = noise or NoiseAndDR()
    children = np.random.SeedSequence(seed).spawn(n_episodes)
    survived = 0
    total = 0
    returns = []
    for child in children:
        r = rollout(task, actuator, policy, child, noise,
                    randomize=randomize, muscle_params=muscle_params)
        survived += r.survived_steps
        total += r.total_steps
        returns.append(r.return_)
    return EvalResult(success_rate=survived / total,
                      mean_return=float(np.mean(returns)),
                      returns=tuple(returns))


@dataclass(frozen=True)
class RobustRow:
    seed: int
    actuator: str
    success_rate: float
    mean_return: float


def robustness_rows(task: Task, actuators=("muscle", "torque"),
                    seeds=(0, 1, 2), train_cfg: TrainerConfig | None = None,
                    noise: NoiseAndDR | None = None, n_episodes: int = 100,
                    eval_seed_offset: int = 10_000,
                    muscle_params: MuscleParams | None = None) -> list:
    """Train per (actuator, seed) and evaluate on unseen episode seeds."""
    rows = []
    for actuator in actuators:
        for seed in seeds:
            res = train(task, actuator, train_cfg, noise, seed=seed,
                        muscle_params=muscle_params)
            ev = evaluate(task, actuator, res.policy, noise,
                          n_episodes=n_episodes,
                          seed=seed + eval_seed_offset,
                          muscle_params=muscle_params)
            rows.append(RobustRow(seed=seed, actuator=actuator,
                                  success_rate=ev.success_rate,
                                  mean_return=ev.mean_return))
    return rows


def bootstrap_ci(samples, n_boot: int = 2000, alpha: float = 0.05,
                 seed: int = 0) -> tuple:
    """Percentile bootstrap interval for the mean."""
    arr = np.asarray(samples, dtype=float)
    if arr.size == 0:
        raise ValueError("bootstrap_ci requires a non-empty sample")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, arr.size, size=(n_boot, arr.size))
    means = arr[idx].mean(axis=1)
    lo, hi = np.quantile(means, [0.5 * alpha, 1.0 - 0.5 * alpha])
    return float(lo), float(hi)


# ------------------------------------------------------------------ export

def write_learning_csv(rows, path):
    write_csv(path, ["generation", "mean_return", "max_return",
                     "mean_episode_len"],
              [[r.generation, r.mean_return, r.max_return,
                r.mean_episode_len] for r in rows])


def write_robustness_csv(rows, path):
    write_csv(path, ["seed", "actuator", "success_rate", "mean_return"],
              [[r.seed, r.actuator, r.success_rate, r.mean_return]
               for r in rows])
