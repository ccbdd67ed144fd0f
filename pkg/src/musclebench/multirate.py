"""Event-ordered multi-rate control loop.

The loop advances fixed physics steps while policy and controller tick on
their own clocks. Torque is zero-order held between controller ticks
(emulating a fast backend that repeats the previous command), actions are
zero-order held between policy ticks, and an optional latency model delays
action arrival and jitters controller tick times. Everything is
deterministic under a fixed seed.
"""

from __future__ import annotations

import math
import threading
import time
from collections import deque
from dataclasses import dataclass, replace

import numpy as np

from .actuators import MuscleController, TorqueLimits
from .muscles import MuscleParams
from .plants import PendulumPlant
from .serialize import fmt_float


@dataclass(frozen=True)
class RateConfig:
    """Loop clocks. Defaults match the coarse simulation profile: 50 Hz
    policy, 500 Hz controller, 5 ms physics with 4 substeps per policy
    period. The hardware-faithful profile drops physics to 0.2 ms so the
    backend hold behavior is resolved."""

    policy_hz: float = 50.0
    controller_hz: float = 500.0
    physics_dt: float = 0.005
    substeps_per_control: int = 4
    backend_hold: bool = True

    def __post_init__(self):
        if not (math.isfinite(self.policy_hz) and self.policy_hz > 0.0):
            raise ValueError(f"policy_hz must be > 0, got {self.policy_hz}")
        if self.controller_hz < self.policy_hz:
            raise ValueError(
                "controller_hz must be >= policy_hz, got "
                f"{self.controller_hz} < {self.policy_hz}")
        if not (0.0 < self.physics_dt <= 0.01):
            raise ValueError(
                f"physics_dt must lie in (0, 0.01], got {self.physics_dt}")
        if self.substeps_per_control < 1:
            raise ValueError(
                f"substeps must be >= 1, got {self.substeps_per_control}")

    @staticmethod
    def ideal_sim() -> "RateConfig":
        return RateConfig(policy_hz=50.0, controller_hz=500.0,
                          physics_dt=0.005, substeps_per_control=4)

    @staticmethod
    def hardware_faithful(controller_hz: float = 500.0) -> "RateConfig":
        return RateConfig(policy_hz=50.0, controller_hz=controller_hz,
                          physics_dt=0.0002, substeps_per_control=100)


@dataclass(frozen=True)
class LatencyModel:
    """Action transport delay plus Gaussian controller tick jitter
    (truncated at +-2 sigma)."""

    action_delay: float = 0.0  # [s]
    jitter_std: float = 0.0    # [s]
    seed: int = 0

    def __post_init__(self):
        if self.action_delay < 0.0:
            raise ValueError(
                f"action_delay must be >= 0, got {self.action_delay}")
        if self.jitter_std < 0.0:
            raise ValueError(f"jitter_std must be >= 0, got {self.jitter_std}")


@dataclass
class EpisodeTrace:
    """Per-physics-step record of one episode plus tick accounting."""

    t: np.ndarray
    q: np.ndarray
    q_dot: np.ndarray
    z: np.ndarray
    z_dot: np.ndarray
    tau: np.ndarray
    actions: np.ndarray   # held command, one column per command entry
    m_act: np.ndarray     # (n, 2) for muscle runs, (n, 0) otherwise
    r_task: np.ndarray
    r_act: np.ndarray
    done: np.ndarray
    policy_ticks: int
    controller_ticks: int
    controller_tick_times: np.ndarray
    excitation_clamps: int
    return_: float
    policy_steps: int

    def header(self):
        cols = ["t", "q", "q_dot", "z", "z_dot", "tau"]
        cols += [f"act_{i}" for i in range(self.actions.shape[1])]
        cols += [f"m_act_{i}" for i in range(self.m_act.shape[1])]
        cols += ["r_task", "r_act", "done"]
        return cols

    def to_csv(self, path):
        with open(path, "w", newline="\n") as fh:
            fh.write(",".join(self.header()) + "\n")
            for i in range(len(self.t)):
                row = [self.t[i], self.q[i], self.q_dot[i], self.z[i],
                       self.z_dot[i], self.tau[i]]
                row += list(self.actions[i])
                row += list(self.m_act[i])
                row += [self.r_task[i], self.r_act[i]]
                fh.write(",".join(fmt_float(v) for v in row)
                         + f",{int(self.done[i])}\n")


def _tick_times(hz: float, horizon: float, jitter_std: float, rng):
    n = int(math.ceil(horizon * hz - 1e-9))
    times = np.arange(n) / hz
    if jitter_std > 0.0:
        jit = rng.normal(0.0, jitter_std, n)
        np.clip(jit, -2.0 * jitter_std, 2.0 * jitter_std, out=jit)
        times = np.sort(times + jit)
        times[0] = max(times[0], 0.0)
    return times


def run_episode(plant, controller, policy, rates: RateConfig, horizon: float,
                latency: LatencyModel | None = None, init_state=None,
                init_mstate=None, observe_fn=None, reward_task_fn=None,
                reward_action_fn=None, terminate_fn=None, pushes=()):
    """Run one episode and return its EpisodeTrace.

    policy(obs, t) -> raw outputs in [-1, 1]^n_cmd, mapped to commands by
    the controller. The episode return accumulates task reward sampled at
    policy ticks plus the action-rate penalty between consecutive policy
    outputs.
    """
    if horizon <= 0.0:
        raise ValueError(f"horizon must be > 0, got {horizon}")
    lat = latency or LatencyModel()
    rng = np.random.default_rng(lat.seed)
    dt = rates.physics_dt
    n_steps = int(round(horizon / dt))
    pol_times = _tick_times(rates.policy_hz, horizon, 0.0, rng)
    ctl_times = _tick_times(rates.controller_hz, horizon, lat.jitter_std, rng)
    pushes = sorted(pushes, key=lambda p: p[0])

    state = plant.init_state() if init_state is None else init_state
    mstate = controller.init_state() if init_mstate is None else init_mstate
    n_cmd = controller.n_cmd
    is_muscle = controller.kind == "muscle"

    held_cmd = controller.neutral_cmd()
    held_tau = 0.0
    u_vis = None                 # newest action visible to the controller
    u_last = None                # previous policy output (action-rate term)
    pending = deque()            # (time available, action)
    eps = 1e-9

    n_m = 2 if is_muscle else 0
    cols = np.zeros((n_steps, 6 + n_cmd + n_m + 2))
    done = np.zeros(n_steps, dtype=int)
    ip = ic = ipu = 0
    last_tick_t = -1.0 / rates.controller_hz
    ret = 0.0
    policy_steps = 0
    clamps = 0
    n_rows = n_steps

    for i in range(n_steps):
        t = i * dt
        # events anywhere in this physics interval [t, t + dt) fire now, on
        # the state sampled at the interval start; this keeps tick counts
        # exact even when the physics step is coarser than a tick period
        t_end = t + dt - eps
        while ipu < len(pushes) and pushes[ipu][0] < t_end:
            state = plant.push(state, pushes[ipu][1])
            ipu += 1
        r_act_row = 0.0
        while ip < len(pol_times) and pol_times[ip] < t_end:
            obs = (observe_fn(plant, state, mstate) if observe_fn
                   else default_observe(plant, state, mstate))
            u = np.asarray(policy(obs, pol_times[ip]), dtype=float)
            pending.append((pol_times[ip] + lat.action_delay, u))
            if reward_task_fn is not None:
                ret += reward_task_fn(plant, state)
            if u_last is not None and reward_action_fn is not None:
                ra = reward_action_fn(u_last, u)
                ret += ra
                r_act_row += ra
            u_last = u
            policy_steps += 1
            ip += 1
        while ic < len(ctl_times) and ctl_times[ic] < t_end:
            adopted = False
            while pending and pending[0][0] <= ctl_times[ic] + eps:
                u_vis = pending.popleft()[1]
                adopted = True
            if adopted:
                held_cmd = controller.policy_to_cmd(u_vis)
                if is_muscle:
                    clamps += sum(1 for x in u_vis if abs(x) > 1.0 + eps)
            dt_tick = max(ctl_times[ic] - last_tick_t, 1e-9)
            held_tau, mstate = controller.step(held_cmd, state.q, state.q_dot,
                                               dt_tick, mstate)
            last_tick_t = ctl_times[ic]
            ic += 1

        r_task = reward_task_fn(plant, state) if reward_task_fn else 0.0
        row = [t, state.q, state.q_dot, getattr(state, "z", 0.0),
               getattr(state, "z_dot", 0.0), held_tau]
        row += list(held_cmd)
        if is_muscle:
            row += list(mstate.m_act)
        row += [r_task, r_act_row]
        cols[i] = row

        state = plant.step(state, held_tau, dt)
        if terminate_fn is not None and terminate_fn(plant, state, t + dt):
            done[i] = 1
            n_rows = i + 1
            break

    c = cols[:n_rows]
    k = 6 + n_cmd
    return EpisodeTrace(
        t=c[:, 0], q=c[:, 1], q_dot=c[:, 2], z=c[:, 3], z_dot=c[:, 4],
        tau=c[:, 5], actions=c[:, 6:k], m_act=c[:, k:k + n_m],
        r_task=c[:, k + n_m], r_act=c[:, k + n_m + 1], done=done[:n_rows],
        policy_ticks=ip, controller_ticks=ic,
        controller_tick_times=ctl_times[:ic], excitation_clamps=clamps,
        return_=ret, policy_steps=policy_steps)


def default_observe(plant, state, mstate):
    """Raw observation stack: joint, body (hopper), muscle sensor cache."""
    obs = [state.q, state.q_dot]
    if hasattr(state, "z"):
        obs += [state.z, state.z_dot]
    if mstate is not None:
        obs += list(mstate.l) + list(mstate.v_bar)
        obs += list(mstate.m_act) + list(mstate.force)
    return np.asarray(obs)


def stability_metric(trace: EpisodeTrace, settle_time: float) -> float:
    """Peak-to-peak joint excursion after the settle window."""
    t = np.asarray(trace.t)
    if len(t) == 0 or settle_time >= t[-1]:
        raise ValueError(
            f"settle_time {settle_time} leaves no samples in a trace "
            f"ending at {t[-1] if len(t) else 0.0}")
    q = np.asarray(trace.q)[t >= settle_time]
    return float(np.max(q) - np.min(q))


# ------------------------------------------------------------------ hold

#: co-contraction hold benchmark plant: gravity restoring torque dominates
#: the destabilizing length-gain slope of the pair so the continuous system
#: is a damped well and only discretization can destabilize it
HOLD_PLANT = PendulumPlant(inertia=0.05, mgd=5.0, joint_damping=0.0,
                           phi_min=-3.14, phi_max=3.14, tau_abs_max=50.0)


def cocontraction_hold(plant: PendulumPlant | None = None,
                       params: MuscleParams | None = None,
                       beta: float = 0.36, controller_hz: float = 500.0,
                       horizon: float = 4.0, settle_time: float = 2.0,
                       q0_offset: float = 0.02, hardware_faithful: bool = True,
                       limits: TorqueLimits | None = None):
    """Hold the joint under full symmetric excitation and report the
    post-settle amplitude. A small initial offset seeds any instability."""
    plant = plant or HOLD_PLANT
    p = params or MuscleParams()
    if beta != p.beta:
        p = replace(p, beta=beta)
    lim = limits or TorqueLimits(tau_abs_max=plant.tau_abs_max)
    ctl = MuscleController(p, lim, floor_damping_on=hardware_faithful)
    # the sweep explores controller rates below the usual policy rate, so
    # the (constant) policy clock follows the controller down when needed
    pol_hz = min(50.0, controller_hz)
    phys_dt = 0.0002 if hardware_faithful else 0.005
    rates = RateConfig(policy_hz=pol_hz, controller_hz=controller_hz,
                       physics_dt=phys_dt,
                       substeps_per_control=int(round(1.0 / (pol_hz * phys_dt))))

    def full_on(obs, t):
        return (1.0, 1.0)

    trace = run_episode(plant, ctl, full_on, rates, horizon=horizon,
                        init_state=plant.init_state(q=q0_offset))
    return stability_metric(trace, settle_time), trace


@dataclass(frozen=True)
class SweepRow:
    beta: float
    controller_hz: float
    amplitude: float
    stable: bool


#: post-settle amplitude above this counts as oscillation
STABLE_AMPLITUDE_RAD = 0.2

#: default controller frequency grid for velocity-gain sweeps [Hz]
SWEEP_FREQS = (20.0, 25.0, 30.0, 50.0, 100.0, 250.0, 500.0)


def sweep_beta(plant: PendulumPlant | None = None,
               params: MuscleParams | None = None,
               betas=(0.36, 0.66), freqs=SWEEP_FREQS, **hold_kwargs):
    """Stability map of the co-contraction hold over (beta, controller_hz)."""
    rows = []
    for beta in betas:
        for hz in freqs:
            amp, _ = cocontraction_hold(plant=plant, params=params,
                                        beta=beta, controller_hz=hz,
                                        **hold_kwargs)
            rows.append(SweepRow(beta=beta, controller_hz=hz, amplitude=amp,
                                 stable=amp <= STABLE_AMPLITUDE_RAD))
    return rows


def write_sweep_csv(rows, path):
    with open(path, "w", newline="\n") as fh:
        fh.write("beta,controller_hz,amplitude,stable\n")
        for r in rows:
            fh.write(f"{fmt_float(r.beta)},{fmt_float(r.controller_hz)},"
                     f"{fmt_float(r.amplitude)},{int(r.stable)}\n")


# ------------------------------------------------------------- soft realtime

class LatestValueMailbox:
    """Single-slot channel: the writer overwrites, the reader never blocks."""

    def __init__(self):
        self._lock = threading.Lock()
        self._value = None
        self._stamp = 0

    def write(self, value):
        with self._lock:
            self._value = value
            self._stamp += 1

    def read(self):
        with self._lock:
            return self._value, self._stamp


@dataclass
class ReplayStats:
    n_ticks: int          # ticks published by the writer
    delivered: int        # sink calls; skips allowed because latest wins
    max_lateness_s: float


def replay_realtime(trace: EpisodeTrace, sink, speed: float = 1.0):
    """Replay the held torques of a trace on the wall clock.

    A writer thread publishes (tick time, torque) through a mailbox at the
    recorded controller tick times scaled by 1/speed; the consuming side
    calls sink whenever it observes a fresh value. Stale values are
    overwritten, so delivery may skip ticks, but the final tick is always
    delivered. Soft real time: lateness is measured, not enforced.
    """
    if speed <= 0.0:
        raise ValueError(f"speed must be > 0, got {speed}")
    tick_times = np.asarray(trace.controller_tick_times)
    t_arr = np.asarray(trace.t)
    taus = []
    for tt in tick_times:
        idx = int(np.searchsorted(t_arr, tt + 1e-9))
        taus.append(trace.tau[min(idx, len(t_arr) - 1)])

    box = LatestValueMailbox()
    done = threading.Event()
    lateness = [0.0]

    def writer():
        t0 = time.monotonic()
        for tt, tau in zip(tick_times, taus):
            target = t0 + tt / speed
            now = time.monotonic()
            if target > now:
                time.sleep(target - now)
            else:
                lateness[0] = max(lateness[0], now - target)
            box.write((tt, tau))
        done.set()

    th = threading.Thread(target=writer)
    th.start()
    seen = 0
    delivered = 0

    def drain():
        nonlocal seen, delivered
        val, stamp = box.read()
        if stamp > seen:
            seen = stamp
            delivered += 1
            sink(*val)
            return True
        return False

    while True:
        if not drain() and done.is_set():
            # done is set only after the last write, so one more read is
            # guaranteed to surface the final tick even if the writer ran
            # between our read and the done check
            drain()
            break
    th.join()
    return ReplayStats(n_ticks=len(tick_times), delivered=delivered,
                       max_lateness_s=lateness[0])
