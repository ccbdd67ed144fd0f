"""Uniform low-level controller layer: PD, direct torque, muscle pair.

Every controller maps (command, q, q_dot, dt, state) -> (torque, state') so
plants, the multi-rate loop and the trainer stay actuator agnostic. State is
explicit; only the muscle controller carries one (its MuscleState). An
optional floor damping term -k_damp_floor*q_dot mimics the backend damping
that hardware-faithful runs keep on for every actuator type.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .muscles import (
    MuscleParams,
    MuscleState,
    activation_step,
    derive_geometry,
    muscle_forces,
)

# Commands are flat tuples: (target_q,) for PD, (tau_tilde,) for direct
# torque, (excitation_1, excitation_2) for the muscle pair.
ActuatorCommand = tuple


@dataclass(frozen=True)
class PDGains:
    k_stiff: float = 2.0  # [N m/rad]
    k_damp: float = 0.05  # [N m s/rad]

    def __post_init__(self):
        if not (math.isfinite(self.k_stiff) and self.k_stiff >= 0.0):
            raise ValueError(f"k_stiff must be >= 0, got {self.k_stiff}")
        if not (math.isfinite(self.k_damp) and self.k_damp >= 0.0):
            raise ValueError(f"k_damp must be >= 0, got {self.k_damp}")


@dataclass(frozen=True)
class TorqueLimits:
    tau_abs_max: float          # [N m] hard output clamp
    k_scale: float | None = None  # [N m] direct-torque scale; no default
    k_damp_floor: float = 0.08  # [N m s/rad] backend floor damping

    def __post_init__(self):
        if not (math.isfinite(self.tau_abs_max) and self.tau_abs_max > 0.0):
            raise ValueError(f"tau_abs_max must be > 0, got {self.tau_abs_max}")
        if self.k_scale is not None:
            if not (0.0 < self.k_scale <= self.tau_abs_max):
                raise ValueError(
                    f"k_scale must lie in (0, tau_abs_max], got {self.k_scale}")
        if not (math.isfinite(self.k_damp_floor) and self.k_damp_floor >= 0.0):
            raise ValueError(
                f"k_damp_floor must be >= 0, got {self.k_damp_floor}")


def _clamp(x, lim):
    return min(max(x, -lim), lim)


def pd_torque(cmd: float, q: float, q_dot: float, gains: PDGains,
              limits: TorqueLimits) -> float:
    """Position servo: k_stiff*(cmd - q) - k_damp*q_dot, clamped."""
    tau = gains.k_stiff * (cmd - q) - gains.k_damp * q_dot
    return _clamp(tau, limits.tau_abs_max)


def direct_torque(cmd: float, limits: TorqueLimits) -> float:
    """Scaled torque command: k_scale * clip(cmd, -1, 1)."""
    if limits.k_scale is None:
        raise ValueError("direct torque requires k_scale; it has no default")
    return limits.k_scale * min(max(cmd, -1.0), 1.0)


def muscle_actuator_step(state: MuscleState, cmd, q: float, q_dot: float,
                         dt: float, p: MuscleParams,
                         limits: TorqueLimits | None = None,
                         floor_damping_on: bool = False,
                         geometry=None):
    """One controller tick of the muscle pair.

    Clamps the commanded excitations to [0, 1], advances both activations
    exactly over dt, evaluates the pair torque at (q, q_dot), applies
    optional floor damping and the output clamp. Returns (torque, state')
    with refreshed kinematics in state'.
    """
    g = geometry if geometry is not None else derive_geometry(p)
    a1 = min(max(cmd[0], 0.0), 1.0)
    a2 = min(max(cmd[1], 0.0), 1.0)
    m1 = activation_step(state.m_act[0], a1, dt, p.tau_act)
    m2 = activation_step(state.m_act[1], a2, dt, p.tau_act)
    new = MuscleState(m_act=(m1, m2))
    (f1, f2), l, v = muscle_forces(new, q, q_dot, p, g)
    tau = p.f_max * (f1 - f2)
    if floor_damping_on and limits is not None:
        tau -= limits.k_damp_floor * q_dot
    if limits is not None:
        tau = _clamp(tau, limits.tau_abs_max)
    return tau, MuscleState(m_act=(m1, m2), l=l, v_bar=v, force=(f1, f2))


class PDController:
    """Joint position servo; policy output spans the command range."""

    kind = "pd"
    n_cmd = 1

    def __init__(self, gains: PDGains, limits: TorqueLimits, cmd_range,
                 floor_damping_on: bool = False):
        self.gains = gains
        self.limits = limits
        self.cmd_mid = 0.5 * (cmd_range[0] + cmd_range[1])
        self.cmd_half = 0.5 * (cmd_range[1] - cmd_range[0])
        self.floor_damping_on = floor_damping_on

    def init_state(self):
        return None

    def neutral_cmd(self):
        return (self.cmd_mid,)

    def policy_to_cmd(self, u):
        return (self.cmd_mid + self.cmd_half * float(u[0]),)

    def step(self, cmd, q, q_dot, dt, state):
        tau = pd_torque(cmd[0], q, q_dot, self.gains, self.limits)
        if self.floor_damping_on:
            tau = _clamp(tau - self.limits.k_damp_floor * q_dot,
                         self.limits.tau_abs_max)
        return tau, state


class TorqueController:
    """Direct torque pass-through with scale and clip."""

    kind = "torque"
    n_cmd = 1

    def __init__(self, limits: TorqueLimits, floor_damping_on: bool = False):
        self.limits = limits
        self.floor_damping_on = floor_damping_on

    def init_state(self):
        return None

    def neutral_cmd(self):
        return (0.0,)

    def policy_to_cmd(self, u):
        return (float(u[0]),)

    def step(self, cmd, q, q_dot, dt, state):
        tau = direct_torque(cmd[0], self.limits)
        if self.floor_damping_on:
            tau -= self.limits.k_damp_floor * q_dot
        return _clamp(tau, self.limits.tau_abs_max), state


class MuscleController:
    """Antagonistic pair; policy outputs map to excitations in [0, 1]."""

    kind = "muscle"
    n_cmd = 2

    def __init__(self, params: MuscleParams, limits: TorqueLimits,
                 floor_damping_on: bool = False):
        self.params = params
        self.limits = limits
        self.geometry = derive_geometry(params)
        self.floor_damping_on = floor_damping_on

    def init_state(self):
        return MuscleState()

    def neutral_cmd(self):
        return (0.0, 0.0)

    def policy_to_cmd(self, u):
        return (min(max(0.5 * (float(u[0]) + 1.0), 0.0), 1.0),
                min(max(0.5 * (float(u[1]) + 1.0), 0.0), 1.0))

    def step(self, cmd, q, q_dot, dt, state):
        return muscle_actuator_step(
            state, cmd, q, q_dot, dt, self.params, self.limits,
            floor_damping_on=self.floor_damping_on, geometry=self.geometry)
