"""Desk-scale plants integrated with a fixed-step semi-implicit Euler scheme.

Both plants clamp incoming torque at tau_abs_max, enforce joint hard stops
by clamping position and zeroing the joint rate, and track how long the
joint has been pinned at a stop (used by fall detection). Steps are pure:
state in, state out, bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

MAX_DT = 0.01  # [s] upper bound on a single physics step


def _check_step_args(tau: float, dt: float):
    if not (0.0 < dt <= MAX_DT):
        raise ValueError(f"dt must lie in (0, {MAX_DT}], got {dt}")
    if not math.isfinite(tau):
        raise ValueError(f"torque must be finite, got {tau}")


@dataclass(frozen=True)
class PendulumState:
    q: float = 0.0
    q_dot: float = 0.0
    stop_time: float = 0.0  # [s] continuous time pinned at a hard stop


@dataclass(frozen=True)
class PendulumPlant:
    """Gravity pendulum on a rotary joint with hard stops."""

    inertia: float = 0.05        # [kg m^2]
    mgd: float = 5.0             # [N m] gravity torque scale (mass*g*lever)
    joint_damping: float = 0.0   # [N m s/rad]
    phi_min: float = -3.14       # [rad]
    phi_max: float = 3.14        # [rad]
    tau_abs_max: float = 50.0    # [N m]

    def __post_init__(self):
        if not (math.isfinite(self.inertia) and self.inertia > 0.0):
            raise ValueError(f"inertia must be > 0, got {self.inertia}")
        if not (math.isfinite(self.tau_abs_max) and self.tau_abs_max > 0.0):
            raise ValueError(f"tau_abs_max must be > 0, got {self.tau_abs_max}")
        if not self.phi_min < self.phi_max:
            raise ValueError(
                f"phi_min < phi_max required, got {self.phi_min}, {self.phi_max}")
        if self.joint_damping < 0.0 or self.mgd < 0.0:
            raise ValueError("joint_damping and mgd must be >= 0, got "
                             f"{self.joint_damping}, {self.mgd}")

    @property
    def joint_range(self):
        return (self.phi_min, self.phi_max)

    def init_state(self, q: float = 0.0, q_dot: float = 0.0) -> PendulumState:
        return PendulumState(q=q, q_dot=q_dot)

    def push(self, state: PendulumState, dv: float) -> PendulumState:
        """Instantaneous velocity perturbation on the joint."""
        return replace(state, q_dot=state.q_dot + dv)

    def step(self, state: PendulumState, tau: float, dt: float) -> PendulumState:
        _check_step_args(tau, dt)
        tau = min(max(tau, -self.tau_abs_max), self.tau_abs_max)
        acc = (tau - self.mgd * math.sin(state.q)
               - self.joint_damping * state.q_dot) / self.inertia
        q_dot = state.q_dot + dt * acc
        q = state.q + dt * q_dot
        if q <= self.phi_min:
            q, q_dot = self.phi_min, 0.0
        elif q >= self.phi_max:
            q, q_dot = self.phi_max, 0.0
        at_stop = q == self.phi_min or q == self.phi_max
        stop_time = state.stop_time + dt if at_stop else 0.0
        return PendulumState(q=q, q_dot=q_dot, stop_time=stop_time)


@dataclass(frozen=True)
class HopperState:
    q: float = 0.0        # [rad] leg joint angle; leg length grows with q
    q_dot: float = 0.0    # [rad/s]
    z: float = 0.0        # [m] body height
    z_dot: float = 0.0    # [m/s]
    in_stance: bool = True
    stop_time: float = 0.0


@dataclass(frozen=True)
class HopperPlant:
    """Vertical monoped: massless foot, rotary-to-prismatic leg transmission.

    Stance (foot on ground, leg force >= 0): m*z'' = tau/r - m*g with the
    kinematic tie q_dot = z_dot/r. Flight: z'' = -g and the unloaded leg
    obeys leg_inertia*q'' = tau. Touchdown is inelastic (foot sticks, body
    velocity carries over); liftoff happens when the leg force turns
    negative or the leg reaches full extension.
    """

    body_mass: float = 6.0        # [kg]
    r: float = 0.05               # [m/rad] leg length per joint angle
    leg_rest_length: float = 0.35  # [m] leg length at q = 0
    leg_inertia: float = 0.002    # [kg m^2] leg joint inertia in flight
    g: float = 9.81               # [m/s^2]
    ground_height: float = 0.0    # [m]
    q_min: float = -3.14          # [rad]
    q_max: float = 3.14           # [rad]
    tau_abs_max: float = 50.0     # [N m]

    def __post_init__(self):
        if not (math.isfinite(self.body_mass) and self.body_mass > 0.0):
            raise ValueError(f"body_mass must be > 0, got {self.body_mass}")
        if not (math.isfinite(self.r) and self.r > 0.0):
            raise ValueError(f"leg transmission r must be > 0, got {self.r}")
        if not self.leg_rest_length > 0.0:
            raise ValueError(
                f"leg_rest_length must be > 0, got {self.leg_rest_length}")
        if not (math.isfinite(self.leg_inertia) and self.leg_inertia > 0.0):
            raise ValueError(f"leg_inertia must be > 0, got {self.leg_inertia}")
        if not self.g > 0.0:
            raise ValueError(f"g must be > 0, got {self.g}")
        if not self.q_min < self.q_max:
            raise ValueError(
                f"q_min < q_max required, got {self.q_min}, {self.q_max}")
        if not (math.isfinite(self.tau_abs_max) and self.tau_abs_max > 0.0):
            raise ValueError(f"tau_abs_max must be > 0, got {self.tau_abs_max}")

    @property
    def joint_range(self):
        return (self.q_min, self.q_max)

    def leg_length(self, q: float) -> float:
        return self.leg_rest_length + self.r * q

    def foot_height(self, state: HopperState) -> float:
        return state.z - self.leg_length(state.q) - self.ground_height

    def init_state(self, q: float = 0.0, q_dot: float = 0.0,
                   z: float | None = None, z_dot: float = 0.0,
                   in_stance: bool | None = None) -> HopperState:
        if z is None:
            z = self.ground_height + self.leg_length(q)
        s = HopperState(q=q, q_dot=q_dot, z=z, z_dot=z_dot, in_stance=False)
        if in_stance is None:
            in_stance = self.foot_height(s) <= 1e-9
        return replace(s, in_stance=in_stance)

    def push(self, state: HopperState, dv: float) -> HopperState:
        """Instantaneous velocity perturbation on the body; the kinematic
        tie propagates it to the leg rate while in stance."""
        z_dot = state.z_dot + dv
        q_dot = z_dot / self.r if state.in_stance else state.q_dot
        return replace(state, z_dot=z_dot, q_dot=q_dot)

    def _stance_anchor(self, z: float, z_dot: float) -> HopperState:
        """Stance state with the foot pinned to the ground at body height z."""
        q = (z - self.ground_height - self.leg_rest_length) / self.r
        if q <= self.q_min:
            # leg bottomed out: body rests on the hard stop
            z = self.ground_height + self.leg_length(self.q_min)
            return HopperState(q=self.q_min, q_dot=0.0, z=z, z_dot=0.0,
                               in_stance=True)
        return HopperState(q=q, q_dot=z_dot / self.r, z=z, z_dot=z_dot,
                           in_stance=True)

    def step(self, state: HopperState, tau: float, dt: float) -> HopperState:
        _check_step_args(tau, dt)
        tau = min(max(tau, -self.tau_abs_max), self.tau_abs_max)
        in_stance = state.in_stance
        if in_stance and tau / self.r < 0.0:
            in_stance = False  # leg force points down: foot unloads

        if in_stance:
            z_dot = state.z_dot + dt * (tau / (self.r * self.body_mass) - self.g)
            z = state.z + dt * z_dot
            new = self._stance_anchor(z, z_dot)
            if new.q >= self.q_max:
                # full extension: the leg cannot push further, foot leaves
                new = HopperState(q=self.q_max, q_dot=0.0, z=z, z_dot=z_dot,
                                  in_stance=False)
        else:
            z_dot = state.z_dot - dt * self.g
            z = state.z + dt * z_dot
            q_dot = state.q_dot + dt * tau / self.leg_inertia
            q = state.q + dt * q_dot
            if q <= self.q_min:
                q, q_dot = self.q_min, 0.0
            elif q >= self.q_max:
                q, q_dot = self.q_max, 0.0
            new = HopperState(q=q, q_dot=q_dot, z=z, z_dot=z_dot,
                              in_stance=False)
            foot = self.foot_height(new)
            foot_vel = z_dot - self.r * q_dot
            if foot <= 0.0 and (foot_vel <= 0.0 or foot < -0.005):
                new = self._stance_anchor(z, z_dot)

        at_stop = new.q <= self.q_min or new.q >= self.q_max
        stop_time = state.stop_time + dt if at_stop else 0.0
        return replace(new, stop_time=stop_time)
