"""Antagonistic muscle pair emulation for a single rotary joint.

Two virtual muscles act on one joint. Normalized lengths are linear in the
joint angle and traverse [lce_min, lce_max] in opposite directions over the
joint range, activation is a first-order low pass on the commanded
excitation, and the active torque of each muscle is shaped by a
force-length bump, a force-velocity gain and a passive stretch term. All
gains are dimensionless; f_max converts the signed sum to joint torque with
the moment arm folded in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class MuscleParams:
    """Normalized muscle model constants (desk-scale defaults)."""

    l_min: float = 0.24     # [-] shortest length with active force
    l_max: float = 1.53     # [-] longest length with active force
    fv_max: float = 1.38    # [-] eccentric force ceiling
    fp_max: float = 1.76    # [-] passive force at l_max
    lce_min: float = 0.74   # [-] virtual length at one joint stop
    lce_max: float = 0.94   # [-] virtual length at the other stop
    f_max: float = 34.0     # [N m] peak torque scale, moment arm folded in
    phi_min: float = -3.14  # [rad] joint range, lower
    phi_max: float = 3.14   # [rad] joint range, upper
    tau_act: float = 0.01   # [s] activation low-pass time constant
    beta: float = 0.36      # [-] velocity gain on the scaled muscle speed

    def __post_init__(self):
        vals = (self.l_min, self.l_max, self.fv_max, self.fp_max,
                self.lce_min, self.lce_max, self.f_max, self.phi_min,
                self.phi_max, self.tau_act, self.beta)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("MuscleParams requires finite values")
        if not self.l_min < 1.0:
            raise ValueError(f"l_min must be < 1 (optimum length), got {self.l_min}")
        if not self.l_max > 1.0:
            raise ValueError(f"l_max must be > 1 (optimum length), got {self.l_max}")
        if not self.fv_max > 1.0:
            raise ValueError(f"fv_max must exceed 1, got {self.fv_max}")
        if self.fp_max < 0.0:
            raise ValueError(f"fp_max must be >= 0, got {self.fp_max}")
        if not self.f_max > 0.0:
            raise ValueError(f"f_max must be > 0, got {self.f_max}")
        if not self.tau_act > 0.0:
            raise ValueError(f"tau_act must be > 0, got {self.tau_act}")
        if self.beta < 0.0:
            raise ValueError(f"beta must be >= 0, got {self.beta}")
        if not self.lce_min < self.lce_max:
            raise ValueError(
                f"lce_min < lce_max required, got {self.lce_min}, {self.lce_max}")
        if not self.phi_min < self.phi_max:
            raise ValueError(
                f"phi_min < phi_max required, got {self.phi_min}, {self.phi_max}")


@dataclass(frozen=True)
class MuscleGeometry:
    """Linear joint-angle-to-length maps l_k = a_k*q + b_k for the pair."""

    a1: float
    b1: float
    a2: float
    b2: float


@dataclass(frozen=True)
class MuscleState:
    """Per-joint pair state: activations plus last evaluated kinematics."""

    m_act: tuple[float, float] = (0.0, 0.0)
    l: tuple[float, float] = (0.0, 0.0)
    v_bar: tuple[float, float] = (0.0, 0.0)
    force: tuple[float, float] = (0.0, 0.0)


def derive_geometry(p: MuscleParams) -> MuscleGeometry:
    """Anchor both length maps so each muscle sweeps the full length band.

    Muscle 1 runs lce_min -> lce_max over [phi_min, phi_max]; muscle 2 runs
    the opposite way (a2 = -a1).
    """
    a1 = (p.lce_max - p.lce_min) / (p.phi_max - p.phi_min)
    b1 = p.lce_min - a1 * p.phi_min
    a2 = -a1
    b2 = p.lce_min + a1 * p.phi_max
    return MuscleGeometry(a1=a1, b1=b1, a2=a2, b2=b2)


def fl_curve(L: float, p: MuscleParams) -> float:
    """Active force-length gain.

    Piecewise-quadratic bump: zero at and outside [l_min, l_max], 1 at the
    optimum L = 1, C1-continuous at the quarter knots (l_min+1)/2 and
    (1+l_max)/2.
    """
    lmin, lmax = p.l_min, p.l_max
    if L <= lmin or L >= lmax:
        return 0.0
    a = 0.5 * (lmin + 1.0)
    b = 0.5 * (1.0 + lmax)
    if L <= a:
        x = (L - lmin) / (a - lmin)
        return 0.5 * x * x
    if L <= 1.0:
        x = (1.0 - L) / (1.0 - a)
        return 1.0 - 0.5 * x * x
    if L <= b:
        x = (L - 1.0) / (b - 1.0)
        return 1.0 - 0.5 * x * x
    x = (lmax - L) / (lmax - b)
    return 0.5 * x * x


def fv_curve(v_bar: float, p: MuscleParams) -> float:
    """Force-velocity gain on the scaled stretch rate.

    Zero at fast shortening (v_bar <= -1), 1 at rest with slope exactly 2,
    saturating at fv_max for v_bar >= fv_max - 1. Both quadratic pieces are
    C1 at the seams.
    """
    y = p.fv_max - 1.0
    if v_bar <= -1.0:
        return 0.0
    if v_bar <= 0.0:
        w = v_bar + 1.0
        return w * w
    if v_bar <= y:
        w = y - v_bar
        return p.fv_max - w * w / y
    return p.fv_max


def fp_curve(L: float, p: MuscleParams) -> float:
    """Passive stretch force: zero up to L = 1, cubic rise to the midpoint
    b = (1 + l_max)/2, linear continuation beyond (C1 at both seams)."""
    if L <= 1.0:
        return 0.0
    b = 0.5 * (1.0 + p.l_max)
    if L <= b:
        x = (L - 1.0) / (b - 1.0)
        return 0.25 * p.fp_max * x * x * x
    x = (L - b) / (b - 1.0)
    return 0.25 * p.fp_max * (1.0 + 3.0 * x)


def activation_step(m_act: float, action: float, dt: float, tau_act: float) -> float:
    """Advance dm/dt = (action - m)/tau_act exactly over dt, clamped to [0, 1].

    Exact exponential integration keeps the update stable and rate
    independent for any dt > 0.
    """
    if not dt > 0.0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if not tau_act > 0.0:
        raise ValueError(f"tau_act must be > 0, got {tau_act}")
    m = m_act + (action - m_act) * (1.0 - math.exp(-dt / tau_act))
    return min(max(m, 0.0), 1.0)


def muscle_kinematics(q: float, q_dot: float, p: MuscleParams,
                      g: MuscleGeometry):
    """Lengths and scaled stretch rates of the pair at (q, q_dot).

    Muscle k pulls in direction (-1)^(k+1); joint motion against its pull
    stretches it, so its velocity-gain argument is -beta*a_k*q_dot while the
    l_k map anchors the length-dependent gains to the joint range.
    """
    l1 = g.a1 * q + g.b1
    l2 = g.a2 * q + g.b2
    v1 = -p.beta * g.a1 * q_dot
    v2 = -p.beta * g.a2 * q_dot
    return (l1, l2), (v1, v2)


def muscle_forces(state: MuscleState, q: float, q_dot: float, p: MuscleParams,
                  g: MuscleGeometry, pin_fl: bool = False,
                  pin_fp: bool = False):
    """Normalized force of each muscle (active gain stack plus passive)."""
    (l1, l2), (v1, v2) = muscle_kinematics(q, q_dot, p, g)
    forces = []
    for L, v, m in ((l1, v1, state.m_act[0]), (l2, v2, state.m_act[1])):
        fl = 1.0 if pin_fl else fl_curve(L, p)
        fp = 0.0 if pin_fp else fp_curve(L, p)
        forces.append(fl * fv_curve(v, p) * m + fp)
    return (forces[0], forces[1]), (l1, l2), (v1, v2)


def joint_torque(state: MuscleState, q: float, q_dot: float, p: MuscleParams,
                 g: MuscleGeometry, pin_fl: bool = False,
                 pin_fp: bool = False) -> float:
    """Net joint torque of the antagonistic pair.

    tau = f_max * (force_1 - force_2): muscle 1 pulls in +q, muscle 2 in -q,
    each force shaped by the length, velocity and passive gains. With
    symmetric co-contraction the active terms cancel at rest and the
    velocity gains leave -4*f_max*beta*a1*q_dot damping for small speeds.
    pin_fl/pin_fp force the length gain to 1 / passive term to 0 for
    isolation tests of the damping rule.
    """
    if not (math.isfinite(q) and math.isfinite(q_dot)):
        raise ValueError(f"q and q_dot must be finite, got {q}, {q_dot}")
    (f1, f2), _, _ = muscle_forces(state, q, q_dot, p, g, pin_fl, pin_fp)
    return p.f_max * (f1 - f2)


def beta_from_damping(k_damp: float, a1: float, f_max: float) -> float:
    """Velocity gain that makes co-contraction behave like viscous damping
    k_damp at small joint speeds: beta = k_damp / (4 * a1 * f_max)."""
    if k_damp < 0.0:
        raise ValueError(f"k_damp must be >= 0, got {k_damp}")
    if not a1 > 0.0:
        raise ValueError(f"a1 must be > 0, got {a1}")
    if not f_max > 0.0:
        raise ValueError(f"f_max must be > 0, got {f_max}")
    return k_damp / (4.0 * a1 * f_max)
