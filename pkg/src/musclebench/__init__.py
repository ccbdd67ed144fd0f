"""Antagonistic muscle actuator emulation and desk-scale control benchmarks.

Modules
-------
muscles    force-length/velocity/passive gain curves, activation dynamics,
           antagonistic pair geometry and joint torque
actuators  uniform low-level controller interface: PD, direct torque, muscle
plants     1-DoF pendulum and vertical monoped hopper (semi-implicit Euler)
multirate  event-ordered policy/controller/physics loop, latency and jitter,
           co-contraction hold benchmark and velocity-gain sweeps
learn      rewards, observation noise, domain randomization, CEM trainer,
           robustness evaluation
config     line-oriented experiment config with strict schema validation
cli        musclebench command line front end
"""

__version__ = "0.1.0"

from .muscles import (  # noqa: F401
    MuscleParams,
    MuscleGeometry,
    MuscleState,
    fl_curve,
    fv_curve,
    fp_curve,
    activation_step,
    derive_geometry,
    joint_torque,
    beta_from_damping,
)
