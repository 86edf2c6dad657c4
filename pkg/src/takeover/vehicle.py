"""Extended single-track vehicle model with steering-train dynamics.

State order is fixed everywhere in this package:
``[beta, psi_dot, psi, y, delta, delta_dot]`` -- side-slip angle (rad),
yaw rate (rad/s), yaw angle (rad), lateral displacement (m), steering-wheel
angle (rad), steering-wheel rate (rad/s).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DivergenceError

STATE_NAMES = ("beta", "psidot", "psi", "y", "delta", "deltadot")
N_STATES = 6

# Model is only a good approximation up to this lateral acceleration (m/s^2).
LATERAL_ACCEL_LIMIT = 4.0


@dataclass(frozen=True)
class VehicleParams:
    """Physical constants of the single-track model plus steering train.

    Speeds are stored in m/s; use :func:`VehicleParams.with_speed_kmh` or the
    config layer for km/h input. Defaults are a 1600 kg passenger car at
    120 km/h.
    """

    mass: float = 1600.0                # M, kg
    yaw_inertia: float = 1800.0         # J_z, kg m^2
    speed: float = 120.0 / 3.6          # v, m/s (held constant per run)
    dist_front: float = 0.9             # l_f, m
    dist_rear: float = 1.7              # l_r, m
    cornering_front: float = 45e3       # C_f, N/rad
    cornering_rear: float = 75e3        # C_r, N/rad
    steering_ratio: float = 16.0        # i_s
    steering_inertia: float = 0.04      # J_s, N m s^2/rad
    steering_stiffness: float = 1.1     # C_s, N m/rad
    steering_damping: float = 0.3       # D_s, N m s/rad

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if not (np.isfinite(value) and value > 0.0):
                raise ConfigError(
                    f"vehicle.{name} must be strictly positive, got {value!r}"
                )

    @classmethod
    def with_speed_kmh(cls, speed_kmh: float, **kwargs) -> "VehicleParams":
        return cls(speed=speed_kmh / 3.6, **kwargs)


@dataclass(frozen=True)
class LinearModel:
    """Continuous-time realization x' = A x + B_D T_D + B_A T_A."""

    A: np.ndarray
    B_D: np.ndarray
    B_A: np.ndarray
    v: float


@dataclass(frozen=True)
class DiscreteModel:
    A_d: np.ndarray
    B_Dd: np.ndarray
    B_Ad: np.ndarray
    dt: float


def build_system_matrices(params: VehicleParams) -> LinearModel:
    """Assemble (A, B_D, B_A) for the extended single-track model."""
    m, jz, v = params.mass, params.yaw_inertia, params.speed
    lf, lr = params.dist_front, params.dist_rear
    cf, cr = params.cornering_front, params.cornering_rear
    i_s = params.steering_ratio
    js, cs, ds = (
        params.steering_inertia,
        params.steering_stiffness,
        params.steering_damping,
    )

    A = np.zeros((N_STATES, N_STATES))
    # side-slip dynamics
    A[0, 0] = (-cf - cr) / (m * v)
    A[0, 1] = (cr * lr - m * v**2 - cf * lf) / (m * v**2)
    A[0, 4] = cf / (m * v * i_s)
    # yaw-rate dynamics
    A[1, 0] = (cr * lr - cf * lf) / jz
    A[1, 1] = (-cr * lr**2 - cf * lf**2) / (jz * v)
    A[1, 4] = cf * lf / (jz * i_s)
    # yaw angle integrates yaw rate
    A[2, 1] = 1.0
    # lateral displacement: y' = v (beta + psi), small angles
    A[3, 0] = v
    A[3, 2] = v
    # steering wheel: delta' = delta_dot, J_s delta_dot' = -C_s delta - D_s delta_dot + T
    A[4, 5] = 1.0
    A[5, 4] = -cs / js
    A[5, 5] = -ds / js

    B = np.zeros(N_STATES)
    B[5] = 1.0 / js

    A.setflags(write=False)
    B.setflags(write=False)
    return LinearModel(A=A, B_D=B, B_A=B, v=v)


def discretize(model: LinearModel, dt: float, method: str = "euler") -> DiscreteModel:
    """Discretize the plant at step ``dt``.

    ``euler`` gives A_d = I + A dt (the default plant propagation);
    ``exact`` uses the matrix exponential of the augmented system, which
    also handles the singular A here.
    """
    if not (np.isfinite(dt) and dt > 0):
        raise ConfigError(f"time step must be positive, got {dt!r}")
    if method == "euler":
        A_d = np.eye(N_STATES) + model.A * dt
        B_Dd = model.B_D * dt
        B_Ad = model.B_A * dt
    elif method == "exact":
        from scipy.linalg import expm

        # exp of [[A, B_D, B_A], [0, 0, 0]] dt yields A_d and both input columns
        aug = np.zeros((N_STATES + 2, N_STATES + 2))
        aug[:N_STATES, :N_STATES] = model.A
        aug[:N_STATES, N_STATES] = model.B_D
        aug[:N_STATES, N_STATES + 1] = model.B_A
        phi = expm(aug * dt)
        A_d = phi[:N_STATES, :N_STATES]
        B_Dd = phi[:N_STATES, N_STATES]
        B_Ad = phi[:N_STATES, N_STATES + 1]
    else:
        raise ConfigError(f"unknown discretization method {method!r}")
    A_d.setflags(write=False)
    B_Dd.setflags(write=False)
    B_Ad.setflags(write=False)
    return DiscreteModel(A_d=A_d, B_Dd=B_Dd, B_Ad=B_Ad, dt=dt)


def step_dynamics(
    x: np.ndarray, torque_driver: float, torque_adas: float, dm: DiscreteModel
) -> np.ndarray:
    """One discrete plant step: x+ = A_d x + B_Dd T_D + B_Ad T_A."""
    x_next = dm.A_d @ x + (dm.B_Dd * torque_driver + dm.B_Ad * torque_adas)
    if not np.all(np.isfinite(x_next)):
        bad = [STATE_NAMES[i] for i in np.flatnonzero(~np.isfinite(x_next))]
        raise DivergenceError(f"non-finite state component(s): {', '.join(bad)}")
    return x_next


def lateral_acceleration(
    model: LinearModel, x: np.ndarray, torque_driver: float, torque_adas: float
) -> float:
    """Lateral acceleration a_y = v (beta' + psi') implied by the model."""
    xdot = model.A @ x + model.B_D * torque_driver + model.B_A * torque_adas
    return model.v * (xdot[0] + x[1])


def warn_if_outside_envelope(a_y: float) -> bool:
    """Warn (once per call site, via warnings machinery) above 4 m/s^2."""
    if abs(a_y) > LATERAL_ACCEL_LIMIT:
        warnings.warn(
            f"lateral acceleration {a_y:.2f} m/s^2 exceeds the "
            f"{LATERAL_ACCEL_LIMIT} m/s^2 validity envelope of the linear model",
            RuntimeWarning,
            stacklevel=2,
        )
        return True
    return False
