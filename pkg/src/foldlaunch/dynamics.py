"""Rigid-body integration, barrel launch, arm hinge and deployment switch."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from . import rotation
from .errors import NonFiniteState

G0 = 9.80665
MAX_DT = 0.005


@dataclass(frozen=True)
class MassProperties:
    mass: float
    inertia_yaw: float
    inertia_pitch: float
    cm_z: float

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError("mass must be positive")
        if not (self.inertia_yaw > 0 and self.inertia_pitch > 0):
            raise ValueError("inertias must be positive")
        if not self.cm_z > 0:
            raise ValueError("cm_z must be positive")

    @property
    def inertia_diag(self):
        return np.array([self.inertia_pitch, self.inertia_pitch, self.inertia_yaw])


@dataclass(frozen=True)
class Environment:
    rho: float = 1.225
    gravity: float = 9.81
    wind_world: tuple = (0.0, 0.0, 0.0)
    mu: float = 1.81e-5

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError("rho must be positive")
        if not self.gravity > 0:
            raise ValueError("gravity must be positive")
        if not self.mu > 0:
            raise ValueError("mu must be positive")


@dataclass(frozen=True, eq=False)
class RigidBodyState:
    position: np.ndarray
    velocity: np.ndarray
    attitude: np.ndarray
    omega_body: np.ndarray

    def as_vector(self):
        return [*map(float, self.position), *map(float, self.velocity),
                *map(float, self.attitude), *map(float, self.omega_body)]

    @classmethod
    def from_vector(cls, y):
        y = np.asarray(y, dtype=float)
        return cls(y[0:3].copy(), y[3:6].copy(), y[6:10].copy(), y[10:13].copy())

    @classmethod
    def at_rest(cls, position=(0.0, 0.0, 0.0), attitude=(1.0, 0.0, 0.0, 0.0)):
        return cls(np.array(position, float), np.zeros(3), np.array(attitude, float), np.zeros(3))

    def is_finite(self):
        return bool(np.all(np.isfinite(self.as_vector())))

    def __eq__(self, other):
        if not isinstance(other, RigidBodyState):
            return NotImplemented
        return self.as_vector() == other.as_vector()


@dataclass(frozen=True)
class HingeParams:
    spring_stiffness: float
    spring_preload: float
    arm_inertia: float
    stop_angle: float
    stop_restitution: float
    joint_damping: float
    latch_rate: float = 0.5

    def __post_init__(self):
        if not (self.spring_stiffness > 0 and self.arm_inertia > 0):
            raise ValueError("spring_stiffness and arm_inertia must be positive")
        if not 0.0 <= self.stop_restitution <= 1.0:
            raise ValueError("stop_restitution must be in [0, 1]")
        if not self.stop_angle > 0:
            raise ValueError("stop_angle must be positive")
        if self.spring_preload < 0 or self.joint_damping < 0 or self.latch_rate < 0:
            raise ValueError("preload, damping and latch_rate must be non-negative")


@dataclass(frozen=True)
class ArmState:
    angle: float = 0.0
    rate: float = 0.0
    released: bool = False
    latched_open: bool = False
    # set on the first contact with the open stop
    reached_stop: bool = False


# ---------------------------------------------------------------- barrel

def barrel_profile(muzzle_speed, barrel_length):
    """Duration and peak of the half-sine in-barrel acceleration.

    a(t) = a_pk sin(pi t / T) reaches ``muzzle_speed`` after exactly
    ``barrel_length`` of travel when T = 2 s / v, giving a_pk = pi/2 times
    the constant-acceleration mean v^2 / 2s.
    """
    duration = 2.0 * barrel_length / muzzle_speed
    peak = math.pi / 2.0 * muzzle_speed ** 2 / (2.0 * barrel_length)
    return duration, peak


def barrel_kinematics(t, muzzle_speed, barrel_length):
    """Travel, speed and acceleration along the barrel ``t`` s after trigger."""
    duration, peak = barrel_profile(muzzle_speed, barrel_length)
    if t <= 0.0:
        return 0.0, 0.0, 0.0
    if t >= duration:
        return barrel_length + muzzle_speed * (t - duration), muzzle_speed, 0.0
    w = math.pi / duration
    accel = peak * math.sin(w * t)
    speed = peak / w * (1.0 - math.cos(w * t))
    travel = peak / w * (t - math.sin(w * t) / w)
    return travel, speed, accel


def barrel_launch(muzzle_speed, barrel_axis, barrel_length, vehicle_velocity=(0.0, 0.0, 0.0)):
    """State at muzzle exit (muzzle at the origin) and peak barrel acceleration."""
    if not muzzle_speed > 0 or not barrel_length > 0:
        raise ValueError("muzzle_speed and barrel_length must be positive")
    axis = np.asarray(barrel_axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    velocity = muzzle_speed * axis + np.asarray(vehicle_velocity, dtype=float)
    attitude = rotation.from_two_vectors([0.0, 0.0, 1.0], axis)
    state = RigidBodyState(np.zeros(3), velocity, attitude, np.zeros(3))
    return state, barrel_profile(muzzle_speed, barrel_length)[1]


# ---------------------------------------------------------------- rigid body

def motor_positions(arm_length):
    """Rotor hub positions (body x, y) of the X layout, motors 1..4.

    1 front-right, 2 rear-left, 3 front-left, 4 rear-right; 1 and 2 spin
    counter-clockwise seen from above.
    """
    c = arm_length / math.sqrt(2.0)
    return np.array([[c, -c], [-c, c], [c, c], [-c, -c]])


SPIN = np.array([-1.0, -1.0, 1.0, 1.0])


def allocation_matrix(arm_length, yaw_coeff):
    """Maps four rotor thrusts to (collective, roll, pitch, yaw) in body axes."""
    pos = motor_positions(arm_length)
    return np.vstack([
        np.ones(4),
        pos[:, 1],
        -pos[:, 0],
        yaw_coeff * SPIN,
    ])


def motor_wrench(thrusts, arm_length, yaw_coeff):
    """Body force and torque produced by the four rotors."""
    w = allocation_matrix(arm_length, yaw_coeff) @ np.asarray(thrusts, dtype=float)
    return (0.0, 0.0, float(w[0])), (float(w[1]), float(w[2]), float(w[3]))


def step(state, mass_props, geom, env, thrusts=None, dt=0.001, propulsion=None):
    """Advance one RK4 step with rotor thrusts held constant.

    ``geom=None`` disables aerodynamics. ``propulsion`` supplies the rotor
    layout and is required when ``thrusts`` is given.
    """
    if not 0.0 < dt <= MAX_DT:
        raise ValueError(f"dt must lie in (0, {MAX_DT}]")
    force = torque = (0.0, 0.0, 0.0)
    if thrusts is not None:
        if propulsion is None:
            raise ValueError("propulsion limits are needed to place the rotors")
        force, torque = motor_wrench(thrusts, propulsion.arm_length, propulsion.yaw_coeff)
    p = kernels.pack_params(mass_props, geom, env, force, torque)
    y = kernels.rk4_step(state.as_vector(), p, dt)
    if not all(math.isfinite(v) for v in y):
        raise NonFiniteState(f"non-finite state after step: {y}")
    return RigidBodyState.from_vector(y)


def specific_force(state, mass_props, geom, env, thrusts=None, propulsion=None):
    """Accelerometer reading (body forward-left-up axes, m/s^2)."""
    force = torque = (0.0, 0.0, 0.0)
    if thrusts is not None:
        force, torque = motor_wrench(thrusts, propulsion.arm_length, propulsion.yaw_coeff)
    p = kernels.pack_params(mass_props, geom, env, force, torque)
    return np.array(kernels.specific_force(state.as_vector(), p))


def mechanical_energy(state, mass_props, gravity):
    v = np.asarray(state.velocity)
    w = np.asarray(state.omega_body)
    kinetic = 0.5 * mass_props.mass * float(v @ v)
    rotational = 0.5 * float(mass_props.inertia_diag @ (w * w))
    return kinetic + rotational + mass_props.mass * gravity * float(state.position[2])


# ---------------------------------------------------------------- arms

def _hinge_accel(angle, rate, hinge):
    torque = hinge.spring_preload + hinge.spring_stiffness * (hinge.stop_angle - angle)
    return (torque - hinge.joint_damping * rate) / hinge.arm_inertia


def arm_hinge_step(arm: ArmState, hinge: HingeParams, dt: float) -> ArmState:
    """Advance the spring-driven arm by ``dt`` with a restitution hard stop."""
    if not arm.released or arm.latched_open:
        return arm
    a0, r0 = arm.angle, arm.rate
    k1a, k1r = r0, _hinge_accel(a0, r0, hinge)
    k2a, k2r = r0 + 0.5 * dt * k1r, _hinge_accel(a0 + 0.5 * dt * k1a, r0 + 0.5 * dt * k1r, hinge)
    k3a, k3r = r0 + 0.5 * dt * k2r, _hinge_accel(a0 + 0.5 * dt * k2a, r0 + 0.5 * dt * k2r, hinge)
    k4a, k4r = r0 + dt * k3r, _hinge_accel(a0 + dt * k3a, r0 + dt * k3r, hinge)
    angle = a0 + dt / 6.0 * (k1a + 2 * k2a + 2 * k3a + k4a)
    rate = r0 + dt / 6.0 * (k1r + 2 * k2r + 2 * k3r + k4r)
    if angle < hinge.stop_angle:
        return replace(arm, angle=angle, rate=rate)
    rebound = -hinge.stop_restitution * max(rate, 0.0)
    if abs(rebound) < hinge.latch_rate:
        return replace(arm, angle=hinge.stop_angle, rate=0.0, latched_open=True, reached_stop=True)
    return replace(arm, angle=hinge.stop_angle, rate=rebound, reached_stop=True)


def hinge_energy(arm: ArmState, hinge: HingeParams) -> float:
    """Arm kinetic energy plus spring potential (zero at the open stop)."""
    gap = hinge.stop_angle - arm.angle
    return (0.5 * hinge.arm_inertia * arm.rate ** 2
            + hinge.spring_preload * gap + 0.5 * hinge.spring_stiffness * gap ** 2)


def apply_deployment(state, folded: MassProperties, unfolded: MassProperties):
    """Swap inertias conserving body angular momentum axis by axis."""
    ratio = folded.inertia_diag / unfolded.inertia_diag
    return replace(state, omega_body=np.asarray(state.omega_body, dtype=float) * ratio)


# ---------------------------------------------------------------- launch detection

def detect_launch(times, accel, threshold=10 * G0, min_duration=0.010):
    """Time at which a launch is confirmed, or None.

    A launch is confirmed at the first sample where ``accel`` has stayed at
    or above ``threshold`` for at least ``min_duration``; the onset is the
    returned time minus ``min_duration``. Shorter spikes (road bumps) are
    ignored.
    """
    times = np.asarray(times, dtype=float)
    accel = np.asarray(accel, dtype=float)
    start = None
    tol = 1e-9 * max(1.0, min_duration)
    for t, a in zip(times, accel):
        if a >= threshold:
            if start is None:
                start = t
            if t - start >= min_duration - tol:
                return float(t)
        else:
            start = None
    return None
