"""Six-phase launch-to-hover mission: configuration, controller and runner."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from . import kernels, rotation
from .aero import AeroGeometry
from .dynamics import (
    G0, ArmState, Environment, HingeParams, MassProperties, RigidBodyState,
    allocation_matrix, apply_deployment, arm_hinge_step, barrel_kinematics,
    barrel_launch, barrel_profile, detect_launch, motor_wrench,
)
from .sizing import PropellerDesign, PropulsionLimits

log = logging.getLogger(__name__)

OUTPUT_RATE = 100.0
ARM_DT = 1e-4
_EPS = 1e-9


class Phase(IntEnum):
    RESTING = 0
    BARREL_ACCELERATION = 1
    UNPOWERED_FLIGHT = 2
    ARM_DEPLOYMENT = 3
    STABILIZATION = 4
    CONTROLLED_FLIGHT = 5

    @property
    def label(self):
        return "".join(part.capitalize() for part in self.name.split("_"))


@dataclass(frozen=True)
class ControllerGains:
    """Attitude gains are angular accelerations per rad (and per rad/s)."""

    kp_att: float = 900.0
    kd_att: float = 60.0
    kp_yaw: float = 16.0
    kd_yaw: float = 8.0
    kp_climb: float = 3.0
    kp_vel: float = 1.0
    max_tilt: float = 0.6


@dataclass(frozen=True)
class VehicleConfig:
    aero_folded: AeroGeometry
    aero_unfolded: AeroGeometry
    mass_folded: MassProperties
    mass_unfolded: MassProperties
    propulsion: PropulsionLimits
    hinge: HingeParams
    propeller: PropellerDesign = PropellerDesign()

    def __post_init__(self):
        for mp in (self.mass_folded, self.mass_unfolded):
            if not mp.cm_z < self.aero_folded.length_L:
                raise ValueError("cm_z must lie inside the body length")


@dataclass(frozen=True)
class MissionConfig:
    vehicle: VehicleConfig
    env: Environment
    muzzle_speed: float
    barrel_axis: tuple
    barrel_length: float
    vehicle_velocity: tuple
    release_delay: float
    unkill_delay: float
    sim_duration: float
    controller_gains: ControllerGains = ControllerGains()
    resting_time: float = 0.5
    dt: float = 0.001
    detect_threshold: float = 10 * G0
    detect_min_duration: float = 0.010
    velocity_hold: bool = False
    settle_tilt: float = math.radians(5.0)
    settle_rate: float = 0.5
    settle_climb: float = 0.5
    settle_hold: float = 0.5
    divergence_angle: float = math.pi / 2
    divergence_hold: float = 2.0
    design_normal_speed: float = 2.0

    def __post_init__(self):
        if not self.muzzle_speed > 0:
            raise ValueError("muzzle_speed must be positive")
        if not self.barrel_length > 0:
            raise ValueError("barrel_length must be positive")
        if len(self.barrel_axis) != 3 or np.linalg.norm(self.barrel_axis) == 0:
            raise ValueError("barrel_axis must be a non-zero 3-vector")
        if len(self.vehicle_velocity) != 3:
            raise ValueError("vehicle_velocity must be a 3-vector")
        for name in ("release_delay", "unkill_delay", "resting_time", "sim_duration"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.sim_duration > 0 and not self.sim_duration > self.release_delay + self.unkill_delay:
            raise ValueError("sim_duration must exceed release_delay + unkill_delay")
        if not 0 < self.dt <= 0.005:
            raise ValueError("dt must lie in (0, 0.005]")
        if self.vehicle.propulsion.motor_count != 4:
            raise ValueError("the simulator models a four-rotor X layout")


@dataclass(frozen=True, eq=False)
class TrajectorySample:
    t: float
    phase: Phase
    state: RigidBodyState
    body_accel: np.ndarray
    roll: float
    pitch: float
    yaw: float
    motor_thrusts: tuple
    arm_angle: float


@dataclass
class Trajectory:
    """100 Hz samples plus event times (s) and termination flags."""

    samples: list = field(default_factory=list)
    events: dict = field(default_factory=dict)
    # largest rebound of any arm from its open stop (rad); None before deployment
    max_recoil: float | None = None
    unstable_deployment: bool = False
    nonfinite: bool = False
    ground_contact: bool = False
    diagnostic: str = ""

    def __len__(self):
        return len(self.samples)

    def times(self):
        return np.array([s.t for s in self.samples])

    def positions(self):
        return np.array([s.state.position for s in self.samples]).reshape(-1, 3)

    def velocities(self):
        return np.array([s.state.velocity for s in self.samples]).reshape(-1, 3)

    def attitudes(self):
        return np.array([s.state.attitude for s in self.samples]).reshape(-1, 4)

    def phases(self):
        return np.array([int(s.phase) for s in self.samples], dtype=int)

    def channel(self, name):
        if name == "climb_rate":
            return self.velocities()[:, 2]
        return np.array([getattr(s, name) for s in self.samples])

    def apex(self):
        return float(self.positions()[:, 2].max()) if self.samples else float("nan")

    def reached(self, phase):
        return any(s.phase == phase for s in self.samples)


# ---------------------------------------------------------------- control

def motor_mixer(roll_torque, pitch_torque, yaw_torque, collective_thrust, arm_length, yaw_coeff):
    """Four rotor thrusts realising the requested body torques and collective."""
    if not arm_length > 0:
        raise ValueError("arm_length must be positive")
    a = allocation_matrix(arm_length, yaw_coeff)
    return np.linalg.solve(a, [collective_thrust, roll_torque, pitch_torque, yaw_torque])


def _fit_to_limits(collective, torque_part, fmax):
    """Clamp rotor thrusts, keeping torque ratios and trading collective first."""
    lo = -torque_part.min()
    hi = fmax - torque_part.max()
    base = collective / 4.0
    if lo <= hi:
        return np.clip(base, lo, hi) + torque_part, float(np.clip(base, lo, hi)) != base
    # not even the torque alone fits: centre and scale it down
    spread = torque_part.max() - torque_part.min()
    scaled = torque_part * (fmax / spread)
    return np.clip(fmax / 2.0 - (scaled.max() + scaled.min()) / 2.0 + scaled, 0.0, fmax), True


def attitude_controller(state, setpoint_attitude, setpoint_climb_rate, gains: ControllerGains,
                        limits: PropulsionLimits, mass_props: MassProperties, gravity=9.81):
    """PD attitude and climb-rate control, mixed to four clamped rotor thrusts."""
    q = rotation.normalize(state.attitude)
    err = rotation.multiply(rotation.conjugate(q), rotation.normalize(setpoint_attitude))
    if err[0] < 0:
        err = -err
    vec = err[1:]
    s = float(np.linalg.norm(vec))
    rotvec = vec * (2.0 * math.atan2(s, err[0]) / s) if s > 1e-12 else 2.0 * vec
    w = np.asarray(state.omega_body, dtype=float)
    ang_acc = np.array([
        gains.kp_att * rotvec[0] - gains.kd_att * w[0],
        gains.kp_att * rotvec[1] - gains.kd_att * w[1],
        gains.kp_yaw * rotvec[2] - gains.kd_yaw * w[2],
    ])
    torque = mass_props.inertia_diag * ang_acc

    up = rotation.to_matrix(q)[2, 2]
    collective = mass_props.mass * (gravity + gains.kp_climb * (setpoint_climb_rate - state.velocity[2]))
    if up > 0.0:
        collective /= max(up, 0.5)
    else:
        collective = 0.5 * mass_props.mass * gravity
    fmax = limits.max_thrust_per_motor
    collective = min(max(collective, 0.0), 4.0 * fmax)

    torque_part = motor_mixer(torque[0], torque[1], torque[2], 0.0, limits.arm_length, limits.yaw_coeff)
    thrusts, saturated = _fit_to_limits(collective, torque_part, fmax)
    if saturated:
        log.debug("rotor thrust saturated: %s", thrusts)
    return np.clip(thrusts, 0.0, fmax)


def velocity_hold_attitude(velocity, yaw, gains: ControllerGains, gravity=9.81):
    """Tilted attitude whose thrust component brakes horizontal velocity."""
    acc = -gains.kp_vel * np.array([velocity[0], velocity[1]])
    lim = gravity * math.tan(gains.max_tilt)
    n = float(np.linalg.norm(acc))
    if n > lim:
        acc *= lim / n
    tilt = rotation.from_two_vectors([0.0, 0.0, 1.0], [acc[0], acc[1], gravity])
    return rotation.multiply(tilt, rotation.from_yaw(yaw))


# ---------------------------------------------------------------- runner

def _sample(t, phase, y, sf_body_flu, thrusts, arm_angle):
    state = RigidBodyState.from_vector(y)
    roll, pitch, yaw = rotation.euler_aerospace(state.attitude)
    return TrajectorySample(
        t=t, phase=phase, state=state,
        body_accel=rotation.flu_to_frd(sf_body_flu),
        roll=roll, pitch=pitch, yaw=yaw,
        motor_thrusts=tuple(float(f) for f in thrusts),
        arm_angle=float(arm_angle),
    )


def run_mission(config: MissionConfig) -> Trajectory:
    """Simulate resting, launch, ballistic flight, deployment and hover.

    Output is sampled at 100 Hz on t = k / 100 for t < ``sim_duration``.
    The run stops early on ground contact, divergence (flagged as an
    unstable deployment) or a non-finite state.
    """
    traj = Trajectory()
    n_out = int(round(config.sim_duration * OUTPUT_RATE))
    if n_out == 0:
        return traj

    veh = config.vehicle
    env = config.env
    g = env.gravity
    dt = config.dt
    axis = np.asarray(config.barrel_axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    carrier = np.asarray(config.vehicle_velocity, dtype=float)
    t_launch = config.resting_time
    barrel_time, _ = barrel_profile(config.muzzle_speed, config.barrel_length)
    t_exit = t_launch + barrel_time
    ground_z = -config.barrel_length * axis[2]
    att0 = rotation.from_two_vectors([0.0, 0.0, 1.0], axis)
    r0 = rotation.to_matrix(att0)

    def carried(t):
        travel, speed, accel = barrel_kinematics(t - t_launch, config.muzzle_speed, config.barrel_length)
        pos = carrier * (t - t_exit) + axis * (travel - config.barrel_length)
        vel = carrier + axis * speed
        sf_world = axis * accel + np.array([0.0, 0.0, g])
        return pos, vel, r0.T @ sf_world

    # accelerometer trace the autopilot sees before muzzle exit, along the nose axis
    trace_t = np.arange(int(math.floor(t_exit / dt)) + 1) * dt
    trace_a = [carried(t)[2][2] for t in trace_t]
    t_detect = detect_launch(trace_t, trace_a, config.detect_threshold, config.detect_min_duration)
    ev = traj.events
    ev["launch"] = t_launch
    ev["muzzle_exit"] = t_exit
    t_release = t_unkill = None
    if t_detect is not None:
        ev["detect"] = t_detect
        # arms cannot open inside the barrel
        t_release = max(t_detect + config.release_delay, t_exit)
        t_unkill = t_release + config.unkill_delay
    else:
        traj.diagnostic = "launch not detected; arms never released"

    zero4 = (0.0, 0.0, 0.0, 0.0)
    k = 0
    while k < n_out and k / OUTPUT_RATE < t_exit - _EPS:
        t = k / OUTPUT_RATE
        pos, vel, sf = carried(t)
        y = [*pos, *vel, *att0, 0.0, 0.0, 0.0]
        phase = Phase.RESTING if t < t_launch else Phase.BARREL_ACCELERATION
        traj.samples.append(_sample(t, phase, y, sf, zero4, 0.0))
        k += 1
    if k == n_out:
        return traj

    state0, _ = barrel_launch(config.muzzle_speed, axis, config.barrel_length, carrier)
    y = state0.as_vector()
    t = t_exit
    mass = veh.mass_folded
    geom = veh.aero_folded
    arm = ArmState()
    phase = Phase.UNPOWERED_FLIGHT
    thrusts = np.zeros(4)
    powered = False
    yaw_hold = 0.0
    settle_since = None
    diverge_since = None
    max_recoil = 0.0
    gains = config.controller_gains
    prop = veh.propulsion

    while k < n_out:
        if t_release is not None and not arm.released and t >= t_release - _EPS:
            arm = ArmState(released=True)
            phase = Phase.ARM_DEPLOYMENT
            ev["release"] = t
        if t_unkill is not None and not powered and t >= t_unkill - _EPS:
            powered = True
            phase = Phase.STABILIZATION
            ev["unkill"] = t
            yaw_hold = rotation.heading(y[6:10])

        state = None
        if powered:
            state = RigidBodyState.from_vector(y)
            if config.velocity_hold and phase == Phase.CONTROLLED_FLIGHT:
                sp = velocity_hold_attitude(state.velocity, yaw_hold, gains, g)
            else:
                sp = rotation.from_yaw(yaw_hold)
            thrusts = attitude_controller(state, sp, 0.0, gains, prop, mass, g)
        force, torque = motor_wrench(thrusts, prop.arm_length, prop.yaw_coeff)
        params = kernels.pack_params(mass, geom, env, force, torque)

        t_out = k / OUTPUT_RATE
        if abs(t - t_out) < _EPS:
            sf = kernels.specific_force(y, params)
            traj.samples.append(_sample(t_out, phase, y, sf, thrusts, arm.angle))
            k += 1
            if k == n_out:
                break
            t_out = k / OUTPUT_RATE

        h = min(dt, t_out - t)
        for pending in (t_release if not arm.released else None, t_unkill if not powered else None):
            if pending is not None and pending - t > _EPS:
                h = min(h, pending - t)

        contact = None
        if arm.released and not arm.latched_open:
            n_sub = max(1, math.ceil(h / ARM_DT - 1e-9))
            hs = h / n_sub
            for i in range(n_sub):
                arm = arm_hinge_step(arm, veh.hinge, hs)
                if arm.reached_stop:
                    if contact is None and "deployed" not in ev:
                        contact = t + (i + 1) * hs
                    max_recoil = max(max_recoil, veh.hinge.stop_angle - arm.angle)
                if arm.latched_open:
                    ev.setdefault("latched", t + (i + 1) * hs)
                    break

        y = kernels.rk4_step(y, params, h)
        t += h
        # snap onto output and event instants so time does not drift
        for anchor in (t_out, t_release, t_unkill):
            if anchor is not None and abs(t - anchor) < _EPS:
                t = anchor
        if not all(math.isfinite(v) for v in y):
            traj.nonfinite = True
            traj.diagnostic = f"non-finite state at t={t:.4f} s"
            break

        if contact is not None:
            ev["deployed"] = contact
            deployed = apply_deployment(RigidBodyState.from_vector(y), veh.mass_folded, veh.mass_unfolded)
            y = deployed.as_vector()
            mass = veh.mass_unfolded
            geom = veh.aero_unfolded

        if powered:
            q = y[6:10]
            tilt = rotation.tilt(q)
            if phase == Phase.STABILIZATION:
                calm = (tilt < config.settle_tilt
                        and math.sqrt(y[10] ** 2 + y[11] ** 2 + y[12] ** 2) < config.settle_rate
                        and abs(y[5]) < config.settle_climb)
                if not calm:
                    settle_since = None
                elif settle_since is None:
                    settle_since = t
                elif t - settle_since >= config.settle_hold - _EPS:
                    phase = Phase.CONTROLLED_FLIGHT
                    ev["controlled"] = t
            if tilt > config.divergence_angle:
                diverge_since = t if diverge_since is None else diverge_since
                if t - diverge_since > config.divergence_hold:
                    traj.unstable_deployment = True
                    traj.diagnostic = f"attitude diverged beyond {math.degrees(config.divergence_angle):.0f} deg"
                    break
            else:
                diverge_since = None

        if y[2] < ground_z:
            traj.ground_contact = True
            ev["ground"] = t
            break

    if arm.reached_stop:
        traj.max_recoil = max_recoil
    return traj


def settling_time(traj: Trajectory, channel: str, band: float, hold_duration: float):
    """Seconds after unkill until ``|channel|`` stays within ``band`` for ``hold_duration``.

    Returns None when the channel never settles within the recorded data
    or the vehicle was never unkilled.
    """
    if channel not in ("roll", "pitch", "yaw", "climb_rate"):
        raise ValueError(f"unknown channel {channel!r}")
    t_unkill = traj.events.get("unkill")
    if t_unkill is None or not traj.samples:
        return None
    t = traj.times()
    x = traj.channel(channel)
    mask = t >= t_unkill - _EPS
    t, x = t[mask], x[mask]
    start = None
    for ti, xi in zip(t, x):
        if abs(xi) <= band:
            if start is None:
                start = ti
            if ti - start >= hold_duration - _EPS:
                return float(start - t_unkill)
        else:
            start = None
    return None
