"""Froude similarity: dimensionless groups, scaled configs and a self-check.

With gravity and air density held fixed, a model scaled by ``lam`` in
length matches the dimensionless launch inputs when speeds scale by
sqrt(lam). The trajectory then scales by ``lam`` in position and sqrt(lam)
in time. Reynolds number is reported but not matched, since the aero model
has no viscous term.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import rotation
from .mission import MissionConfig, Trajectory, TrajectorySample, run_mission

MPH = 0.44704
LAMBDA_RANGE = (0.1, 10.0)


@dataclass(frozen=True)
class NondimGroups:
    """Dimensionless launch inputs.

    ``t_tilde`` uses the arm release delay as its time scale; every other
    configured delay scales the same way.
    """

    t_tilde: float
    froude: float
    reynolds: float
    u_vehicle_tilde: float
    m_tilde: float
    d_tilde: float
    i_tilde: float
    fin_area_ratio: float

    def as_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def nondimensionalize(config: MissionConfig, mu: float | None = None) -> NondimGroups:
    mu = config.env.mu if mu is None else mu
    if not mu > 0:
        raise ValueError("mu must be positive")
    geom = config.vehicle.aero_folded
    mass = config.vehicle.mass_folded
    speed = config.muzzle_speed
    length = geom.length_L
    rho = config.env.rho
    return NondimGroups(
        t_tilde=config.release_delay * speed / length,
        froude=speed / math.sqrt(config.env.gravity * length),
        reynolds=rho * speed * length / mu,
        u_vehicle_tilde=float(np.linalg.norm(config.vehicle_velocity)) / speed,
        m_tilde=mass.mass / (rho * length ** 3),
        d_tilde=geom.diameter_d / length,
        i_tilde=mass.inertia_pitch / (rho * length ** 5),
        fin_area_ratio=geom.area_fin / length ** 2,
    )


def _vec(v, k):
    return tuple(float(x) * k for x in v)


def scale_config(config: MissionConfig, lam: float, speed_exponent: float = 0.5) -> MissionConfig:
    """Geometrically scaled copy of ``config`` under Froude similarity.

    ``speed_exponent`` other than 0.5 scales the launch speeds as
    ``lam ** speed_exponent`` while leaving everything else Froude-scaled,
    which deliberately breaks similarity.
    """
    if not lam > 0:
        raise ValueError("lambda must be positive")
    length, area, volume, inertia = lam, lam ** 2, lam ** 3, lam ** 5
    speed = math.sqrt(lam)
    launch_speed = lam ** speed_exponent
    duration = math.sqrt(lam)
    rate = 1.0 / math.sqrt(lam)
    torque = lam ** 4
    veh = config.vehicle

    def geom(g):
        return replace(g, length_L=g.length_L * length, diameter_d=g.diameter_d * length,
                       volume=g.volume * volume, area_front=g.area_front * area,
                       area_side=g.area_side * area, area_fin=g.area_fin * area,
                       ac_shift=g.ac_shift * length)

    def mass(m):
        return replace(m, mass=m.mass * volume, inertia_yaw=m.inertia_yaw * inertia,
                       inertia_pitch=m.inertia_pitch * inertia, cm_z=m.cm_z * length)

    p = veh.propulsion
    propulsion = replace(p, max_thrust_per_motor=p.max_thrust_per_motor * volume,
                         arm_length=p.arm_length * length, yaw_coeff=p.yaw_coeff * length,
                         prop_diameter=p.prop_diameter * length)
    propeller = replace(veh.propeller, v_tip=veh.propeller.v_tip * speed,
                        payload_mass=veh.propeller.payload_mass * volume)
    h = veh.hinge
    hinge = replace(h, spring_stiffness=h.spring_stiffness * torque,
                    spring_preload=h.spring_preload * torque, arm_inertia=h.arm_inertia * inertia,
                    joint_damping=h.joint_damping * torque * duration, latch_rate=h.latch_rate * rate)
    vehicle = replace(veh, aero_folded=geom(veh.aero_folded), aero_unfolded=geom(veh.aero_unfolded),
                      mass_folded=mass(veh.mass_folded), mass_unfolded=mass(veh.mass_unfolded),
                      propulsion=propulsion, propeller=propeller, hinge=hinge)
    g = config.controller_gains
    gains = replace(g, kp_att=g.kp_att * rate ** 2, kd_att=g.kd_att * rate,
                    kp_yaw=g.kp_yaw * rate ** 2, kd_yaw=g.kd_yaw * rate,
                    kp_climb=g.kp_climb * rate, kp_vel=g.kp_vel * rate)
    env = replace(config.env, wind_world=_vec(config.env.wind_world, speed))
    return replace(
        config, vehicle=vehicle, env=env, controller_gains=gains,
        muzzle_speed=config.muzzle_speed * launch_speed,
        vehicle_velocity=_vec(config.vehicle_velocity, launch_speed),
        barrel_length=config.barrel_length * length,
        release_delay=config.release_delay * duration, unkill_delay=config.unkill_delay * duration,
        sim_duration=config.sim_duration * duration, resting_time=config.resting_time * duration,
        detect_min_duration=config.detect_min_duration * duration,
        settle_rate=config.settle_rate * rate, settle_climb=config.settle_climb * speed,
        settle_hold=config.settle_hold * duration, divergence_hold=config.divergence_hold * duration,
        design_normal_speed=config.design_normal_speed * speed,
    )


def matched_speeds(muzzle_speed, vehicle_speed, lam):
    """Launch and carrier speeds that keep Fr and the speed ratio at scale ``lam``."""
    k = math.sqrt(lam)
    return muzzle_speed * k, vehicle_speed * k


def predict_scaled_trajectory(base: Trajectory, lam: float) -> Trajectory:
    """Trajectory a ``lam``-scaled vehicle should fly, predicted from ``base``."""
    if not base.samples:
        raise ValueError("base trajectory is empty")
    if not lam > 0:
        raise ValueError("lambda must be positive")
    k = math.sqrt(lam)
    force = lam ** 3
    out = []
    for s in base.samples:
        st = s.state
        state = replace(st, position=st.position * lam, velocity=st.velocity * k,
                        attitude=st.attitude.copy(), omega_body=st.omega_body / k)
        out.append(TrajectorySample(
            t=s.t * k, phase=s.phase, state=state, body_accel=np.array(s.body_accel, dtype=float),
            roll=s.roll, pitch=s.pitch, yaw=s.yaw,
            motor_thrusts=tuple(f * force for f in s.motor_thrusts), arm_angle=s.arm_angle,
        ))
    return Trajectory(
        samples=out, events={name: t * k for name, t in base.events.items()},
        max_recoil=base.max_recoil, unstable_deployment=base.unstable_deployment,
        nonfinite=base.nonfinite, ground_contact=base.ground_contact, diagnostic=base.diagnostic,
    )


@dataclass(frozen=True)
class ScalingReport:
    lam: float
    position_rms_error: float  # relative to the RMS predicted position magnitude
    max_position_error: float  # m
    max_attitude_error: float  # rad
    tolerance: float
    passed: bool
    compared_samples: int

    def summary(self):
        verdict = "PASS" if self.passed else "FAIL"
        return (f"lambda={self.lam:g} rel_rms_position_error={self.position_rms_error:.3e} "
                f"max_position_error={self.max_position_error:.3e} m "
                f"max_attitude_error={math.degrees(self.max_attitude_error):.3f} deg "
                f"samples={self.compared_samples} {verdict}")


def _attitude_at(times, quats, t):
    i = int(np.clip(np.searchsorted(times, t), 1, len(times) - 1))
    t0, t1 = times[i - 1], times[i]
    w = 0.0 if t1 == t0 else (t - t0) / (t1 - t0)
    q0, q1 = quats[i - 1], quats[i]
    if float(q0 @ q1) < 0:
        q1 = -q1
    return rotation.normalize((1 - w) * q0 + w * q1)


def compare_trajectories(predicted: Trajectory, direct: Trajectory):
    """Errors of ``predicted`` against ``direct`` at the predicted sample times."""
    tp, td = predicted.times(), direct.times()
    keep = (tp >= td[0]) & (tp <= td[-1])
    tp = tp[keep]
    pp = predicted.positions()[keep]
    pd = np.column_stack([np.interp(tp, td, direct.positions()[:, i]) for i in range(3)])
    err = np.linalg.norm(pp - pd, axis=1)
    scale = math.sqrt(float(np.mean(np.sum(pp * pp, axis=1))))
    qd_all = direct.attitudes()
    att = [rotation.angle_between(q, _attitude_at(td, qd_all, t))
           for q, t in zip(predicted.attitudes()[keep], tp)]
    rms = math.sqrt(float(np.mean(err * err)))
    return rms / scale if scale > 0 else rms, float(err.max()), float(max(att)), int(len(tp))


def verify_scaling(config: MissionConfig, lam: float, tolerance: float = 0.01,
                   break_similarity: bool = False) -> ScalingReport:
    """Fly ``config`` and its scaled copy; compare with the similarity prediction.

    With ``break_similarity`` the launch speeds scale by ``lam`` instead of
    sqrt(lam), so the Froude number changes and the check should fail.
    """
    lo, hi = LAMBDA_RANGE
    if not lo <= lam <= hi:
        raise ValueError(f"lambda must lie in [{lo}, {hi}]: Reynolds effects are not modelled")
    base = run_mission(config)
    scaled_cfg = scale_config(config, lam, speed_exponent=1.0 if break_similarity else 0.5)
    direct = run_mission(scaled_cfg)
    if not base.samples or not direct.samples:
        return ScalingReport(lam, 0.0, 0.0, 0.0, tolerance, True, 0)
    predicted = predict_scaled_trajectory(base, lam)
    rel, max_pos, max_att, n = compare_trajectories(predicted, direct)
    return ScalingReport(lam, rel, max_pos, max_att, tolerance, rel < tolerance, n)
