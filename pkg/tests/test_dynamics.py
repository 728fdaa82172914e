import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from foldlaunch import _kernel_py, aero, dynamics, kernels, rotation
from foldlaunch.dynamics import ArmState, Environment, MassProperties, RigidBodyState
from foldlaunch.errors import NonFiniteState
from foldlaunch.mission import ARM_DT

try:
    from foldlaunch import _kernel as compiled
except ImportError:
    compiled = None


# ---------------------------------------------------------------- barrel

def test_barrel_profile_reference():
    duration, peak = dynamics.barrel_profile(15.0, 0.76)
    assert duration == pytest.approx(2 * 0.76 / 15.0, rel=1e-15)
    assert peak == pytest.approx(232.5, abs=0.1)


@given(st.floats(1.0, 60.0), st.floats(0.1, 3.0))
def test_barrel_kinematics_reach_muzzle(speed, length):
    duration, _ = dynamics.barrel_profile(speed, length)
    travel, v, _ = dynamics.barrel_kinematics(duration, speed, length)
    assert travel == pytest.approx(length, rel=1e-12)
    assert v == pytest.approx(speed, rel=1e-12)


def test_barrel_speed_is_integral_of_acceleration():
    duration, _ = dynamics.barrel_profile(15.0, 0.76)
    t = np.linspace(0, duration, 20001)
    acc = np.array([dynamics.barrel_kinematics(x, 15.0, 0.76)[2] for x in t])
    assert np.trapezoid(acc, t) == pytest.approx(15.0, rel=1e-7)


def test_barrel_launch_state():
    axis = np.array([0.3, 0.0, 1.0])
    state, peak = dynamics.barrel_launch(15.0, axis, 0.76, (22.35, 0.0, 0.0))
    unit = axis / np.linalg.norm(axis)
    assert np.array_equal(state.position, np.zeros(3))
    assert np.allclose(state.velocity, 15.0 * unit + [22.35, 0, 0], atol=1e-12)
    assert np.allclose(rotation.to_matrix(state.attitude) @ [0, 0, 1], unit, atol=1e-12)
    assert peak == pytest.approx(232.5, abs=0.1)


# ---------------------------------------------------------------- rigid body

def test_free_fall_is_exact_without_aero():
    mp = MassProperties(0.53, 4e-4, 2e-3, 0.12)
    env = Environment()
    s = RigidBodyState(np.array([0.0, 0.0, 5.0]), np.array([1.0, -2.0, 12.0]),
                       np.array([1.0, 0.0, 0.0, 0.0]), np.zeros(3))
    dt, n = 0.004, 500
    for _ in range(n):
        s = dynamics.step(s, mp, None, env, dt=dt)
    t = dt * n
    expected = np.array([1.0 * t, -2.0 * t, 5.0 + 12.0 * t - 0.5 * env.gravity * t * t])
    assert np.allclose(s.position, expected, rtol=1e-12, atol=1e-12)
    assert s.velocity[2] == pytest.approx(12.0 - env.gravity * t, rel=1e-12)


def _drag_fall_error(dt):
    """Error against v = -vt tanh(g t / vt) for a nose-up body falling along its axis."""
    geom = replace(_ref_geom(), volume=0.0)
    mp = MassProperties(0.002, 4e-4, 2e-3, 0.12)
    env = Environment()
    vt = math.sqrt(2 * mp.mass * env.gravity / (env.rho * geom.area_front * geom.cd_axial))
    T = 1.0
    s = RigidBodyState.at_rest()
    for _ in range(round(T / dt)):
        s = dynamics.step(s, mp, geom, env, dt=dt)
    z = -vt ** 2 / env.gravity * math.log(math.cosh(env.gravity * T / vt))
    v = -vt * math.tanh(env.gravity * T / vt)
    return abs(s.position[2] - z), abs(s.velocity[2] - v)


def _ref_geom():
    return aero.AeroGeometry(0.27, 0.083, 1.15e-3, 5.41e-3, 0.0224, 3.0e-3, 0.8, 3.7699, 1.1, 0.35)


def test_rk4_error_shrinks_fourth_order():
    coarse, fine = _drag_fall_error(0.005), _drag_fall_error(0.0025)
    assert coarse[0] / fine[0] >= 8.0
    assert coarse[1] / fine[1] >= 8.0


def test_energy_conserved_without_aero():
    mp = MassProperties(0.53, 4e-4, 2e-3, 0.12)
    env = Environment()
    s = RigidBodyState(np.zeros(3), np.array([3.0, 1.0, 10.0]), rotation.normalize([0.9, 0.2, 0.1, 0.3]),
                       np.array([2.0, -1.0, 5.0]))
    e0 = dynamics.mechanical_energy(s, mp, env.gravity)
    for _ in range(1000):
        s = dynamics.step(s, mp, None, env, dt=0.002)
    assert dynamics.mechanical_energy(s, mp, env.gravity) == pytest.approx(e0, rel=1e-9)


@settings(max_examples=25, deadline=None)
@given(st.floats(-8, 8), st.floats(-8, 8), st.floats(2, 20), st.floats(-3, 3), st.floats(-3, 3),
       st.floats(-0.4, 0.4))
def test_unpowered_still_air_energy_never_increases(vx, vy, vz, wx, wy, tilt):
    mp = MassProperties(0.53, 4e-4, 2e-3, 0.12)
    env = Environment()
    s = RigidBodyState(np.zeros(3), np.array([vx, vy, vz]),
                       rotation.from_axis_angle([1, 0.3, 0], tilt), np.array([wx, wy, 0.5]))
    energy = [dynamics.mechanical_energy(s, mp, env.gravity)]
    for _ in range(20):
        for _ in range(10):
            s = dynamics.step(s, mp, _ref_geom(), env, dt=0.001)
        energy.append(dynamics.mechanical_energy(s, mp, env.gravity))
    assert np.all(np.diff(energy) <= 1e-12 * energy[0])


def test_step_rejects_large_dt():
    with pytest.raises(ValueError):
        dynamics.step(RigidBodyState.at_rest(), MassProperties(1, 1, 1, 0.1), None, Environment(), dt=0.01)


def test_step_reports_nonfinite_state():
    s = RigidBodyState(np.zeros(3), np.array([math.nan, 0, 0]), np.array([1.0, 0, 0, 0]), np.zeros(3))
    with pytest.raises(NonFiniteState):
        dynamics.step(s, MassProperties(1, 1, 1, 0.1), None, Environment())


def test_aero_loads_in_kernel_match_aero_module():
    geom = _ref_geom()
    mp = MassProperties(0.53, 4e-4, 2e-3, 0.12)
    env = Environment(gravity=9.81)
    alpha = math.radians(7)
    # nose up, flying up and toward +x so the normal velocity lies along body +x
    s = RigidBodyState(np.zeros(3), np.array([15 * math.sin(alpha), 0, 15 * math.cos(alpha)]),
                       np.array([1.0, 0, 0, 0]), np.zeros(3))
    p = kernels.pack_params(mp, geom, env)
    sf = kernels.specific_force(s.as_vector(), p)
    dy = kernels.derivative(s.as_vector(), p)
    w = aero.total_aero_wrench(aero.FlowState.from_speed(env.rho, 15.0, alpha), geom, mp.cm_z)
    assert sf[0] * mp.mass == pytest.approx(-w.normal_force, rel=1e-12)
    assert sf[2] * mp.mass == pytest.approx(-w.axial_force, rel=1e-12)
    # positive moment raises alpha: nose (+z) swings toward the velocity's normal part (+x) => torque about -y
    assert dy[11] * mp.inertia_pitch == pytest.approx(-w.pitch_moment, rel=1e-12)


@pytest.mark.skipif(compiled is None, reason="compiled kernel not built")
@settings(max_examples=200)
@given(st.lists(st.floats(-20, 20), min_size=13, max_size=13), st.lists(st.floats(0.01, 2.0), min_size=27, max_size=27))
def test_compiled_kernel_matches_python(y, p):
    y[6:10] = list(rotation.normalize(y[6:10])) if np.linalg.norm(y[6:10]) > 1e-3 else [1.0, 0, 0, 0]
    p[8] = 1.0
    np.testing.assert_allclose(compiled.derivative(y, p), _kernel_py.derivative(y, p),
                               rtol=1e-12, atol=1e-12, equal_nan=True)
    np.testing.assert_allclose(compiled.rk4_run(y, p, 1e-3, 20), _kernel_py.rk4_run(y, p, 1e-3, 20),
                               rtol=1e-10, atol=1e-10, equal_nan=True)


def test_kernel_backends_expose_same_api():
    for name in ("derivative", "specific_force", "rk4_step", "rk4_run"):
        assert callable(getattr(_kernel_py, name))
        if compiled is not None:
            assert callable(getattr(compiled, name))
    assert kernels.BACKEND in ("cython", "python")


def test_pitch_oscillation_in_constant_flow_matches_estimate(ref_cfg):
    """Heavy body in a steady 15 m/s stream: measured period versus closed form."""
    geom = ref_cfg.vehicle.aero_folded
    real = ref_cfg.vehicle.mass_folded
    heavy = replace(real, mass=1e6)
    env = Environment(gravity=1e-9)
    period_est = aero.pitch_period_estimate(aero.FlowState(env.rho, 15.0, 0.0), geom, real.cm_z, real.inertia_pitch)
    times, alphas = _wind_tunnel_trace(geom, heavy, env, math.radians(3), 3.0)
    period = _zero_crossing_period(times, alphas)
    c = aero.pitch_damping_coefficient(aero.FlowState(env.rho, 15.0, 0.0), geom, real.cm_z)
    zeta = c / (2 * real.inertia_pitch * 2 * math.pi / period_est)
    assert period == pytest.approx(period_est / math.sqrt(1 - zeta ** 2), rel=0.02)
    assert 0.45 <= period <= 0.75
    peaks = np.abs(alphas)
    assert peaks[-200:].max() < peaks[:200].max()


def _wind_tunnel_trace(geom, mass, env, alpha0, duration, dt=0.001):
    q = rotation.from_axis_angle([0, 1, 0], alpha0)
    s = RigidBodyState(np.zeros(3), np.array([0.0, 0.0, 15.0]), q, np.zeros(3))
    times, alphas = [], []
    for k in range(round(duration / dt)):
        R = rotation.to_matrix(s.attitude)
        vb = R.T @ s.velocity
        alphas.append(math.atan2(vb[0], vb[2]))
        times.append(k * dt)
        s = dynamics.step(s, mass, geom, env, dt=dt)
    return np.array(times), np.array(alphas)


def _zero_crossing_period(t, x):
    idx = np.where((x[:-1] < 0) & (x[1:] >= 0))[0]
    crossings = t[idx] - x[idx] * (t[idx + 1] - t[idx]) / (x[idx + 1] - x[idx])
    return float(np.mean(np.diff(crossings)))


# ---------------------------------------------------------------- rotors

def test_allocation_matrix_inverse():
    A = dynamics.allocation_matrix(0.1, 0.016)
    assert np.allclose(A @ np.linalg.inv(A), np.eye(4), atol=1e-12)


def test_pure_yaw_uses_diagonal_pairs():
    from foldlaunch.mission import motor_mixer
    f = motor_mixer(0.0, 0.0, 0.01, 4.0, 0.1, 0.016)
    assert f[0] == pytest.approx(f[1]) and f[2] == pytest.approx(f[3])
    assert f[0] != pytest.approx(f[2])
    force, torque = dynamics.motor_wrench(f, 0.1, 0.016)
    assert torque[0] == pytest.approx(0.0, abs=1e-15) and torque[1] == pytest.approx(0.0, abs=1e-15)
    assert force[2] == pytest.approx(4.0)


# ---------------------------------------------------------------- arms

def _run_hinge(hinge, t_end, dt=ARM_DT):
    arm = ArmState(released=True)
    contact, recoil, t = None, 0.0, 0.0
    for k in range(round(t_end / dt)):
        arm = dynamics.arm_hinge_step(arm, hinge, dt)
        t = (k + 1) * dt
        if arm.reached_stop:
            contact = t if contact is None else contact
            recoil = max(recoil, hinge.stop_angle - arm.angle)
    return arm, contact, recoil


def test_undamped_hinge_reaches_stop_at_analytic_time():
    hinge = dynamics.HingeParams(0.24, 0.02, 5e-4, 1.658, 0.3, 0.0)
    omega = math.sqrt(hinge.spring_stiffness / hinge.arm_inertia)
    offset = hinge.spring_preload / hinge.spring_stiffness
    expected = math.acos(offset / (hinge.stop_angle + offset)) / omega
    _, contact, _ = _run_hinge(hinge, 0.2)
    assert contact == pytest.approx(expected, abs=ARM_DT)


def test_undamped_hinge_conserves_energy_before_stop():
    hinge = dynamics.HingeParams(0.24, 0.02, 5e-4, 10.0, 0.3, 0.0)
    arm = ArmState(released=True)
    e0 = dynamics.hinge_energy(arm, hinge)
    for _ in range(500):
        arm = dynamics.arm_hinge_step(arm, hinge, ARM_DT)
    assert dynamics.hinge_energy(arm, hinge) == pytest.approx(e0, rel=1e-9)


def test_reference_hinge_deploys_in_time(ref_cfg):
    _, contact, recoil = _run_hinge(ref_cfg.vehicle.hinge, 0.5)
    assert contact == pytest.approx(0.070, abs=0.010)
    assert recoil <= math.radians(30)


def test_stop_reflects_rate_with_restitution():
    hinge = dynamics.HingeParams(0.24, 0.0, 5e-4, 0.1, 0.5, 0.0, latch_rate=0.0)
    arm = ArmState(angle=0.0999, rate=10.0, released=True)
    out = dynamics.arm_hinge_step(arm, hinge, 1e-4)
    assert out.reached_stop and out.angle == hinge.stop_angle
    assert out.rate < 0 and abs(out.rate) < 10.0


def test_hinge_eventually_latches(ref_cfg):
    arm, _, _ = _run_hinge(ref_cfg.vehicle.hinge, 1.0)
    assert arm.latched_open and arm.angle == ref_cfg.vehicle.hinge.stop_angle


def test_unreleased_arm_does_not_move(ref_cfg):
    arm = dynamics.arm_hinge_step(ArmState(), ref_cfg.vehicle.hinge, 0.01)
    assert arm == ArmState()


def test_deployment_conserves_angular_momentum(ref_cfg):
    veh = ref_cfg.vehicle
    s = RigidBodyState(np.zeros(3), np.zeros(3), np.array([1.0, 0, 0, 0]), np.array([1.0, 1.0, 1.0]))
    out = dynamics.apply_deployment(s, veh.mass_folded, veh.mass_unfolded)
    assert out.omega_body[2] == 0.4e-3 / 2.3e-3
    assert out.omega_body[0] == 2.0e-3 / 1.6e-3
    assert out.omega_body[1] == 2.0e-3 / 1.6e-3


# ---------------------------------------------------------------- detection

def test_short_spike_is_ignored():
    t = np.arange(0, 0.1, 0.001)
    a = np.where((t > 0.02) & (t < 0.025), 200.0, 0.0)
    assert dynamics.detect_launch(t, a) is None


def test_sustained_acceleration_is_confirmed():
    t = np.arange(0, 0.1, 0.001)
    a = np.where(t >= 0.030, 200.0, 0.0)
    assert dynamics.detect_launch(t, a) == pytest.approx(0.040, abs=1e-12)


@given(st.lists(st.booleans(), min_size=1, max_size=200))
def test_detection_requires_a_long_enough_run(flags):
    t = np.arange(len(flags)) * 0.001
    a = np.where(flags, 150.0, 0.0)
    longest, run = 0, 0
    for f in flags:
        run = run + 1 if f else 0
        longest = max(longest, run)
    detected = dynamics.detect_launch(t, a, threshold=98.0665, min_duration=0.010)
    assert (detected is not None) == (longest >= 11)
