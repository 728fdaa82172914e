import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from foldlaunch import scaling
from foldlaunch.config import reference_config
from foldlaunch.mission import run_mission

lams = st.floats(0.1, 10.0)


@pytest.fixture(scope="module")
def similarity_cfg():
    return reference_config("squid_similarity.cfg")


def test_similarity_example_groups(similarity_cfg):
    groups = scaling.nondimensionalize(similarity_cfg)
    U, L = similarity_cfg.muzzle_speed, similarity_cfg.vehicle.aero_folded.length_L
    assert groups.froude == pytest.approx(U / math.sqrt(9.81 * L), rel=1e-12)
    assert groups.froude == pytest.approx(9.6, abs=0.1)
    assert groups.u_vehicle_tilde == pytest.approx(22.35 / U, rel=1e-12)
    assert groups.u_vehicle_tilde == pytest.approx(1.43, abs=0.01)
    assert U / scaling.MPH == pytest.approx(35, abs=0.5)


@settings(max_examples=60, deadline=None)
@given(lams)
def test_groups_preserved_except_reynolds(lam):
    cfg = reference_config("squid_moving_vehicle.cfg")
    base = scaling.nondimensionalize(cfg).as_dict()
    scaled = scaling.nondimensionalize(scaling.scale_config(cfg, lam)).as_dict()
    re_base, re_scaled = base.pop("reynolds"), scaled.pop("reynolds")
    for key in base:
        assert scaled[key] == pytest.approx(base[key], rel=1e-12, abs=1e-15), key
    assert re_scaled / re_base == pytest.approx(lam ** 1.5, rel=1e-12)


def test_scaled_vehicle_properties(ref_cfg):
    big = scaling.scale_config(ref_cfg, 2.0)
    v0, v1 = ref_cfg.vehicle, big.vehicle
    assert v1.mass_folded.mass == pytest.approx(8 * v0.mass_folded.mass, rel=1e-12)
    assert v1.mass_unfolded.inertia_pitch == pytest.approx(32 * v0.mass_unfolded.inertia_pitch, rel=1e-12)
    assert v1.aero_folded.length_L == pytest.approx(0.54, rel=1e-12)
    assert big.muzzle_speed == pytest.approx(15.0 * math.sqrt(2), rel=1e-12)
    assert big.sim_duration == pytest.approx(ref_cfg.sim_duration * math.sqrt(2), rel=1e-12)


def test_unit_scale_is_identity(ref_cfg):
    assert scaling.scale_config(ref_cfg, 1.0) == ref_cfg


def test_matched_carrier_speeds():
    for mph_small, mph_big in ((35, 50), (50, 70)):
        _, v = scaling.matched_speeds(15.0, mph_small * scaling.MPH, 2.0)
        assert v / scaling.MPH == pytest.approx(mph_big, abs=1.0)


def test_prediction_at_unit_scale_is_unchanged(ref_traj):
    same = scaling.predict_scaled_trajectory(ref_traj, 1.0)
    assert np.array_equal(same.times(), ref_traj.times())
    assert np.array_equal(same.positions(), ref_traj.positions())
    assert same.events == ref_traj.events


def test_prediction_scales_time_and_space(ref_traj):
    big = scaling.predict_scaled_trajectory(ref_traj, 4.0)
    assert np.allclose(big.times(), 2 * ref_traj.times(), rtol=1e-15)
    assert big.apex() == pytest.approx(4 * ref_traj.apex(), rel=1e-15)
    assert big.events["release"] == pytest.approx(2 * ref_traj.events["release"], rel=1e-15)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.3, 3.0), st.floats(0.3, 3.0))
def test_predictions_compose(ref_traj, a, b):
    two_step = scaling.predict_scaled_trajectory(scaling.predict_scaled_trajectory(ref_traj, a), b)
    one_step = scaling.predict_scaled_trajectory(ref_traj, a * b)
    assert np.allclose(two_step.times(), one_step.times(), rtol=1e-12)
    assert np.allclose(two_step.positions(), one_step.positions(), rtol=1e-12, atol=1e-12)


def test_scaled_mission_matches_prediction(ref_cfg):
    report = scaling.verify_scaling(ref_cfg, 2.0, tolerance=0.01)
    assert report.passed, report.summary()
    assert report.compared_samples > 500


def test_scaled_down_mission_matches_prediction(moving_cfg):
    report = scaling.verify_scaling(moving_cfg, 0.5, tolerance=0.01)
    assert report.passed, report.summary()


def test_unit_scale_has_zero_error(ref_cfg):
    report = scaling.verify_scaling(replace(ref_cfg, sim_duration=3.0), 1.0)
    assert report.position_rms_error == 0.0 and report.max_attitude_error == 0.0


def test_broken_similarity_fails(ref_cfg):
    report = scaling.verify_scaling(ref_cfg, 2.0, tolerance=0.01, break_similarity=True)
    assert not report.passed
    assert report.position_rms_error > 0.1


@pytest.mark.parametrize("lam", [0.05, 12.0])
def test_scale_outside_validity_rejected(ref_cfg, lam):
    with pytest.raises(ValueError):
        scaling.verify_scaling(ref_cfg, lam)


def test_scaling_error_is_discretisation_error(ref_cfg):
    short = replace(ref_cfg, sim_duration=4.0)
    errors = [scaling.verify_scaling(replace(short, dt=dt), 2.0).position_rms_error for dt in (0.002, 0.0005)]
    assert errors[1] < errors[0]


def test_direct_scaled_apex(ref_cfg, ref_traj):
    big = run_mission(scaling.scale_config(ref_cfg, 4.0))
    assert big.apex() == pytest.approx(4 * ref_traj.apex(), rel=5e-3)
    assert big.events["muzzle_exit"] == pytest.approx(2 * ref_traj.events["muzzle_exit"], rel=1e-6)
