import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from foldlaunch import rotation

unit = st.floats(-1.0, 1.0)
quats = st.tuples(unit, unit, unit, unit).filter(lambda q: np.linalg.norm(q) > 0.1).map(rotation.normalize)
vectors = st.tuples(unit, unit, unit).filter(lambda v: np.linalg.norm(v) > 0.1).map(np.array)


@given(quats)
def test_matrix_is_a_rotation(q):
    R = rotation.to_matrix(q)
    assert np.allclose(R @ R.T, np.eye(3), atol=1e-12)
    assert np.linalg.det(R) == pytest.approx(1.0, abs=1e-12)


@given(quats, quats)
def test_product_composes_rotations(a, b):
    lhs = rotation.to_matrix(rotation.multiply(a, b))
    assert np.allclose(lhs, rotation.to_matrix(a) @ rotation.to_matrix(b), atol=1e-12)


@given(vectors, vectors)
def test_two_vector_rotation_maps_u_onto_v(u, v):
    q = rotation.from_two_vectors(u, v)
    mapped = rotation.to_matrix(q) @ (u / np.linalg.norm(u))
    assert np.allclose(mapped, v / np.linalg.norm(v), atol=1e-9)


def test_antiparallel_vectors():
    q = rotation.from_two_vectors([0, 0, 1], [0, 0, -1])
    assert np.allclose(rotation.to_matrix(q) @ [0, 0, 1], [0, 0, -1], atol=1e-12)


@given(st.floats(-3.1, 3.1))
def test_yaw_round_trip(yaw):
    assert rotation.heading(rotation.from_yaw(yaw)) == pytest.approx(yaw, abs=1e-12)
    assert rotation.tilt(rotation.from_yaw(yaw)) == pytest.approx(0.0, abs=1e-7)


def test_euler_of_level_attitude_faces_east():
    roll, pitch, yaw = rotation.euler_aerospace([1.0, 0.0, 0.0, 0.0])
    assert (roll, pitch) == pytest.approx((0.0, 0.0), abs=1e-15)
    assert yaw == pytest.approx(math.pi / 2)


def test_thrust_axis_tilted_forward_reads_nose_down():
    theta = math.radians(20)
    q = rotation.from_axis_angle([0, 1, 0], theta)  # nose toward east (forward)
    roll, pitch, _ = rotation.euler_aerospace(q)
    assert pitch == pytest.approx(-theta, abs=1e-12)
    assert roll == pytest.approx(0.0, abs=1e-12)


def test_left_side_up_reads_positive_roll():
    theta = math.radians(15)
    q = rotation.from_axis_angle([1, 0, 0], theta)
    roll, pitch, _ = rotation.euler_aerospace(q)
    assert roll == pytest.approx(theta, abs=1e-12)
    assert pitch == pytest.approx(0.0, abs=1e-12)


@given(quats, quats)
def test_angle_between_matches_relative_rotation(a, b):
    rel = rotation.multiply(rotation.conjugate(a), b)
    expected = 2 * math.acos(min(1.0, abs(rel[0])))
    assert rotation.angle_between(a, b) == pytest.approx(expected, abs=1e-6)


def test_flu_to_frd():
    assert np.array_equal(rotation.flu_to_frd([1.0, 2.0, 3.0]), [1.0, -2.0, -3.0])
