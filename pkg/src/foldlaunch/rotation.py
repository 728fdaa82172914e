"""Quaternion helpers.

Quaternions are ``(w, x, y, z)`` and rotate body vectors into the world
frame. The simulation uses a z-up world frame (x east, y north) and a
forward-left-up body frame whose +z axis runs from tail to nose.
"""
import math

import numpy as np

# Maps forward-right-down body vectors into forward-left-up.
_FRD_TO_FLU = np.diag([1.0, -1.0, -1.0])
# Maps east-north-up world vectors into north-east-down.
_ENU_TO_NED = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, -1.0]])


def normalize(q):
    q = np.asarray(q, dtype=float)
    return q / np.linalg.norm(q)


def multiply(a, b):
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array([
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    ])


def conjugate(q):
    return np.array([q[0], -q[1], -q[2], -q[3]])


def to_matrix(q):
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def from_axis_angle(axis, angle):
    axis = np.asarray(axis, dtype=float)
    n = np.linalg.norm(axis)
    if n == 0.0:
        return np.array([1.0, 0.0, 0.0, 0.0])
    s = math.sin(angle / 2) / n
    return np.array([math.cos(angle / 2), axis[0] * s, axis[1] * s, axis[2] * s])


def from_two_vectors(u, v):
    """Shortest-arc rotation taking direction ``u`` onto direction ``v``."""
    u = np.asarray(u, dtype=float) / np.linalg.norm(u)
    v = np.asarray(v, dtype=float) / np.linalg.norm(v)
    d = float(np.dot(u, v))
    if d < -1.0 + 1e-12:
        # antiparallel: any perpendicular axis works
        perp = np.cross(u, [1.0, 0.0, 0.0])
        if np.linalg.norm(perp) < 1e-6:
            perp = np.cross(u, [0.0, 1.0, 0.0])
        return from_axis_angle(perp, math.pi)
    c = np.cross(u, v)
    q = np.array([1.0 + d, c[0], c[1], c[2]])
    return q / np.linalg.norm(q)


def from_yaw(yaw):
    """Level attitude with the body x axis rotated ``yaw`` rad about world up."""
    return np.array([math.cos(yaw / 2), 0.0, 0.0, math.sin(yaw / 2)])


def heading(q):
    """Angle of the body x axis projected on the horizontal plane (ENU, from east)."""
    R = to_matrix(q)
    return math.atan2(R[1, 0], R[0, 0])


def tilt(q):
    """Angle between the body nose axis and world up."""
    R = to_matrix(q)
    return math.acos(max(-1.0, min(1.0, R[2, 2])))


def euler_aerospace(q):
    """Roll, pitch, yaw in the autopilot convention.

    Angles are the usual z-y-x Tait-Bryan set of the forward-right-down body
    frame relative to north-east-down, so positive roll is right side down,
    positive pitch is nose up and yaw is the heading clockwise from north.
    """
    R = _ENU_TO_NED @ to_matrix(q) @ _FRD_TO_FLU
    roll = math.atan2(R[2, 1], R[2, 2])
    pitch = -math.asin(max(-1.0, min(1.0, R[2, 0])))
    yaw = math.atan2(R[1, 0], R[0, 0])
    return roll, pitch, yaw


def angle_between(a, b):
    """Rotation angle separating two attitudes."""
    d = abs(float(np.dot(normalize(a), normalize(b))))
    return 2.0 * math.acos(min(1.0, d))


def flu_to_frd(v):
    return np.array([v[0], -v[1], -v[2]])
