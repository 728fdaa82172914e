"""Folded-body aerodynamics: normal forces, Munk moment, aerodynamic center.

Axial positions are measured from the nose (z = 0) toward the tail (z = L).
Base drag and fin lift act at the tail, side drag at mid-body; ``ac_shift``
moves every force arm toward the nose (used for the unfolded geometry,
where the arms sit ahead of the fins).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateFlow, UnstableConfiguration


@dataclass(frozen=True)
class AeroGeometry:
    length_L: float
    diameter_d: float
    volume: float
    area_front: float
    area_side: float
    area_fin: float
    cd_front: float
    cl_alpha_fin: float
    cd_side: float
    cd_axial: float
    ac_shift: float = 0.0

    def __post_init__(self):
        for name in ("length_L", "diameter_d", "area_front", "area_side", "area_fin"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        # zero volume is allowed and simply removes the Munk moment
        if not self.volume >= 0:
            raise ValueError("volume must be non-negative")
        for name in ("cd_front", "cl_alpha_fin", "cd_side", "cd_axial"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be non-negative")
        cylinder = math.pi / 4 * self.diameter_d ** 2 * self.length_L
        if self.volume > cylinder * (1 + 1e-12):
            raise ValueError("volume exceeds the bounding cylinder")
        if not 0 <= self.ac_shift < self.length_L / 2:
            raise ValueError("ac_shift must lie in [0, L/2)")


@dataclass(frozen=True)
class FlowState:
    rho: float
    v_axial: float
    v_normal: float

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError("rho must be positive")
        if self.v_axial < 0 or self.v_normal < 0:
            raise ValueError("velocity components are magnitudes and must be >= 0")

    @classmethod
    def from_speed(cls, rho, speed, alpha):
        """Decompose a flight speed at angle of attack ``alpha`` (rad)."""
        return cls(rho, abs(speed * math.cos(alpha)), abs(speed * math.sin(alpha)))

    @property
    def speed(self):
        return math.hypot(self.v_axial, self.v_normal)


@dataclass(frozen=True)
class AeroWrench:
    """Aerodynamic load on the body.

    ``normal_force`` opposes the normal velocity and ``axial_force`` opposes
    the axial velocity; both are magnitudes. Pitch moments are positive
    when they increase the angle of attack, so a statically stable body
    gives a negative ``pitch_moment``.
    """

    normal_force: float
    axial_force: float
    pitch_moment: float
    pitch_moment_about_nose: float


def munk_moment(flow: FlowState, geom: AeroGeometry) -> float:
    d_over_l = geom.diameter_d / geom.length_L
    return flow.rho * flow.v_axial * flow.v_normal * geom.volume * (1.0 - d_over_l)


def base_drag_normal(flow: FlowState, geom: AeroGeometry) -> float:
    return flow.rho * flow.v_axial * flow.v_normal * geom.area_front * geom.cd_front


def fin_lift_normal(flow: FlowState, geom: AeroGeometry) -> float:
    return 0.5 * flow.rho * flow.v_axial * flow.v_normal * geom.area_fin * geom.cl_alpha_fin


def side_drag_normal(flow: FlowState, geom: AeroGeometry) -> float:
    return 0.5 * flow.rho * flow.v_normal * flow.v_normal * geom.area_side * geom.cd_side


def axial_drag(flow: FlowState, geom: AeroGeometry) -> float:
    return 0.5 * flow.rho * flow.v_axial * flow.v_axial * geom.area_front * geom.cd_axial


def _arms(geom):
    tail = geom.length_L - geom.ac_shift
    mid = geom.length_L / 2 - geom.ac_shift
    return tail, mid


def aerodynamic_center(flow: FlowState, geom: AeroGeometry) -> float:
    """Axial location (m from nose) where the net normal force acts."""
    m = munk_moment(flow, geom)
    fb = base_drag_normal(flow, geom)
    fl = fin_lift_normal(flow, geom)
    fs = side_drag_normal(flow, geom)
    total = fb + fl + fs
    if total == 0.0:
        raise DegenerateFlow("aerodynamic center undefined: no normal force (body at rest?)")
    tail, mid = _arms(geom)
    return (-m + fb * tail + fl * tail + fs * mid) / total


def static_margin(flow: FlowState, geom: AeroGeometry, cm_z: float) -> float:
    return aerodynamic_center(flow, geom) - cm_z


def normal_force_slope(speed: float, rho: float, geom: AeroGeometry) -> float:
    """dN/dalpha at alpha = 0 for the given flight speed.

    With v_a = V cos(a) and v_n = V sin(a), base drag and fin lift are
    linear in alpha near zero while side drag is quadratic and drops out.
    """
    return rho * speed * speed * (geom.area_front * geom.cd_front
                                  + 0.5 * geom.area_fin * geom.cl_alpha_fin)


def small_angle_aerodynamic_center(geom: AeroGeometry) -> float:
    """Limit of :func:`aerodynamic_center` as the angle of attack goes to zero."""
    slope = geom.area_front * geom.cd_front + 0.5 * geom.area_fin * geom.cl_alpha_fin
    if slope == 0.0:
        raise DegenerateFlow("no linear normal-force terms")
    munk_slope = geom.volume * (1.0 - geom.diameter_d / geom.length_L)
    tail, _ = _arms(geom)
    return tail - munk_slope / slope


def pitch_period_estimate(flow: FlowState, geom: AeroGeometry, cm_z: float,
                          pitch_inertia: float) -> float:
    """Undamped small-angle pitch oscillation period (s) at the flow speed.

    The restoring stiffness is dN/dalpha times the static margin taken in
    the alpha -> 0 limit, which is what a small oscillation about the
    trimmed attitude sees.
    """
    margin = small_angle_aerodynamic_center(geom) - cm_z
    if margin <= 0:
        raise UnstableConfiguration(f"static margin {margin:.4f} m is not positive")
    slope = normal_force_slope(flow.speed, flow.rho, geom)
    if slope == 0.0:
        raise DegenerateFlow("no restoring force at zero speed")
    return 2.0 * math.pi * math.sqrt(pitch_inertia / (slope * margin))


def pitch_damping_coefficient(flow: FlowState, geom: AeroGeometry, cm_z: float) -> float:
    """Rotational damping c_q (N m s/rad) from fin lift at the tail arm.

    A pitch rate q adds a normal velocity q * arm at the fins; the extra fin
    lift times the same arm gives the damping moment c_q * q.
    """
    tail, _ = _arms(geom)
    arm = tail - cm_z
    return 0.5 * flow.rho * flow.v_axial * geom.area_fin * geom.cl_alpha_fin * arm * arm


def total_aero_wrench(flow: FlowState, geom: AeroGeometry, cm_z: float) -> AeroWrench:
    m = munk_moment(flow, geom)
    fb = base_drag_normal(flow, geom)
    fl = fin_lift_normal(flow, geom)
    fs = side_drag_normal(flow, geom)
    tail, mid = _arms(geom)
    about_nose = m - (fb + fl) * tail - fs * mid
    about_cm = m - (fb + fl) * (tail - cm_z) - fs * (mid - cm_z)
    return AeroWrench(
        normal_force=fb + fl + fs,
        axial_force=axial_drag(flow, geom),
        pitch_moment=about_cm,
        pitch_moment_about_nose=about_nose,
    )
