"""Propeller sizing from hover disc loading, and hover thrust margin."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import OverCapacity

INCH = 0.0254


@dataclass(frozen=True)
class PropSizingInputs:
    total_mass: float
    gravity: float
    rho: float
    v_tip: float
    sigma_prop: float
    cd0_prop: float
    k_prop: float

    def __post_init__(self):
        for name in ("total_mass", "gravity", "rho", "v_tip", "sigma_prop", "cd0_prop", "k_prop"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not self.sigma_prop < 1:
            raise ValueError("sigma_prop must be below 1")


@dataclass(frozen=True)
class PropulsionLimits:
    """Motor limits plus the airframe geometry the mixer needs.

    ``yaw_coeff`` is rotor drag torque per newton of thrust (m).
    """

    max_thrust_per_motor: float
    motor_count: int = 4
    max_current: float = 38.0
    arm_length: float = 0.10
    yaw_coeff: float = 0.016
    prop_diameter: float = 5 * INCH

    def __post_init__(self):
        if not self.max_thrust_per_motor > 0:
            raise ValueError("max_thrust_per_motor must be positive")
        if self.motor_count < 4:
            raise ValueError("motor_count must be at least 4")
        if not self.arm_length > 0:
            raise ValueError("arm_length must be positive")


def _disc_loading_rhs(inp: PropSizingInputs) -> float:
    return 0.5 * inp.rho * inp.v_tip ** 2 * (inp.sigma_prop * inp.cd0_prop / inp.k_prop) ** (2.0 / 3.0)


def ideal_prop_radius(inp: PropSizingInputs) -> float:
    """Rotor radius (m) at which four rotors hover at the ideal disc loading."""
    weight = inp.total_mass * inp.gravity
    return math.sqrt(weight / (4.0 * math.pi * _disc_loading_rhs(inp)))


def disc_loading_residual(inp: PropSizingInputs, radius: float) -> float:
    """Relative mismatch between actual and ideal disc loading at ``radius``."""
    lhs = inp.total_mass * inp.gravity / (4.0 * math.pi * radius ** 2)
    rhs = _disc_loading_rhs(inp)
    return (lhs - rhs) / rhs


def hover_thrust_fraction(total_mass: float, g: float, limits: PropulsionLimits) -> float:
    fraction = total_mass * g / limits.motor_count / limits.max_thrust_per_motor
    if fraction > 1.0:
        raise OverCapacity(f"hover needs {fraction:.0%} of available thrust")
    return fraction


def max_thrust_for_fraction(total_mass: float, g: float, fraction: float, motor_count: int = 4) -> float:
    """Per-motor maximum thrust implied by a measured hover throttle fraction."""
    return total_mass * g / motor_count / fraction


@dataclass(frozen=True)
class PropellerDesign:
    """Inputs for the disc-loading estimate that are not part of the airframe."""

    v_tip: float = 100.0
    sigma_prop: float = 0.1
    cd0_prop: float = 0.02
    k_prop: float = 1.25
    payload_mass: float = 0.2

    def __post_init__(self):
        if self.payload_mass < 0:
            raise ValueError("payload_mass must be non-negative")

    def inputs(self, vehicle_mass, gravity, rho, with_payload=True):
        mass = vehicle_mass + (self.payload_mass if with_payload else 0.0)
        return PropSizingInputs(mass, gravity, rho, self.v_tip, self.sigma_prop, self.cd0_prop, self.k_prop)
