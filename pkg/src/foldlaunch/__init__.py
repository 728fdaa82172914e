"""Tube-launched folding quadrotor: aerodynamics, sizing, flight simulation and scaling."""
from .aero import AeroGeometry, FlowState, aerodynamic_center, pitch_period_estimate, static_margin
from .config import load_config, parse_config, reference_config, serialize_config
from .dynamics import Environment, HingeParams, MassProperties, RigidBodyState
from .errors import (
    ConfigError, DegenerateFlow, FoldLaunchError, NonFiniteState, OverCapacity, ParseError,
    UnknownKey, UnstableConfiguration, ValidationError,
)
from .kernels import BACKEND
from .mission import MissionConfig, Phase, Trajectory, VehicleConfig, run_mission, settling_time
from .scaling import nondimensionalize, predict_scaled_trajectory, scale_config, verify_scaling
from .sizing import PropulsionLimits, ideal_prop_radius

__all__ = [
    "AeroGeometry", "FlowState", "aerodynamic_center", "pitch_period_estimate", "static_margin",
    "load_config", "parse_config", "reference_config", "serialize_config",
    "Environment", "HingeParams", "MassProperties", "RigidBodyState",
    "ConfigError", "DegenerateFlow", "FoldLaunchError", "NonFiniteState", "OverCapacity",
    "ParseError", "UnknownKey", "UnstableConfiguration", "ValidationError",
    "BACKEND", "MissionConfig", "Phase", "Trajectory", "VehicleConfig", "run_mission",
    "settling_time", "nondimensionalize", "predict_scaled_trajectory", "scale_config",
    "verify_scaling", "PropulsionLimits", "ideal_prop_radius",
]
