"""Scenario files: sectioned ``key = value`` text, SI units, ``#`` comments.

Every key listed in :data:`SCHEMA` is required and nothing else is
accepted, so typos fail loudly. Vectors are comma separated, angles are
radians, booleans are ``true``/``false``.
"""
from __future__ import annotations

import configparser
import re
from importlib import resources

from .aero import AeroGeometry
from .dynamics import Environment, HingeParams, MassProperties
from .errors import ParseError, UnknownKey, ValidationError
from .mission import ControllerGains, MissionConfig, VehicleConfig
from .sizing import PropellerDesign, PropulsionLimits

# constraint codes: + strictly positive, 0+ non-negative, u unit interval,
# i integer >= 1, v 3-vector, b boolean, * any float
SCHEMA = {
    "geometry": {
        "length": "+", "diameter": "+", "volume": "0+",
        "area_front": "+", "area_side": "+", "area_fin": "+",
        "area_front_unfolded": "+", "area_side_unfolded": "+", "ac_shift_unfolded": "0+",
    },
    "aero": {
        "cd_front": "0+", "cl_alpha_fin": "0+", "cd_side": "0+", "cd_axial": "0+",
        "design_normal_speed": "+",
    },
    "mass.folded": {"mass": "+", "inertia_yaw": "+", "inertia_pitch": "+", "cm_z": "+"},
    "mass.unfolded": {"mass": "+", "inertia_yaw": "+", "inertia_pitch": "+", "cm_z": "+"},
    "propulsion": {
        "max_thrust_per_motor": "+", "motor_count": "i", "max_current": "+",
        "arm_length": "+", "yaw_coeff": "0+", "prop_diameter": "+",
        "v_tip": "+", "sigma_prop": "u", "cd0_prop": "+", "k_prop": "+", "payload_mass": "0+",
    },
    "hinge": {
        "spring_stiffness": "+", "spring_preload": "0+", "arm_inertia": "+",
        "stop_angle": "+", "stop_restitution": "u", "joint_damping": "0+", "latch_rate": "0+",
    },
    "environment": {"rho": "+", "gravity": "+", "mu": "+", "wind": "v"},
    "launch": {
        "muzzle_speed": "+", "barrel_axis": "v", "barrel_length": "+", "vehicle_velocity": "v",
        "detect_threshold": "+", "detect_min_duration": "0+",
    },
    "mission": {
        "resting_time": "0+", "release_delay": "0+", "unkill_delay": "0+", "sim_duration": "0+",
        "dt": "+", "velocity_hold": "b", "settle_tilt": "+", "settle_rate": "+",
        "settle_climb": "+", "settle_hold": "0+", "divergence_angle": "+", "divergence_hold": "+",
    },
    "controller": {
        "kp_att": "0+", "kd_att": "0+", "kp_yaw": "0+", "kd_yaw": "0+",
        "kp_climb": "0+", "kp_vel": "0+", "max_tilt": "+",
    },
}

_SECTION_RE = re.compile(r"^\s*\[([^\]]+)\]")
_KEY_RE = re.compile(r"^\s*([^=:#\s\[][^=:]*?)\s*[=:]")


def _line_index(text):
    sections, keys = {}, {}
    current = None
    for n, line in enumerate(text.splitlines(), start=1):
        m = _SECTION_RE.match(line)
        if m:
            current = m.group(1).strip()
            sections.setdefault(current, n)
            continue
        m = _KEY_RE.match(line)
        if m and current is not None:
            keys.setdefault((current, m.group(1)), n)
    return sections, keys


def _convert(raw, code, name, line):
    raw = raw.strip()
    try:
        if code == "b":
            if raw.lower() not in ("true", "false"):
                raise ValueError
            return raw.lower() == "true"
        if code == "v":
            parts = [float(p) for p in raw.split(",")]
            if len(parts) != 3:
                raise ValidationError("expected three comma-separated numbers", name, line)
            return tuple(parts)
        if code == "i":
            value = int(raw)
        else:
            value = float(raw)
    except ValueError:
        raise ValidationError(f"cannot read {raw!r}", name, line) from None
    if code == "+" and not value > 0:
        raise ValidationError("must be positive", name, line)
    if code in ("0+", "i") and not value >= 0:
        raise ValidationError("must be non-negative", name, line)
    if code == "i" and value < 1:
        raise ValidationError("must be at least 1", name, line)
    if code == "u" and not 0 <= value <= 1:
        raise ValidationError("must lie in [0, 1]", name, line)
    if value != value or value in (float("inf"), float("-inf")):
        raise ValidationError("must be finite", name, line)
    return value


def _read(text):
    parser = configparser.ConfigParser(
        comment_prefixes=("#",), inline_comment_prefixes=("#",),
        interpolation=None, strict=True, empty_lines_in_values=False,
    )
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.MissingSectionHeaderError as exc:
        raise ParseError("key outside any [section]", exc.lineno) from None
    except configparser.ParsingError as exc:
        line = exc.errors[0][0] if exc.errors else None
        raise ParseError("expected 'key = value'", line) from None
    except (configparser.DuplicateSectionError, configparser.DuplicateOptionError) as exc:
        raise ParseError(exc.message.split(":")[-1].strip() or str(exc), exc.lineno) from None
    except configparser.Error as exc:
        raise ParseError(str(exc)) from None
    return parser


def parse_values(text):
    """Parse and type-check ``text`` into ``{section: {key: value}}``."""
    parser = _read(text)
    sec_lines, key_lines = _line_index(text)
    if parser.defaults():
        raise UnknownKey("unknown section", "DEFAULT", sec_lines.get("DEFAULT"))
    for section in parser.sections():
        if section not in SCHEMA:
            raise UnknownKey("unknown section", f"[{section}]", sec_lines.get(section))
    values = {}
    for section, keys in SCHEMA.items():
        if not parser.has_section(section):
            raise ValidationError("missing section", f"[{section}]")
        for key in parser.options(section):
            if key not in keys:
                raise UnknownKey("unknown key", f"{section}.{key}", key_lines.get((section, key)))
        out = {}
        for key, code in keys.items():
            name = f"{section}.{key}"
            if key not in parser[section]:
                raise ValidationError("missing key", name, sec_lines.get(section))
            out[key] = _convert(parser[section][key], code, name, key_lines.get((section, key)))
        values[section] = out
    return values, sec_lines


def _build(v, sec_lines):
    geo, aero = v["geometry"], v["aero"]
    current = "geometry"
    try:
        coeffs = dict(cd_front=aero["cd_front"], cl_alpha_fin=aero["cl_alpha_fin"],
                      cd_side=aero["cd_side"], cd_axial=aero["cd_axial"])
        folded = AeroGeometry(geo["length"], geo["diameter"], geo["volume"], geo["area_front"],
                              geo["area_side"], geo["area_fin"], **coeffs)
        unfolded = AeroGeometry(geo["length"], geo["diameter"], geo["volume"], geo["area_front_unfolded"],
                                geo["area_side_unfolded"], geo["area_fin"], **coeffs,
                                ac_shift=geo["ac_shift_unfolded"])
        current = "mass.folded"
        mf = MassProperties(**v["mass.folded"])
        current = "mass.unfolded"
        mu = MassProperties(**v["mass.unfolded"])
        current = "propulsion"
        p = v["propulsion"]
        limits = PropulsionLimits(p["max_thrust_per_motor"], p["motor_count"], p["max_current"],
                                  p["arm_length"], p["yaw_coeff"], p["prop_diameter"])
        propeller = PropellerDesign(p["v_tip"], p["sigma_prop"], p["cd0_prop"], p["k_prop"], p["payload_mass"])
        current = "hinge"
        hinge = HingeParams(**v["hinge"])
        current = "mass.folded"
        vehicle = VehicleConfig(folded, unfolded, mf, mu, limits, hinge, propeller)
        current = "environment"
        e = v["environment"]
        env = Environment(e["rho"], e["gravity"], e["wind"], e["mu"])
        current = "mission"
        la, mi = v["launch"], v["mission"]
        return MissionConfig(
            vehicle=vehicle, env=env,
            muzzle_speed=la["muzzle_speed"], barrel_axis=la["barrel_axis"],
            barrel_length=la["barrel_length"], vehicle_velocity=la["vehicle_velocity"],
            release_delay=mi["release_delay"], unkill_delay=mi["unkill_delay"],
            sim_duration=mi["sim_duration"], controller_gains=ControllerGains(**v["controller"]),
            resting_time=mi["resting_time"], dt=mi["dt"],
            detect_threshold=la["detect_threshold"], detect_min_duration=la["detect_min_duration"],
            velocity_hold=mi["velocity_hold"], settle_tilt=mi["settle_tilt"],
            settle_rate=mi["settle_rate"], settle_climb=mi["settle_climb"],
            settle_hold=mi["settle_hold"], divergence_angle=mi["divergence_angle"],
            divergence_hold=mi["divergence_hold"], design_normal_speed=aero["design_normal_speed"],
        )
    except ValueError as exc:
        raise ValidationError(str(exc), f"[{current}]", sec_lines.get(current)) from None


def parse_config(text: str) -> MissionConfig:
    values, sec_lines = parse_values(text)
    return _build(values, sec_lines)


def load_config(path) -> MissionConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def reference_text(name="squid_reference.cfg") -> str:
    return resources.files("foldlaunch").joinpath("data", name).read_text(encoding="utf-8")


def reference_config(name="squid_reference.cfg") -> MissionConfig:
    return parse_config(reference_text(name))


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ", ".join(repr(float(x)) for x in value)
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def to_values(cfg: MissionConfig):
    veh, env, g = cfg.vehicle, cfg.env, cfg.controller_gains
    fa, ua = veh.aero_folded, veh.aero_unfolded
    p, pd, h = veh.propulsion, veh.propeller, veh.hinge
    mf, mu = veh.mass_folded, veh.mass_unfolded
    return {
        "geometry": dict(length=fa.length_L, diameter=fa.diameter_d, volume=fa.volume,
                         area_front=fa.area_front, area_side=fa.area_side, area_fin=fa.area_fin,
                         area_front_unfolded=ua.area_front, area_side_unfolded=ua.area_side,
                         ac_shift_unfolded=ua.ac_shift),
        "aero": dict(cd_front=fa.cd_front, cl_alpha_fin=fa.cl_alpha_fin, cd_side=fa.cd_side,
                     cd_axial=fa.cd_axial, design_normal_speed=cfg.design_normal_speed),
        "mass.folded": dict(mass=mf.mass, inertia_yaw=mf.inertia_yaw, inertia_pitch=mf.inertia_pitch, cm_z=mf.cm_z),
        "mass.unfolded": dict(mass=mu.mass, inertia_yaw=mu.inertia_yaw, inertia_pitch=mu.inertia_pitch, cm_z=mu.cm_z),
        "propulsion": dict(max_thrust_per_motor=p.max_thrust_per_motor, motor_count=int(p.motor_count),
                           max_current=p.max_current, arm_length=p.arm_length, yaw_coeff=p.yaw_coeff,
                           prop_diameter=p.prop_diameter, v_tip=pd.v_tip, sigma_prop=pd.sigma_prop,
                           cd0_prop=pd.cd0_prop, k_prop=pd.k_prop, payload_mass=pd.payload_mass),
        "hinge": dict(spring_stiffness=h.spring_stiffness, spring_preload=h.spring_preload,
                      arm_inertia=h.arm_inertia, stop_angle=h.stop_angle,
                      stop_restitution=h.stop_restitution, joint_damping=h.joint_damping,
                      latch_rate=h.latch_rate),
        "environment": dict(rho=env.rho, gravity=env.gravity, mu=env.mu, wind=tuple(env.wind_world)),
        "launch": dict(muzzle_speed=cfg.muzzle_speed, barrel_axis=tuple(cfg.barrel_axis),
                       barrel_length=cfg.barrel_length, vehicle_velocity=tuple(cfg.vehicle_velocity),
                       detect_threshold=cfg.detect_threshold, detect_min_duration=cfg.detect_min_duration),
        "mission": dict(resting_time=cfg.resting_time, release_delay=cfg.release_delay,
                        unkill_delay=cfg.unkill_delay, sim_duration=cfg.sim_duration, dt=cfg.dt,
                        velocity_hold=cfg.velocity_hold, settle_tilt=cfg.settle_tilt,
                        settle_rate=cfg.settle_rate, settle_climb=cfg.settle_climb,
                        settle_hold=cfg.settle_hold, divergence_angle=cfg.divergence_angle,
                        divergence_hold=cfg.divergence_hold),
        "controller": dict(kp_att=g.kp_att, kd_att=g.kd_att, kp_yaw=g.kp_yaw, kd_yaw=g.kd_yaw,
                           kp_climb=g.kp_climb, kp_vel=g.kp_vel, max_tilt=g.max_tilt),
    }


def serialize_config(cfg: MissionConfig, header: str = "") -> str:
    """Render a config as text that :func:`parse_config` reads back exactly."""
    lines = [f"# {line}" for line in header.splitlines()]
    for section, values in to_values(cfg).items():
        if lines:
            lines.append("")
        lines.append(f"[{section}]")
        for key, value in values.items():
            lines.append(f"{key} = {_fmt(value)}")
    return "\n".join(lines) + "\n"
