"""Backend selection for the rigid-body kernel.

The compiled Cython extension is used when it imports; otherwise the
pure-Python module with the same functions is used. Set
``FOLDLAUNCH_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _kernel_py

PARAM_NAMES = (
    "mass", "inertia_pitch", "inertia_yaw", "gravity", "rho",
    "wind_x", "wind_y", "wind_z", "aero_on",
    "length", "diameter", "volume", "area_front", "area_side", "area_fin",
    "cd_front", "cl_alpha_fin", "cd_side", "cd_axial", "ac_shift", "cm_z",
    "force_x", "force_y", "force_z", "torque_x", "torque_y", "torque_z",
)
assert len(PARAM_NAMES) == _kernel_py.NPARAM

FORCE = PARAM_NAMES.index("force_x")
TORQUE = PARAM_NAMES.index("torque_x")

_compiled = None
if os.environ.get("FOLDLAUNCH_PURE_PYTHON", "") in ("", "0"):
    try:
        from . import _kernel as _compiled
    except ImportError:
        _compiled = None

backend = _compiled if _compiled is not None else _kernel_py
BACKEND = "cython" if _compiled is not None else "python"

rk4_step = backend.rk4_step
rk4_run = backend.rk4_run
derivative = backend.derivative
specific_force = backend.specific_force


def pack_params(mass_props, geom, env, force_body=(0.0, 0.0, 0.0), torque_body=(0.0, 0.0, 0.0)):
    """Flatten model inputs into the kernel parameter list."""
    p = [
        mass_props.mass, mass_props.inertia_pitch, mass_props.inertia_yaw,
        env.gravity, env.rho,
        float(env.wind_world[0]), float(env.wind_world[1]), float(env.wind_world[2]),
    ]
    if geom is None:
        p += [0.0] + [1.0] * 11
    else:
        p += [
            1.0, geom.length_L, geom.diameter_d, geom.volume,
            geom.area_front, geom.area_side, geom.area_fin,
            geom.cd_front, geom.cl_alpha_fin, geom.cd_side, geom.cd_axial,
            geom.ac_shift,
        ]
    p.append(mass_props.cm_z)
    p += [float(v) for v in force_body]
    p += [float(v) for v in torque_body]
    return p
