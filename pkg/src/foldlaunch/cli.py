"""Command-line front end: design, size, simulate, scale, verify-scaling, envelope."""
from __future__ import annotations

import argparse
import csv
import itertools
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import numpy as np

from . import aero, rotation, scaling, sizing, telemetry
from .config import load_config, reference_config, serialize_config
from .errors import ConfigError, DegenerateFlow, OverCapacity, UnstableConfiguration
from .mission import Phase, run_mission, settling_time

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_VALIDATION = 2
EXIT_UNSTABLE = 3
EXIT_NONFINITE = 4

SWEEP_KEYS = ("vehicle_speed", "release_delay")
SETTLE_BAND = math.radians(5.0)
SETTLE_HOLD = 0.5


def _load(args):
    return reference_config() if args.config is None else load_config(args.config)


# ---------------------------------------------------------------- design

def _stability_lines(label, flow, geom, mass, rho):
    lines = [f"[{label}]"]
    try:
        z_ac = aero.aerodynamic_center(flow, geom)
    except DegenerateFlow:
        lines.append("  AC undefined at rest")
        return lines, None
    margin = z_ac - mass.cm_z
    lines.append(f"  z_ac/L          {z_ac / geom.length_L:.4f}")
    lines.append(f"  static margin   {margin:.4f} m")
    try:
        period = aero.pitch_period_estimate(flow, geom, mass.cm_z, mass.inertia_pitch)
        lines.append(f"  pitch period    {period:.4f} s")
    except (UnstableConfiguration, DegenerateFlow) as exc:
        lines.append(f"  pitch period    n/a ({exc})")
    return lines, margin


def cmd_design(args):
    cfg = _load(args)
    veh, rho = cfg.vehicle, cfg.env.rho
    axial = cfg.muzzle_speed if args.speed is None else args.speed
    normal = cfg.design_normal_speed if args.speed is None else (
        args.speed * cfg.design_normal_speed / cfg.muzzle_speed)
    flow = aero.FlowState(rho, axial, normal)
    print(f"flow: axial {axial:.3f} m/s, normal {normal:.3f} m/s, rho {rho:.4f} kg/m^3")
    verdict_margin = None
    for label, geom, mass in (("folded", veh.aero_folded, veh.mass_folded),
                              ("unfolded", veh.aero_unfolded, veh.mass_unfolded)):
        lines, margin = _stability_lines(label, flow, geom, mass, rho)
        print("\n".join(lines))
        if label == "folded":
            verdict_margin = margin
    if verdict_margin is None:
        print("verdict: undetermined")
    else:
        print("verdict:", "STABLE" if verdict_margin > 0 else "UNSTABLE")
    if args.out:
        geom, mass = veh.aero_folded, veh.mass_folded
        angle = math.atan2(cfg.design_normal_speed, cfg.muzzle_speed)
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["speed", "z_ac_over_L", "static_margin"])
            for speed in np.linspace(0.0, 2.0 * cfg.muzzle_speed, 31):
                try:
                    z = aero.aerodynamic_center(aero.FlowState.from_speed(rho, speed, angle), geom)
                    w.writerow([repr(float(speed)), repr(float(z / geom.length_L)), repr(float(z - mass.cm_z))])
                except DegenerateFlow:
                    w.writerow([repr(float(speed)), "nan", "nan"])
    return EXIT_OK


# ---------------------------------------------------------------- size

def cmd_size(args):
    cfg = _load(args)
    veh, env = cfg.vehicle, cfg.env
    inputs = veh.propeller.inputs(veh.mass_unfolded.mass, env.gravity, env.rho,
                                  with_payload=not args.no_payload)
    radius = sizing.ideal_prop_radius(inputs)
    configured = veh.propulsion.prop_diameter
    print(f"sizing mass           {inputs.total_mass:.3f} kg")
    print(f"ideal prop diameter   {2 * radius:.4f} m ({2 * radius / sizing.INCH:.2f} in)")
    print(f"configured diameter   {configured:.4f} m ({configured / sizing.INCH:.2f} in)")
    try:
        fraction = sizing.hover_thrust_fraction(veh.mass_unfolded.mass, env.gravity, veh.propulsion)
        print(f"hover thrust fraction {fraction:.3f}")
    except OverCapacity as exc:
        print(f"hover thrust fraction over capacity: {exc}")
        return EXIT_FAIL
    return EXIT_OK


# ---------------------------------------------------------------- simulate

def mission_verdict(traj):
    if traj.nonfinite:
        return "nonfinite"
    if traj.unstable_deployment or traj.ground_contact:
        return "unstable"
    if not traj.samples or traj.reached(Phase.CONTROLLED_FLIGHT):
        return "stable"
    # ran out of time before the hover hold was met
    return "unstable"


def tilt_settling_time(traj):
    roll = settling_time(traj, "roll", SETTLE_BAND, SETTLE_HOLD)
    pitch = settling_time(traj, "pitch", SETTLE_BAND, SETTLE_HOLD)
    if roll is None or pitch is None:
        return None
    return max(roll, pitch)


def summary_line(traj):
    if not traj.samples:
        return "empty trajectory"
    ev = traj.events
    deploy = ev["deployed"] - ev["release"] if "deployed" in ev else None
    settle = tilt_settling_time(traj)
    last = traj.samples[-1]
    deploy_text = "n/a" if deploy is None else f"{deploy * 1e3:.1f}"
    settle_text = "n/a" if settle is None else f"{settle:.3f}"
    return (f"apex {traj.apex():.3f} m, deploy {deploy_text} ms after release, "
            f"settling {settle_text} s, final tilt {math.degrees(rotation.tilt(last.state.attitude)):.2f} deg, "
            f"final climb rate {last.state.velocity[2]:.3f} m/s, verdict {mission_verdict(traj)}")


def cmd_simulate(args):
    cfg = _load(args)
    traj = run_mission(cfg)
    if args.out:
        telemetry.save_csv(traj, args.out)
    else:
        telemetry.write_csv(traj, sys.stdout)
    print(summary_line(traj), file=sys.stderr if not args.out else sys.stdout)
    if traj.diagnostic:
        print(f"diagnostic: {traj.diagnostic}", file=sys.stderr)
    if traj.nonfinite:
        return EXIT_NONFINITE
    if traj.unstable_deployment:
        return EXIT_UNSTABLE
    return EXIT_OK


# ---------------------------------------------------------------- scale

def cmd_scale(args):
    cfg = _load(args)
    scaled = scaling.scale_config(cfg, args.lam)
    before = scaling.nondimensionalize(cfg)
    after = scaling.nondimensionalize(scaled)
    print(f"{'group':16s} {'base':>14s} {'scaled':>14s}")
    for name, value in before.as_dict().items():
        print(f"{name:16s} {value:14.6g} {getattr(after, name):14.6g}")
    speed = float(np.linalg.norm(cfg.vehicle_velocity))
    muzzle, carrier = scaling.matched_speeds(cfg.muzzle_speed, speed, args.lam)
    print(f"matched launch  {cfg.muzzle_speed / scaling.MPH:.1f} mph -> {muzzle / scaling.MPH:.1f} mph")
    print(f"matched vehicle {speed / scaling.MPH:.1f} mph -> {carrier / scaling.MPH:.1f} mph")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(serialize_config(scaled, header=f"scaled by lambda = {args.lam!r}"))
    return EXIT_OK


def cmd_verify_scaling(args):
    cfg = _load(args)
    report = scaling.verify_scaling(cfg, args.lam, args.tol, break_similarity=args.break_similarity)
    print(report.summary())
    return EXIT_OK if report.passed else EXIT_FAIL


# ---------------------------------------------------------------- envelope

def parse_sweep(text):
    """``key=min:max:n`` -> (key, values)."""
    try:
        key, grid = text.split("=", 1)
        lo, hi, n = grid.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected key=min:max:n, got {text!r}") from None
    key = key.strip()
    if key not in SWEEP_KEYS:
        raise argparse.ArgumentTypeError(f"sweep key must be one of {', '.join(SWEEP_KEYS)}")
    if n < 0:
        raise argparse.ArgumentTypeError("grid size must be non-negative")
    return key, [float(v) for v in np.linspace(lo, hi, n)]


def _with_cell(cfg, vehicle_speed, release_delay):
    direction = np.asarray(cfg.vehicle_velocity, dtype=float)
    norm = float(np.linalg.norm(direction))
    direction = direction / norm if norm > 0 else np.array([1.0, 0.0, 0.0])
    return replace(cfg, vehicle_velocity=tuple(float(v) for v in direction * vehicle_speed),
                   release_delay=release_delay)


def run_cell(cfg, vehicle_speed, release_delay):
    """Verdict, apex and settling time for one envelope cell; never raises."""
    try:
        traj = run_mission(_with_cell(cfg, vehicle_speed, release_delay))
    except ValueError as exc:
        return "invalid", math.nan, math.nan, str(exc)
    except Exception as exc:  # recorded in-grid so one bad cell never aborts a sweep
        return "error", math.nan, math.nan, f"{type(exc).__name__}: {exc}"
    settle = tilt_settling_time(traj)
    return (mission_verdict(traj), traj.apex() if traj.samples else math.nan,
            math.nan if settle is None else settle, traj.diagnostic)


def _cell_star(job):
    return run_cell(*job)


def cmd_envelope(args):
    cfg = _load(args)
    grids = {"vehicle_speed": [float(np.linalg.norm(cfg.vehicle_velocity))],
             "release_delay": [cfg.release_delay]}
    for key, values in args.sweep or []:
        grids[key] = values
    cells = list(itertools.product(grids["vehicle_speed"], grids["release_delay"]))
    jobs = [(cfg, v, d) for v, d in cells]
    if args.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(_cell_star, jobs))
    else:
        results = [run_cell(*job) for job in jobs]
    out = open(args.out, "w", encoding="utf-8", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["vehicle_speed", "release_delay", "verdict", "apex", "settling_time"])
        for (v, d), (verdict, apex, settle, _) in zip(cells, results):
            w.writerow([repr(v), repr(d), verdict, repr(float(apex)), repr(float(settle))])
    finally:
        if out is not sys.stdout:
            out.close()
    counts = {k: sum(r[0] == k for r in results) for k in ("stable", "unstable", "nonfinite", "invalid", "error")}
    print(" ".join(f"{k}={n}" for k, n in counts.items() if n or k == "stable"), file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------- entry point

def build_parser():
    parser = argparse.ArgumentParser(prog="foldlaunch", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="scenario file (default: packaged reference)")
        p.set_defaults(func=func)
        return p

    p = add("design", cmd_design, "static stability report")
    p.add_argument("--out", help="CSV of z_ac versus airspeed")
    p.add_argument("--speed", type=float, help="axial airspeed override (m/s)")
    p = add("size", cmd_size, "propeller sizing and hover margin")
    p.add_argument("--no-payload", action="store_true", help="size for the bare vehicle")
    p = add("simulate", cmd_simulate, "run the mission and write telemetry CSV")
    p.add_argument("--out", help="telemetry CSV path (default: stdout)")
    p = add("scale", cmd_scale, "Froude-scaled config and dimensionless groups")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--out", help="write the scaled config here")
    p = add("verify-scaling", cmd_verify_scaling, "check simulator similarity")
    p.add_argument("--lambda", dest="lam", type=float, default=2.0)
    p.add_argument("--tol", type=float, default=0.01)
    p.add_argument("--break-similarity", action="store_true",
                   help="scale launch speeds by lambda instead of sqrt(lambda)")
    p = add("envelope", cmd_envelope, "stability grid over vehicle speed and release delay")
    p.add_argument("--sweep", type=parse_sweep, action="append", help="key=min:max:n")
    p.add_argument("--out", help="grid CSV path (default: stdout)")
    p.add_argument("--workers", type=int, default=1)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
