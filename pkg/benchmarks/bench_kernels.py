"""Compare the compiled and pure-Python rigid-body kernels.

    python benchmarks/bench_kernels.py [--steps 20000] [--repeat 5]

Times a long RK4 run of a tumbling, drag-loaded body with each backend,
checks they agree, and times one full reference mission per backend.
"""
import argparse
import os
import subprocess
import sys
import time

from foldlaunch import _kernel_py, kernels
from foldlaunch.config import reference_config
from foldlaunch.dynamics import RigidBodyState

try:
    from foldlaunch import _kernel as compiled
except ImportError:
    compiled = None


def _inputs():
    cfg = reference_config()
    veh = cfg.vehicle
    state = RigidBodyState.at_rest(attitude=(0.99, 0.1, 0.05, 0.0))
    y = state.as_vector()
    y[3:6] = [3.0, -1.0, 14.0]
    y[10:13] = [0.5, -0.3, 2.0]
    p = kernels.pack_params(veh.mass_folded, veh.aero_folded, cfg.env)
    return y, p


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def _mission_time(pure):
    env = dict(os.environ, FOLDLAUNCH_PURE_PYTHON="1" if pure else "0")
    code = ("import time; from foldlaunch.config import reference_config; "
            "from foldlaunch.mission import run_mission; c = reference_config(); "
            "t = time.perf_counter(); run_mission(c); print(time.perf_counter() - t)")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--steps", type=int, default=20000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    y, p = _inputs()
    dt = 1e-3

    t_py, y_py = _best(lambda: _kernel_py.rk4_run(y, p, dt, args.steps), args.repeat)
    print(f"python  rk4_run  {args.steps} steps: {t_py * 1e3:9.2f} ms ({t_py / args.steps * 1e6:.2f} us/step)")
    if compiled is None:
        print("compiled kernel not built; only the fallback was timed")
        return
    t_c, y_c = _best(lambda: compiled.rk4_run(y, p, dt, args.steps), args.repeat)
    print(f"cython  rk4_run  {args.steps} steps: {t_c * 1e3:9.2f} ms ({t_c / args.steps * 1e6:.2f} us/step)")
    print(f"kernel speed-up: {t_py / t_c:.1f}x")
    diff = max(abs(a - b) for a, b in zip(y_py, y_c))
    print(f"max state difference after {args.steps} steps: {diff:.3e}")

    m_py, m_c = _mission_time(True), _mission_time(False)
    print(f"reference mission: python {m_py:.3f} s, cython {m_c:.3f} s ({m_py / m_c:.1f}x)")


if __name__ == "__main__":
    main()
