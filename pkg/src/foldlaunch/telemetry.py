"""Fixed 25-column telemetry CSV."""
from __future__ import annotations

import csv
import io

from .mission import Trajectory

COLUMNS = (
    "t", "phase", "x", "y", "z", "vx", "vy", "vz", "qw", "qx", "qy", "qz", "wx", "wy", "wz",
    "ax_body", "ay_body", "az_body", "roll", "pitch", "yaw",
    "thrust1", "thrust2", "thrust3", "thrust4", "arm_angle",
)
# phase is written as its integer code (0 resting ... 5 controlled flight)


def _row(s):
    st = s.state
    values = [s.t, int(s.phase), *st.position, *st.velocity, *st.attitude, *st.omega_body,
              *s.body_accel, s.roll, s.pitch, s.yaw, *s.motor_thrusts, s.arm_angle]
    return [str(v) if isinstance(v, int) else repr(float(v)) for v in values]


def write_csv(traj: Trajectory, stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(COLUMNS)
    for s in traj.samples:
        writer.writerow(_row(s))


def to_csv_text(traj: Trajectory) -> str:
    buf = io.StringIO()
    write_csv(traj, buf)
    return buf.getvalue()


def save_csv(traj: Trajectory, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        write_csv(traj, fh)


def read_csv(source):
    """Header tuple and rows as lists of floats, from a path or open text stream."""
    if hasattr(source, "read"):
        return _read_rows(source)
    with open(source, encoding="utf-8", newline="") as fh:
        return _read_rows(fh)


def _read_rows(fh):
    reader = csv.reader(fh)
    header = tuple(next(reader))
    rows = [[float(v) for v in row] for row in reader]
    return header, rows
