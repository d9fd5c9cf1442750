"""Per-tick telemetry rows, full-precision CSV persistence, run metrics.

One row per control tick. Floats are written with shortest round-trip
precision so parse(write(rows)) == rows exactly and two identical runs
produce bit-identical files. Booleans and the passivity selector are stored
as 0.0/1.0 for uniform parsing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

COLUMNS = (
    ["t"]
    + ["px", "py", "pz", "qw", "qx", "qy", "qz"]
    + ["vx", "vy", "vz", "wx", "wy", "wz"]
    + [f"fcmd_{c}" for c in ("fx", "fy", "fz", "tx", "ty", "tz")]
    + [f"fext_ee_{c}" for c in ("fx", "fy", "fz", "tx", "ty", "tz")]
    + ["fd_ee_z"]
    + ["rho_align", "rho_frc", "C", "h", "theta", "l_s"]
    + ["S_t_i", "S_t_f", "sigma_i", "sigma_f", "lam", "beta_i", "beta_f"]
    + ["perception_fresh"]
    + ["xd_x", "xd_y", "xd_z"]
)

TelemetryRow = NamedTuple("TelemetryRow", [(c, float) for c in COLUMNS])


class ParseError(ValueError):
    """Malformed telemetry CSV; the message names the offending row."""


def write_csv(rows: list, path) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(COLUMNS) + "\n")
        buf = []
        for row in rows:
            buf.append(",".join(repr(float(v)) for v in row))
            if len(buf) >= 1000:
                fh.write("\n".join(buf) + "\n")
                buf = []
        if buf:
            fh.write("\n".join(buf) + "\n")


def read_csv(path) -> list:
    rows = []
    with open(path) as fh:
        header = fh.readline().rstrip("\n")
        if header.split(",") != COLUMNS:
            raise ParseError("row 1: unexpected header")
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != len(COLUMNS):
                raise ParseError(f"row {lineno}: expected {len(COLUMNS)} fields, got {len(parts)}")
            try:
                rows.append(TelemetryRow(*(float(p) for p in parts)))
            except ValueError as exc:
                raise ParseError(f"row {lineno}: {exc}") from exc
    return rows


def rows_to_columns(rows: list) -> dict:
    """Column name -> numpy array, for metrics and the passivity audit."""
    arr = np.asarray(rows, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != len(COLUMNS):
        raise ParseError("telemetry rows have the wrong shape")
    return {name: arr[:, i] for i, name in enumerate(COLUMNS)}


@dataclass(frozen=True)
class AxisStats:
    mae: float
    rmse: float


@dataclass(frozen=True)
class RunMetrics:
    """Tracking metrics over the contact phase (rho_frc > 0.5)."""

    applicable: bool
    contact_ticks: int
    position: tuple  # AxisStats per x, y, z
    force_z: AxisStats | None
    tank_impedance_range: tuple  # (min, max) J
    tank_force_range: tuple
    rho_align_stats: tuple  # (min, max, mean)
    rho_frc_stats: tuple


def compute_metrics(columns: dict) -> RunMetrics:
    """MAE/RMSE of position per axis and of the shaped z-force.

    The force error compares the measured tool-frame z reaction against the
    commanded setpoint scaled by rho_frc. Restricted to the contact phase;
    when the run never makes contact the tracking stats are not applicable.
    """
    tank_i = (float(columns["S_t_i"].min()), float(columns["S_t_i"].max()))
    tank_f = (float(columns["S_t_f"].min()), float(columns["S_t_f"].max()))
    rho_a = columns["rho_align"]
    rho_f = columns["rho_frc"]
    rho_align_stats = (float(rho_a.min()), float(rho_a.max()), float(rho_a.mean()))
    rho_frc_stats = (float(rho_f.min()), float(rho_f.max()), float(rho_f.mean()))
    mask = rho_f > 0.5
    if not mask.any():
        return RunMetrics(
            applicable=False,
            contact_ticks=0,
            position=(),
            force_z=None,
            tank_impedance_range=tank_i,
            tank_force_range=tank_f,
            rho_align_stats=rho_align_stats,
            rho_frc_stats=rho_frc_stats,
        )
    position = []
    for axis, desired in (("px", "xd_x"), ("py", "xd_y"), ("pz", "xd_z")):
        err = columns[axis][mask] - columns[desired][mask]
        position.append(AxisStats(mae=float(np.abs(err).mean()), rmse=float(np.sqrt((err ** 2).mean()))))
    f_err = columns["fext_ee_fz"][mask] - rho_f[mask] * columns["fd_ee_z"][mask]
    force = AxisStats(mae=float(np.abs(f_err).mean()), rmse=float(np.sqrt((f_err ** 2).mean())))
    return RunMetrics(
        applicable=True,
        contact_ticks=int(mask.sum()),
        position=tuple(position),
        force_z=force,
        tank_impedance_range=tank_i,
        tank_force_range=tank_f,
        rho_align_stats=rho_align_stats,
        rho_frc_stats=rho_frc_stats,
    )


def format_report(metrics: RunMetrics, audit=None, stats: dict | None = None) -> str:
    """Human-readable run report."""
    lines = ["run report", "=" * 10]
    if metrics.applicable:
        lines.append(f"contact phase: {metrics.contact_ticks} ticks")
        for name, ax in zip(("x", "y", "z"), metrics.position):
            lines.append(f"position {name}: MAE {ax.mae:.6f} m, RMSE {ax.rmse:.6f} m")
        lines.append(f"force z: MAE {metrics.force_z.mae:.4f} N, RMSE {metrics.force_z.rmse:.4f} N")
    else:
        lines.append("contact phase: none (tracking metrics not applicable)")
    lines.append(
        "tank energies: impedance [{:.4f}, {:.4f}] J, force [{:.4f}, {:.4f}] J".format(
            *metrics.tank_impedance_range, *metrics.tank_force_range
        )
    )
    lines.append(
        "rho_align min/max/mean: {:.4f} / {:.4f} / {:.4f}".format(*metrics.rho_align_stats)
    )
    lines.append("rho_frc min/max/mean: {:.4f} / {:.4f} / {:.4f}".format(*metrics.rho_frc_stats))
    if audit is not None:
        verdict = "PASS" if audit.ok else "FAIL"
        lines.append(
            f"passivity audit: {verdict} ({audit.violation_count} violations over "
            f"{audit.ticks_checked} ticks, worst {audit.worst_violation:.3e} J at t={audit.worst_time:.3f} s)"
        )
    if stats:
        for key, val in stats.items():
            lines.append(f"{key}: {val}")
    return "\n".join(lines) + "\n"
