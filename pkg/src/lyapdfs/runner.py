"""Execute run configurations and write trajectory / sweep files."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .config import RunConfig
from .propagator import Trajectory, check_trajectory, propagate
from .scenario import build_model, dark_states, initial_state, target_state

TRAJECTORY_HEADER = "t,f1,f2,f3,V,fid_target,fid_dfs,trace,min_eig,comm_norm"
SWEEP_HEADER = "axis_value,fid_target_final,fid_dfs_final,V_final"
SWEEP_HEADER_2D = "axis_value,axis2_value,fid_target_final,fid_dfs_final,V_final"
N_FIELD_COLUMNS = 3


def simulate(cfg: RunConfig, check: bool = True) -> Trajectory:
    """Propagate the scenario described by ``cfg``.

    With ``check`` the recorded-state invariants are enforced and a
    ``NumericalInvariantError`` is raised on the first violation.
    """
    model = build_model(cfg.scenario)
    config = cfg.control.to_config(cfg.scenario, model)
    psi = initial_state(cfg.init)
    traj = propagate(
        model,
        config,
        np.outer(psi, psi.conj()),
        cfg.integrate,
        target=target_state(cfg.control.target, cfg.scenario.phi),
        dfs_basis=dark_states(cfg.scenario.phi),
    )
    if check:
        check_trajectory(traj)
    return traj


def fmt(x: float, precision: int) -> str:
    return f"{float(x):.{precision}g}"


def trajectory_csv(traj: Trajectory, precision: int = 9) -> str:
    n = len(traj)
    f = np.zeros((n, N_FIELD_COLUMNS))
    k = min(N_FIELD_COLUMNS, traj.fields.shape[1])
    f[:, :k] = traj.fields[:, :k]
    cols = [traj.t, f[:, 0], f[:, 1], f[:, 2], traj.V, traj.fid_target, traj.fid_dfs, traj.trace, traj.min_eig, traj.comm_norm]
    rows = [TRAJECTORY_HEADER]
    for i in range(n):
        rows.append(",".join(fmt(c[i], precision) for c in cols))
    return "\n".join(rows) + "\n"


def summarize(traj: Trajectory) -> dict[str, float]:
    tail = traj.t >= traj.t[-1] - 0.1 * (traj.t[-1] - traj.t[0])
    out = {
        "t_final": traj.t[-1],
        "samples": len(traj),
        "fid_target_final": traj.fid_target[-1],
        "fid_dfs_final": traj.fid_dfs[-1],
        "V_final": traj.V[-1],
        "comm_norm_final": traj.comm_norm[-1],
    }
    for j in range(traj.fields.shape[1]):
        out[f"f{j + 1}_final"] = traj.fields[-1, j]
    out["max_abs_field_tail"] = float(np.max(np.abs(traj.fields[tail, 1:]))) if traj.fields.shape[1] > 1 else 0.0
    out["max_abs_f1"] = float(np.max(np.abs(traj.fields[:, 0]))) if traj.fields.shape[1] else 0.0
    out["max_trace_deviation"] = float(np.max(np.abs(traj.trace - 1.0)))
    out["min_eigenvalue"] = float(np.min(traj.min_eig))
    out["saturation_events"] = traj.saturation_events
    return out


def summary_text(summary: dict, precision: int = 9) -> str:
    lines = []
    for k, v in summary.items():
        lines.append(f"{k}={v}" if isinstance(v, (int, np.integer)) else f"{k}={fmt(v, precision)}")
    return "\n".join(lines) + "\n"


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def run(cfg: RunConfig, out_dir: str | None = None) -> dict:
    """Single trajectory; writes ``trajectory.csv`` and ``summary.txt``."""
    out_dir = cfg.output.path if out_dir is None else out_dir
    traj = simulate(cfg)
    summary = summarize(traj)
    os.makedirs(out_dir, exist_ok=True)
    _write(os.path.join(out_dir, "trajectory.csv"), trajectory_csv(traj, cfg.output.precision))
    _write(os.path.join(out_dir, "summary.txt"), summary_text(summary, cfg.output.precision))
    return summary


@dataclass(frozen=True)
class SweepPoint:
    coords: tuple[float, ...]
    fid_target_final: float
    fid_dfs_final: float
    V_final: float
    csv: str | None


def _sweep_point(args) -> SweepPoint:
    cfg, coords, keep_csv = args
    traj = simulate(cfg)
    return SweepPoint(
        coords=coords,
        fid_target_final=float(traj.fid_target[-1]),
        fid_dfs_final=float(traj.fid_dfs[-1]),
        V_final=float(traj.V[-1]),
        csv=trajectory_csv(traj, cfg.output.precision) if keep_csv else None,
    )


def sweep_points(cfg: RunConfig, jobs: int = 1, keep_csv: bool = False) -> list[SweepPoint]:
    """Run every sweep point; results come back in sweep order whatever ``jobs`` is."""
    if cfg.sweep is None:
        raise ValueError("configuration has no sweep section")
    spec = cfg.sweep
    tasks = []
    for coords in spec.points():
        point_cfg = cfg.with_axis(spec.axis, coords[0])
        if spec.axis2 is not None:
            point_cfg = point_cfg.with_axis(spec.axis2, coords[1])
        tasks.append((point_cfg, coords, keep_csv))
    if jobs <= 1 or len(tasks) == 1:
        return [_sweep_point(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_sweep_point, tasks))


def sweep_csv(points: list[SweepPoint], two_d: bool, precision: int = 9) -> str:
    rows = [SWEEP_HEADER_2D if two_d else SWEEP_HEADER]
    for p in points:
        vals = list(p.coords) + [p.fid_target_final, p.fid_dfs_final, p.V_final]
        rows.append(",".join(fmt(v, precision) for v in vals))
    return "\n".join(rows) + "\n"


def sweep(cfg: RunConfig, out_dir: str | None = None, jobs: int = 1) -> list[SweepPoint]:
    """Writes ``sweep.csv``, ``summary.txt`` and, if requested, ``points/point_NNNN.csv``."""
    out_dir = cfg.output.path if out_dir is None else out_dir
    points = sweep_points(cfg, jobs=jobs, keep_csv=cfg.output.trajectories)
    os.makedirs(out_dir, exist_ok=True)
    p = cfg.output.precision
    _write(os.path.join(out_dir, "sweep.csv"), sweep_csv(points, cfg.sweep.axis2 is not None, p))
    fids = np.array([pt.fid_target_final for pt in points])
    dfs = np.array([pt.fid_dfs_final for pt in points])
    summary = {
        "points": len(points),
        "fid_target_final_min": fids.min(),
        "fid_target_final_max": fids.max(),
        "fid_dfs_final_min": dfs.min(),
    }
    _write(os.path.join(out_dir, "summary.txt"), summary_text(summary, p))
    if cfg.output.trajectories:
        pdir = os.path.join(out_dir, "points")
        os.makedirs(pdir, exist_ok=True)
        for i, pt in enumerate(points):
            _write(os.path.join(pdir, f"point_{i:04d}.csv"), pt.csv)
    return points
