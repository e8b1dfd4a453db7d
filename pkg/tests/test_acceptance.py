"""Exit criteria for the four-level reproduction, one test per criterion.

Each test appends a PASS/FAIL line to the acceptance summary printed at the
end of the pytest run. Tolerances are fixed here and are not tuned.
"""

import math
import time
from dataclasses import replace

import numpy as np
import pytest

from lyapdfs.control import CriticalPointClass, classify_critical_point, control_fields, lyapunov_derivative
from lyapdfs.config import preset_config
from lyapdfs.lindblad import dfs_check
from lyapdfs.propagator import (
    IntegratorSettings,
    NumericalInvariantError,
    check_trajectory,
    exact_frozen_propagation,
    rk4_frozen_propagation,
)
from lyapdfs.runner import simulate
from lyapdfs.scenario import ScenarioParams, build_model, dark_states, observable_for_target

import conftest
from conftest import random_density_matrix, random_hermitian
from oracles import descent_rate, variation_class

GRID = np.linspace(0.2, 1.3, 11)

# (label, problem or None) for every run that feeds criterion 8
INTEGRITY: list[tuple[str, str | None]] = []


def report(number: int, title: str, ok: bool, detail: str) -> None:
    conftest.ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {number:2d}. {title}: {detail}")


def run_checked(cfg, label):
    """Simulate at record stride 1 so integrity is checked at every step."""
    cfg = replace(cfg, integrate=replace(cfg.integrate, record_stride=1))
    traj = simulate(cfg, check=False)
    try:
        check_trajectory(traj)
        INTEGRITY.append((label, None))
    except NumericalInvariantError as exc:
        INTEGRITY.append((label, str(exc)))
    return traj


def at_time(traj, t):
    return int(np.argmin(np.abs(traj.t - t)))


def test_01_dfs_certification():
    start = time.perf_counter()
    params = ScenarioParams(delta1=2.0, delta2=2.0)
    basis = list(dark_states(params.phi))
    good = dfs_check(basis, build_model(params))
    bad = dfs_check(basis, build_model(ScenarioParams(delta1=1.0, delta2=3.0)))
    elapsed = time.perf_counter() - start
    ok = (
        good.passed
        and all(abs(c) < 1e-9 for c in good.channel_eigenvalues)
        and abs(good.g) < 1e-9
        and max(good.invariance_residual, good.gamma_residual, *good.channel_residuals) < 1e-9
        and not bad.invariant_under_h0
        and elapsed < 1.0
    )
    report(1, "DFS certification", ok,
           f"dark states pass (g={good.g:g}); delta1=1,delta2=3 condition-1 residual {bad.invariance_residual:.3g}; {elapsed:.3f}s")
    assert ok


def test_02_descent_law():
    cfg = preset_config("fig3")
    model = build_model(cfg.scenario)
    control = cfg.control.to_config(cfg.scenario, model)
    rng = np.random.default_rng(2)
    worst_sign, worst_gap = -np.inf, 0.0
    for k in range(200):
        rho = random_density_matrix(rng, rank=1 + k % 4)
        sample = control_fields(control, model, rho)
        assert not sample.saturated
        vdot = lyapunov_derivative(control, model, rho, sample)
        oracle = descent_rate(control.A, model.controls, control.kappas, control.j0, rho)
        worst_sign = max(worst_sign, vdot)
        worst_gap = max(worst_gap, abs(vdot - oracle))
    ok = worst_sign <= 1e-12 and worst_gap <= 1e-10
    report(2, "descent law", ok, f"max dV/dt = {worst_sign:.3e}, max |dV/dt - oracle| = {worst_gap:.3e} over 200 states")
    assert ok


def test_03_fig2_dfs_without_target():
    cfg = preset_config("fig2")
    cfg = replace(cfg, init=replace(cfg.init, beta1=math.pi / 5, beta2=math.pi / 4))
    assert cfg.integrate.t_final == 30
    traj = run_checked(cfg, "fig2")
    fid_dfs, fid_t = traj.fid_dfs[-1], traj.fid_target[-1]
    ok = fid_dfs >= 0.98 and fid_t < 0.95
    report(3, "Fig.2 DFS reached, target not", ok, f"t=30 fid_dfs={fid_dfs:.6f} (>=0.98), fid_target={fid_t:.6f} (<0.95)")
    assert ok


def test_04_fig3_grid():
    base = preset_config("fig3")
    finals, at30 = [], []
    for b1 in GRID:
        for b2 in GRID:
            cfg = replace(base, init=replace(base.init, beta1=float(b1), beta2=float(b2)))
            traj = run_checked(cfg, f"fig3 b1={b1:.2f} b2={b2:.2f}")
            finals.append(traj.fid_target[-1])
            at30.append(traj.fid_target[at_time(traj, 30.0)])
    finals = np.array(finals)
    ok = finals.size == 121 and finals.min() >= 0.95
    report(4, "Fig.3 grid fidelity", ok,
           f"min terminal fid_target={finals.min():.6f} at t={base.integrate.t_final:g} (>=0.95); "
           f"for reference min at t=30 is {min(at30):.6f}")
    assert ok


def test_05_fig4_and_h3_variant():
    base = preset_config("fig4")
    standard, variant = [], []
    for b2 in GRID:
        cfg = replace(base, init=replace(base.init, beta1=0.0, beta2=float(b2)))
        standard.append(run_checked(cfg, f"fig4 H3 b2={b2:.2f}").fid_target[-1])
        cfg_v = replace(cfg, scenario=replace(cfg.scenario, use_h3_variant=True))
        variant.append(run_checked(cfg_v, f"fig4 h3 b2={b2:.2f}").fid_target[-1])
    ok_std = max(standard) < 0.9
    ok_var = min(variant) >= 0.99 - 0.005
    report(5, "Fig.4 standard H3 vs h3 variant", ok_std and ok_var,
           f"beta1=0 row: H3 max fid={max(standard):.6f} (<0.9, {'ok' if ok_std else 'no'}); "
           f"h3 min fid={min(variant):.6f} (>=0.985, {'ok' if ok_var else 'no'}) at t={base.integrate.t_final:g}")
    assert ok_std, "standard H3 should fail at beta1=0"
    assert ok_var, "h3 variant below the 99% (+-0.005) level"


@pytest.mark.parametrize("target", ["D1", "D2"])
def test_06_fig5_kappa_monotone(target):
    base = preset_config("fig5")
    base = replace(base, control=replace(base.control, target=target))
    kappas = list(range(1, 16, 2))
    fids = []
    for k in kappas:
        cfg = replace(base, control=replace(base.control, kappa3=float(k)))
        fids.append(run_checked(cfg, f"fig5 {target} kappa3={k}").fid_target[-1])
    fids = np.array(fids)
    worst_drop = float(max(0.0, -np.min(np.diff(fids))))
    ok = worst_drop <= 0.02 and fids[-1] > fids[0]
    panel = "a" if target == "D1" else "b"
    report(6, f"Fig.5({panel}) monotone in kappa3", ok,
           f"fid(kappa3=1)={fids[0]:.4f}, fid(15)={fids[-1]:.4f}, largest drop {worst_drop:.4f} (<=0.02)")
    assert ok


def test_07_fig6_fields_vanish():
    cfg = preset_config("fig6")
    assert cfg.integrate.t_final == 30
    traj = run_checked(cfg, "fig6")
    f1 = float(np.max(np.abs(traj.fields[:, 0])))
    window = (traj.t >= 27.0) & (traj.t <= 30.0)
    tail = float(np.max(np.abs(traj.fields[window, 1:3])))
    ok_f1, ok_tail = f1 <= 1e-8, tail < 1e-2
    report(7, "Fig.6 control fields", ok_f1 and ok_tail,
           f"max|f1|={f1:.3e} (<=1e-8, {'ok' if ok_f1 else 'no'}); max(|f2|,|f3|) on [27,30]={tail:.3e} (<1e-2, {'ok' if ok_tail else 'no'})")
    assert ok_f1
    assert ok_tail, "feedback fields have not decayed by t=30"


def test_08_numerical_integrity():
    if not INTEGRITY:
        for name in ("fig2", "fig3", "fig6"):
            run_checked(preset_config(name), name)
    problems = [(label, msg) for label, msg in INTEGRITY if msg is not None]
    ok = not problems
    detail = f"{len(INTEGRITY)} runs checked step by step"
    if problems:
        detail += f"; first violation {problems[0][0]}: {problems[0][1]}"
    report(8, "numerical integrity", ok, detail)
    assert ok


def test_09_oracle_equivalence():
    cfg = preset_config("fig3")
    model = build_model(cfg.scenario)
    control = cfg.control.to_config(cfg.scenario, model)
    short = replace(cfg, integrate=replace(cfg.integrate, t_final=3.0))
    rho0 = simulate(short).final_rho
    fields = control_fields(control, model, rho0).values
    assert np.max(np.abs(fields)) > 0.1
    exact = exact_frozen_propagation(model, fields, rho0, 1.0)

    def err(dt):
        s = IntegratorSettings(dt=dt, t_final=1.0, renormalize=False)
        return float(np.linalg.norm(rk4_frozen_propagation(model, fields, rho0, s) - exact))

    e_default = err(1e-3)
    ratio_coarse = err(1e-2) / err(5e-3)
    ratio_fine = e_default / err(5e-4)
    ok = e_default <= 1e-6 and ratio_coarse >= 12 and ratio_fine >= 12
    report(9, "oracle equivalence", ok,
           f"error at dt=1e-3: {e_default:.3e} (<=1e-6); halving ratios {ratio_coarse:.2f} (1e-2) and {ratio_fine:.2f} (1e-3) (>=12)")
    assert ok


def test_10_critical_point_classifier():
    rng = np.random.default_rng(10)
    tested = mismatches = 0
    while tested < 20:
        a = random_hermitian(rng)
        w = np.linalg.eigvalsh(a)
        if np.min(np.diff(w)) < 1e-3:
            continue
        tested += 1
        for j in range(4):
            if classify_critical_point(a, j).value != variation_class(a, j, rng, samples=500):
                mismatches += 1
    A1 = observable_for_target("D1", math.pi / 5)
    labels_ok = (
        classify_critical_point(A1, 0) is CriticalPointClass.MINIMUM
        and classify_critical_point(A1, 3) is CriticalPointClass.MAXIMUM
    )
    ok = mismatches == 0 and labels_ok
    report(10, "critical-point classifier", ok,
           f"{mismatches} disagreements over 20 matrices x 4 eigenvectors; A1 labels D1=min, D2=max: {labels_ok}")
    assert ok
