"""Integration of the closed-loop master equation and fidelity measures."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from ._kernel import rk4_closed_loop
from .control import ControlConfig, control_fields, field_functionals
from .lindblad import (
    RHO_MIN_EIG_TOL,
    RHO_TRACE_TOL,
    LindbladModel,
    as_density_matrix,
    dissipator,
    dissipator_superoperator,
    unvec,
    vec,
)
from .operators import as_matrix, commutator, projector, spectral_decomposition, subspace_projector

ABORT_MIN_EIG = -1e-6
ABORT_TRACE_DEV = 1e-6
MONOTONE_TOL = 1e-8
DRIFT_RATE_TOL = 1e-7


class NumericalInvariantError(RuntimeError):
    """Propagation produced a state violating a density-matrix invariant."""

    def __init__(self, message: str, t: float | None = None):
        super().__init__(message if t is None else f"t={t:.6g}: {message}")
        self.t = t


@dataclass(frozen=True)
class IntegratorSettings:
    dt: float = 1e-3
    t_final: float = 30.0
    record_stride: int = 10
    renormalize: bool = True

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt!r}")
        if not self.t_final >= self.dt:
            raise ValueError(f"t_final={self.t_final!r} is shorter than dt={self.dt!r}")
        if int(self.record_stride) != self.record_stride or self.record_stride < 1:
            raise ValueError(f"record_stride must be a positive integer, got {self.record_stride!r}")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.dt))


@dataclass
class Trajectory:
    """Column-wise time series; row ``k`` is the ``k``-th recorded sample."""

    t: np.ndarray
    rho: np.ndarray
    fields: np.ndarray
    numerator: np.ndarray
    denominator: np.ndarray
    saturated: np.ndarray
    V: np.ndarray
    fid_target: np.ndarray
    fid_dfs: np.ndarray
    trace: np.ndarray
    min_eig: np.ndarray
    comm_norm: np.ndarray
    saturation_events: int = 0
    max_trace_drift: float = 0.0
    dt: float = 0.0

    def __len__(self) -> int:
        return self.t.shape[0]

    @property
    def final_rho(self) -> np.ndarray:
        return self.rho[-1]


def fidelity(rho, target) -> float:
    """``<psi|rho|psi>`` for a pure target."""
    psi = np.asarray(target, dtype=np.complex128)
    return float(np.vdot(psi, as_matrix(rho) @ psi).real)


def subspace_fidelity(rho, basis: Sequence) -> float:
    """``Tr(P rho)`` with ``P`` the projector onto ``span(basis)``."""
    return float(np.trace(subspace_projector(basis) @ as_matrix(rho)).real)


def rhs(model: LindbladModel, config: ControlConfig, rho) -> np.ndarray:
    """Closed-loop generator ``-i[H0 + sum f_n H_n, rho] + L(rho)`` with fields from the law at ``rho``."""
    rho = as_matrix(rho)
    sample = control_fields(config, model, rho)
    h = model.hamiltonian(sample.values)
    return -1j * commutator(h, rho) + dissipator(model, rho)


def _finish_step(rho: np.ndarray, renormalize: bool) -> np.ndarray:
    rho = 0.5 * (rho + rho.conj().T)
    if renormalize:
        rho = rho / np.trace(rho).real
    return rho


def step(model: LindbladModel, config: ControlConfig, rho, dt: float, renormalize: bool = True) -> np.ndarray:
    """One classical RK4 step, re-evaluating the feedback law at every stage."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    rho = as_matrix(rho)
    k1 = rhs(model, config, rho)
    k2 = rhs(model, config, rho + 0.5 * dt * k1)
    k3 = rhs(model, config, rho + 0.5 * dt * k2)
    k4 = rhs(model, config, rho + dt * k3)
    out = _finish_step(rho + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4), renormalize)
    min_eig = np.linalg.eigvalsh(out)[0]
    if min_eig < ABORT_MIN_EIG:
        raise NumericalInvariantError(f"eigenvalue {min_eig:.3e} after a step of dt={dt:g}; reduce the step size")
    return out


def default_target(config: ControlConfig) -> np.ndarray | None:
    """Eigenvector of ``A`` with the smallest eigenvalue, or None if that eigenvalue is degenerate."""
    spec = spectral_decomposition(config.A)
    if spec.dim > 1 and spec.eigenvalues[1] - spec.eigenvalues[0] < 1e-10:
        return None
    return spec.vector(0)


def _run_kernel(model, config, rho0, settings, frozen_fields=None):
    u, w = field_functionals(config, model)
    hs = np.array(model.controls) if model.n_controls else np.zeros((0, model.dim, model.dim), dtype=np.complex128)
    frozen = frozen_fields is not None
    f_frozen = np.asarray(frozen_fields if frozen else np.zeros(model.n_controls), dtype=float)
    return rk4_closed_loop(
        np.ascontiguousarray(vec(as_matrix(rho0))),
        np.ascontiguousarray(model.H0),
        np.ascontiguousarray(hs),
        np.ascontiguousarray(dissipator_superoperator(model)),
        u,
        w,
        np.asarray(config.kappas, dtype=float),
        -1 if config.j0 is None else int(config.j0),
        float(config.eps_den),
        float(config.eps_num),
        float(config.f_max),
        float(settings.dt),
        settings.n_steps,
        int(settings.record_stride),
        bool(settings.renormalize),
        frozen,
        f_frozen,
    )


def propagate(
    model: LindbladModel,
    config: ControlConfig,
    rho0,
    settings: IntegratorSettings = IntegratorSettings(),
    target=None,
    dfs_basis: Sequence | None = None,
) -> Trajectory:
    """Integrate the closed loop from ``rho0`` and record diagnostics.

    ``target`` defaults to the non-degenerate lowest eigenvector of ``A``;
    ``fid_dfs`` is NaN when no ``dfs_basis`` is given.
    Raises ``NumericalInvariantError`` if a recorded state loses positivity or
    trace beyond the abort thresholds, or if the terminal state is not a valid
    density matrix.
    """
    config.check_compatible(model)
    rho0 = as_density_matrix(rho0)
    states, steps, fields, nums, dens, sats, sat_count, max_drift = _run_kernel(model, config, rho0, settings)
    return _assemble(model, config, states, steps, fields, nums, dens, sats, sat_count, max_drift, settings, target, dfs_basis)


def _assemble(model, config, states, steps, fields, nums, dens, sats, sat_count, max_drift, settings, target, dfs_basis):
    n = model.dim
    rho = states.reshape(-1, n, n)
    t = steps * settings.dt
    A = config.A
    finite = np.isfinite(states).all(axis=1)
    if not finite.all():
        k = int(np.flatnonzero(~finite)[0])
        raise NumericalInvariantError("state diverged; reduce dt", t=float(t[k]))
    trace = np.einsum("kii->k", rho).real
    herm = 0.5 * (rho + np.conj(np.swapaxes(rho, 1, 2)))
    min_eig = np.linalg.eigvalsh(herm)[:, 0]
    bad = np.flatnonzero((min_eig < ABORT_MIN_EIG) | (np.abs(trace - 1.0) > ABORT_TRACE_DEV))
    if bad.size:
        k = bad[0]
        raise NumericalInvariantError(
            f"state left the physical set (min eigenvalue {min_eig[k]:.3e}, trace {trace[k]:.12g}); reduce dt",
            t=float(t[k]),
        )
    try:
        as_density_matrix(rho[-1])
    except ValueError as exc:
        raise NumericalInvariantError(str(exc), t=float(t[-1])) from exc

    V = np.einsum("kij,ji->k", rho, A).real
    if target is None:
        target = default_target(config)
    if target is None:
        fid_target = np.full(t.shape, np.nan)
    else:
        p = projector(target)
        fid_target = np.einsum("kij,ji->k", rho, p).real
    if dfs_basis is None:
        fid_dfs = np.full(t.shape, np.nan)
    else:
        p = subspace_projector(dfs_basis)
        fid_dfs = np.einsum("kij,ji->k", rho, p).real
    comm_norm = np.linalg.norm(A @ rho - rho @ A, axis=(1, 2))
    return Trajectory(
        t=t,
        rho=rho,
        fields=fields,
        numerator=nums,
        denominator=dens,
        saturated=sats,
        V=V,
        fid_target=fid_target,
        fid_dfs=fid_dfs,
        trace=trace,
        min_eig=min_eig,
        comm_norm=comm_norm,
        saturation_events=int(sat_count),
        max_trace_drift=float(max_drift),
        dt=settings.dt,
    )


def check_trajectory(traj: Trajectory, monotone: bool = True) -> None:
    """Raise ``NumericalInvariantError`` on the first sample breaking a recorded-state invariant.

    Checked: ``|Tr rho - 1| < 1e-9``, minimum eigenvalue ``>= -1e-8``, ``V``
    nonincreasing within ``1e-8`` between samples (when ``monotone``), and
    pre-renormalization trace drift below ``1e-7`` per unit time.
    """
    dev = np.abs(traj.trace - 1.0)
    k = np.flatnonzero(dev >= RHO_TRACE_TOL)
    if k.size:
        raise NumericalInvariantError(f"trace deviates from 1 by {dev[k[0]]:.3e}", t=float(traj.t[k[0]]))
    k = np.flatnonzero(traj.min_eig < RHO_MIN_EIG_TOL)
    if k.size:
        raise NumericalInvariantError(f"negative eigenvalue {traj.min_eig[k[0]]:.3e}", t=float(traj.t[k[0]]))
    if monotone:
        rise = np.diff(traj.V)
        k = np.flatnonzero(rise > MONOTONE_TOL)
        if k.size:
            raise NumericalInvariantError(f"Lyapunov value increased by {rise[k[0]]:.3e}", t=float(traj.t[k[0] + 1]))
    if traj.dt and traj.max_trace_drift / traj.dt > DRIFT_RATE_TOL:
        raise NumericalInvariantError(f"trace drift {traj.max_trace_drift / traj.dt:.3e} per unit time")


def frozen_generator(model: LindbladModel, fields: Sequence[float]) -> np.ndarray:
    """Liouvillian with fixed field values, as a matrix on row-major ``vec(rho)``.

    Built column by column by applying the generator to matrix units, which
    keeps it independent of the Kronecker-product construction the
    integrator uses.
    """
    n = model.dim
    h = model.hamiltonian(fields)
    G = np.empty((n * n, n * n), dtype=np.complex128)
    for a in range(n):
        for b in range(n):
            e = np.zeros((n, n), dtype=np.complex128)
            e[a, b] = 1.0
            G[:, a * n + b] = vec(-1j * commutator(h, e) + dissipator(model, e))
    return G


def exact_frozen_propagation(model: LindbladModel, fields: Sequence[float], rho0, t: float) -> np.ndarray:
    """``rho(t) = exp(G t) rho0`` for the fixed-field generator ``G``."""
    rho0 = as_matrix(rho0)
    return unvec(expm(frozen_generator(model, fields) * t) @ vec(rho0))


def rk4_frozen_propagation(model: LindbladModel, fields: Sequence[float], rho0, settings: IntegratorSettings) -> np.ndarray:
    """Terminal state of the production RK4 loop with field values held fixed."""
    dummy = ControlConfig(A=np.zeros((model.dim, model.dim)), j0=None, kappas=(1.0,) * model.n_controls)
    states, *_ = _run_kernel(model, dummy, rho0, settings, frozen_fields=fields)
    return unvec(states[-1])
