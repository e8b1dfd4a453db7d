"""Controlled Markovian open systems and decoherence-free subspace checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .operators import DimensionError, as_hermitian, as_matrix, as_state_vector

DFS_TOL = 1e-9

RHO_HERMITIAN_TOL = 1e-10
RHO_TRACE_TOL = 1e-9
RHO_MIN_EIG_TOL = -1e-8


class InvalidStateError(ValueError):
    """A matrix fails the density-matrix invariants."""


@dataclass(frozen=True)
class DecayChannel:
    jump: np.ndarray
    rate: float

    def __post_init__(self):
        object.__setattr__(self, "jump", as_matrix(self.jump))
        if not self.rate > 0:
            raise ValueError(f"decay rate must be positive, got {self.rate!r}")


@dataclass(frozen=True)
class LindbladModel:
    """``H(t) = H0 + sum_n f_n(t) H_n`` plus decay channels ``(L_m, lambda_m)``."""

    H0: np.ndarray
    controls: tuple[np.ndarray, ...] = ()
    channels: tuple[DecayChannel, ...] = ()

    def __post_init__(self):
        h0 = as_hermitian(self.H0)
        controls = tuple(as_hermitian(h) for h in self.controls)
        n = h0.shape[0]
        for h in controls:
            if h.shape != h0.shape:
                raise DimensionError(f"control Hamiltonian shape {h.shape} does not match H0 {h0.shape}")
        for ch in self.channels:
            if ch.jump.shape != h0.shape:
                raise DimensionError(f"jump operator shape {ch.jump.shape} does not match dimension {n}")
        object.__setattr__(self, "H0", h0)
        object.__setattr__(self, "controls", controls)
        object.__setattr__(self, "channels", tuple(self.channels))

    @property
    def dim(self) -> int:
        return self.H0.shape[0]

    @property
    def n_controls(self) -> int:
        return len(self.controls)

    def hamiltonian(self, fields: Sequence[float]) -> np.ndarray:
        if len(fields) != self.n_controls:
            raise DimensionError(f"expected {self.n_controls} field values, got {len(fields)}")
        h = self.H0.copy()
        for f, hn in zip(fields, self.controls):
            h = h + f * hn
        return h


def density_matrix_defects(rho) -> tuple[float, float, float]:
    """Return (hermiticity defect, |Tr rho - 1|, minimum eigenvalue)."""
    rho = as_matrix(rho)
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    trace_dev = float(abs(np.trace(rho) - 1.0))
    min_eig = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
    return herm, trace_dev, min_eig


def as_density_matrix(rho) -> np.ndarray:
    rho = as_matrix(rho)
    herm, trace_dev, min_eig = density_matrix_defects(rho)
    if herm > RHO_HERMITIAN_TOL:
        raise InvalidStateError(f"density matrix not Hermitian (defect {herm:.3e})")
    if trace_dev > RHO_TRACE_TOL:
        raise InvalidStateError(f"density matrix trace deviates from 1 by {trace_dev:.3e}")
    if min_eig < RHO_MIN_EIG_TOL:
        raise InvalidStateError(f"density matrix has negative eigenvalue {min_eig:.3e}")
    return rho


def _check_dim(model: LindbladModel, x: np.ndarray) -> None:
    if x.shape != model.H0.shape:
        raise DimensionError(f"operand shape {x.shape} does not match model dimension {model.dim}")


def dissipator(model: LindbladModel, rho) -> np.ndarray:
    """Evaluate ``1/2 sum_m lambda_m ([L_m, rho L_m^dag] + [L_m rho, L_m^dag])``."""
    rho = as_matrix(rho)
    _check_dim(model, rho)
    out = np.zeros_like(rho)
    for ch in model.channels:
        L = ch.jump
        Ld = L.conj().T
        rLd = rho @ Ld
        Lr = L @ rho
        out += 0.5 * ch.rate * ((L @ rLd - rLd @ L) + (Lr @ Ld - Ld @ Lr))
    return out


def gamma_operator(model: LindbladModel) -> np.ndarray:
    """``Gamma = sum_m lambda_m L_m^dag L_m``."""
    g = np.zeros((model.dim, model.dim), dtype=np.complex128)
    for ch in model.channels:
        g += ch.rate * (ch.jump.conj().T @ ch.jump)
    return g


@dataclass(frozen=True)
class DfsReport:
    passed: bool
    tol: float
    invariance_residual: float
    channel_eigenvalues: tuple[complex, ...]
    channel_residuals: tuple[float, ...]
    g: float
    gamma_eigenvalue: complex
    gamma_residual: float
    gamma: np.ndarray = field(repr=False)

    @property
    def invariant_under_h0(self) -> bool:
        return self.invariance_residual < self.tol

    @property
    def jump_eigen(self) -> bool:
        return all(r < self.tol for r in self.channel_residuals)

    @property
    def gamma_eigen(self) -> bool:
        return self.gamma_residual < self.tol

    def lines(self) -> list[str]:
        """Key-value rendering used by the ``check-dfs`` command."""
        out = [
            f"passed={str(self.passed).lower()}",
            f"tol={self.tol!r}",
            f"condition1_invariance_residual={self.invariance_residual:.6e}",
            f"condition1_passed={str(self.invariant_under_h0).lower()}",
        ]
        for m, (c, r) in enumerate(zip(self.channel_eigenvalues, self.channel_residuals), start=1):
            out.append(f"condition2_channel{m}_c={c.real:.6e}{c.imag:+.6e}j")
            out.append(f"condition2_channel{m}_residual={r:.6e}")
        out.append(f"condition2_passed={str(self.jump_eigen).lower()}")
        out.append(f"condition3_g={self.g:.6e}")
        out.append(f"condition3_gamma_eigenvalue={self.gamma_eigenvalue.real:.6e}{self.gamma_eigenvalue.imag:+.6e}j")
        out.append(f"condition3_residual={self.gamma_residual:.6e}")
        out.append(f"condition3_passed={str(self.gamma_eigen).lower()}")
        return out


def dfs_check(basis: Sequence, model: LindbladModel, tol: float = DFS_TOL) -> DfsReport:
    """Test whether ``span(basis)`` is a decoherence-free subspace of ``model``.

    The three conditions tested are invariance of the span under ``H0``,
    ``L_m |psi_n> = c_m |psi_n>`` with one ``c_m`` shared by the whole basis,
    and ``Gamma |psi_n> = g |psi_n>`` with ``g = sum_l lambda_l |c_l|^2``.
    Each residual is the largest Euclidean norm of a defect vector over the
    basis; the check passes when all three are below ``tol``.
    """
    if len(basis) == 0:
        raise ValueError("basis must contain at least one vector")
    vecs = [as_state_vector(v, tol=max(tol, 1e-12)) for v in basis]
    for v in vecs:
        if v.shape[0] != model.dim:
            raise DimensionError(f"basis vector of length {v.shape[0]} in a {model.dim}-level model")
    B = np.column_stack(vecs)
    gram_defect = float(np.max(np.abs(B.conj().T @ B - np.eye(B.shape[1]))))
    if gram_defect > tol:
        raise ValueError(f"basis is not orthonormal (max Gram defect {gram_defect:.3e})")

    complement = np.eye(model.dim) - B @ B.conj().T
    invariance = max(float(np.linalg.norm(complement @ (model.H0 @ v))) for v in vecs)

    cs, residuals = [], []
    for ch in model.channels:
        c = complex(np.vdot(vecs[0], ch.jump @ vecs[0]))
        cs.append(c)
        residuals.append(max(float(np.linalg.norm(ch.jump @ v - c * v)) for v in vecs))

    gamma = gamma_operator(model)
    g = float(sum(ch.rate * abs(c) ** 2 for ch, c in zip(model.channels, cs)))
    gamma_eig = complex(np.vdot(vecs[0], gamma @ vecs[0]))
    gamma_res = max(float(np.linalg.norm(gamma @ v - g * v)) for v in vecs)

    passed = invariance < tol and all(r < tol for r in residuals) and gamma_res < tol
    return DfsReport(
        passed=passed,
        tol=tol,
        invariance_residual=invariance,
        channel_eigenvalues=tuple(cs),
        channel_residuals=tuple(residuals),
        g=g,
        gamma_eigenvalue=gamma_eig,
        gamma_residual=gamma_res,
        gamma=gamma,
    )


def vec(x: np.ndarray) -> np.ndarray:
    """Row-major vectorization; ``vec(A X B) = kron(A, B.T) @ vec(X)``."""
    return np.ascontiguousarray(x).reshape(-1)


def unvec(x: np.ndarray) -> np.ndarray:
    n = int(round(np.sqrt(x.shape[0])))
    return x.reshape(n, n)


def dissipator_superoperator(model: LindbladModel) -> np.ndarray:
    """Matrix of the dissipator acting on row-major ``vec(rho)``."""
    n = model.dim
    eye = np.eye(n)
    out = np.zeros((n * n, n * n), dtype=np.complex128)
    for ch in model.channels:
        L = ch.jump
        LdL = L.conj().T @ L
        out += ch.rate * (np.kron(L, L.conj()) - 0.5 * (np.kron(LdL, eye) + np.kron(eye, LdL.T)))
    return out
