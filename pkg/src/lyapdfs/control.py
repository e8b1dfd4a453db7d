"""Lyapunov feedback fields for driving an open system onto an eigenstate of A.

With ``V(rho) = Tr(rho A)`` and ``[A, H0] = 0`` the time derivative is

    dV/dt = Tr(L(rho) A) - i sum_n f_n Tr([A, H_n] rho).

One field (index ``j0``) is chosen to cancel the dissipative term and every
other field is ``f_j = -i kappa_j Tr([A, H_j] rho)^*``, which makes
``dV/dt = -sum_{j != j0} kappa_j |Tr([A, H_j] rho)|^2 <= 0``.

Control indices are 0-based: ``model.controls[0]`` is the first control
Hamiltonian.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .lindblad import LindbladModel, dissipator, dissipator_superoperator, vec
from .operators import (
    DimensionError,
    as_hermitian,
    as_matrix,
    commutator,
    frobenius_norm,
    spectral_decomposition,
)

log = logging.getLogger(__name__)

COMMUTE_TOL = 1e-9
DEGENERACY_TOL = 1e-10


@dataclass(frozen=True)
class ControlConfig:
    """Observable, cancellation index, strengths and numerical guards.

    ``kappas`` is aligned with the model's control list; the entry at ``j0``
    is ignored. ``j0=None`` disables the cancellation field.
    """

    A: np.ndarray
    j0: int | None
    kappas: tuple[float, ...]
    eps_den: float = 1e-10
    eps_num: float = 1e-10
    f_max: float = 1e3

    def __post_init__(self):
        object.__setattr__(self, "A", as_hermitian(self.A))
        kappas = tuple(float(k) for k in self.kappas)
        object.__setattr__(self, "kappas", kappas)
        if self.j0 is not None and not 0 <= self.j0 < len(kappas):
            raise ValueError(f"cancellation index {self.j0} outside 0..{len(kappas) - 1}")
        for j, k in enumerate(kappas):
            if j != self.j0 and not k > 0:
                raise ValueError(f"control strength kappa[{j}] must be positive, got {k!r}")
        if self.eps_den <= 0 or self.eps_num <= 0 or self.f_max <= 0:
            raise ValueError("numerical guards must be positive")

    @classmethod
    def for_model(cls, model: LindbladModel, A, j0: int | None, kappas: Sequence[float], **guards) -> "ControlConfig":
        """Build a config and verify it against ``model``.

        Raises ``ValueError`` if ``A`` does not commute with ``H0``.
        """
        cfg = cls(A=A, j0=j0, kappas=tuple(kappas), **guards)
        cfg.check_compatible(model)
        return cfg

    def check_compatible(self, model: LindbladModel) -> None:
        if self.A.shape != model.H0.shape:
            raise DimensionError(f"observable shape {self.A.shape} does not match model dimension {model.dim}")
        if len(self.kappas) != model.n_controls:
            raise DimensionError(f"{len(self.kappas)} strengths for {model.n_controls} control Hamiltonians")
        defect = frobenius_norm(commutator(self.A, model.H0))
        if defect > COMMUTE_TOL:
            raise ValueError(f"observable does not commute with H0 (||[A, H0]||_F = {defect:.3e})")


@dataclass(frozen=True)
class FieldSample:
    values: np.ndarray
    numerator: float
    denominator: complex
    saturated: bool
    imag_residue: float


class CriticalPointClass(enum.Enum):
    MINIMUM = "minimum"
    MAXIMUM = "maximum"
    SADDLE = "saddle"


def lyapunov_value(config: ControlConfig, rho) -> float:
    rho = as_matrix(rho)
    if rho.shape != config.A.shape:
        raise DimensionError(f"state shape {rho.shape} does not match observable {config.A.shape}")
    return float(np.trace(rho @ config.A).real)


def _saturated_cancellation(num: float, den: complex, config: ControlConfig) -> tuple[float, bool]:
    if abs(num) < config.eps_num:
        return 0.0, False
    # sign of Re(-i num / den); den is ~ purely imaginary
    s = -num * den.imag if den.imag != 0 else -num
    return (config.f_max if s >= 0 else -config.f_max), True


def cancellation_value(num: complex, den: complex, config: ControlConfig) -> tuple[float, bool]:
    """Return ``(f_j0, saturated)`` including the small-denominator guard."""
    if abs(den) < config.eps_den:
        return _saturated_cancellation(float(num.real), den, config)
    return float((-1j * num / den).real), False


def control_fields(config: ControlConfig, model: LindbladModel, rho) -> FieldSample:
    rho = as_matrix(rho)
    if len(config.kappas) != model.n_controls:
        raise DimensionError(f"{len(config.kappas)} strengths for {model.n_controls} control Hamiltonians")
    A = config.A
    num = complex(np.trace(dissipator(model, rho) @ A))
    traces = [complex(np.trace(commutator(A, h) @ rho)) for h in model.controls]
    residue = max([abs(num.imag)] + [abs(t.real) for t in traces])

    values = np.zeros(model.n_controls)
    saturated = False
    den = traces[config.j0] if config.j0 is not None else 0j
    for j, t in enumerate(traces):
        if j == config.j0:
            values[j], saturated = cancellation_value(num, t, config)
            if saturated:
                log.debug("cancellation field saturated: |den|=%.3e num=%.3e", abs(t), num.real)
        else:
            values[j] = (-1j * config.kappas[j] * np.conj(t)).real
    if residue > 1e-10:
        log.warning("control traces carry imaginary residue %.3e", residue)
    return FieldSample(values=values, numerator=num.real, denominator=den, saturated=saturated, imag_residue=residue)


def lyapunov_derivative(config: ControlConfig, model: LindbladModel, rho, fields) -> float:
    """``dV/dt`` at ``rho`` for the given field values (a FieldSample or a sequence)."""
    rho = as_matrix(rho)
    values = fields.values if isinstance(fields, FieldSample) else np.asarray(fields, dtype=float)
    A = config.A
    hc = sum((f * h for f, h in zip(values, model.controls)), np.zeros_like(A))
    val = np.trace(dissipator(model, rho) @ A) - 1j * np.trace(rho @ commutator(A, hc))
    return float(val.real)


def classify_critical_point(A, which: int) -> CriticalPointClass:
    """Classify the pure critical state ``|A_which><A_which|`` of ``V = Tr(rho A)``.

    ``which`` indexes the ascending spectrum. Only the eigenvalue ordering
    matters: the smallest is a minimum, the largest a maximum, anything in
    between a saddle.
    """
    spec = spectral_decomposition(A)
    if not 0 <= which < spec.dim:
        raise IndexError(f"eigenvector index {which} outside 0..{spec.dim - 1}")
    a = spec.eigenvalues[which]
    if a - spec.eigenvalues[0] <= DEGENERACY_TOL:
        return CriticalPointClass.MINIMUM
    if spec.eigenvalues[-1] - a <= DEGENERACY_TOL:
        return CriticalPointClass.MAXIMUM
    return CriticalPointClass.SADDLE


def invariant_set_distance(A, rho) -> float:
    """``||[A, rho]||_F``; zero exactly on the LaSalle set ``[A, rho] = 0``."""
    return frobenius_norm(commutator(A, rho))


def field_functionals(config: ControlConfig, model: LindbladModel) -> tuple[np.ndarray, np.ndarray]:
    """Linear functionals on row-major ``vec(rho)`` for the feedback traces.

    Returns ``(u, w)`` with ``Tr(L(rho) A) = u @ vec(rho)`` and
    ``Tr([A, H_n] rho) = w[n] @ vec(rho)``.
    """
    A = config.A
    u = vec(A.T) @ dissipator_superoperator(model)
    if model.n_controls:
        w = np.array([vec(commutator(A, h).T) for h in model.controls])
    else:
        w = np.zeros((0, model.dim**2), dtype=np.complex128)
    return np.ascontiguousarray(u), np.ascontiguousarray(w)
