"""Dense complex linear algebra on operators and state vectors.

Operators are plain ``numpy`` arrays of shape ``(N, N)`` and dtype
``complex128``; state vectors are 1-d arrays of length ``N``. The helpers here
validate those arrays and implement the handful of primitives the rest of the
package is built on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITIAN_TOL = 1e-12
NORM_TOL = 1e-12
IMAG_TOL = 1e-10


class DimensionError(ValueError):
    """Operands do not share a dimension or are not square."""


class NotHermitianError(ValueError):
    pass


def as_matrix(x) -> np.ndarray:
    m = np.asarray(x, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise DimensionError(f"expected a non-empty square matrix, got shape {m.shape}")
    return m


def is_hermitian(x, tol: float = HERMITIAN_TOL) -> bool:
    m = as_matrix(x)
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def as_hermitian(x, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return ``x`` as a complex matrix, raising if it is not Hermitian.

    The check is the maximum entrywise modulus of ``x - x^dagger``.
    """
    m = as_matrix(x)
    defect = float(np.max(np.abs(m - m.conj().T)))
    if defect > tol:
        raise NotHermitianError(f"matrix is not Hermitian (max |X - X^dag| = {defect:.3e})")
    return m


def as_state_vector(v, tol: float = NORM_TOL) -> np.ndarray:
    psi = np.asarray(v, dtype=np.complex128)
    if psi.ndim != 1 or psi.size == 0:
        raise DimensionError(f"expected a 1-d amplitude vector, got shape {psi.shape}")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > tol:
        raise ValueError(f"state vector is not normalized (norm = {norm!r})")
    return psi


def basis_ket(i: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=np.complex128)
    v[i] = 1.0
    return v


def outer(a, b) -> np.ndarray:
    """``|a><b|``."""
    return np.outer(np.asarray(a, dtype=np.complex128), np.conj(np.asarray(b, dtype=np.complex128)))


def projector(psi) -> np.ndarray:
    return outer(psi, psi)


def subspace_projector(basis) -> np.ndarray:
    vecs = np.column_stack([np.asarray(v, dtype=np.complex128) for v in basis])
    return vecs @ vecs.conj().T


def _check_same_dim(x: np.ndarray, y: np.ndarray) -> None:
    if x.shape != y.shape:
        raise DimensionError(f"dimension mismatch: {x.shape} vs {y.shape}")


def commutator(x, y) -> np.ndarray:
    """Return ``XY - YX``."""
    x, y = as_matrix(x), as_matrix(y)
    _check_same_dim(x, y)
    return x @ y - y @ x


def frobenius_norm(x) -> float:
    return float(np.linalg.norm(np.asarray(x, dtype=np.complex128)))


def expectation(a, rho) -> float:
    """Return ``Re Tr(rho A)``.

    Raises ``ValueError`` when the imaginary part of the trace exceeds
    ``IMAG_TOL``; for Hermitian inputs it vanishes, so a residue means one of
    the inputs is corrupted.
    """
    a, rho = as_matrix(a), as_matrix(rho)
    _check_same_dim(a, rho)
    value = np.trace(rho @ a)
    if abs(value.imag) > IMAG_TOL:
        raise ValueError(f"Tr(rho A) has imaginary part {value.imag:.3e}; inputs are not Hermitian")
    return float(value.real)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Ascending eigenvalues with the matching orthonormal eigenvectors.

    ``eigenvectors[:, i]`` belongs to ``eigenvalues[i]``. Inside a degenerate
    cluster the basis is arbitrary.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def vector(self, i: int) -> np.ndarray:
        return self.eigenvectors[:, i]

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def spectral_decomposition(h, tol: float = HERMITIAN_TOL) -> SpectralDecomposition:
    h = as_hermitian(h, tol)
    # symmetrize so LAPACK sees an exactly Hermitian input
    w, v = np.linalg.eigh(0.5 * (h + h.conj().T))
    return SpectralDecomposition(eigenvalues=w, eigenvectors=v)
