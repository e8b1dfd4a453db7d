"""Lyapunov feedback control of open quantum systems into decoherence-free subspaces."""

from .control import (
    ControlConfig,
    CriticalPointClass,
    FieldSample,
    classify_critical_point,
    control_fields,
    invariant_set_distance,
    lyapunov_derivative,
    lyapunov_value,
)
from .lindblad import DecayChannel, DfsReport, LindbladModel, as_density_matrix, dfs_check, dissipator, gamma_operator
from .operators import SpectralDecomposition, commutator, expectation, frobenius_norm, spectral_decomposition
from .propagator import (
    IntegratorSettings,
    NumericalInvariantError,
    Trajectory,
    fidelity,
    propagate,
    rhs,
    step,
    subspace_fidelity,
)

__all__ = [
    "ControlConfig",
    "CriticalPointClass",
    "DecayChannel",
    "DfsReport",
    "FieldSample",
    "IntegratorSettings",
    "LindbladModel",
    "NumericalInvariantError",
    "SpectralDecomposition",
    "Trajectory",
    "as_density_matrix",
    "classify_critical_point",
    "commutator",
    "control_fields",
    "dfs_check",
    "dissipator",
    "expectation",
    "fidelity",
    "frobenius_norm",
    "gamma_operator",
    "invariant_set_distance",
    "lyapunov_derivative",
    "lyapunov_value",
    "propagate",
    "rhs",
    "spectral_decomposition",
    "step",
    "subspace_fidelity",
]
