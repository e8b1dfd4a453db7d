"""Four-level system with two dark states driven by two lasers.

Basis order is ``(|0>, |1>, |2>, |3>)`` with ``|0>`` the excited level.
``|0>`` decays to each ``|j>`` (j = 1, 2, 3) through the jump operator
``|j><0|`` at rate ``gamma_j``. The dark states are
``|D1> = cos(phi)|2> - sin(phi)|1>`` and ``|D2> = |3>``.

Controls, in order: ``H1`` (all-ones matrix, carries the cancellation field),
``H2 = |D1><D2| + h.c.`` and ``H3 = |0><D2| + h.c.`` (or, for the variant,
``h3 = |0><D1| + h.c.``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .control import ControlConfig
from .lindblad import DecayChannel, LindbladModel
from .operators import basis_ket, outer
from .propagator import IntegratorSettings

DIM = 4
TARGETS = ("D1", "D2")
FIGURES = ("fig2", "fig3", "fig4", "fig5", "fig6")


@dataclass(frozen=True)
class ScenarioParams:
    omega: float = 5.0
    phi: float = math.pi / 5
    delta0: float = 4.0
    delta1: float = 2.0
    delta2: float = 2.0
    gamma1: float = 1 / 3
    gamma2: float = 1 / 3
    gamma3: float = 1 / 3
    use_h3_variant: bool = False
    include_h3: bool = True

    def __post_init__(self):
        if self.omega < 0:
            raise ValueError(f"omega must be nonnegative, got {self.omega!r}")
        for name in ("gamma1", "gamma2", "gamma3"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative, got {getattr(self, name)!r}")


@dataclass(frozen=True)
class InitialStateParams:
    beta1: float = 0.0
    beta2: float = 0.0
    beta3: float = 0.0


@dataclass(frozen=True)
class ScenarioControl:
    """Scenario-level control choices; ``to_config`` turns them into a ControlConfig."""

    target: str = "D1"
    kappa2: float = 1.0
    kappa3: float = 15.0
    eps_den: float = 1e-10
    eps_num: float = 1e-10
    f_max: float = 1e3

    def __post_init__(self):
        if self.target not in TARGETS:
            raise ValueError(f"target must be one of {TARGETS}, got {self.target!r}")

    def to_config(self, params: ScenarioParams, model: LindbladModel | None = None) -> ControlConfig:
        model = build_model(params) if model is None else model
        kappas = (0.0, self.kappa2, self.kappa3)[: model.n_controls]
        return ControlConfig.for_model(
            model,
            observable_for_target(self.target, params.phi),
            j0=0,
            kappas=kappas,
            eps_den=self.eps_den,
            eps_num=self.eps_num,
            f_max=self.f_max,
        )


def dark_states(phi: float) -> tuple[np.ndarray, np.ndarray]:
    d1 = math.cos(phi) * basis_ket(2, DIM) - math.sin(phi) * basis_ket(1, DIM)
    d2 = basis_ket(3, DIM)
    return d1, d2


def control_hamiltonians(params: ScenarioParams) -> tuple[np.ndarray, ...]:
    d1, d2 = dark_states(params.phi)
    e0 = basis_ket(0, DIM)
    h1 = np.ones((DIM, DIM), dtype=np.complex128)
    h2 = outer(d1, d2) + outer(d2, d1)
    partner = d1 if params.use_h3_variant else d2
    h3 = outer(e0, partner) + outer(partner, e0)
    return (h1, h2, h3) if params.include_h3 else (h1, h2)


def free_hamiltonian(params: ScenarioParams) -> np.ndarray:
    h = np.diag([params.delta0, params.delta1, params.delta2, 0.0]).astype(np.complex128)
    couplings = (params.omega * math.cos(params.phi), params.omega * math.sin(params.phi))
    for j, om in enumerate(couplings, start=1):
        h[0, j] = om
        h[j, 0] = om
    return h


def build_model(params: ScenarioParams) -> LindbladModel:
    rates = (params.gamma1, params.gamma2, params.gamma3)
    e0 = basis_ket(0, DIM)
    channels = tuple(
        DecayChannel(outer(basis_ket(j, DIM), e0), rate)
        for j, rate in enumerate(rates, start=1)
        if rate > 0
    )
    return LindbladModel(H0=free_hamiltonian(params), controls=control_hamiltonians(params), channels=channels)


def initial_state(params: InitialStateParams) -> np.ndarray:
    b1, b2, b3 = params.beta1, params.beta2, params.beta3
    return np.array(
        [
            math.sin(b1) * math.cos(b3),
            math.cos(b1) * math.cos(b2),
            math.cos(b1) * math.sin(b2),
            math.sin(b1) * math.sin(b3),
        ],
        dtype=np.complex128,
    )


def observable_for_target(target: str, phi: float) -> np.ndarray:
    """``|D2><D2| - |D1><D1|`` for target D1 and its negative for target D2."""
    d1, d2 = dark_states(phi)
    a1 = outer(d2, d2) - outer(d1, d1)
    if target == "D1":
        return a1
    if target == "D2":
        return -a1
    raise ValueError(f"target must be one of {TARGETS}, got {target!r}")


def target_state(target: str, phi: float) -> np.ndarray:
    d1, d2 = dark_states(phi)
    return {"D1": d1, "D2": d2}[target]


_BASE = ScenarioParams()
_PRESETS = {
    "fig2": (
        replace(_BASE, include_h3=False),
        ScenarioControl(target="D1", kappa2=1.0, kappa3=0.0),
        InitialStateParams(math.pi / 5, math.pi / 4, math.pi / 3),
        IntegratorSettings(t_final=30.0),
    ),
    "fig3": (
        _BASE,
        ScenarioControl(target="D1", kappa2=1.0, kappa3=15.0),
        InitialStateParams(math.pi / 5, math.pi / 4, math.pi / 3),
        IntegratorSettings(t_final=100.0),
    ),
    "fig4": (
        _BASE,
        ScenarioControl(target="D2", kappa2=1.0, kappa3=15.0),
        InitialStateParams(0.0, math.pi / 4, math.pi / 3),
        IntegratorSettings(t_final=100.0),
    ),
    "fig5": (
        replace(_BASE, phi=math.pi / 4),
        ScenarioControl(target="D1", kappa2=1.0, kappa3=15.0),
        InitialStateParams(math.pi / 6, math.pi / 3, math.pi / 5),
        IntegratorSettings(t_final=30.0),
    ),
    "fig6": (
        _BASE,
        ScenarioControl(target="D1", kappa2=1.0, kappa3=15.0),
        InitialStateParams(math.pi / 5, math.pi / 4, math.pi / 6),
        IntegratorSettings(t_final=30.0),
    ),
}


def preset(figure: str) -> tuple[ScenarioParams, ScenarioControl, InitialStateParams, IntegratorSettings]:
    """Caption parameters for one figure.

    fig2 drops H3 from the control set. fig3 and fig4 integrate to t = 100
    because their fidelity surfaces only settle there; the others use t = 30.
    """
    try:
        return _PRESETS[figure]
    except KeyError:
        raise ValueError(f"unknown preset {figure!r}; choose from {', '.join(FIGURES)}") from None
