import math

import numpy as np
import pytest

from lyapdfs.operators import outer
from lyapdfs.scenario import ScenarioParams, build_model, dark_states, observable_for_target


def random_density_matrix(rng: np.random.Generator, n: int = 4, rank: int | None = None) -> np.ndarray:
    k = n if rank is None else rank
    g = rng.normal(size=(n, k)) + 1j * rng.normal(size=(n, k))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_hermitian(rng: np.random.Generator, n: int = 4) -> np.ndarray:
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (g + g.conj().T)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


@pytest.fixture
def rng():
    return np.random.default_rng(20241014)


@pytest.fixture
def params():
    return ScenarioParams()


@pytest.fixture
def model(params):
    return build_model(params)


@pytest.fixture
def dark(params):
    return dark_states(params.phi)


@pytest.fixture
def A1(params):
    return observable_for_target("D1", params.phi)


@pytest.fixture
def plus_state(dark):
    d1, d2 = dark
    psi = (d1 + d2) / math.sqrt(2)
    return outer(psi, psi)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
