import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lyapdfs.lindblad import (
    DecayChannel,
    InvalidStateError,
    LindbladModel,
    as_density_matrix,
    dfs_check,
    dissipator,
    dissipator_superoperator,
    gamma_operator,
    vec,
)
from lyapdfs.operators import DimensionError, NotHermitianError, outer
from lyapdfs.scenario import ScenarioParams, build_model

from conftest import random_density_matrix, random_unitary
from oracles import hand_dissipator

seeds = st.integers(min_value=0, max_value=2**32 - 1)
E = np.eye(4)


def test_dissipator_annihilates_dark_state(model, dark):
    d1, _ = dark
    assert np.max(np.abs(dissipator(model, outer(d1, d1)))) < 1e-15


def test_dissipator_excited_state(model):
    rho = outer(E[0], E[0])
    expected = (1 / 3) * np.diag([0, 1, 1, 1]) - np.diag([1, 0, 0, 0])
    np.testing.assert_allclose(dissipator(model, rho), expected, atol=1e-15)


def test_dissipator_matches_expanded_form(model, rng):
    rho = random_density_matrix(rng)
    channels = [(ch.jump, ch.rate) for ch in model.channels]
    np.testing.assert_allclose(dissipator(model, rho), hand_dissipator(channels, rho), atol=1e-14)


def test_dissipator_superoperator_agrees(model, rng):
    rho = random_density_matrix(rng)
    np.testing.assert_allclose(dissipator_superoperator(model) @ vec(rho), vec(dissipator(model, rho)), atol=1e-14)


def test_dissipator_dimension_mismatch(model):
    with pytest.raises(DimensionError):
        dissipator(model, np.eye(3) / 3)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_dissipator_hermitian_traceless(seed):
    rng = np.random.default_rng(seed)
    rates = rng.uniform(0.1, 2.0, size=3)
    model = build_model(ScenarioParams(gamma1=rates[0], gamma2=rates[1], gamma3=rates[2]))
    rho = random_density_matrix(rng)
    out = dissipator(model, rho)
    assert np.max(np.abs(out - out.conj().T)) < 1e-12
    assert abs(np.trace(out)) < 1e-12


def test_gamma_operator_examples(model):
    np.testing.assert_allclose(gamma_operator(model), outer(E[0], E[0]), atol=1e-15)
    empty = LindbladModel(H0=np.eye(4))
    assert np.array_equal(gamma_operator(empty), np.zeros((4, 4)))
    single = LindbladModel(H0=np.eye(4), channels=(DecayChannel(outer(E[1], E[0]), 2.0),))
    np.testing.assert_allclose(gamma_operator(single), 2 * outer(E[0], E[0]))


def test_gamma_operator_is_psd(rng):
    chans = tuple(DecayChannel(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)), r) for r in (0.5, 1.5))
    g = gamma_operator(LindbladModel(H0=np.zeros((4, 4)), channels=chans))
    assert np.linalg.eigvalsh(g)[0] > -1e-12


def test_dfs_dark_states_pass(model, dark):
    report = dfs_check(list(dark), model)
    assert report.passed
    assert all(abs(c) == 0 for c in report.channel_eigenvalues)
    assert report.g == 0
    assert report.invariance_residual < 1e-9
    assert max(report.channel_residuals) < 1e-9
    assert report.gamma_residual < 1e-9


def test_dfs_bare_levels_fail_invariance(model):
    report = dfs_check([E[1], E[2]], model)
    assert not report.passed
    assert not report.invariant_under_h0
    # the escaping component of H0|1> is Omega_1 |0>
    assert report.invariance_residual == pytest.approx(5 * np.cos(np.pi / 5), rel=1e-12)


def test_dfs_isolated_level_passes(model):
    report = dfs_check([E[3]], model)
    assert report.passed and report.g == 0


def test_dfs_unequal_detunings_fail():
    m = build_model(ScenarioParams(delta1=1.0, delta2=3.0))
    from lyapdfs.scenario import dark_states

    report = dfs_check(list(dark_states(np.pi / 5)), m)
    assert not report.passed and not report.invariant_under_h0


def test_dfs_nonzero_c_consistency():
    # L = 2 * identity on a 2-level system: every state is an eigenvector with c = 2
    m = LindbladModel(H0=np.diag([1.0, 1.0]), channels=(DecayChannel(2 * np.eye(2), 0.5),))
    report = dfs_check([np.array([1, 0]), np.array([0, 1])], m)
    assert report.passed
    assert report.channel_eigenvalues[0] == pytest.approx(2)
    assert report.g == pytest.approx(0.5 * 4)


def test_dfs_detects_mismatched_c():
    m = LindbladModel(H0=np.eye(2), channels=(DecayChannel(np.diag([1.0, -1.0]), 1.0),))
    report = dfs_check([np.array([1, 0]), np.array([0, 1])], m)
    assert not report.passed and not report.jump_eigen


def test_dfs_rejects_bad_basis(model):
    with pytest.raises(ValueError):
        dfs_check([E[1], (E[1] + E[2]) / np.sqrt(2)], model)
    with pytest.raises(ValueError):
        dfs_check([], model)
    with pytest.raises(DimensionError):
        dfs_check([np.array([1, 0, 0])], model)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_dfs_invariant_under_basis_remixing(seed):
    rng = np.random.default_rng(seed)
    from lyapdfs.scenario import dark_states

    model = build_model(ScenarioParams())
    d = np.column_stack(dark_states(np.pi / 5))
    mixed = d @ random_unitary(rng, 2)
    report = dfs_check([mixed[:, 0], mixed[:, 1]], model)
    assert report.passed
    assert report.g == pytest.approx(sum(ch.rate * abs(c) ** 2 for ch, c in zip(model.channels, report.channel_eigenvalues)))


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_dissipator_vanishes_on_dfs_states(seed):
    rng = np.random.default_rng(seed)
    from lyapdfs.scenario import dark_states

    model = build_model(ScenarioParams())
    d = np.column_stack(dark_states(np.pi / 5))
    rho = d @ random_density_matrix(rng, 2) @ d.conj().T
    assert np.max(np.abs(dissipator(model, rho))) < 1e-10


def test_decay_rate_must_be_positive():
    with pytest.raises(ValueError):
        DecayChannel(np.eye(2), 0.0)


def test_model_rejects_non_hermitian_control():
    with pytest.raises(NotHermitianError):
        LindbladModel(H0=np.eye(2), controls=(np.array([[0, 1], [0, 0]]),))


def test_model_rejects_dimension_mismatch():
    with pytest.raises(DimensionError):
        LindbladModel(H0=np.eye(2), controls=(np.eye(3),))


def test_density_matrix_validation():
    as_density_matrix(np.eye(3) / 3)
    with pytest.raises(InvalidStateError):
        as_density_matrix(np.eye(3))
    with pytest.raises(InvalidStateError):
        as_density_matrix(np.diag([1.5, -0.5]))
    with pytest.raises(InvalidStateError):
        as_density_matrix(np.array([[0.5, 0.1], [0.2, 0.5]]))
