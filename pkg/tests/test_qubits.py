import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from entit import qubits as q

angle_vec = arrays(np.float64, 4, elements=st.floats(-2 * math.pi, 2 * math.pi))
S2 = 1 / math.sqrt(2)


def test_gk_at_zero():
    np.testing.assert_allclose(q.gk_coefficients(np.zeros(4)), [1, 0, 0, 0], atol=1e-15)


def test_gk_global_phase():
    np.testing.assert_allclose(q.gk_coefficients([math.pi, 0, 0, 0]), [-1, 0, 0, 0], atol=1e-15)


@given(angle_vec)
@settings(max_examples=100)
def test_gk_matches_exponential(x):
    diff = q.operator_from_gk(q.gk_coefficients(x)) - q.pauli_pair_exponential(x)
    assert np.max(np.abs(diff)) < 1e-10


def test_four_qubit_placement_matches_exponential():
    rng = np.random.default_rng(1)
    for _ in range(20):
        t = rng.uniform(-4, 4, 4)
        assert np.max(np.abs(q.u14(t) - q.u14_exponential(t))) < 1e-10
        assert np.max(np.abs(q.u23(t) - q.u23_exponential(t))) < 1e-10


def test_bad_angles():
    with pytest.raises(ValueError):
        q.gk_coefficients([0, 1, 2])
    with pytest.raises(ValueError):
        q.gk_coefficients([0, 1, 2, math.nan])


def test_remote_identity():
    np.testing.assert_allclose(q.remote_unitary(np.zeros(4), np.zeros(4)), np.eye(16), atol=1e-15)


@given(angle_vec, angle_vec)
@settings(max_examples=30)
def test_unitary_and_commuting(theta, phi):
    u = q.remote_unitary(theta, phi)
    assert np.max(np.abs(u.conj().T @ u - np.eye(16))) < 1e-12
    a, b = q.u14(theta), q.u23(phi)
    assert np.max(np.abs(a @ b - b @ a)) < 1e-12


def test_matrix_notation_identity():
    rng = np.random.default_rng(2)
    for _ in range(10):
        a, b, c = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(3))
        lhs = np.kron(a, b) @ q.ket_from_matrix(c)
        np.testing.assert_allclose(lhs, q.ket_from_matrix(a @ c @ b.T), atol=1e-13)


@pytest.mark.parametrize("k", range(4))
def test_pauli_pair_eigenvectors(k):
    rng = np.random.default_rng(10 + k)
    v = q.pauli_pair_state(k)
    for _ in range(10):
        theta, phi = rng.uniform(-3, 3, 4), rng.uniform(-3, 3, 4)
        np.testing.assert_allclose(q.remote_unitary(theta, phi) @ v, q.pauli_pair_eigenvalue(k, theta, phi) * v, atol=1e-12)


def test_pauli_pair_states_span_doubled_phi_plus():
    # |Phi+>_12 |Phi+>_34 is the uniform superposition of the four Pauli-pair states (up to signs)
    v = q.doubled_state(q.BELL["phi+"])
    comps = [np.vdot(q.pauli_pair_state(k), v) for k in range(4)]
    assert sum(abs(c) ** 2 for c in comps) == pytest.approx(1, abs=1e-12)
    np.testing.assert_allclose(np.abs(comps), 0.5, atol=1e-12)


@pytest.mark.parametrize("bell", sorted(q.BELL))
def test_bell_states_invariant(bell):
    rng = np.random.default_rng(sorted(q.BELL).index(bell))
    for _ in range(100):
        assert q.bell_invariance_residual(bell, rng.uniform(-math.pi, math.pi, 4)) < 1e-10


def test_repetition_is_not_inversion():
    rng = np.random.default_rng(3)
    for _ in range(20):
        t = rng.uniform(-math.pi, math.pi, 4)
        assert q.invariance_residual(q.BELL["phi+"], t, t)[0] > 1e-3


def test_basis_state_needs_equal_angles():
    rng = np.random.default_rng(4)
    psi = q.TwoQubitAmplitudes([1, 0, 0, 0])
    for _ in range(50):
        t = rng.uniform(-math.pi, math.pi, 4)
        t[2] = t[1]
        assert q.invariance_residual(psi, t, -t)[1] < 1e-10
    t = np.array([0.2, 0.5, 0.2, -0.4])
    assert q.invariance_residual(psi, t, -t)[1] > 1e-3


@given(arrays(np.float64, 4, elements=st.floats(-1, 1)), angle_vec, st.floats(0, 2 * math.pi))
def test_phase_residual_bounds(a, theta, gamma):
    if np.linalg.norm(a) < 1e-3:
        return
    psi = q.TwoQubitAmplitudes.normalised(a)
    exact, phase = q.invariance_residual(psi, theta, -theta)
    assert phase <= exact + 1e-12
    # optimality of the chosen phase
    v = q.doubled_state(psi)
    w = q.remote_unitary(theta, -theta) @ v
    assert phase <= np.linalg.norm(w - np.exp(1j * gamma) * v) + 1e-12


def test_amplitudes_validated():
    with pytest.raises(ValueError):
        q.TwoQubitAmplitudes([1, 1, 0, 0])


@pytest.mark.parametrize(
    "amps, branch, constraint",
    [
        ([1, 0, 0, 0], "basis-diagonal", "theta1=theta2"),
        ([0, 0, 0, -1], "basis-diagonal", "theta1=theta2"),
        ([0, 1, 0, 0], "basis-antidiagonal", "theta1=-theta2"),
        ([S2, 0, 0, S2], "bell", "none"),
        ([0, S2, -S2, 0], "bell", "none"),
        ([0.6, 0, 0, 0.8], "two-term-diagonal", "theta1=theta2"),
        ([0, 0.6, 0.8, 0], "two-term-antidiagonal", "theta1=-theta2"),
        ([0.6, 0.2, -0.2, 0.6], "four-term-pm", "theta1=-theta3"),
        ([0.6, 0.2, 0.2, 0.6], "four-term-pp", "theta2=theta3"),
        ([0.6, 0.2, 0.3, 0.5], "other", "theta=0"),
        ([0.6, 0.8, 0, 0], "other", "theta=0"),
    ],
)
def test_zoology_classification(amps, branch, constraint):
    c = q.zoology_constraints(q.TwoQubitAmplitudes.normalised(amps))
    assert c.branch == branch
    assert c.constraint == constraint


@given(arrays(np.float64, 4, elements=st.floats(-1, 1)))
def test_zoology_exactly_one_branch(a):
    if np.linalg.norm(a) < 1e-3:
        return
    c = q.zoology_constraints(q.TwoQubitAmplitudes.normalised(a))
    assert c.branch in q.BRANCHES


@pytest.mark.parametrize("branch", list(q.BRANCHES))
def test_sampled_states_land_in_branch(branch):
    rng = np.random.default_rng(5)
    for _ in range(20):
        assert q.zoology_constraints(q.sample_branch_state(branch, rng)).branch == branch


def test_validate_zoology_all_pass():
    rows = q.validate_zoology(np.random.default_rng(20090101), draws=50)
    assert [r.branch for r in rows] == list(q.BRANCHES)
    for row in rows:
        assert row.draws == 50
        assert row.passed(), row
        assert row.exact_status in ("exact", "up-to-phase")


def test_validate_zoology_deterministic():
    a = q.validate_zoology(np.random.default_rng(7), draws=5)
    b = q.validate_zoology(np.random.default_rng(7), draws=5)
    assert a == b
