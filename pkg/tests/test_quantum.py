from math import cos, pi, sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ewfcheck.quantum import (DensityOperator, ProjectiveMeasurement, PureState, QuantumError,
                              UnitaryOp, basis_state, born, computational_measurement, fidelity,
                              make_bloch_state, measurement_dilation, mix, normalize_angle,
                              partial_trace, pauli_xz_measurement, singlet, tensor,
                              trace_distance, y_rotation)

from oracles import overlap2

angles = st.floats(min_value=-4 * pi, max_value=4 * pi, allow_nan=False)


def random_state(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return PureState(v / np.linalg.norm(v))


def random_unitary(rng, dim):
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_measurement(rng, dim):
    return ProjectiveMeasurement.from_basis(list(random_unitary(rng, dim).T))


def test_bloch_state_examples():
    np.testing.assert_allclose(make_bloch_state(0).amplitudes, [1, 0], atol=1e-15)
    np.testing.assert_allclose(make_bloch_state(pi).amplitudes, [0, 1], atol=1e-15)
    np.testing.assert_allclose(make_bloch_state(pi / 2).amplitudes, [1 / sqrt(2)] * 2, atol=1e-15)


def test_angle_normalization():
    assert normalize_angle(-pi / 4) == pytest.approx(7 * pi / 4)
    assert normalize_angle(2 * pi) == 0.0


def test_born_examples():
    # Born rule on the canonical OF pair: cos^2(pi/8) and its complement
    p = born(make_bloch_state(pi / 4), computational_measurement(2))
    np.testing.assert_allclose(p, [cos(pi / 8) ** 2, 1 - cos(pi / 8) ** 2], atol=1e-15)
    assert born(make_bloch_state(pi / 2), pauli_xz_measurement(pi / 2))[0] == pytest.approx(1)


@settings(max_examples=200, deadline=None)
@given(angles, angles)
def test_overlap_law(s, t):
    assert fidelity(make_bloch_state(s), make_bloch_state(t)) == pytest.approx(overlap2(s, t), abs=1e-12)


@settings(max_examples=150, deadline=None)
@given(angles, angles)
def test_measurement_outcomes_are_antipodal(angle, theta):
    p = born(make_bloch_state(theta), pauli_xz_measurement(angle))
    assert p[0] == pytest.approx(overlap2(angle, theta), abs=1e-12)
    assert p.sum() == pytest.approx(1, abs=1e-15)


@settings(max_examples=100, deadline=None)
@given(angles, angles)
def test_y_rotation_shifts_bloch_angle(theta, phi):
    out = y_rotation(phi)(make_bloch_state(theta))
    assert fidelity(out, make_bloch_state(theta + phi)) == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("seed", range(100))
def test_dilation_reproduces_born_and_undoes(seed):
    rng = np.random.default_rng(seed)
    dim = int(rng.integers(2, 5))
    meas, psi = random_measurement(rng, dim), random_state(rng, dim)
    U = measurement_dilation(meas)
    np.testing.assert_allclose(U.matrix.conj().T @ U.matrix, np.eye(dim * dim), atol=1e-12)

    ready = tensor(psi, basis_state(dim, 0))
    after = U(ready)
    # memory register reads outcome c with the Born probability
    mem = partial_trace(after.density().matrix, (dim, dim), [1])
    np.testing.assert_allclose(np.diag(mem).real, born(psi, meas), atol=1e-12)
    # and the branch on c carries Pi_c|psi>
    for c, P in enumerate(meas.projectors):
        branch = after.amplitudes.reshape(dim, dim)[:, c]
        np.testing.assert_allclose(branch, P @ psi.amplitudes, atol=1e-12)
    assert fidelity(U.dagger(after), ready) >= 1 - 1e-12


@pytest.mark.parametrize("seed", range(100))
def test_random_state_and_unitary_invariants(seed):
    rng = np.random.default_rng(1000 + seed)
    dim = int(rng.integers(2, 6))
    U = UnitaryOp(random_unitary(rng, dim))
    psi = random_state(rng, dim)
    out = U(psi)
    assert np.linalg.norm(out.amplitudes) == pytest.approx(1, abs=1e-12)
    assert fidelity(U.dagger(out), psi) >= 1 - 1e-12
    rho = psi.density()
    assert np.trace(rho.matrix).real == pytest.approx(1, abs=1e-12)
    assert born(psi, random_measurement(rng, dim)).sum() == pytest.approx(1, abs=1e-12)


def test_singlet_is_antisymmetric():
    s = singlet()
    np.testing.assert_allclose(s.amplitudes, [0, 1 / sqrt(2), -1 / sqrt(2), 0], atol=1e-15)
    np.testing.assert_allclose(partial_trace(s.density().matrix, (2, 2), [0]), np.eye(2) / 2, atol=1e-15)


def test_mixing_equivalence_of_the_four_state_family():
    P = [make_bloch_state(t) for t in (pi / 4, 5 * pi / 4, 3 * pi / 4, 7 * pi / 4)]
    left = mix([(0.5, P[0]), (0.5, P[1])])
    right = mix([(0.5, P[2]), (0.5, P[3])])
    assert trace_distance(left, right) <= 1e-12
    np.testing.assert_allclose(left.matrix, np.eye(2) / 2, atol=1e-15)


def test_trace_distance_of_orthogonal_states():
    assert trace_distance(basis_state(2, 0), basis_state(2, 1)) == pytest.approx(1)


@pytest.mark.parametrize("bad, exc", [
    (lambda: PureState(np.array([1.0, 1.0])), QuantumError),
    (lambda: UnitaryOp(np.array([[1.0, 1.0], [0.0, 1.0]])), QuantumError),
    (lambda: DensityOperator(np.diag([1.5, -0.5])), QuantumError),
    (lambda: ProjectiveMeasurement((np.diag([1.0, 0.0]), np.diag([1.0, 0.0]))), QuantumError),
    (lambda: mix([(0.7, basis_state(2, 0)), (0.7, basis_state(2, 1))]), QuantumError),
    (lambda: born(basis_state(3, 0), computational_measurement(2)), QuantumError),
])
def test_invariant_violations_raise(bad, exc):
    with pytest.raises(exc):
        bad()
