import math

import numpy as np
import pytest

from entkit import qla
from entkit.states import bell, random_density, werner_sym


def test_identity_spectrum():
    assert np.allclose(qla.spectrum(np.eye(2)), [1, 1])


def test_bell_partial_transpose_spectrum():
    pt = qla.partial_transpose(bell().density().matrix, 1, (2, 2))
    assert np.allclose(sorted(qla.eig_hermitian(pt)[0]), [-0.5, 0.5, 0.5, 0.5])
    assert math.isclose(qla.trace_norm(pt), 2, abs_tol=1e-12)


def test_sigma_a_spectra():
    sa = werner_sym(0.0, 3).matrix
    assert np.allclose(sorted(qla.spectrum(sa)), [0] * 6 + [1 / 3] * 3)
    pt = qla.partial_transpose(sa, 0, (3, 3))
    assert np.allclose(sorted(qla.eig_hermitian(pt)[0]), [-1 / 3] + [1 / 6] * 8)
    assert math.isclose(qla.trace_norm(pt), 5 / 3, abs_tol=1e-12)


def test_partial_trace_bell_and_product(rng):
    assert np.allclose(qla.partial_trace(bell().density().matrix, [0], (2, 2)), np.eye(2) / 2)
    a, b = random_density(2, rng).matrix, random_density(3, rng).matrix
    assert np.allclose(qla.partial_trace(np.kron(a, b), [0], (2, 3)), a)
    assert np.allclose(qla.partial_trace(np.kron(a, b), [1], (2, 3)), b)


def test_entropies():
    assert qla.von_neumann_entropy(bell().density().matrix) == pytest.approx(0, abs=1e-12)
    assert qla.von_neumann_entropy(np.eye(2) / 2) == pytest.approx(1)
    # -(1/4)log(1/4) - (3/4)log(3/4)
    assert qla.shannon_entropy([0.25, 0.75]) == pytest.approx(2 - 0.75 * math.log2(3), abs=1e-12)


def test_relative_entropy_values():
    sa, ss = werner_sym(0.0, 3).matrix, werner_sym(1.0, 3).matrix
    assert qla.relative_entropy(sa, sa) == pytest.approx(0, abs=1e-10)
    assert qla.relative_entropy(sa, (sa + ss) / 2) == pytest.approx(1, abs=1e-10)
    assert qla.relative_entropy(np.diag([1.0, 0]), np.diag([0.0, 1])) == math.inf


def test_fidelity_values():
    assert qla.fidelity(np.diag([1.0, 0]), np.diag([0.0, 1])) == pytest.approx(0, abs=1e-12)
    r = np.diag([0.3, 0.7])
    assert qla.fidelity(r, r) == pytest.approx(1)


def test_matrix_exp_entangler():
    D = np.array([[0, 1], [-1, 0]])
    U = qla.matrix_exp_hermitian(np.kron(D, D), math.pi / 4)
    v = U @ np.array([1, 0, 0, 0])
    assert np.allclose(v, np.array([1, 0, 0, 1j]) / math.sqrt(2))
    assert np.allclose(qla.matrix_exp_hermitian(np.kron(D, D), 0.0), np.eye(4))


def test_tensor_mixed_product(rng):
    A, B = rng.normal(size=(2, 2)), rng.normal(size=(3, 3))
    u, v = rng.normal(size=2), rng.normal(size=3)
    assert np.allclose(qla.tensor(A, B) @ np.kron(u, v), np.kron(A @ u, B @ v))


def test_density_validation():
    with pytest.raises(qla.NotHermitian):
        qla.DensityMatrix(np.array([[0.5, 1], [0, 0.5]]), (2,))
    with pytest.raises(qla.NotPositive):
        qla.DensityMatrix(np.diag([1.5, -0.5]), (2,))


def test_json_roundtrip(rng):
    m = random_density(3, rng).matrix
    back, dims = qla.matrix_from_json(qla.matrix_to_json(m, (3,)))
    assert np.allclose(back, m) and dims == (3,)


def test_eigendecomposition_reconstruction(rng):
    for d in (2, 7, 64):
        G = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        M = G + G.conj().T
        w, V = qla.eig_hermitian(M)
        assert np.linalg.norm(M - V @ np.diag(w) @ V.conj().T) <= 1e-9 * np.linalg.norm(M)
