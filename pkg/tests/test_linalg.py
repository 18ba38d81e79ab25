import json
import math

import numpy as np
import pytest

from ngtrace.linalg import (
    DenseHermitian,
    bell_state,
    hermitian_eigenvalues,
    partial_transpose,
    pt_moments,
    random_density,
    werner_state,
)


def test_identity():
    assert hermitian_eigenvalues(DenseHermitian(np.eye(4))) == [1, 1, 1, 1]


def test_diagonal():
    assert hermitian_eigenvalues(DenseHermitian(np.diag([1.0, 3.0]))) == [3, 1]


def test_rejects_non_hermitian():
    with pytest.raises(ValueError):
        DenseHermitian(np.array([[1, 2], [0, 1]]))


def test_rejects_large():
    with pytest.raises(ValueError):
        DenseHermitian(np.eye(65))


@pytest.mark.parametrize("d", [2, 3, 5, 8, 16, 32])
def test_matches_lapack(d):
    rng = np.random.default_rng(d)
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    m = DenseHermitian((a + a.conj().T) / 2)
    ours = hermitian_eigenvalues(m)
    ref = sorted(np.linalg.eigvalsh(m.matrix), reverse=True)
    assert np.allclose(ours, ref, atol=1e-10)
    assert abs(sum(ours) - m.trace()) < 1e-10


def test_bell_partial_transpose_spectrum():
    ev = hermitian_eigenvalues(partial_transpose(bell_state(), 2, 2))
    assert np.allclose(ev, [0.5, 0.5, 0.5, -0.5], atol=1e-10)


def test_partial_transpose_index_map():
    m = np.arange(16, dtype=float).reshape(4, 4)
    sym = DenseHermitian(m + m.T)
    pt = partial_transpose(sym, 2, 2).matrix.real
    for a in range(2):
        for b in range(2):
            for a2 in range(2):
                for b2 in range(2):
                    assert pt[a * 2 + b2, a2 * 2 + b] == (m + m.T)[a * 2 + b, a2 * 2 + b2]


def test_partial_transpose_involution_and_trace(rng):
    for dims in [(2, 2), (2, 3), (3, 2), (3, 3)]:
        m = random_density(dims[0] * dims[1], rng)
        once = partial_transpose(m, *dims)
        assert np.allclose(partial_transpose(once, *dims).matrix, m.matrix, atol=0)
        assert abs(once.trace() - m.trace()) < 1e-12


def test_product_state_pt_is_psd(rng):
    a, b = random_density(2, rng), random_density(3, rng)
    prod = DenseHermitian(np.kron(a.matrix, b.matrix))
    pt = partial_transpose(prod, 2, 3)
    assert np.allclose(pt.matrix, np.kron(a.matrix, b.matrix.T))
    assert min(hermitian_eigenvalues(pt)) > -1e-12


def test_pt_moments():
    assert np.allclose(pt_moments(bell_state(), 2, 2, 3), [1, 1, 0.25], atol=1e-12)
    mixed = DenseHermitian(np.eye(4) / 4)
    assert np.allclose(pt_moments(mixed, 2, 2, 5), [4.0 ** (1 - k) for k in range(1, 6)])


def test_product_pt_moments_equal_plain(rng):
    a, b = random_density(2, rng), random_density(2, rng)
    rho = np.kron(a.matrix, b.matrix)
    plain = [np.trace(np.linalg.matrix_power(rho, k)).real for k in range(1, 5)]
    assert np.allclose(pt_moments(DenseHermitian(rho), 2, 2, 4), plain)


def test_json_round_trip():
    m = werner_state(0.3)
    data = json.loads(m.to_json())
    assert data["dim"] == 4 and len(data["re"]) == 16
    assert np.array_equal(DenseHermitian.from_json(m.to_json()).matrix, m.matrix)


def test_is_density():
    assert bell_state().is_density()
    assert not DenseHermitian(np.eye(2)).is_density()
