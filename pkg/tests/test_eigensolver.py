import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from darkstate_lab.eigensolver import eig, hessenberg, schur


def _random(n, seed):
    rng = np.random.default_rng(seed)
    return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12), st.integers(0, 2**31 - 1))
def test_eigenvalues_match_numpy(n, seed):
    a = _random(n, seed)
    lam, _ = eig(a)
    ref = np.linalg.eigvals(a)
    cost = np.abs(lam[:, None] - ref[None, :])
    assert np.allclose(np.sort(cost.min(axis=1)), 0, atol=1e-9 * max(1, np.abs(a).max()))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12), st.integers(0, 2**31 - 1))
def test_eigenvector_residuals(n, seed):
    a = _random(n, seed)
    lam, vecs = eig(a)
    norm = np.linalg.norm(a)
    for k in range(n):
        v = vecs[:, k]
        assert np.linalg.norm(v) == pytest.approx(1.0)
        assert np.linalg.norm(a @ v - lam[k] * v) <= 1e-9 * norm


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 10), st.integers(0, 2**31 - 1))
def test_hessenberg_similarity(n, seed):
    a = _random(n, seed)
    h, q = hessenberg(a)
    assert np.allclose(q.conj().T @ q, np.eye(n), atol=1e-12)
    assert np.allclose(q @ h @ q.conj().T, a, atol=1e-10)
    assert np.allclose(np.tril(h, -2), 0)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 10), st.integers(0, 2**31 - 1))
def test_schur_form(n, seed):
    a = _random(n, seed)
    t, z = schur(a)
    assert np.allclose(np.tril(t, -1), 0, atol=1e-12)
    assert np.allclose(z @ t @ z.conj().T, a, atol=1e-10)


def test_diagonal_and_defective_inputs():
    lam, _ = eig(np.diag([3.0, 1.0, 2.0]))
    assert sorted(lam.real) == pytest.approx([1, 2, 3])
    jordan = np.array([[1.0, 1.0], [0.0, 1.0]])
    lam, vecs = eig(jordan)
    assert np.allclose(lam, 1.0)
    assert np.all(np.isfinite(vecs))


def test_rejects_non_square():
    with pytest.raises(ValueError):
        eig(np.zeros((2, 3)))
