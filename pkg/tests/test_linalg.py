import numpy as np
import pytest

from cieig.errors import (
    DimensionError,
    IndefiniteBError,
    RankZeroError,
    SingularShiftError,
)
from cieig.linalg import (
    dense_hermitian_gep,
    orthonormalize,
    rank_truncate_svd,
    shifted_factorize,
    solve_block,
)
from cieig.sparse import sparse_matmat

from conftest import diag_pencil


def _solve_residual(pencil, z, rhs):
    f = shifted_factorize(pencil, z)
    y = f.solve(rhs)
    lhs = z * sparse_matmat(pencil.b, y) - sparse_matmat(pencil.a, y)
    return np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs)


def test_factorize_diagonal():
    pencil = diag_pencil([1.0, 3.0])
    f = shifted_factorize(pencil, 2.0)
    e1 = np.array([1.0, 0.0])
    assert np.allclose(f.solve(e1).ravel(), e1, atol=1e-14)


def test_factorize_singular_shift():
    pencil = diag_pencil([1.0, 3.0])
    with pytest.raises(SingularShiftError) as exc:
        shifted_factorize(pencil, 1.0)
    assert exc.value.shift == 1.0


def test_factorize_thermal_residual(thermal10):
    rng = np.random.default_rng(0)
    rhs = rng.standard_normal((thermal10.n, 3)).astype(complex)
    assert _solve_residual(thermal10, 0.5 + 0.5j, rhs) <= 1e-10


def test_factorize_many_shifts(thermal10):
    rng = np.random.default_rng(1)
    rhs = rng.standard_normal((thermal10.n, 2)).astype(complex)
    for k in range(100):
        z = complex(rng.uniform(-50, 50), rng.uniform(0.5, 50))
        assert _solve_residual(thermal10, z, rhs) <= 1e-10, f"shift {z}"


def test_solve_block_diagonal_inverse():
    pencil = diag_pencil([1.0, 3.0])
    f = shifted_factorize(pencil, 2.0)  # factors diag(1, -1)
    y = solve_block(f, np.eye(2))
    assert np.allclose(y, np.diag([1.0, -1.0]), atol=1e-14)


def test_solve_block_empty_rhs():
    pencil = diag_pencil([1.0, 3.0])
    f = shifted_factorize(pencil, 2.0)
    assert solve_block(f, np.zeros((2, 0))).shape == (2, 0)


def test_solve_block_dimension_error():
    pencil = diag_pencil([1.0, 3.0])
    f = shifted_factorize(pencil, 2.0)
    with pytest.raises(DimensionError):
        f.solve(np.ones(3))


def test_orthonormalize_idempotent_on_orthonormal():
    q0 = np.linalg.qr(np.random.default_rng(2).standard_normal((10, 4)))[0]
    q = orthonormalize(q0)
    gram = q.conj().T @ q
    assert np.abs(gram - np.eye(4)).max() <= 1e-12
    # span preserved: projectors coincide
    p0, p1 = q0 @ q0.conj().T, q @ q.conj().T
    assert np.abs(p0 - p1).max() <= 1e-8


def test_orthonormalize_drops_duplicates():
    v = np.random.default_rng(3).standard_normal(20)
    q = orthonormalize(np.column_stack([v, v]), drop_tol=1e-10)
    assert q.shape[1] == 1


def test_orthonormalize_gram_accuracy():
    b = np.random.default_rng(4).standard_normal((50, 8))
    q = orthonormalize(b)
    assert np.abs(q.conj().T @ q - np.eye(q.shape[1])).max() <= 1e-12


def test_orthonormalize_rank_zero():
    with pytest.raises(RankZeroError):
        orthonormalize(np.zeros((5, 3)))


def test_rank_truncate_rank_one():
    u = np.random.default_rng(5).standard_normal(12)
    v = np.random.default_rng(6).standard_normal(4)
    q = rank_truncate_svd(np.outer(u, v), rel_tol=1e-8)
    assert q.shape[1] == 1


def test_rank_truncate_orthonormal_keeps_all():
    q0 = np.linalg.qr(np.random.default_rng(7).standard_normal((10, 5)))[0]
    q = rank_truncate_svd(q0)
    assert q.shape[1] == 5
    p0, p1 = q0 @ q0.conj().T, q @ q.conj().T
    assert np.abs(p0 - p1).max() <= 1e-8


def test_rank_truncate_near_duplicate():
    rng = np.random.default_rng(8)
    v = rng.standard_normal(30)
    w = rng.standard_normal(30)
    q = rank_truncate_svd(np.column_stack([v, v + 1e-12 * w]), rel_tol=1e-8)
    assert q.shape[1] == 1


def test_rank_truncate_zero_block():
    with pytest.raises(RankZeroError):
        rank_truncate_svd(np.zeros((4, 2)))


def test_gep_diagonal():
    w, _ = dense_hermitian_gep(np.diag([3.0, 1.0]), np.eye(2))
    assert np.allclose(w, [1.0, 3.0], atol=1e-14)


def test_gep_reciprocal_scaling():
    w, _ = dense_hermitian_gep(np.eye(2), np.diag([2.0, 4.0]))
    assert np.allclose(np.sort(w), [0.25, 0.5], atol=1e-14)


def test_gep_random_residuals():
    rng = np.random.default_rng(9)
    x = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    a = x + x.conj().T
    y = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    b = y @ y.conj().T + 6 * np.eye(6)
    w, v = dense_hermitian_gep(a, b)
    for i in range(6):
        r = np.linalg.norm(a @ v[:, i] - w[i] * (b @ v[:, i]))
        assert r <= 1e-10 * (np.linalg.norm(a) + abs(w[i]) * np.linalg.norm(b))
    # b-orthonormal eigenvectors
    assert np.abs(v.conj().T @ b @ v - np.eye(6)).max() <= 1e-10


def test_gep_congruence_invariance():
    rng = np.random.default_rng(10)
    x = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    a = x + x.conj().T
    y = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    b = y @ y.conj().T + 6 * np.eye(6)
    t = rng.standard_normal((6, 6)) + 0.1 * np.eye(6)
    w1, _ = dense_hermitian_gep(a, b)
    w2, _ = dense_hermitian_gep(t.conj().T @ a @ t, t.conj().T @ b @ t)
    assert np.abs(w1 - w2).max() <= 1e-10 * max(1.0, np.abs(w1).max())


def test_gep_indefinite_b():
    with pytest.raises(IndefiniteBError):
        dense_hermitian_gep(np.eye(2), np.diag([1.0, -1.0]))
