import numpy as np
import pytest

from pexcite import linalg
from pexcite.linalg import (
    AsymmetricMatrixError,
    LyapunovSolveError,
    NonFiniteError,
    SingularMatrixError,
    rank_tol,
    solve_linear,
    solve_lyapunov,
    sym_eig,
)


class TestSymEig:
    def test_identity(self):
        w, v = sym_eig(np.eye(2))
        assert np.allclose(w, [1.0, 1.0])
        assert np.allclose(v @ v.T, np.eye(2))

    def test_diagonal_entries_are_eigenvalues(self):
        w, _ = sym_eig(np.diag([1.0, 10.0]))
        assert np.allclose(w, [1.0, 10.0], atol=1e-12)

    def test_analytic_2x2(self):
        w, _ = sym_eig(np.array([[2.0, 1.0], [1.0, 2.0]]))
        assert np.allclose(w, [1.0, 3.0], atol=1e-12)

    def test_eigenvalues_ascending(self):
        rng = np.random.default_rng(7)
        s = rng.standard_normal((6, 6))
        s = s + s.T
        w, _ = sym_eig(s)
        assert np.all(np.diff(w) >= 0.0)

    def test_asymmetric_rejected(self):
        with pytest.raises(AsymmetricMatrixError):
            sym_eig(np.array([[1.0, 2.0], [0.0, 1.0]]))

    def test_non_square_rejected(self):
        with pytest.raises(AsymmetricMatrixError):
            sym_eig(np.ones((2, 3)))

    def test_nan_rejected(self):
        with pytest.raises(NonFiniteError):
            sym_eig(np.array([[np.nan, 0.0], [0.0, 1.0]]))

    def test_reconstruction_and_orthonormality_random(self):
        rng = np.random.default_rng(42)
        for _ in range(100):
            size = rng.integers(1, 9)
            s = rng.standard_normal((size, size))
            s = 0.5 * (s + s.T)
            w, v = sym_eig(s)
            scale = 1.0 + np.linalg.norm(s, "fro")
            assert np.linalg.norm(v @ np.diag(w) @ v.T - s, "fro") <= 1e-10 * scale
            assert np.linalg.norm(v.T @ v - np.eye(size), "fro") <= 1e-10

    def test_similarity_invariance(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            size = rng.integers(2, 7)
            s = rng.standard_normal((size, size))
            s = 0.5 * (s + s.T)
            q, _ = np.linalg.qr(rng.standard_normal((size, size)))
            w1, _ = sym_eig(s)
            w2, _ = sym_eig(q.T @ s @ q)
            assert np.allclose(w1, w2, atol=1e-10)


class TestSolveLyapunov:
    def test_scaled_identity(self):
        p = solve_lyapunov(-0.5 * np.eye(2), np.eye(2))
        assert np.allclose(p, np.eye(2), atol=1e-12)

    def test_demo_reference_pair(self):
        a_r = np.array([[0.0, 1.0], [-4.0, -4.0]])
        p = solve_lyapunov(a_r, np.diag([1.0, 10.0]))
        expected = np.array([[5.625, 0.125], [0.125, 1.28125]])
        assert np.allclose(p, expected, atol=1e-12)

    def test_scalar(self):
        p = solve_lyapunov(np.array([[-1.0]]), np.array([[2.0]]))
        assert np.allclose(p, [[1.0]])

    def test_mirrored_eigenvalues_rejected(self):
        with pytest.raises(LyapunovSolveError):
            solve_lyapunov(np.diag([1.0, -1.0]), np.eye(2))

    def test_unstable_a_rejected(self):
        # Kronecker system nonsingular but the solution is indefinite
        with pytest.raises(LyapunovSolveError):
            solve_lyapunov(np.eye(2), np.eye(2))

    def test_non_pd_q_rejected(self):
        with pytest.raises(linalg.LinalgError):
            solve_lyapunov(-np.eye(2), np.diag([1.0, 0.0]))

    def test_random_hurwitz_pairs(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            size = rng.integers(1, 7)
            m = rng.standard_normal((size, size))
            skew = rng.standard_normal((size, size))
            a_r = -m.T @ m - np.eye(size) + (skew - skew.T)
            c = rng.standard_normal((size, size))
            q = c.T @ c + 0.5 * np.eye(size)
            p = solve_lyapunov(a_r, q)
            resid = np.linalg.norm(p @ a_r + a_r.T @ p + q, "fro")
            assert resid <= 1e-9 * (1.0 + np.linalg.norm(q, "fro"))
            assert np.linalg.eigvalsh(p).min() > 0.0


class TestRankTol:
    def test_identity(self):
        assert rank_tol(np.eye(2)) == 2

    def test_zero_matrix(self):
        assert rank_tol(np.zeros((3, 2))) == 0

    def test_dependent_rows(self):
        assert rank_tol(np.array([[1.0, 2.0], [2.0, 4.0]])) == 1

    def test_transpose_invariance(self):
        rng = np.random.default_rng(5)
        for _ in range(30):
            m = rng.standard_normal((rng.integers(1, 6), rng.integers(1, 6)))
            if rng.random() < 0.3:
                m[-1] = m[0]  # force a dependency sometimes
            assert rank_tol(m) == rank_tol(m.T)

    def test_bad_tol_rejected(self):
        with pytest.raises(linalg.LinalgError):
            rank_tol(np.eye(2), tol=0.0)


class TestSolveLinear:
    def test_identity(self):
        v = np.array([3.0, -2.0])
        assert np.allclose(solve_linear(np.eye(2), v), v)

    def test_analytic_2x2(self):
        a = np.array([[0.0, 1.0], [-4.0, -4.0]])
        x = solve_linear(a, np.array([0.0, 0.75]))
        assert np.allclose(x, [-0.1875, 0.0], atol=1e-14)

    def test_diagonal(self):
        x = solve_linear(np.diag([2.0, 4.0]), np.array([2.0, 4.0]))
        assert np.allclose(x, [1.0, 1.0])

    def test_singular_rejected(self):
        with pytest.raises(SingularMatrixError):
            solve_linear(np.array([[1.0, 2.0], [2.0, 4.0]]), np.array([1.0, 1.0]))

    def test_matrix_rhs(self):
        a = np.array([[2.0, 0.0], [0.0, 4.0]])
        rhs = np.array([[2.0, 4.0], [4.0, 8.0]])
        assert np.allclose(solve_linear(a, rhs), [[1.0, 2.0], [1.0, 2.0]])
