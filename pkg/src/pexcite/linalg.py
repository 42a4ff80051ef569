"""Small dense linear-algebra helpers used across the package.

Everything here operates on plain float64 numpy arrays a few tens of rows
at most, so robustness and clear failure modes matter more than speed.
All functions validate their inputs (finite entries, expected shapes) and
raise typed errors instead of letting LAPACK produce garbage silently.
"""

import numpy as np

DEFAULT_RANK_TOL = 1e-8

# relative tolerance for accepting a matrix as symmetric
SYMMETRY_RTOL = 1e-12


class LinalgError(ValueError):
    """Base class for linear-algebra input/solve failures."""


class NonFiniteError(LinalgError):
    """A matrix contains NaN or Inf entries."""


class AsymmetricMatrixError(LinalgError):
    """A matrix required to be symmetric is not, beyond tolerance."""


class SingularMatrixError(LinalgError):
    """A linear system has no reliable solution."""


class LyapunovSolveError(LinalgError):
    """The continuous Lyapunov equation has no unique PD solution."""


def as_matrix(a, name="matrix"):
    """Coerce to a 2-D float64 array, rejecting non-finite entries."""
    m = np.asarray(a, dtype=float)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise LinalgError(f"{name}: expected a 2-D array, got ndim={m.ndim}")
    if m.size == 0:
        raise LinalgError(f"{name}: empty matrix")
    if not np.isfinite(m).all():
        raise NonFiniteError(f"{name}: contains NaN or Inf entries")
    return m


def _require_symmetric(m, name):
    if m.shape[0] != m.shape[1]:
        raise AsymmetricMatrixError(f"{name}: not square, shape {m.shape}")
    scale = 1.0 + np.linalg.norm(m, "fro")
    skew = np.abs(m - m.T).max()
    if skew > SYMMETRY_RTOL * scale:
        raise AsymmetricMatrixError(
            f"{name}: asymmetry {skew:.3e} exceeds {SYMMETRY_RTOL:.0e}*(1+||.||_F)"
        )


def sym_eig(s):
    """Eigendecomposition of a symmetric matrix.

    Returns (eigenvalues ascending, eigenvectors as orthonormal columns)
    with S = V diag(w) V^T.
    """
    m = as_matrix(s, "sym_eig input")
    _require_symmetric(m, "sym_eig input")
    sym = 0.5 * (m + m.T)
    w, v = np.linalg.eigh(sym)
    return w, v


def solve_linear(a, rhs):
    """Solve A X = rhs for square A, failing loudly near singularity."""
    am = as_matrix(a, "solve_linear A")
    rhs_arr = np.asarray(rhs, dtype=float)
    if not np.isfinite(rhs_arr).all():
        raise NonFiniteError("solve_linear rhs: contains NaN or Inf entries")
    if am.shape[0] != am.shape[1]:
        raise LinalgError(f"solve_linear: A must be square, got {am.shape}")
    vec_rhs = rhs_arr.ndim == 1
    b = rhs_arr.reshape(am.shape[0], -1) if vec_rhs else rhs_arr
    if b.shape[0] != am.shape[0]:
        raise LinalgError(
            f"solve_linear: rhs has {b.shape[0]} rows, expected {am.shape[0]}"
        )

    sv = np.linalg.svd(am, compute_uv=False)
    if sv[0] == 0.0 or sv[-1] <= 1e-14 * sv[0]:
        raise SingularMatrixError(
            f"solve_linear: matrix is singular to working precision "
            f"(sigma_min/sigma_max = {sv[-1] / max(sv[0], 1e-300):.3e})"
        )
    x = np.linalg.solve(am, b)
    resid = np.linalg.norm(am @ x - b, "fro")
    if resid > 1e-10 * (1.0 + np.linalg.norm(b, "fro")):
        raise SingularMatrixError(
            f"solve_linear: residual {resid:.3e} too large, system ill-conditioned"
        )
    return x[:, 0] if vec_rhs else x


def solve_lyapunov(a_r, q):
    """Solve P A_r + A_r^T P = -Q for symmetric positive-definite P.

    Solved through the Kronecker-vectorized linear system; sizes here are
    tiny so the O(n^6) cost is irrelevant. Requires A_r Hurwitz (otherwise
    the system is singular or P comes out indefinite) and Q symmetric PD.
    """
    a = as_matrix(a_r, "solve_lyapunov A_r")
    qm = as_matrix(q, "solve_lyapunov Q")
    n = a.shape[0]
    if a.shape[0] != a.shape[1]:
        raise LinalgError(f"solve_lyapunov: A_r must be square, got {a.shape}")
    if qm.shape != (n, n):
        raise LinalgError(
            f"solve_lyapunov: Q shape {qm.shape} does not match A_r {a.shape}"
        )
    _require_symmetric(qm, "solve_lyapunov Q")
    if np.linalg.eigvalsh(0.5 * (qm + qm.T)).min() <= 0.0:
        raise LinalgError("solve_lyapunov: Q must be positive definite")

    # vec(P A_r) = (A_r^T (x) I) vec(P), vec(A_r^T P) = (I (x) A_r^T) vec(P)
    # with column-major vec.
    eye = np.eye(n)
    kron = np.kron(a.T, eye) + np.kron(eye, a.T)
    try:
        vec_p = solve_linear(kron, -qm.reshape(n * n, order="F"))
    except SingularMatrixError as exc:
        raise LyapunovSolveError(
            "solve_lyapunov: no unique solution (A_r has mirrored eigenvalues "
            "or is not Hurwitz)"
        ) from exc
    p = 0.5 * (vec_p.reshape((n, n), order="F") + vec_p.reshape((n, n), order="F").T)

    resid = np.linalg.norm(p @ a + a.T @ p + qm, "fro")
    if resid > 1e-9 * (1.0 + np.linalg.norm(qm, "fro")):
        raise LyapunovSolveError(
            f"solve_lyapunov: residual {resid:.3e} too large, solve unreliable"
        )
    if np.linalg.eigvalsh(p).min() <= 0.0:
        raise LyapunovSolveError(
            "solve_lyapunov: solution is not positive definite (A_r not Hurwitz)"
        )
    return p


def rank_tol(m, tol=DEFAULT_RANK_TOL):
    """Numerical rank: singular values above tol * sigma_max.

    The zero matrix has rank 0 regardless of tol.
    """
    mm = as_matrix(m, "rank_tol input")
    if tol <= 0.0:
        raise LinalgError(f"rank_tol: tol must be > 0, got {tol}")
    sv = np.linalg.svd(mm, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.count_nonzero(sv > tol * sv[0]))
