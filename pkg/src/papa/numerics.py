"""Small complex linear-algebra layer shared by the solvers.

Vectors and matrices are plain numpy arrays (complex128 where it matters).
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

HERMITIAN_TOL = 1e-10


class NumericsError(ValueError):
    pass


class NotHermitian(NumericsError):
    pass


class NotPositiveDefinite(NumericsError):
    pass


class DimensionMismatch(NumericsError):
    pass


class EmptyMatrix(NumericsError):
    pass


def solve_hpd(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve ``A x = b`` for Hermitian positive-definite ``A`` via Cholesky."""
    A = np.asarray(A)
    b = np.asarray(b)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {A.shape}")
    if b.shape[0] != A.shape[0]:
        raise DimensionMismatch(f"matrix is {A.shape}, right-hand side is {b.shape}")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
        raise NumericsError("non-finite entries")
    # absolute for unit-scale matrices, relative for the tiny noise-power scales used in the solvers
    asym = np.max(np.abs(A - A.conj().T), initial=0.0)
    if asym > HERMITIAN_TOL * max(1.0, np.max(np.abs(A), initial=0.0)):
        raise NotHermitian(f"max |A - A^H| = {asym:.3e}")
    try:
        factor = scipy.linalg.cho_factor(A, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from exc
    return scipy.linalg.cho_solve(factor, b, check_finite=False)


def spectral_norm(A: np.ndarray, tol: float = 1e-10, max_iter: int = 10_000) -> float:
    """Largest singular value by power iteration on the smaller Gram matrix.

    The start vector is all-ones so results are reproducible. If that start is
    annihilated by the Gram matrix, a fixed-seed random start is used instead.
    """
    A = np.asarray(A)
    if A.size == 0:
        raise EmptyMatrix("spectral norm of an empty matrix")
    if A.ndim == 1:
        A = A[:, None]
    gram = A.conj().T @ A if A.shape[1] <= A.shape[0] else A @ A.conj().T
    n = gram.shape[0]
    if not np.any(gram):
        return 0.0

    starts = [np.ones(n, dtype=complex)]
    rng = np.random.default_rng(0)
    starts.append(rng.standard_normal(n) + 1j * rng.standard_normal(n))
    for x in starts:
        x = x / np.linalg.norm(x)
        y = gram @ x
        if np.linalg.norm(y) <= 1e-14 * np.max(np.abs(gram)):
            continue
        lam = np.vdot(x, y).real
        for _ in range(max_iter):
            x = y / np.linalg.norm(y)
            y = gram @ x
            lam_new = np.vdot(x, y).real
            if abs(lam_new - lam) <= tol * abs(lam_new):
                lam = lam_new
                break
            lam = lam_new
        return float(np.sqrt(max(lam, 0.0)))
    return 0.0


def norm2(x: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(x).ravel()))
