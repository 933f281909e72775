"""Complex dense linear algebra primitives.

Matrices are plain 2-D complex128 numpy arrays.  The only nontrivial
routine is the right pseudo-inverse used by the interference-cancelling
precoder; it goes through the normal equations A @ A^H with an explicit
Cholesky factorization so rank deficiency can be detected from the pivot
ratio instead of an SVD.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "RankDeficientError",
    "as_cmatrix",
    "matmul",
    "hermitian",
    "kron",
    "diag_embed",
    "trace",
    "right_pinv",
]

# smallest admissible Cholesky pivot, relative to the largest one
_PIVOT_RTOL = 1e-10


class RankDeficientError(np.linalg.LinAlgError):
    """The matrix handed to right_pinv is (numerically) row-rank deficient."""


def as_cmatrix(a) -> np.ndarray:
    """Coerce to a finite 2-D complex128 array, validating shape and entries."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={m.ndim}")
    if m.size and not np.all(np.isfinite(m)):
        raise ValueError("matrix contains non-finite entries")
    return m


def matmul(a, b) -> np.ndarray:
    a = as_cmatrix(a)
    b = as_cmatrix(b)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    return a @ b


def hermitian(a) -> np.ndarray:
    """Conjugate transpose."""
    return as_cmatrix(a).conj().T


def kron(a, b) -> np.ndarray:
    return np.kron(as_cmatrix(a), as_cmatrix(b))


def diag_embed(v) -> np.ndarray:
    """Square diagonal matrix with the entries of ``v`` on its diagonal."""
    v = np.asarray(v, dtype=np.complex128)
    if v.ndim != 1:
        raise ValueError("diag_embed expects a 1-D vector")
    return np.diag(v)


def trace(a) -> complex:
    a = as_cmatrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"trace requires a square matrix, got {a.shape}")
    return complex(np.trace(a))


def _cholesky_lower(b: np.ndarray) -> np.ndarray:
    """Cholesky factor of a Hermitian positive-definite matrix.

    Raises RankDeficientError when the smallest pivot falls below
    _PIVOT_RTOL times the largest, which is how a rank-deficient A
    manifests in B = A A^H.
    """
    n = b.shape[0]
    low = np.zeros_like(b)
    pivots = np.empty(n)
    for k in range(n):
        d = b[k, k].real - np.sum(np.abs(low[k, :k]) ** 2)
        pivots[k] = d
        if d <= 0 or (k > 0 and d < _PIVOT_RTOL * pivots[: k + 1].max()):
            raise RankDeficientError(
                f"pivot {k} of the normal-equations matrix is {d:.3e}"
            )
        low[k, k] = np.sqrt(d)
        if k + 1 < n:
            low[k + 1 :, k] = (
                b[k + 1 :, k] - low[k + 1 :, :k] @ low[k, :k].conj()
            ) / low[k, k]
    if pivots.min() < _PIVOT_RTOL * pivots.max():
        raise RankDeficientError(
            f"pivot ratio {pivots.min() / pivots.max():.3e} below {_PIVOT_RTOL:.0e}"
        )
    return low


def _solve_cholesky(low: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve (L L^H) x = rhs by forward and back substitution."""
    n = low.shape[0]
    y = np.zeros_like(rhs)
    for i in range(n):
        y[i] = (rhs[i] - low[i, :i] @ y[:i]) / low[i, i]
    x = np.zeros_like(rhs)
    for i in range(n - 1, -1, -1):
        x[i] = (y[i] - low[i + 1 :, i].conj() @ x[i + 1 :]) / low[i, i].real
    return x


def right_pinv(a) -> np.ndarray:
    """Right pseudo-inverse A^+ = A^H (A A^H)^{-1} of a fat full-row-rank matrix.

    Satisfies A @ right_pinv(A) == I.  Raises RankDeficientError when the
    rows are numerically dependent.
    """
    a = as_cmatrix(a)
    rows, cols = a.shape
    if rows > cols:
        raise ValueError(f"right_pinv needs rows <= cols, got {a.shape}")
    gram = a @ a.conj().T
    low = _cholesky_lower(gram)
    inv_gram = _solve_cholesky(low, np.eye(rows, dtype=np.complex128))
    return a.conj().T @ inv_gram
