"""Dense linear algebra used throughout the package.

Everything here is deterministic and operates on float64 ndarrays. Matrices
are at most a few thousand rows, so spectral routines from LAPACK (through
numpy) are used directly.
"""

from __future__ import annotations

import numpy as np

from .errors import InputError

RANK_TOL = 1e-10


def _as_matrix(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise InputError(f"expected a 2-d matrix, got shape {A.shape}")
    if A.size == 0:
        raise InputError("empty matrix")
    if not np.all(np.isfinite(A)):
        raise InputError("matrix has non-finite entries")
    return A


def _check_symmetric(S: np.ndarray) -> None:
    if S.shape[0] != S.shape[1]:
        raise InputError(f"expected a square matrix, got shape {S.shape}")
    scale = max(np.max(np.abs(S)), 1.0)
    if np.max(np.abs(S - S.T)) > 1e-12 * scale:
        raise InputError("matrix is not symmetric")


def gram(A) -> np.ndarray:
    """Return ``A.T @ A / rows``, the empirical second-moment matrix of the rows."""
    A = _as_matrix(A)
    G = A.T @ A / A.shape[0]
    return 0.5 * (G + G.T)


def eig_sym(S) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix.

    Returns eigenvalues in descending order and the matching orthonormal
    eigenvectors as columns.
    """
    S = _as_matrix(S)
    _check_symmetric(S)
    vals, vecs = np.linalg.eigh(0.5 * (S + S.T))
    order = np.argsort(vals)[::-1]
    return vals[order], vecs[:, order]


def pinv_sqrt_inv(S, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Pseudo-inverse of the symmetric square root of a PSD matrix.

    Eigenvalues above ``rank_tol * lambda_max`` map to ``lambda**-0.5``, the
    rest to zero.
    """
    if not rank_tol > 0:
        raise InputError("rank_tol must be positive")
    vals, vecs = eig_sym(S)
    top = vals[0]
    if top <= 0:
        return np.zeros_like(vecs)
    keep = vals > rank_tol * top
    inv_sqrt = np.zeros_like(vals)
    inv_sqrt[keep] = 1.0 / np.sqrt(vals[keep])
    return (vecs * inv_sqrt) @ vecs.T


def sqrt_psd(S) -> np.ndarray:
    """Symmetric square root of a PSD matrix (negative rounding noise clipped)."""
    vals, vecs = eig_sym(S)
    return (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.T


def pinv_psd(S, rank_tol: float = RANK_TOL) -> np.ndarray:
    vals, vecs = eig_sym(S)
    top = vals[0]
    if top <= 0:
        return np.zeros_like(vecs)
    keep = vals > rank_tol * top
    inv = np.zeros_like(vals)
    inv[keep] = 1.0 / vals[keep]
    return (vecs * inv) @ vecs.T


def lstsq_min_norm(A, y, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Minimum-norm least-squares solution of ``A t ~ y``.

    Computed from a thin SVD; singular values at or below
    ``rank_tol * s_max`` are treated as zero, which keeps exactly-zero
    columns (unvisited partition cells) at coefficient zero.
    """
    A = _as_matrix(A)
    y = np.asarray(y, dtype=float).reshape(-1)
    if y.shape[0] != A.shape[0]:
        raise InputError(f"y has length {y.shape[0]} but A has {A.shape[0]} rows")
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return np.zeros(A.shape[1])
    keep = s > rank_tol * s[0]
    coef = (U[:, keep].T @ y) / s[keep]
    return Vt[keep].T @ coef


def extreme_singular_values(A) -> tuple[float, float]:
    """Smallest and largest singular values of a tall matrix."""
    A = _as_matrix(A)
    if A.shape[0] < A.shape[1]:
        raise InputError(
            f"need rows >= cols for singular-value bounds, got {A.shape}"
        )
    s = np.linalg.svd(A, compute_uv=False)
    return float(s[-1]), float(s[0])
