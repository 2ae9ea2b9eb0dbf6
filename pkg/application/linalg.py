"""Dense complex linear-algebra primitives with explicit tolerances"""

from typing import Tuple

import numpy as np
import scipy.linalg

from application.errors import NotHermitianError, RankDeficientError

TOL_HERM = 1e-12
TOL_RANK = 1e-10


def as_matrix(a) -> np.ndarray:
    """Return ``a`` as a finite 2-D complex array (a copy)"""
    m = np.array(a, dtype=complex)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got an array with {m.ndim} dimensions")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def hermitian_asymmetry(m: np.ndarray) -> float:
    """Largest |M - M^H| entry relative to the largest |M| entry"""
    scale = float(np.max(np.abs(m))) if m.size else 0.0
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(m - m.conj().T))) / scale


def is_hermitian(m: np.ndarray, tol: float = TOL_HERM) -> bool:
    """Square with a relative asymmetry (see ``hermitian_asymmetry``) at most ``tol``"""
    return m.ndim == 2 and m.shape[0] == m.shape[1] and hermitian_asymmetry(m) <= tol


def hermitize(m: np.ndarray) -> np.ndarray:
    """Symmetric part (M + M^H) / 2"""
    return 0.5 * (m + m.conj().T)


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    # first entry of magnitude above 1e-8 made real positive
    out = vectors.copy()
    for i in range(out.shape[1]):
        column = out[:, i]
        idx = np.flatnonzero(np.abs(column) > 1e-8)
        if idx.size:
            pivot = column[idx[0]]
            out[:, i] = column * (abs(pivot) / pivot)
    return out


def hermitian_eig(m, tol: float = TOL_HERM) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eigendecomposition of a Hermitian matrix

    Args:
        m: Hermitian matrix (within ``tol`` relative to its largest entry)
        tol: Hermitian tolerance

    Returns:
        Tuple of (eigenvalues sorted descending, unitary matrix of eigenvectors).
        Each eigenvector is phase-normalized so its first significant entry is real
        and positive; within a repeated eigenvalue any orthonormal basis may come back.
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise NotHermitianError(float("inf"), tol)
    asym = hermitian_asymmetry(m)
    if asym > tol:
        raise NotHermitianError(asym, tol)
    values, vectors = scipy.linalg.eigh(hermitize(m))
    order = np.argsort(-values, kind="stable")
    return values[order], _fix_phases(vectors[:, order])


def pseudoinverse(g, tol_rank: float = TOL_RANK) -> np.ndarray:
    """
    Moore-Penrose pseudoinverse via the SVD

    Singular values below ``tol_rank * sigma_max`` are treated as zero; the zero
    matrix maps to the zero matrix of transposed shape.
    """
    g = as_matrix(g)
    u, s, vh = scipy.linalg.svd(g, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((g.shape[1], g.shape[0]), dtype=complex)
    keep = s > tol_rank * s[0]
    return (vh[keep].conj().T / s[keep]) @ u[:, keep].conj().T


def column_rank(u: np.ndarray, tol_rank: float = TOL_RANK) -> int:
    """
    Numerical column rank

    Args:
        u: matrix to inspect
        tol_rank: singular values below ``tol_rank`` times the largest count as zero

    Returns:
        Number of significant singular values (0 for an empty or zero matrix)
    """
    if u.size == 0:
        return 0
    s = scipy.linalg.svdvals(u)
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol_rank * s[0]))


def require_full_column_rank(u: np.ndarray, tol_rank: float = TOL_RANK, what: str = "matrix") -> None:
    """
    Check that ``u`` is tall with independent columns

    Args:
        u: matrix to check
        tol_rank: relative rank tolerance
        what: name used in the error message

    Raises:
        RankDeficientError: when u is wide or its column rank is short
    """
    rank = column_rank(u, tol_rank)
    if u.shape[1] > u.shape[0] or rank < u.shape[1]:
        raise RankDeficientError(u.shape, rank, what)


def orth_complement_projector(u, tol_rank: float = TOL_RANK) -> np.ndarray:
    """
    Orthogonal projector onto R(U)^perp, i.e. I - U (U^H U)^{-1} U^H

    Args:
        u: full column rank matrix (an n x 0 matrix gives the identity)
        tol_rank: relative rank tolerance

    Returns:
        Hermitian idempotent matrix annihilating U
    """
    u = as_matrix(u) if np.size(u) else np.zeros((np.shape(u)[0], 0), dtype=complex)
    n = u.shape[0]
    if u.shape[1] == 0:
        return np.eye(n, dtype=complex)
    require_full_column_rank(u, tol_rank, "null matrix")
    q, _ = scipy.linalg.qr(u, mode="economic")
    return hermitize(np.eye(n, dtype=complex) - q @ q.conj().T)


def orth_complement_basis(u, tol_rank: float = TOL_RANK) -> np.ndarray:
    """
    Orthonormal basis of R(U)^perp taken from an SVD of U^H

    An n x 0 (empty) U gives the n x n identity.
    """
    u = as_matrix(u) if np.size(u) else np.zeros((np.shape(u)[0], 0), dtype=complex)
    n = u.shape[0]
    if u.shape[1] == 0:
        return np.eye(n, dtype=complex)
    require_full_column_rank(u, tol_rank, "direction matrix")
    return scipy.linalg.null_space(u.conj().T, rcond=tol_rank)


def spectral_radius(m) -> float:
    """Largest eigenvalue modulus of a square matrix"""
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"spectral radius needs a square matrix, got {m.shape}")
    if m.size == 0 or not np.any(m):
        return 0.0
    return float(np.max(np.abs(scipy.linalg.eigvals(m))))


def min_eigenvalue(m: np.ndarray) -> float:
    """Smallest eigenvalue of the Hermitian part of ``m`` (0 for an empty matrix)"""
    return float(scipy.linalg.eigvalsh(hermitize(m))[0]) if m.size else 0.0


def max_eigenvalue(m: np.ndarray) -> float:
    """Largest eigenvalue of the Hermitian part of ``m`` (0 for an empty matrix)"""
    return float(scipy.linalg.eigvalsh(hermitize(m))[-1]) if m.size else 0.0
