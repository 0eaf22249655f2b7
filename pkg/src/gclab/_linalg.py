"""Shared dense linear-algebra helpers: rank decisions, orthonormal bases,
complements and intersections of subspaces given by generator matrices.

Rank decisions use a relative threshold against the largest singular value
(or pivot); everything is desk-scale dense numpy.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

# Relative rank / equality tolerances used across the package.
RANK_RTOL = 1e-9
ABS_TOL = 1e-9


def as_matrix(a, dim: int) -> np.ndarray:
    """Coerce ``a`` to a 2-D float array with ``dim`` rows.

    ``None`` or an empty sequence stands for the zero subspace.
    """
    if a is None:
        return np.zeros((dim, 0))
    m = np.asarray(a, dtype=float)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.shape[0] != dim:
        raise ValueError(f"generator matrix has {m.shape[0]} rows, expected {dim}")
    return m


def orthonormal_columns(a: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal basis for the column span of ``a``, via pivoted QR."""
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.size == 0 or not np.any(a):
        return np.zeros((a.shape[0], 0))
    q, r, _ = scipy.linalg.qr(a, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r)) if r.size else np.array([0.0])
    rank = int(np.sum(diag > rtol * diag[0])) if diag[0] > 0 else 0
    return q[:, :rank]


def null_space(a: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal basis of the null space of ``a`` (columns)."""
    a = np.asarray(a, dtype=float)
    if a.shape[0] == 0:
        return np.eye(a.shape[1])
    u, s, vh = np.linalg.svd(a, full_matrices=True)
    cutoff = rtol * (s[0] if s.size else 0.0)
    rank = int(np.sum(s > cutoff))
    return vh[rank:].T.conj()


def complement_basis(basis: np.ndarray, dim: int, rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of ``span(basis)``."""
    b = as_matrix(basis, dim)
    if b.shape[1] == 0:
        return np.eye(dim)
    return null_space(b.T, rtol)


def projector(basis: np.ndarray) -> np.ndarray:
    """Orthogonal projector onto the column span of an orthonormal ``basis``."""
    if basis.shape[1] == 0:
        return np.zeros((basis.shape[0], basis.shape[0]))
    return basis @ basis.T.conj()


def subspace_intersection(a: np.ndarray, b: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal basis of ``span(a) ∩ span(b)`` for orthonormal inputs.

    Vectors in the intersection are fixed points of the product of the two
    projectors; computed from the eigenvectors of Pa·Pb with eigenvalue 1.
    """
    if a.shape[1] == 0 or b.shape[1] == 0:
        return np.zeros((a.shape[0], 0))
    pa, pb = projector(a), projector(b)
    w, v = np.linalg.eigh(pa @ pb @ pa)
    keep = w > 1 - 1e-10
    if not np.any(keep):
        return np.zeros((a.shape[0], 0))
    return orthonormal_columns(v[:, keep], rtol)


def operator_norm(a: np.ndarray) -> float:
    """Spectral norm of a matrix."""
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def residual_norm(vec: np.ndarray, basis: np.ndarray) -> float:
    """Norm of the component of ``vec`` outside ``span(basis)`` (orthonormal)."""
    if basis.shape[1] == 0:
        return float(np.linalg.norm(vec))
    return float(np.linalg.norm(vec - basis @ (basis.T.conj() @ vec)))
