"""Floating-point dense linear algebra helpers.

Thin, tolerance-explicit wrappers around numpy's SVD-based kernels:
numerical rank, orthonormal nullspaces and column spans, guarded linear
solves, and sums of subspaces.  All functions are pure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_TOL = 1e-9


class SingularMatrix(np.linalg.LinAlgError):
    def __init__(self, cond):
        self.cond = cond
        super().__init__(f"matrix is numerically singular (cond ~ {cond:.3e})")


@dataclass(frozen=True)
class Subspace:
    """A subspace of R^ambient_dim given by an orthonormal column basis."""

    basis: np.ndarray
    ambient_dim: int

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=float)
        object.__setattr__(self, "basis", b)
        if b.ndim != 2 or b.shape[0] != self.ambient_dim:
            raise ValueError("basis shape inconsistent with ambient dimension")

    @property
    def dim(self):
        return self.basis.shape[1]

    def contains(self, v, tol=1e-7):
        v = np.asarray(v, dtype=float)
        nv = np.linalg.norm(v)
        if nv == 0:
            return True
        resid = v - self.basis @ (self.basis.T @ v)
        return np.linalg.norm(resid) <= tol * nv


def rank_tol(A, rel_tol=DEFAULT_TOL) -> int:
    """Singular values above rel_tol times the largest one."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rel_tol * s[0]))


def nullspace(A, rel_tol=DEFAULT_TOL) -> Subspace:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    n = A.shape[1]
    if A.size == 0:
        return Subspace(np.eye(n), n)
    _, s, vt = np.linalg.svd(A)
    rank = int(np.sum(s > rel_tol * s[0])) if s.size and s[0] > 0 else 0
    return Subspace(vt[rank:].T.copy(), n)


def orth(A, rel_tol=DEFAULT_TOL) -> Subspace:
    """Orthonormal basis of the column span."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    m = A.shape[0]
    if A.shape[1] == 0 or not np.any(A):
        return Subspace(np.zeros((m, 0)), m)
    u, s, _ = np.linalg.svd(A, full_matrices=False)
    rank = int(np.sum(s > rel_tol * s[0]))
    return Subspace(u[:, :rank].copy(), m)


def solve(A, B):
    """Solve A X = B with an explicit conditioning guard."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape[0] != A.shape[1]:
        raise ValueError("solve expects a square matrix")
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond >= 1.0 / (100 * np.finfo(float).eps):
        raise SingularMatrix(cond)
    return np.linalg.solve(A, B)

def sum_subspaces(subspaces, rel_tol=DEFAULT_TOL) -> Subspace:
    subspaces = list(subspaces)
    if not subspaces:
        raise ValueError("empty subspace list")
    n = subspaces[0].ambient_dim
    if any(s.ambient_dim != n for s in subspaces):
        raise ValueError("ambient dimension mismatch")
    stacked = np.hstack([s.basis for s in subspaces])
    return orth(stacked, rel_tol)


def principal_angles(S1: Subspace, S2: Subspace) -> np.ndarray:
    """Principal angles (radians) between two subspaces of equal dimension."""
    if S1.dim == 0 or S2.dim == 0:
        return np.zeros(0)
    s = np.linalg.svd(S1.basis.T @ S2.basis, compute_uv=False)
    return np.arccos(np.clip(s, -1.0, 1.0))
