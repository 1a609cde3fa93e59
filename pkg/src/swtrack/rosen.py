"""Rosenbrock system matrices and their kernels.

For a subsystem (A, B) and a reduced output map C_(k), the Rosenbrock
matrix is R(s) = [sI - A, B; C_(k), 0].  Its right kernel, split into a
state block N and an input block M, carries every eigenvector v (with input
direction w) that a feedback can place at s while keeping C_(k) v = 0.

Both a numeric path (orthonormal kernels at a point) and an exact symbolic
path (polynomial kernel bases in one variable) are provided.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import numlin
from .exact import ExactMatrix, MultiPoly, RatFunc, poly_kernel
from .sysmodel import OutputSelection, Subsystem

SYM = "l"  # placeholder variable for single-subsystem symbolic kernels


@dataclass(frozen=True)
class RosenbrockAt:
    q: int
    k: int
    lam: float
    matrix: np.ndarray


@dataclass(frozen=True)
class KernelBasis:
    """Orthonormal kernel basis split into state rows N and input rows M."""

    N: np.ndarray
    M: np.ndarray

    @property
    def width(self):
        return self.N.shape[1]


@dataclass(frozen=True)
class SymbolicKernel:
    """Polynomial kernel basis in one variable, plus field-rank diagnostics."""

    q: int
    k: int
    N_poly: ExactMatrix
    M_poly: ExactMatrix
    generic_width: int
    rank_deficient: bool

    @property
    def width(self):
        return self.N_poly.cols


def rosenbrock_at(sub: Subsystem, sel: OutputSelection, lam: float) -> RosenbrockAt:
    n = sub.A.shape[0]
    m = sub.B.shape[1]
    R = np.block([[lam * np.eye(n) - sub.A, sub.B],
                  [sel.C_k, np.zeros((sel.p_k, m))]])
    return RosenbrockAt(sub.label, sel.k, float(lam), R)


def kernel_at(sub: Subsystem, sel: OutputSelection, lam: float,
              tol=numlin.DEFAULT_TOL) -> KernelBasis:
    n = sub.A.shape[0]
    R = rosenbrock_at(sub, sel, lam).matrix
    ns = numlin.nullspace(R, tol)
    return KernelBasis(ns.basis[:n, :].copy(), ns.basis[n:, :].copy())


def symbolic_rosenbrock(A_fracs, B_fracs, C_k_fracs, var=SYM) -> ExactMatrix:
    """Exact [sI - A, B; C_k, 0] with polynomial entries in `var`."""
    n = len(A_fracs)
    m = len(B_fracs[0]) if n else 0
    s = MultiPoly.variable(var)
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            e = MultiPoly.constant(-A_fracs[i][j], (var,))
            if i == j:
                e = e + s
            row.append(RatFunc.of(e))
        row.extend(RatFunc.of(Fraction(x)) for x in B_fracs[i])
        rows.append(row)
    for crow in C_k_fracs:
        row = [RatFunc.of(Fraction(x)) for x in crow]
        row.extend(RatFunc.of(0) for _ in range(m))
        rows.append(row)
    if not C_k_fracs:
        pass  # single-output plant with its only row removed: no C block
    return ExactMatrix(rows)


def kernel_symbolic(plant, q: int, k: int) -> SymbolicKernel:
    """Exact polynomial kernel basis of R_q,(k)(s), s symbolic.

    The basis columns are content-normalized polynomials; evaluating them at
    any s that is not an invariant zero spans the same space as kernel_at.
    """
    if not plant.has_exact:
        raise ValueError("symbolic kernels need a plant with exact entries")
    A = plant.exact_matrix(f"A{q}")
    B = plant.exact_matrix(f"B{q}")
    sel = plant.select(k)
    C_k = sel.C_k_exact if sel.C_k_exact is not None else ()
    R = symbolic_rosenbrock(A, B, C_k)
    basis, rank = poly_kernel(R)
    n, m = plant.n, plant.m
    expected = m - sel.p_k
    width = basis.cols
    N = basis.submatrix(range(n), range(width))
    M = basis.submatrix(range(n, n + m), range(width))
    return SymbolicKernel(q, k, N, M, expected, width != expected)


def rstar_lambda(sub: Subsystem, sel: OutputSelection, lam: float,
                 tol=numlin.DEFAULT_TOL) -> numlin.Subspace:
    """State projection of the Rosenbrock kernel: assignable eigenvectors."""
    kb = kernel_at(sub, sel, lam, tol)
    return numlin.orth(kb.N, tol)


def rstar_of_set(sub: Subsystem, sel: OutputSelection, lams,
                 tol=numlin.DEFAULT_TOL) -> numlin.Subspace:
    lams = list(lams)
    if len(set(lams)) != len(lams):
        raise ValueError("eigenvalue set has repeated entries")
    if not lams:
        raise ValueError("empty eigenvalue set")
    return numlin.sum_subspaces(
        [rstar_lambda(sub, sel, lam, tol) for lam in lams], tol)
