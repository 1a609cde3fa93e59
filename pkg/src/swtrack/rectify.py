"""Shared-eigenvector machinery for the two subsystems.

For each output slot k the assignable shared eigenvectors at an eigenvalue
pair (l1, l2) form the intersection im N_1,(k)(l1) ∩ im N_2,(k)(l2) of the
two Rosenbrock-kernel state projections.  This module computes

* numeric intersection bases at a point,
* the exact reduced row-echelon form of [N_1,(k)(l1)  N_2,(k)(l2)] with its
  transform T_(k), whose degeneration locus carves out the admissible
  eigenvalue pairs,
* the rational intersection representation Q_(k)(l1, l2), its polynomial
  clearing P_(k) with coefficient matrices, and the feasibility numbers
  d_(k) = rank of the stacked coefficients,
* a seeded sampling estimator for d_(k) used as a cross-check and as the
  fallback when no exact plant data is available.

All exact results are cached per output index behind a lock; the cached
values are immutable, so concurrent readers are safe.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import numlin, rosen
from .exact import (ExactMatrix, MultiPoly, RatFunc, LAMBDA1, LAMBDA2,
                    poly_str, rank_fractions, rref_with_transform)
from .sysmodel import SwitchedPlant


class SpectrumCollision(ValueError):
    def __init__(self, q, lam):
        self.q = q
        self.lam = lam
        super().__init__(f"lambda={lam} collides with the spectrum of A{q}")


class SingularTransform(RuntimeError):
    """The echelon transform degenerates over the whole parameter plane."""


@dataclass(frozen=True)
class IntersectionBasis:
    k: int
    lam1: float
    lam2: float
    vectors: np.ndarray  # n x width, orthonormal

    @property
    def width(self):
        return self.vectors.shape[1]


@dataclass(frozen=True)
class PairLocus:
    """Excluded eigenvalue pairs for output slot k.

    A pair is admissible when it avoids both open-loop spectra and every
    zero set in `factors`.  `curve` is the product of the factors that
    couple l1 and l2 (the paper-style excluded curve); factors in a single
    variable are kept separately in `lines`.
    """

    k: int
    factors: tuple
    curve: MultiPoly
    lines: tuple
    spectrum1: np.ndarray
    spectrum2: np.ndarray

    def curve_str(self):
        return poly_str(self.curve)

    def admissible_exact(self, lam1, lam2) -> bool:
        """Off the excluded curve (spectra are checked numerically elsewhere)."""
        point = {LAMBDA1: Fraction(lam1), LAMBDA2: Fraction(lam2)}
        return self.curve.evaluate(point) != 0

    def representation_valid(self, lam1, lam2) -> bool:
        """Off every pivot factor: the symbolic Q can be evaluated here."""
        point = {LAMBDA1: Fraction(lam1), LAMBDA2: Fraction(lam2)}
        return all(f.evaluate(point) != 0 for f in self.factors)


@dataclass(frozen=True)
class EchelonForm:
    k: int
    T: ExactMatrix
    E: ExactMatrix
    pivots: tuple
    E11: ExactMatrix
    E12: ExactMatrix
    E22: ExactMatrix
    locus: PairLocus


@dataclass(frozen=True)
class PMatrix:
    """Polynomial intersection representation P_(k) with its coefficients."""

    k: int
    P: ExactMatrix
    coeff_index: tuple  # sorted (h, l) exponent pairs
    coeffs: tuple       # matching n x width Fraction grids

    def reconstruct_at(self, lam1, lam2):
        """Sum of D_hl * lam1^h * lam2^l, as a Fraction grid."""
        lam1, lam2 = Fraction(lam1), Fraction(lam2)
        n = len(self.coeffs[0]) if self.coeffs else self.P.rows
        w = len(self.coeffs[0][0]) if self.coeffs else self.P.cols
        acc = [[Fraction(0)] * w for _ in range(n)]
        for (h, l), D in zip(self.coeff_index, self.coeffs):
            scale = lam1 ** h * lam2 ** l
            for i in range(n):
                for j in range(w):
                    acc[i][j] += D[i][j] * scale
        return acc

    def stacked(self):
        if not self.coeffs:
            return []
        n = len(self.coeffs[0])
        return [sum((list(D[i]) for D in self.coeffs), []) for i in range(n)]


class Analyzer:
    """Per-plant intersection analysis with cached exact results."""

    def __init__(self, plant: SwitchedPlant, tol=numlin.DEFAULT_TOL, seed=42):
        self.plant = plant
        self.tol = tol
        self.seed = seed
        self.spectra = {q: np.linalg.eigvals(plant.subsystem(q).A)
                        for q in (1, 2)}
        self._norms = {q: max(np.linalg.norm(plant.subsystem(q).A), 1.0)
                       for q in (1, 2)}
        self._lock = threading.Lock()
        self._sym_kernels = {}
        self._echelons = {}
        self._q_matrices = {}
        self._p_matrices = {}
        self._widths = {}

    # ---------------- numeric path ----------------

    def _check_spectrum(self, q, lam):
        d = np.min(np.abs(self.spectra[q] - lam))
        if d <= 1e-9 * self._norms[q]:
            raise SpectrumCollision(q, lam)

    def off_spectra(self, lam1, lam2) -> bool:
        return (np.min(np.abs(self.spectra[1] - lam1)) > 1e-9 * self._norms[1]
                and np.min(np.abs(self.spectra[2] - lam2)) > 1e-9 * self._norms[2])

    def intersection_at(self, k, lam1, lam2, tol=None) -> IntersectionBasis:
        """Orthonormal basis of im N_1,(k)(lam1) ∩ im N_2,(k)(lam2)."""
        tol = self.tol if tol is None else tol
        self._check_spectrum(1, lam1)
        self._check_spectrum(2, lam2)
        sel = self.plant.select(k)
        U1 = rosen.rstar_lambda(self.plant.sub1, sel, lam1, tol).basis
        U2 = rosen.rstar_lambda(self.plant.sub2, sel, lam2, tol).basis
        if U1.shape[1] == 0 or U2.shape[1] == 0:
            return IntersectionBasis(k, lam1, lam2,
                                     np.zeros((self.plant.n, 0)))
        ns = numlin.nullspace(np.hstack([U1, -U2]), tol)
        if ns.dim == 0:
            return IntersectionBasis(k, lam1, lam2,
                                     np.zeros((self.plant.n, 0)))
        vecs = U1 @ ns.basis[:U1.shape[1], :]
        basis = numlin.orth(vecs, tol).basis
        return IntersectionBasis(k, lam1, lam2, basis)

    def _sample_pairs(self, k, seed):
        """Seeded draws from the rational half-line grid {-j/2 : j=1..40}."""
        rng = np.random.default_rng(seed)
        grid = [-Fraction(j, 2) for j in range(1, 41)]
        pool1 = [g for g in grid
                 if np.min(np.abs(self.spectra[1] - float(g))) > 1e-9 * self._norms[1]]
        pool2 = [g for g in grid
                 if np.min(np.abs(self.spectra[2] - float(g))) > 1e-9 * self._norms[2]]
        while True:
            yield (pool1[rng.integers(len(pool1))],
                   pool2[rng.integers(len(pool2))])

    def generic_width(self, k) -> int:
        """Generic intersection width, by majority vote over 5 samples."""
        with self._lock:
            if k in self._widths:
                return self._widths[k]
        widths = []
        for lam1, lam2 in self._sample_pairs(k, self.seed + 1000 + k):
            widths.append(self.intersection_at(k, float(lam1), float(lam2)).width)
            if len(widths) == 5:
                break
        vote = max(set(widths), key=widths.count)
        with self._lock:
            self._widths[k] = vote
        return vote

    def pair_admissible(self, k, lam1, lam2) -> bool:
        if not self.off_spectra(lam1, lam2):
            return False
        if self.intersection_at(k, lam1, lam2).width != self.generic_width(k):
            return False
        with self._lock:
            ech = self._echelons.get(k)
        if ech is not None and not ech.locus.admissible_exact(lam1, lam2):
            return False
        return True

    def d_k_sampled(self, k, seed=None, tol=None, stall_limit=5) -> int:
        """Dimension of the accumulated intersection span over random pairs."""
        if stall_limit < 3:
            raise ValueError("stall_limit must be at least 3")
        tol = self.tol if tol is None else tol
        seed = self.seed if seed is None else seed
        width = self.generic_width(k)
        span = None
        stall = 0
        draws = 0
        for lam1, lam2 in self._sample_pairs(k, seed):
            draws += 1
            if draws > 400:
                break
            basis = self.intersection_at(k, float(lam1), float(lam2), tol)
            if basis.width != width:
                continue  # outside the admissible set
            if basis.width == 0:
                stall += 1
                if stall >= stall_limit:
                    return 0
                continue
            sub = numlin.Subspace(basis.vectors, self.plant.n)
            new = sub if span is None else numlin.sum_subspaces([span, sub], tol)
            if span is not None and new.dim == span.dim:
                stall += 1
            else:
                stall = 0
            span = new
            if stall >= stall_limit:
                break
        return 0 if span is None else span.dim

    # ---------------- exact path ----------------

    def symbolic_kernel(self, q, k) -> rosen.SymbolicKernel:
        with self._lock:
            if (q, k) in self._sym_kernels:
                return self._sym_kernels[(q, k)]
        sk = rosen.kernel_symbolic(self.plant, q, k)
        with self._lock:
            self._sym_kernels[(q, k)] = sk
        return sk

    def echelon_symbolic(self, k) -> EchelonForm:
        """RREF of [N_1,(k)(l1)  N_2,(k)(l2)] with transform and locus."""
        with self._lock:
            if k in self._echelons:
                return self._echelons[k]
        sk1 = self.symbolic_kernel(1, k)
        sk2 = self.symbolic_kernel(2, k)
        N1 = sk1.N_poly.map(lambda e: RatFunc(e.num.rename({rosen.SYM: LAMBDA1}),
                                              e.den.rename({rosen.SYM: LAMBDA1}),
                                              _reduce=False))
        N2 = sk2.N_poly.map(lambda e: RatFunc(e.num.rename({rosen.SYM: LAMBDA2}),
                                              e.den.rename({rosen.SYM: LAMBDA2}),
                                              _reduce=False))
        stacked = N1.hstack(N2)
        res = rref_with_transform(stacked)
        n = self.plant.n
        w1, w2 = N1.cols, N2.cols
        p_k = self.plant.select(k).p_k
        # structural zero rows: every kernel column is orthogonal to C_(k)
        for i in range(n - p_k, n):
            for j in range(stacked.cols):
                if not res.E[i, j].is_zero():
                    raise AssertionError("expected structural zero rows in echelon form")
        E11 = res.E.submatrix(range(w1), range(w1))
        E12 = res.E.submatrix(range(w1), range(w1, w1 + w2))
        E22 = res.E.submatrix(range(w1, max(n - p_k, w1)), range(w1, w1 + w2))
        locus = self._build_locus(k, res.pivot_factors)
        form = EchelonForm(k, res.T, res.E, tuple(res.pivots), E11, E12, E22, locus)
        with self._lock:
            self._echelons[k] = form
        return form

    def _build_locus(self, k, pivot_factors) -> PairLocus:
        factors = []

        def add(f):
            _, f = f.primitive()
            if f.total_degree() <= 0:
                return
            if any(f == g for g in factors):
                return
            factors.append(f)

        for f in pivot_factors:
            mono = f.monomial_content()
            f = f.shift_down(mono)
            for v in (LAMBDA1, LAMBDA2):
                if any(mono[i] for i, name in enumerate(f.vars) if name == v):
                    add(MultiPoly.variable(v))
            for v in (LAMBDA1, LAMBDA2):
                c, f = f.content_wrt(v)
                add(c)
            add(f)
        mixed = [f for f in factors if len(f.active_vars()) >= 2]
        lines = tuple(f for f in factors if len(f.active_vars()) < 2)
        curve = MultiPoly.constant(1, (LAMBDA1, LAMBDA2))
        for f in mixed:
            curve = curve * f
        _, curve = curve.primitive()
        return PairLocus(k, tuple(factors), curve, lines,
                         self.spectra[1].copy(), self.spectra[2].copy())

    def locus(self, k) -> PairLocus:
        return self.echelon_symbolic(k).locus

    def q_matrix(self, k) -> ExactMatrix:
        """Rational intersection representation Q_(k)(l1, l2).

        Equals T_(k)^{-1} [E12; 0; 0]; since the echelon pivots fill the
        first kernel block (E11 = I), this collapses to N_1,(k)(l1) @ E12.
        Zero columns (pivot columns of the second block) are dropped.
        """
        with self._lock:
            if k in self._q_matrices:
                return self._q_matrices[k]
        form = self.echelon_symbolic(k)
        w1 = form.E11.rows
        if list(form.pivots[:w1]) != list(range(w1)):
            raise SingularTransform(
                f"echelon pivots {form.pivots} do not fill the first kernel block")
        sk1 = self.symbolic_kernel(1, k)
        N1 = sk1.N_poly.map(lambda e: RatFunc(e.num.rename({rosen.SYM: LAMBDA1}),
                                              e.den.rename({rosen.SYM: LAMBDA1}),
                                              _reduce=False))
        Q_full = N1 @ form.E12
        keep = [j for j in range(Q_full.cols)
                if any(not Q_full[i, j].is_zero() for i in range(Q_full.rows))]
        Q = Q_full.submatrix(range(Q_full.rows), keep)
        self._verify_q(k, Q, form.locus)
        with self._lock:
            self._q_matrices[k] = Q
        return Q

    def _verify_q(self, k, Q, locus):
        """im Q at admissible rational pairs must match the numeric intersection."""
        if Q.cols == 0:
            return
        checked = 0
        for lam1, lam2 in self._sample_pairs(k, self.seed + 7 + k):
            if not locus.representation_valid(lam1, lam2):
                continue
            point = {LAMBDA1: Fraction(lam1), LAMBDA2: Fraction(lam2)}
            vals = np.array([[float(Q[i, j].evaluate(point))
                              for j in range(Q.cols)] for i in range(Q.rows)])
            span = numlin.orth(vals, self.tol)
            inter = self.intersection_at(k, float(lam1), float(lam2))
            ref = numlin.Subspace(inter.vectors, self.plant.n)
            if span.dim != ref.dim or (span.dim and
                    np.max(numlin.principal_angles(span, ref)) > 1e-6):
                raise AssertionError(
                    f"exact intersection disagrees with numeric one at "
                    f"({lam1}, {lam2}) for k={k}")
            checked += 1
            if checked == 3:
                break

    def p_matrix(self, k) -> PMatrix:
        """Clear each Q column to a polynomial and collect coefficients."""
        with self._lock:
            if k in self._p_matrices:
                return self._p_matrices[k]
        Q = self.q_matrix(k)
        from .exact import lcm_best_effort, _normalize_poly_column
        cols = []
        for j in range(Q.cols):
            lcd = MultiPoly.constant(1)
            for i in range(Q.rows):
                lcd = lcm_best_effort(lcd, Q[i, j].den)
            col = [(Q[i, j] * RatFunc.of(lcd)).as_poly() for i in range(Q.rows)]
            cols.append(_normalize_poly_column(col))
        if cols:
            P = ExactMatrix([[cols[j][i] for j in range(len(cols))]
                             for i in range(Q.rows)])
        else:
            P = ExactMatrix.zeros(Q.rows, 0)
        index = set()
        for j, col in enumerate(cols):
            for p in col:
                for exp in p.terms:
                    d = dict(zip(p.vars, exp))
                    index.add((d.get(LAMBDA1, 0), d.get(LAMBDA2, 0)))
        index = tuple(sorted(index))
        coeffs = []
        for (h, l) in index:
            D = [[Fraction(0)] * len(cols) for _ in range(Q.rows)]
            for j, col in enumerate(cols):
                for i, p in enumerate(col):
                    for exp, c in p.terms.items():
                        d = dict(zip(p.vars, exp))
                        if (d.get(LAMBDA1, 0), d.get(LAMBDA2, 0)) == (h, l):
                            D[i][j] += c
            coeffs.append(tuple(tuple(row) for row in D))
        pm = PMatrix(k, P, index, tuple(coeffs))
        with self._lock:
            self._p_matrices[k] = pm
        return pm

    def d_k_exact(self, k) -> int:
        """rank of the horizontally stacked coefficient matrices of P_(k)."""
        pm = self.p_matrix(k)
        stacked = pm.stacked()
        if not stacked or not stacked[0]:
            return 0
        return rank_fractions(stacked)

    def d_values(self, exact=None, seed=None) -> dict:
        """d_(k) for every k; exact path by default when available."""
        if exact is None:
            exact = self.plant.has_exact
        out = {}
        for k in range(self.plant.p + 1):
            out[k] = self.d_k_exact(k) if exact else self.d_k_sampled(k, seed=seed)
        return out
