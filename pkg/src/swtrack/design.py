"""Controller synthesis: partitioning enumeration, transversal feasibility,
eigenvector selection, and the switched feedback/feedforward construction.

A design allocates the n closed-loop modes to output slots through a
partitioning (d_0, d_1, ..., d_p): d_0 modes hidden from every output, d_k
modes visible only in output k, with d_k <= 3 so that each error component
is a sum of at most three exponentials whose sign behaviour is decidable in
closed form.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import numlin
from .rectify import Analyzer
from .rosen import kernel_at
from .sysmodel import SteadyState, SwitchedPlant, feedforward, steady_state


class CompatibilityError(ValueError):
    """Plan inputs violate the structural rules (counts, signs, disjointness)."""


class RadoFailed(RuntimeError):
    def __init__(self, subset):
        self.subset = tuple(subset)
        super().__init__(
            f"transversal feasibility fails for output subset {self.subset}")


class SubsetExplosion(RuntimeError):
    pass


class SelectionFailed(RuntimeError):
    def __init__(self, retries):
        self.retries = retries
        super().__init__(f"no invertible eigenvector matrix after {retries} draws")


class KernelMembershipFailed(RuntimeError):
    def __init__(self, q, k, i, residual):
        self.q, self.k, self.i, self.residual = q, k, i, residual
        super().__init__(
            f"eigenvector ({k},{i}) is not in the kernel state block of "
            f"subsystem {q} (residual {residual:.3e})")


class SynthesisError(RuntimeError):
    """Wraps a pipeline failure with the synthesis step that raised it."""

    def __init__(self, step, cause):
        self.step = step
        self.cause = cause
        super().__init__(f"synthesis step {step}: {cause}")


@dataclass(frozen=True)
class Partitioning:
    d: tuple

    def __post_init__(self):
        d = tuple(int(x) for x in self.d)
        object.__setattr__(self, "d", d)
        if any(x < 0 for x in d):
            raise CompatibilityError("negative mode count")
        if any(x > 3 for x in d[1:]):
            raise CompatibilityError("at most 3 modes per visible output")

    @property
    def d0(self):
        return self.d[0]

    @property
    def n(self):
        return sum(self.d)

    @property
    def p(self):
        return len(self.d) - 1

    def is_monotonic(self):
        return all(x == 1 for x in self.d[1:]) and self.d0 == self.n - self.p


def enumerate_partitionings(n, p, d_values: Mapping[int, int], mode) -> list:
    """All feasible partitionings, in ascending lexicographic order.

    `mode` is "nonovershoot" (any allocation within the d_(k) caps) or
    "monotonic" (only the single allocation (n-p, 1, ..., 1)).  Returns []
    when the caps cannot cover n modes at all.
    """
    caps = [min(3, d_values[k]) for k in range(1, p + 1)]
    if d_values[0] + sum(caps) < n:
        return []
    if mode == "monotonic":
        d = (n - p,) + (1,) * p
        if d[0] <= d_values[0] and all(d_values[k] >= 1 for k in range(1, p + 1)):
            return [Partitioning(d)]
        return []
    if mode != "nonovershoot":
        raise ValueError(f"unknown mode {mode!r}")
    out = []
    for d0 in range(0, min(d_values[0], n) + 1):
        ranges = [range(0, min(c, n - d0) + 1) for c in caps]
        for rest in itertools.product(*ranges):
            if d0 + sum(rest) == n:
                out.append(Partitioning((d0,) + rest))
    return out


@dataclass(frozen=True)
class EigenPlan:
    """Partitioning plus index-paired eigenvalue sets for both subsystems.

    For k >= 1 the lists are sorted ascending and paired index-wise; for the
    hidden block k = 0 an explicit pairing permutation is allowed because no
    sign conditions apply there.
    """

    partitioning: Partitioning
    eigenvalues: dict          # (q, k) -> tuple of floats
    pair0: tuple = None        # i -> index into the q=2, k=0 list

    def __post_init__(self):
        d = self.partitioning.d
        eigs = {}
        for q in (1, 2):
            for k in range(len(d)):
                vals = tuple(float(v) for v in self.eigenvalues.get((q, k), ()))
                if len(vals) != d[k]:
                    raise CompatibilityError(
                        f"need {d[k]} eigenvalues for (q={q}, k={k}), got {len(vals)}")
                if len(set(vals)) != len(vals):
                    raise CompatibilityError(f"repeated eigenvalue in (q={q}, k={k})")
                if any(v >= 0 for v in vals):
                    raise CompatibilityError("all eigenvalues must be negative")
                eigs[(q, k)] = tuple(sorted(vals)) if k >= 1 else vals
            union = [v for k in range(len(d)) for v in eigs[(q, k)]]
            if len(set(union)) != len(union):
                raise CompatibilityError(
                    f"eigenvalue sets of subsystem {q} are not pairwise disjoint")
        object.__setattr__(self, "eigenvalues", eigs)
        pair0 = self.pair0
        if pair0 is None:
            pair0 = tuple(range(d[0]))
        else:
            pair0 = tuple(int(i) for i in pair0)
            if sorted(pair0) != list(range(d[0])):
                raise CompatibilityError("pair0 must be a permutation of 0..d0-1")
        object.__setattr__(self, "pair0", pair0)

    def pairs(self, k):
        """Index-paired (lam1, lam2) tuples for output slot k."""
        l1 = self.eigenvalues[(1, k)]
        l2 = self.eigenvalues[(2, k)]
        if k == 0:
            return [(l1[i], l2[self.pair0[i]]) for i in range(len(l1))]
        return list(zip(l1, l2))

    def all_pairs(self):
        return {k: self.pairs(k) for k in range(len(self.partitioning.d))}


def check_rado(subspaces: Mapping[int, numlin.Subspace], partitioning: Partitioning,
               rel_tol=numlin.DEFAULT_TOL):
    """Dimension test guaranteeing an independent transversal exists.

    For every subset S of visible outputs, the span of the hidden-block
    subspace plus the selected output subspaces must have dimension exactly
    d_0 + sum of the d_k over S.  Returns (True, None) or (False, S) with the
    lexicographically first violating subset.
    """
    d = partitioning.d
    p = partitioning.p
    if p > 20:
        raise SubsetExplosion(f"subset enumeration refused for p={p}")
    subsets = [()]
    subsets += sorted(
        (s for r in range(1, p + 1) for s in itertools.combinations(range(1, p + 1), r)))
    for S in subsets:
        parts = [subspaces[0]] + [subspaces[k] for k in S]
        dim = numlin.sum_subspaces(parts, rel_tol).dim
        want = d[0] + sum(d[k] for k in S)
        if dim != want:
            return False, S
    return True, None


def plan_subspaces(analyzer: Analyzer, plan: EigenPlan, rel_tol=None) -> dict:
    """Accumulated intersection span per output slot, over the plan's pairs."""
    tol = analyzer.tol if rel_tol is None else rel_tol
    n = analyzer.plant.n
    out = {}
    for k, pairs in plan.all_pairs().items():
        bases = [analyzer.intersection_at(k, l1, l2, tol).vectors for l1, l2 in pairs]
        if bases:
            stacked = np.hstack(bases)
            out[k] = numlin.orth(stacked, tol)
        else:
            out[k] = numlin.Subspace(np.zeros((n, 0)), n)
    return out


@dataclass(frozen=True)
class EigenSelection:
    vectors: dict       # (k, i) -> n-vector
    V: np.ndarray       # columns ordered k = 0 block, then k = 1..p
    columns: tuple      # (k, i) per column of V
    cond: float


def select_vectors(analyzer: Analyzer, plan: EigenPlan, seed=42,
                   max_retries=16) -> EigenSelection:
    """Draw one eigenvector per (k, i) from its intersection and build V.

    Visible-output vectors are scaled to unit component in their own output,
    so the coefficients V^{-1} xi are literally the exponential coefficients
    of the error expansion.  Hidden-block vectors are unit norm.  Redraws
    until V is numerically invertible.
    """
    rng = np.random.default_rng(seed)
    plant = analyzer.plant
    C = plant.C
    d = plan.partitioning.d
    order = [(k, i) for k in range(len(d)) for i in range(d[k])]
    bases = {}
    for k, pairs in plan.all_pairs().items():
        for i, (l1, l2) in enumerate(pairs):
            b = analyzer.intersection_at(k, l1, l2).vectors
            if b.shape[1] == 0:
                raise SelectionFailed(0)
            bases[(k, i)] = b
    for attempt in range(max_retries):
        vectors = {}
        ok = True
        for (k, i) in order:
            b = bases[(k, i)]
            for _ in range(8):
                g = rng.standard_normal(b.shape[1])
                v = b @ g
                if k == 0:
                    nv = np.linalg.norm(v)
                    if nv < 1e-9:
                        continue
                    v = v / nv
                    lead = v[np.argmax(np.abs(v))]
                    if lead < 0:
                        v = -v
                    break
                s = float(C[k - 1] @ v)
                if abs(s) > 1e-8 * np.linalg.norm(v) * max(np.linalg.norm(C[k - 1]), 1):
                    v = v / s
                    break
            else:
                ok = False
                break
            vectors[(k, i)] = v
        if not ok:
            continue
        V = np.column_stack([vectors[ki] for ki in order])
        cond = np.linalg.cond(V)
        if np.isfinite(cond) and cond < 1e8:
            return EigenSelection(vectors, V, tuple(order), float(cond))
    raise SelectionFailed(max_retries)


@dataclass(frozen=True)
class Controller:
    """Switched state feedback + feedforward with its modal data.

    V columns are scaled to unit component in their own output (hidden-block
    columns to unit norm), so V stays well conditioned and V^{-1} xi gives
    the error-expansion coefficients directly.  `alpha_scale` maps those
    coefficients onto the canonical polynomial eigenvector basis for the
    sign-condition tests, whose verdicts are not scaling invariant.
    """

    F1: np.ndarray
    F2: np.ndarray
    G1: np.ndarray
    G2: np.ndarray
    V: np.ndarray
    columns: tuple            # (k, i) per column of V
    col_eigs: dict            # q -> per-column eigenvalue array
    plan: EigenPlan
    ss: SteadyState
    x0_domain: str            # "all" or "alpha-conditions"
    cond_V: float
    rect_residual: float
    alpha_scale: tuple = None  # per-column divisor for condition testing
    plant: SwitchedPlant = field(compare=False, repr=False, default=None)

    def F(self, q):
        return self.F1 if q == 1 else self.F2

    def G(self, q):
        return self.G1 if q == 1 else self.G2

    def alpha_of(self, x0):
        """Modal coefficients of x0 - x_ss in the shared eigenvector basis."""
        xi = np.asarray(x0, dtype=float) - self.ss.x_ss
        return numlin.solve(self.V, xi)


def moore_feedback(plant: SwitchedPlant, plan: EigenPlan,
                   selection: EigenSelection, tol=numlin.DEFAULT_TOL):
    """F_q = -W_q V^{-1} from the Rosenbrock-kernel partners of each vector.

    For every eigenvector v and eigenvalue lam, the input-block partner w is
    read off the kernel of R_q,(k)(lam) through v's kernel coordinates; the
    sign convention is verified by the rectification residual.
    """
    n = plant.n
    V = selection.V
    Vinv = numlin.solve(V, np.eye(n))
    F = {}
    W = {}
    residual = 0.0
    for q in (1, 2):
        cols = []
        for (k, i) in selection.columns:
            lam = plan.eigenvalues[(q, k)][i] if k >= 1 else plan.pairs(0)[i][q - 1]
            v = selection.vectors[(k, i)]
            kb = kernel_at(plant.subsystem(q), plant.select(k), lam, tol)
            c, res_, *_ = np.linalg.lstsq(kb.N, v, rcond=None)
            resid = np.linalg.norm(kb.N @ c - v)
            if resid > 1e-7 * np.linalg.norm(v):
                raise KernelMembershipFailed(q, k, i, resid)
            cols.append(kb.M @ c)
        W[q] = np.column_stack(cols)
        F[q] = -W[q] @ Vinv
        sub = plant.subsystem(q)
        Acl = sub.A + sub.B @ F[q]
        scale = np.linalg.norm(sub.A) + np.linalg.norm(sub.B) * np.linalg.norm(F[q])
        for j, (k, i) in enumerate(selection.columns):
            lam = plan.eigenvalues[(q, k)][i] if k >= 1 else plan.pairs(0)[i][q - 1]
            v = selection.vectors[(k, i)]
            r = np.linalg.norm(Acl @ v - lam * v) / (np.linalg.norm(v) * scale)
            residual = max(residual, r)
    return F[1], F[2], residual


def synthesize(analyzer: Analyzer, r, partitioning, eigenvalues, pair0=None,
               seed=42, max_retries=16) -> Controller:
    """End-to-end synthesis for a chosen partitioning and eigenvalue sets.

    Runs the transversal feasibility check, eigenvector selection, the Moore
    feedback construction for both subsystems, and the steady-state
    feedforward; attaches the admissible-initial-state descriptor.
    """
    plant = analyzer.plant
    part = partitioning if isinstance(partitioning, Partitioning) \
        else Partitioning(tuple(partitioning))
    if part.n != plant.n or part.p != plant.p:
        raise CompatibilityError(
            f"partitioning {part.d} does not match n={plant.n}, p={plant.p}")
    plan = EigenPlan(part, dict(eigenvalues), pair0)
    for k, pairs in plan.all_pairs().items():
        for l1, l2 in pairs:
            if not analyzer.pair_admissible(k, l1, l2):
                raise CompatibilityError(
                    f"eigenvalue pair ({l1}, {l2}) is not admissible for k={k}")

    subspaces = plan_subspaces(analyzer, plan)
    ok, bad = check_rado(subspaces, part, analyzer.tol)
    if not ok:
        raise SynthesisError(4, RadoFailed(bad))
    try:
        selection = select_vectors(analyzer, plan, seed, max_retries)
    except SelectionFailed as e:
        raise SynthesisError(5, e) from e
    try:
        F1, F2, residual = moore_feedback(plant, plan, selection, analyzer.tol)
    except KernelMembershipFailed as e:
        raise SynthesisError(6, e) from e

    ss = steady_state(plant, r)
    G1 = feedforward(F1, ss, 1)
    G2 = feedforward(F2, ss, 2)
    col_eigs = {}
    for q in (1, 2):
        col_eigs[q] = np.array(
            [plan.eigenvalues[(q, k)][i] if k >= 1 else plan.pairs(0)[i][q - 1]
             for (k, i) in selection.columns])
    domain = "all" if part.is_monotonic() else "alpha-conditions"
    scales = _canonical_scales(analyzer, plan, selection)
    return Controller(F1, F2, G1, G2, selection.V, selection.columns, col_eigs,
                      plan, ss, domain, selection.cond, residual, scales, plant)


def _canonical_scales(analyzer: Analyzer, plan: EigenPlan,
                      selection: EigenSelection):
    """Per-column divisors mapping error coefficients onto the canonical
    polynomial eigenvector basis.

    Only output slots with two or three visible modes carry sign conditions,
    and those conditions depend on the eigenvector scaling; the canonical
    scale is the own-output component of the exact intersection column
    P_(k)(lam1, lam2).  Slots without conditions (or without a single-column
    exact representation) keep scale 1.
    """
    from fractions import Fraction
    from .exact import LAMBDA1, LAMBDA2

    d = plan.partitioning.d
    scales = []
    for (k, i) in selection.columns:
        scale = 1.0
        if k >= 1 and d[k] in (2, 3) and analyzer.plant.has_exact:
            try:
                pm = analyzer.p_matrix(k)
            except Exception:
                pm = None
            if pm is not None and pm.P.cols == 1:
                l1, l2 = plan.pairs(k)[i]
                pt = {LAMBDA1: Fraction(l1), LAMBDA2: Fraction(l2)}
                col = np.array([float(pm.P[r, 0].evaluate(pt))
                                for r in range(pm.P.rows)])
                s = float(analyzer.plant.C[k - 1] @ col)
                if abs(s) > 1e-12 * max(np.linalg.norm(col), 1.0):
                    scale = s
        scales.append(scale)
    return tuple(scales)


# ---------------- initial-state admissibility ----------------

def two_term_no_sign_change(a1, a2):
    """Sign-constancy of a1 e^{l1 t} + a2 e^{l2 t}, l1 < l2 < 0.

    Returns (passed, boundary).  The condition (a1 + a2) a2 > 0 is necessary
    and sufficient; an exact zero is the boundary case and classified fail.
    """
    prod = (a1 + a2) * a2
    return prod > 0, prod == 0


def three_term_no_sign_change(a1, a2, a3):
    """Sign-constancy test for three decaying exponentials, l1 < l2 < l3 < 0.

    Sufficient only: passes when none of the known sign-change certificates
    hold.  Exact zeroes in any certificate are boundary cases and fail.
    """
    checks = [a1 * a2, a1 * a3, abs(a1 + a2) - abs(a3),
              a2 * a3, abs(a1) - abs(a2 + a3), (a2 + a3) * a3]
    boundary = any(c == 0 for c in checks)
    cond1 = a1 * a2 > 0 and a1 * a3 < 0 and abs(a1 + a2) > abs(a3)
    cond2 = a2 * a3 > 0 and a1 * a2 < 0 and abs(a1) > abs(a2 + a3)
    cond3 = (a2 + a3) * a3 < 0
    passed = not (cond1 or cond2 or cond3) and not boundary
    return passed, boundary


@dataclass(frozen=True)
class OutputVerdict:
    k: int
    d_k: int
    passed: bool
    boundary: bool
    alphas: tuple


def x0_admissible(controller: Controller, x0):
    """Per-output admissibility of an initial state for non-overshooting.

    Applies the exponential-sum sign conditions to the modal coefficients of
    x0 - x_ss, grouped by output and ordered by ascending eigenvalue; the
    coefficients are measured against the canonical polynomial eigenvector
    basis (controller.alpha_scale).  An all-zero coefficient group passes
    (the error component is identically zero); coefficients exactly on a
    condition boundary fail with a flag.
    """
    alpha = controller.alpha_of(x0)
    if controller.alpha_scale is not None:
        alpha = alpha / np.asarray(controller.alpha_scale, dtype=float)
    d = controller.plan.partitioning.d
    ztol = 1e-11 * max(1.0, float(np.linalg.norm(alpha)))
    verdicts = []
    pos = d[0]
    for k in range(1, len(d)):
        dk = d[k]
        a = tuple(float(x) for x in alpha[pos:pos + dk])
        pos += dk
        if all(abs(x) <= ztol for x in a):
            verdicts.append(OutputVerdict(k, dk, True, False, a))
            continue
        if dk == 1:
            verdicts.append(OutputVerdict(k, dk, True, False, a))
        elif dk == 2:
            ok, boundary = two_term_no_sign_change(*a)
            verdicts.append(OutputVerdict(k, dk, ok and not boundary, boundary, a))
        elif dk == 3:
            ok, boundary = three_term_no_sign_change(*a)
            verdicts.append(OutputVerdict(k, dk, ok, boundary, a))
        else:
            verdicts.append(OutputVerdict(k, dk, False, False, a))
    return verdicts
