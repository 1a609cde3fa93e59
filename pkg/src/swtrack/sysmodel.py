"""Switched plant model: validation, output-row deletion, invariant zeros,
shared steady state and feedforward.

A plant is a pair of subsystems (A_q, B_q), q in {1, 2}, sharing one output
map C.  Matrices are kept as float arrays for the numeric pipeline and,
when constructed from rational data, also as Fraction grids for the exact
pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import numlin


class Inconsistent(ValueError):
    """The steady-state equations admit no solution within tolerance."""

    def __init__(self, residual):
        self.residual = residual
        super().__init__(f"steady-state system inconsistent (residual {residual:.3e})")


def _fraction_grid(M):
    out = []
    for row in np.atleast_2d(M):
        out.append(tuple(Fraction(x) for x in row))
    return tuple(out)


@dataclass(frozen=True)
class Subsystem:
    A: np.ndarray
    B: np.ndarray
    label: int

    def __post_init__(self):
        object.__setattr__(self, "A", np.asarray(self.A, dtype=float))
        object.__setattr__(self, "B", np.asarray(self.B, dtype=float))
        if self.A.shape[0] != self.A.shape[1]:
            raise ValueError("A must be square")
        if self.B.shape[0] != self.A.shape[0]:
            raise ValueError("B row count must match A")


@dataclass(frozen=True)
class SwitchedPlant:
    sub1: Subsystem
    sub2: Subsystem
    C: np.ndarray
    exact: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "C", np.asarray(self.C, dtype=float))
        if self.sub1.A.shape != self.sub2.A.shape or self.sub1.B.shape != self.sub2.B.shape:
            raise ValueError("subsystem dimensions differ")
        if self.C.shape[1] != self.sub1.A.shape[0]:
            raise ValueError("C column count must match state dimension")

    @staticmethod
    def from_matrices(A1, B1, A2, B2, C, exact_entries=True):
        """Build a plant; exact_entries keeps Fraction copies of the data.

        Inputs may be numeric arrays or nested lists whose entries are ints,
        floats, Fractions or rational strings like "44/3".
        """
        def to_fracs(M):
            return tuple(tuple(Fraction(x) for x in row) for row in M)

        exact = None
        if exact_entries:
            try:
                exact = {"A1": to_fracs(A1), "B1": to_fracs(B1),
                         "A2": to_fracs(A2), "B2": to_fracs(B2),
                         "C": to_fracs(C)}
            except (ValueError, TypeError):
                exact = None

        A1f = np.array([[float(Fraction(x)) for x in row] for row in A1])
        B1f = np.array([[float(Fraction(x)) for x in row] for row in B1])
        A2f = np.array([[float(Fraction(x)) for x in row] for row in A2])
        B2f = np.array([[float(Fraction(x)) for x in row] for row in B2])
        Cf = np.array([[float(Fraction(x)) for x in row] for row in C])
        return SwitchedPlant(Subsystem(A1f, B1f, 1), Subsystem(A2f, B2f, 2),
                             Cf, exact)

    @property
    def n(self):
        return self.sub1.A.shape[0]

    @property
    def m(self):
        return self.sub1.B.shape[1]

    @property
    def p(self):
        return self.C.shape[0]

    def subsystem(self, q: int) -> Subsystem:
        if q == 1:
            return self.sub1
        if q == 2:
            return self.sub2
        raise ValueError("subsystem label must be 1 or 2")

    @property
    def has_exact(self):
        return self.exact is not None

    def exact_matrix(self, name):
        if self.exact is None:
            raise ValueError("plant was not built from exact rational data")
        return self.exact[name]

    def select(self, k: int) -> "OutputSelection":
        return drop_output(self.C, k, exact_C=self.exact["C"] if self.exact else None)


@dataclass(frozen=True)
class OutputSelection:
    """C with the k-th output row removed (k = 0 keeps all rows)."""

    k: int
    C_k: np.ndarray
    C_k_exact: tuple = field(default=None, compare=False, repr=False)

    @property
    def p_k(self):
        return self.C_k.shape[0]


def drop_output(C, k: int, exact_C=None) -> OutputSelection:
    C = np.atleast_2d(np.asarray(C, dtype=float))
    p = C.shape[0]
    if not 0 <= k <= p:
        raise IndexError(f"output index {k} outside 0..{p}")
    if k == 0:
        return OutputSelection(0, C.copy(), exact_C)
    keep = [i for i in range(p) if i != k - 1]
    Ck = C[keep, :].copy()
    Cke = tuple(exact_C[i] for i in keep) if exact_C is not None else None
    return OutputSelection(k, Ck, Cke)


@dataclass(frozen=True)
class ValidationCheck:
    name: str
    passed: bool
    warning: bool
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple

    @property
    def ok(self):
        return all(c.passed or c.warning for c in self.checks)

    @property
    def warnings(self):
        return tuple(c for c in self.checks if c.warning)

    def __str__(self):
        lines = []
        for c in self.checks:
            mark = "warn" if c.warning else ("pass" if c.passed else "FAIL")
            lines.append(f"[{mark}] {c.name}: {c.detail}")
        return "\n".join(lines)


def validate(plant: SwitchedPlant, rel_tol=numlin.DEFAULT_TOL, seed=42) -> ValidationReport:
    """Check the structural assumptions needed by the design pipeline.

    Dimension inequality n + p < 2m (equality is downgraded to a warning:
    the design can still proceed, only the kernel widths lose slack), full
    rank of every B_q and of C, and right-invertibility probed through the
    rank of the full-output Rosenbrock matrix at a random nonzero point.
    """
    n, m, p = plant.n, plant.m, plant.p
    checks = []

    if n + p < 2 * m:
        checks.append(ValidationCheck("n+p<2m", True, False,
                                      f"{n}+{p} < {2 * m}"))
    elif n + p == 2 * m:
        checks.append(ValidationCheck("n+p<2m", False, True,
                                      f"{n}+{p} = {2 * m}: boundary case, proceeding"))
    else:
        checks.append(ValidationCheck("n+p<2m", False, False,
                                      f"{n}+{p} >= {2 * m}"))

    for q in (1, 2):
        rb = numlin.rank_tol(plant.subsystem(q).B, rel_tol)
        checks.append(ValidationCheck(f"rank B{q}", rb == m, False,
                                      f"rank {rb} of {m}"))
    rc = numlin.rank_tol(plant.C, rel_tol)
    checks.append(ValidationCheck("rank C", rc == p, False, f"rank {rc} of {p}"))

    rng = np.random.default_rng(seed)
    lam = float(rng.uniform(0.5, 1.5))
    sel = plant.select(0)
    for q in (1, 2):
        sub = plant.subsystem(q)
        R = np.block([[lam * np.eye(n) - sub.A, sub.B],
                      [sel.C_k, np.zeros((p, m))]])
        rr = numlin.rank_tol(R, rel_tol)
        checks.append(ValidationCheck(
            f"right invertibility sub{q}", rr == n + p, False,
            f"rank R({lam:.4f}) = {rr}, need {n + p}"))
    return ValidationReport(tuple(checks))


@dataclass(frozen=True)
class SteadyState:
    x_ss: np.ndarray
    u1_ss: np.ndarray
    u2_ss: np.ndarray
    r: np.ndarray
    residual: float


def steady_state(plant: SwitchedPlant, r) -> SteadyState:
    """Common equilibrium of both subsystems producing output r.

    Solves the stacked linear system for (x_ss, u1_ss, u2_ss) by minimum-norm
    least squares; the system is underdetermined whenever n + p < 2m.
    """
    n, m, p = plant.n, plant.m, plant.p
    r = np.asarray(r, dtype=float).reshape(p)
    A = np.zeros((2 * n + p, n + 2 * m))
    A[:n, :n] = plant.sub1.A
    A[:n, n:n + m] = plant.sub1.B
    A[n:2 * n, :n] = plant.sub2.A
    A[n:2 * n, n + m:] = plant.sub2.B
    A[2 * n:, :n] = plant.C
    b = np.concatenate([np.zeros(2 * n), r])
    sol, *_ = np.linalg.lstsq(A, b, rcond=None)
    residual = float(np.linalg.norm(A @ sol - b))
    if residual > 1e-8 * (1.0 + np.linalg.norm(r)):
        raise Inconsistent(residual)
    return SteadyState(sol[:n].copy(), sol[n:n + m].copy(), sol[n + m:].copy(),
                       r.copy(), residual)


def feedforward(F_q, ss: SteadyState, q: int):
    """Constant input offset G_q = -F_q x_ss + u_q,ss."""
    F_q = np.asarray(F_q, dtype=float)
    u = ss.u1_ss if q == 1 else ss.u2_ss
    return -F_q @ ss.x_ss + u


def is_invariant_zero(sub: Subsystem, sel: OutputSelection, lam: float,
                      rel_tol=numlin.DEFAULT_TOL) -> bool:
    """True when the Rosenbrock matrix at lam drops below its normal rank."""
    n = sub.A.shape[0]
    m = sub.B.shape[1]
    R = np.block([[lam * np.eye(n) - sub.A, sub.B],
                  [sel.C_k, np.zeros((sel.p_k, m))]])
    return numlin.rank_tol(R, rel_tol) < n + sel.p_k
