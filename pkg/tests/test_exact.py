from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swtrack.exact import (DenominatorVanishes, ExactMatrix, MultiPoly,
                           RatFunc, evaluate, exact_rank, gcd_best_effort,
                           poly_kernel, poly_str, rank_fractions,
                           rref_with_transform)

L1 = MultiPoly.variable("l1")
L2 = MultiPoly.variable("l2")
L = MultiPoly.variable("l")


fractions_st = st.builds(Fraction, st.integers(-50, 50), st.integers(1, 20))


def small_poly(variables=("l1", "l2"), max_deg=2):
    exps = st.tuples(*(st.integers(0, max_deg) for _ in variables))
    return st.dictionaries(exps, fractions_st, max_size=4).map(
        lambda terms: MultiPoly(variables, terms))


# ---------- rationals and polynomials ----------

@given(fractions_st, fractions_st, fractions_st)
def test_fraction_field_axioms(a, b, c):
    assert a + b == b + a
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    # canonical form: equality iff cross products match
    assert (a == b) == (a.numerator * b.denominator == b.numerator * a.denominator)


@settings(max_examples=60, deadline=None)
@given(small_poly(), small_poly(), small_poly())
def test_poly_ring_axioms(p, q, r):
    assert p + q == q + p
    assert p * q == q * p
    assert (p + q) + r == p + (q + r)
    assert p * (q + r) == p * q + p * r


@settings(max_examples=60, deadline=None)
@given(small_poly(max_deg=2), small_poly(max_deg=2))
def test_gcd_best_effort_divides_both(p, q):
    g = gcd_best_effort(p, q)
    if not p.is_zero():
        assert g.divides(p)
    if not q.is_zero():
        assert g.divides(q)


def test_poly_eval_and_str():
    p = 2 * L1 * L2 - 5 * L1 + 12 * L2 + 10
    assert poly_str(p) == "2*l1*l2 - 5*l1 + 12*l2 + 10"
    assert p.evaluate({"l1": 2, "l2": 0}) == 0
    assert p.evaluate({"l1": Fraction(-2, 15), "l2": Fraction(-10, 11)}) == 0


def test_ratfunc_equality_cross_multiplication():
    a = RatFunc(L1 * L1 - 1, L1 + 1)   # reduces to l1 - 1
    b = RatFunc(L1 - 1)
    assert a == b
    assert RatFunc(L1, L2) != RatFunc(L2, L1)
    c = RatFunc((L1 + 2) * (L1 * L2 + 3), (L1 + 2) * L2)
    assert c == RatFunc(L1 * L2 + 3, L2)


# ---------- rref ----------

def assert_rref_axioms(E, pivots):
    one = RatFunc.of(1)
    last = -1
    for r, c in enumerate(pivots):
        assert c > last
        last = c
        assert E[r, c] == one
        for r2 in range(E.rows):
            if r2 != r:
                assert E[r2, c].is_zero()
    for r in range(len(pivots), E.rows):
        assert all(E[r, c].is_zero() for c in range(E.cols))


def test_rref_identity():
    M = ExactMatrix.identity(2)
    res = rref_with_transform(M)
    assert res.E == M
    assert res.T == M
    assert res.pivots == [0, 1]


def test_rref_rank_one_symbolic():
    # hand elimination: rows are l1-multiples of (1, 1/l1)
    M = ExactMatrix([[RatFunc.of(L1), RatFunc.of(1)],
                     [RatFunc.of(L1 * L1), RatFunc.of(L1)]])
    res = rref_with_transform(M)
    assert res.rank == 1
    assert res.E[0, 0] == RatFunc.of(1)
    assert res.E[0, 1] == RatFunc(MultiPoly.constant(1, ("l1",)), L1)
    assert res.T @ M == res.E
    assert_rref_axioms(res.E, res.pivots)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 31 - 1))
def test_rref_transform_identity_random(seed):
    rng = np.random.default_rng(seed)
    rows, cols = int(rng.integers(1, 5)), int(rng.integers(1, 5))
    def entry():
        c = Fraction(int(rng.integers(-4, 5)))
        d1, d2 = int(rng.integers(0, 2)), int(rng.integers(0, 2))
        return RatFunc.of(MultiPoly(("l1", "l2"), {(d1, d2): c}) if c else
                          MultiPoly(("l1", "l2"), {}))
    M = ExactMatrix([[entry() for _ in range(cols)] for _ in range(rows)])
    res = rref_with_transform(M)
    assert res.T @ M == res.E
    assert_rref_axioms(res.E, res.pivots)
    # T is invertible over the rational-function field
    assert rref_with_transform(res.T).rank == rows


# ---------- kernels ----------

def test_poly_kernel_single_equation():
    M = ExactMatrix([[RatFunc.of(MultiPoly.constant(1, ("l",))),
                      RatFunc.of(-L)]])
    K, rank = poly_kernel(M)
    assert rank == 1 and K.cols == 1
    assert K[0, 0] == RatFunc.of(L)
    assert K[1, 0] == RatFunc.of(1)


def test_poly_kernel_zero_map():
    M = ExactMatrix([[RatFunc.of(MultiPoly.constant(0, ("l",)))] * 2])
    K, rank = poly_kernel(M)
    assert rank == 0 and K.cols == 2
    assert (M @ K).is_zero()


def test_poly_kernel_random_system_substitution_oracle():
    # 3-state, 2-input, 1-output: kernel width m - p = 1, checked by
    # substituting random rational values into the polynomial identity
    rng = np.random.default_rng(7)
    A = [[int(x) for x in row] for row in rng.integers(-3, 4, (3, 3))]
    B = [[1, 0], [0, 1], [1, 1]]
    C = [[1, 0, 0]]
    from swtrack.rosen import symbolic_rosenbrock
    R = symbolic_rosenbrock(A, B, C)
    K, rank = poly_kernel(R)
    assert K.cols == 1
    assert (R @ K).is_zero()  # exact polynomial identity
    for lam in (Fraction(1, 2), Fraction(-3), Fraction(5, 7), Fraction(-1, 3),
                Fraction(4)):
        Rv = evaluate(R, {"l": lam}).to_fractions()
        Kv = evaluate(K, {"l": lam}).to_fractions()
        prod = [sum(Rv[i][j] * Kv[j][0] for j in range(len(Kv)))
                for i in range(len(Rv))]
        assert all(x == 0 for x in prod)


# ---------- rank ----------

def test_exact_rank_trivial():
    assert exact_rank(ExactMatrix.zeros(3, 4)) == 0
    assert exact_rank(ExactMatrix.identity(5)) == 5
    assert rank_fractions([[Fraction(1), Fraction(2)],
                           [Fraction(2), Fraction(4)]]) == 1


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 31 - 1))
def test_exact_rank_matches_numeric_rank(seed):
    rng = np.random.default_rng(seed)
    rows, cols = int(rng.integers(1, 5)), int(rng.integers(1, 5))
    def entry():
        if rng.random() < 0.4:
            return RatFunc.of(int(rng.integers(-3, 4)))
        return RatFunc.of(MultiPoly(("l1", "l2"),
                                    {(int(rng.integers(0, 2)),
                                      int(rng.integers(0, 2))):
                                     Fraction(int(rng.integers(-3, 4)))}))
    M = ExactMatrix([[entry() for _ in range(cols)] for _ in range(rows)])
    r = exact_rank(M)
    hits = 0
    for _ in range(40):
        point = {"l1": Fraction(int(rng.integers(1, 40)), 3),
                 "l2": Fraction(int(rng.integers(1, 40)), 7)}
        try:
            vals = evaluate(M, point).to_float()
        except DenominatorVanishes:
            continue
        hits += 1
        assert np.linalg.matrix_rank(vals, tol=1e-9 * max(1, np.abs(vals).max())) <= r
        if hits == 10:
            break
    assert hits == 10


# ---------- evaluation ----------

def test_evaluate_and_poles():
    M = ExactMatrix([[RatFunc.of(L1 * L2)]])
    out = evaluate(M, {"l1": Fraction(-1), "l2": Fraction(2)})
    assert out.to_fractions() == [[Fraction(-2)]]
    P = ExactMatrix([[RatFunc(MultiPoly.constant(1, ("l1",)), L1 + 1)]])
    with pytest.raises(DenominatorVanishes):
        evaluate(P, {"l1": Fraction(-1)})
