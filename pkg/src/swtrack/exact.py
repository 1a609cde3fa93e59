"""Exact arithmetic kernel.

Big rationals, sparse multivariate polynomials in (l1, l2), rational
functions, and dense matrices over them, with row reduction carried out
exactly over the rational-function field.  Everything is immutable;
operations return new objects and are safe to share across threads.

Rationals are `fractions.Fraction` (always reduced, positive denominator).
Polynomial reduction of rational functions is best effort: contents,
monomial factors, univariate gcds and divisibility checks.  Equality and
all matrix algebra stay exact regardless of how much reduction happened.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping

LAMBDA1 = "l1"
LAMBDA2 = "l2"

# canonical global variable order; anything else sorts after, alphabetically
_VAR_RANK = {"l": 0, LAMBDA1: 1, LAMBDA2: 2}


class DenominatorVanishes(ArithmeticError):
    """A rational function was evaluated at a zero of its denominator."""

    def __init__(self, entry, point):
        self.entry = entry
        self.point = dict(point)
        super().__init__(f"denominator vanishes at {self.point}")


def _var_key(name):
    return (_VAR_RANK.get(name, len(_VAR_RANK)), name)


def _merge_vars(a, b):
    return tuple(sorted(set(a) | set(b), key=_var_key))


def _frac_gcd(a: Fraction, b: Fraction) -> Fraction:
    return Fraction(math.gcd(a.numerator, b.numerator),
                    math.lcm(a.denominator, b.denominator))


class MultiPoly:
    """Sparse multivariate polynomial with Fraction coefficients.

    `terms` maps exponent tuples (aligned with `vars`) to nonzero
    coefficients.  The zero polynomial has an empty term map.
    """

    __slots__ = ("vars", "terms")

    def __init__(self, variables=(), terms=None, _clean=True):
        variables = tuple(variables)
        if terms is None:
            terms = {}
        if _clean:
            cleaned = {}
            for exp, c in terms.items():
                if not isinstance(c, Fraction):
                    c = Fraction(c)
                if c:
                    exp = tuple(exp)
                    if len(exp) != len(variables):
                        raise ValueError("exponent arity mismatch")
                    cleaned[exp] = c
            terms = cleaned
        object.__setattr__(self, "vars", variables)
        object.__setattr__(self, "terms", terms)

    def __setattr__(self, *a):
        raise AttributeError("MultiPoly is immutable")

    # -- constructors ------------------------------------------------------
    @staticmethod
    def constant(c, variables=()):
        c = Fraction(c)
        variables = tuple(variables)
        if not c:
            return MultiPoly(variables, {}, _clean=False)
        return MultiPoly(variables, {(0,) * len(variables): c}, _clean=False)

    @staticmethod
    def variable(name):
        return MultiPoly((name,), {(1,): Fraction(1)}, _clean=False)

    # -- queries -----------------------------------------------------------
    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(sum(e) == 0 for e in self.terms)

    def constant_value(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        if not self.is_constant():
            raise ValueError("not a constant polynomial")
        return next(iter(self.terms.values()))

    def total_degree(self):
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def active_vars(self):
        used = set()
        for exp in self.terms:
            for v, e in zip(self.vars, exp):
                if e:
                    used.add(v)
        return used

    def leading(self):
        """(exponent, coefficient) of the graded-lex leading term."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        exp = max(self.terms, key=lambda e: (sum(e), e))
        return exp, self.terms[exp]

    # -- variable bookkeeping ---------------------------------------------
    def embed(self, variables):
        """Reinterpret over a superset of variables."""
        variables = tuple(variables)
        if variables == self.vars:
            return self
        pos = {v: i for i, v in enumerate(variables)}
        idx = [pos[v] for v in self.vars]
        terms = {}
        for exp, c in self.terms.items():
            new = [0] * len(variables)
            for i, e in zip(idx, exp):
                new[i] = e
            terms[tuple(new)] = c
        return MultiPoly(variables, terms, _clean=False)

    def rename(self, mapping: Mapping[str, str]):
        new_vars = tuple(mapping.get(v, v) for v in self.vars)
        if len(set(new_vars)) != len(new_vars):
            raise ValueError("rename collapses variables")
        order = tuple(sorted(new_vars, key=_var_key))
        pos = {v: i for i, v in enumerate(order)}
        idx = [pos[v] for v in new_vars]
        terms = {}
        for exp, c in self.terms.items():
            new = [0] * len(order)
            for i, e in zip(idx, exp):
                new[i] = e
            terms[tuple(new)] = c
        return MultiPoly(order, terms, _clean=False)

    def _aligned(self, other):
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.constant(other, self.vars)
        if self.vars == other.vars:
            return self, other
        union = _merge_vars(self.vars, other.vars)
        return self.embed(union), other.embed(union)

    # -- arithmetic --------------------------------------------------------
    def __neg__(self):
        return MultiPoly(self.vars, {e: -c for e, c in self.terms.items()},
                         _clean=False)

    def __add__(self, other):
        a, b = self._aligned(other)
        terms = dict(a.terms)
        for exp, c in b.terms.items():
            s = terms.get(exp, Fraction(0)) + c
            if s:
                terms[exp] = s
            else:
                terms.pop(exp, None)
        return MultiPoly(a.vars, terms, _clean=False)

    __radd__ = __add__

    def __sub__(self, other):
        a, b = self._aligned(other)
        return a + (-b)

    def __rsub__(self, other):
        a, b = self._aligned(other)
        return b + (-a)

    def __mul__(self, other):
        a, b = self._aligned(other)
        if not a.terms or not b.terms:
            return MultiPoly(a.vars, {}, _clean=False)
        terms = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                exp = tuple(x + y for x, y in zip(e1, e2))
                s = terms.get(exp, Fraction(0)) + c1 * c2
                if s:
                    terms[exp] = s
                else:
                    terms.pop(exp, None)
        return MultiPoly(a.vars, terms, _clean=False)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative power")
        out = MultiPoly.constant(1, self.vars)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def scale(self, c):
        c = Fraction(c)
        if not c:
            return MultiPoly(self.vars, {}, _clean=False)
        return MultiPoly(self.vars, {e: v * c for e, v in self.terms.items()},
                         _clean=False)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.constant(other, self.vars)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        a, b = self._aligned(other)
        return a.terms == b.terms

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    # -- evaluation --------------------------------------------------------
    def evaluate(self, point: Mapping[str, Fraction]) -> Fraction:
        vals = []
        for v in self.vars:
            if v not in point and any(e[self.vars.index(v)] for e in self.terms):
                raise KeyError(f"no value bound for {v}")
            vals.append(Fraction(point.get(v, 0)))
        total = Fraction(0)
        for exp, c in self.terms.items():
            t = c
            for val, e in zip(vals, exp):
                if e:
                    t *= val ** e
            total += t
        return total

    # -- normal forms ------------------------------------------------------
    def content(self) -> Fraction:
        """gcd of coefficients (positive), 0 for the zero polynomial."""
        c = Fraction(0)
        for v in self.terms.values():
            c = _frac_gcd(c, abs(v)) if c else abs(v)
        return c

    def primitive(self):
        """(content-with-sign, primitive part with positive leading coeff)."""
        if not self.terms:
            return Fraction(0), self
        c = self.content()
        _, lead = self.leading()
        if lead < 0:
            c = -c
        return c, self.scale(1 / c)

    def monomial_content(self):
        """Componentwise min exponent over all terms."""
        if not self.terms:
            return (0,) * len(self.vars)
        mins = None
        for exp in self.terms:
            mins = exp if mins is None else tuple(map(min, mins, exp))
        return mins

    def shift_down(self, mono):
        terms = {tuple(e - m for e, m in zip(exp, mono)): c
                 for exp, c in self.terms.items()}
        return MultiPoly(self.vars, terms, _clean=False)

    # -- division ----------------------------------------------------------
    def divmod_by(self, g: "MultiPoly"):
        """Monomial-order division by a single divisor: self = q*g + r."""
        f, g = self._aligned(g)
        if g.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        g_exp, g_c = g.leading()
        work = dict(f.terms)
        quot = {}
        rem = {}
        while work:
            exp = max(work, key=lambda e: (sum(e), e))
            c = work.pop(exp)
            if all(e >= ge for e, ge in zip(exp, g_exp)):
                q_exp = tuple(e - ge for e, ge in zip(exp, g_exp))
                q_c = c / g_c
                quot[q_exp] = quot.get(q_exp, Fraction(0)) + q_c
                for e2, c2 in g.terms.items():
                    if e2 == g_exp:
                        continue
                    tgt = tuple(a + b for a, b in zip(q_exp, e2))
                    s = work.get(tgt, Fraction(0)) - q_c * c2
                    if s:
                        work[tgt] = s
                    else:
                        work.pop(tgt, None)
            else:
                rem[exp] = c
        return (MultiPoly(f.vars, quot), MultiPoly(f.vars, rem))

    def divides(self, f: "MultiPoly") -> bool:
        if self.is_zero():
            return f.is_zero()
        _, r = f.divmod_by(self)
        return r.is_zero()

    def divexact(self, g: "MultiPoly"):
        q, r = self.divmod_by(g)
        if not r.is_zero():
            raise ValueError("inexact polynomial division")
        return q

    # -- univariate helpers --------------------------------------------------
    def as_univariate(self):
        """(var name or None, dense coeff list) when at most one var is active."""
        active = self.active_vars()
        if len(active) > 1:
            return None, None
        if not active:
            return None, [self.constant_value()] if self.terms else [Fraction(0)]
        var = next(iter(active))
        i = self.vars.index(var)
        deg = max(e[i] for e in self.terms)
        coeffs = [Fraction(0)] * (deg + 1)
        for exp, c in self.terms.items():
            coeffs[exp[i]] += c
        return var, coeffs

    def content_wrt(self, var):
        """Split off the factor depending only on `var`.

        Returns (c, pp) with self = c * pp, c a polynomial in `var` alone and
        pp having trivial content with respect to `var`.
        """
        if var not in self.vars or self.is_zero():
            return MultiPoly.constant(1, self.vars), self
        i = self.vars.index(var)
        buckets = {}
        for exp, c in self.terms.items():
            rest = exp[:i] + (0,) + exp[i + 1:]
            buckets.setdefault(rest, {})[exp[i]] = c
        content = None
        for coeffs in buckets.values():
            poly = MultiPoly(self.vars,
                             {(0,) * i + (e,) + (0,) * (len(self.vars) - i - 1): c
                              for e, c in coeffs.items()})
            content = poly if content is None else _gcd_univariate(content, poly)
            if content.total_degree() == 0:
                break
        _, content = content.primitive()
        if content.total_degree() <= 0:
            return MultiPoly.constant(1, self.vars), self
        return content, self.divexact(content)

    # -- rendering -----------------------------------------------------------
    def __str__(self):
        return poly_str(self)

    def __repr__(self):
        return f"MultiPoly({poly_str(self)})"


def poly_str(p: MultiPoly) -> str:
    """Canonical text form: graded-lex descending, explicit signs."""
    if p.is_zero():
        return "0"
    parts = []
    for exp in sorted(p.terms, key=lambda e: (sum(e), e), reverse=True):
        c = p.terms[exp]
        mono = "*".join(
            v if e == 1 else f"{v}^{e}"
            for v, e in zip(p.vars, exp) if e
        )
        mag = abs(c)
        if mono:
            body = mono if mag == 1 else f"{mag}*{mono}"
        else:
            body = str(mag)
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(parts)


def _gcd_univariate(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    """Exact gcd for polynomials in (at most) one shared variable."""
    va, ca = a.as_univariate()
    vb, cb = b.as_univariate()
    if ca is None or cb is None:
        raise ValueError("not univariate")
    if va is not None and vb is not None and va != vb:
        return MultiPoly.constant(1, a.vars)
    var = va or vb
    x, y = ca, cb
    while any(y):
        x, y = y, _uni_mod(x, y)
    deg = len(x) - 1
    while deg > 0 and not x[deg]:
        deg -= 1
    if deg == 0 or var is None:
        return MultiPoly.constant(1, a.vars)
    lead = x[deg]
    variables = _merge_vars(a.vars, (var,))
    i = variables.index(var)
    terms = {}
    for e, c in enumerate(x[:deg + 1]):
        if c:
            exp = [0] * len(variables)
            exp[i] = e
            terms[tuple(exp)] = c / lead
    return MultiPoly(variables, terms)


def _uni_mod(x, y):
    dy = len(y) - 1
    while dy > 0 and not y[dy]:
        dy -= 1
    r = list(x)
    dr = len(r) - 1
    while dr >= dy:
        if r[dr]:
            q = r[dr] / y[dy]
            for j in range(dy + 1):
                r[dr - dy + j] -= q * y[j]
        dr -= 1
    return r[:dy] if dy > 0 else [Fraction(0)]


def gcd_best_effort(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    """Common factor of a and b; exact for univariate inputs, otherwise
    contents + monomials + univariate content splits + divisibility probes.
    Never returns a spurious factor."""
    if a.is_zero():
        _, pp = b.primitive()
        return pp
    if b.is_zero():
        _, pp = a.primitive()
        return pp
    a, b = a._aligned(b)
    variables = a.vars
    mono = tuple(map(min, a.monomial_content(), b.monomial_content()))
    a = a.shift_down(mono)
    b = b.shift_down(mono)
    _, a = a.primitive()
    _, b = b.primitive()
    g = MultiPoly(variables, {tuple(mono): Fraction(1)}) if any(mono) \
        else MultiPoly.constant(1, variables)
    if len(a.active_vars() | b.active_vars()) <= 1:
        return g * _gcd_univariate(a, b)
    for var in variables:
        ca, a = a.content_wrt(var)
        cb, b = b.content_wrt(var)
        g = g * _gcd_univariate(ca, cb)
    # doubly primitive leftovers: only cheap divisibility probes remain
    if a.divides(b):
        return g * a
    if b.divides(a):
        return g * b
    return g


def lcm_best_effort(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    g = gcd_best_effort(a, b)
    return a.divexact(g) * b


class RatFunc:
    """Quotient of two MultiPoly with a content-normalized denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, _reduce=True):
        if isinstance(num, (int, Fraction)):
            num = MultiPoly.constant(num)
        if den is None:
            den = MultiPoly.constant(1, num.vars)
        elif isinstance(den, (int, Fraction)):
            den = MultiPoly.constant(den, num.vars)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        num, den = num._aligned(den)
        if num.is_zero():
            den = MultiPoly.constant(1, num.vars)
        elif _reduce:
            g = gcd_best_effort(num, den)
            if g.total_degree() > 0 or any(g.monomial_content()):
                num = num.divexact(g)
                den = den.divexact(g)
            c, den = den.primitive()
            num = num.scale(1 / c)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, *a):
        raise AttributeError("RatFunc is immutable")

    @staticmethod
    def of(value):
        if isinstance(value, RatFunc):
            return value
        if isinstance(value, MultiPoly):
            return RatFunc(value, _reduce=False)
        return RatFunc(MultiPoly.constant(value), _reduce=False)

    def is_zero(self):
        return self.num.is_zero()

    def is_polynomial(self):
        return self.den.is_constant()

    def as_poly(self) -> MultiPoly:
        if not self.is_polynomial():
            raise ValueError("denominator is not constant")
        return self.num.scale(1 / self.den.constant_value())

    def __neg__(self):
        return RatFunc(-self.num, self.den, _reduce=False)

    def __add__(self, other):
        other = RatFunc.of(other)
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den,
                       self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-RatFunc.of(other))

    def __rsub__(self, other):
        return RatFunc.of(other) + (-self)

    def __mul__(self, other):
        other = RatFunc.of(other)
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * RatFunc.of(other).inv()

    def inv(self):
        if self.is_zero():
            raise ZeroDivisionError("inverting zero rational function")
        return RatFunc(self.den, self.num)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, MultiPoly)):
            other = RatFunc.of(other)
        if not isinstance(other, RatFunc):
            return NotImplemented
        # exact regardless of reduction quality
        return (self.num * other.den) == (other.num * self.den)

    def __hash__(self):
        raise TypeError("RatFunc is not hashable (normal form not unique)")

    def evaluate(self, point: Mapping[str, Fraction]) -> Fraction:
        d = self.den.evaluate(point)
        if d == 0:
            raise DenominatorVanishes(self, point)
        return self.num.evaluate(point) / d

    def complexity(self):
        return (max(self.num.total_degree(), 0) + max(self.den.total_degree(), 0),
                len(self.num.terms) + len(self.den.terms))

    def __str__(self):
        if self.is_polynomial():
            return poly_str(self.as_poly())
        return f"({poly_str(self.num)}) / ({poly_str(self.den)})"

    __repr__ = __str__


_ZERO = RatFunc.of(0)
_ONE = RatFunc.of(1)


class ExactMatrix:
    """Dense rectangular matrix over RatFunc."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data: Iterable[Iterable]):
        grid = tuple(tuple(RatFunc.of(x) for x in row) for row in data)
        rows = len(grid)
        cols = len(grid[0]) if rows else 0
        if any(len(r) != cols for r in grid):
            raise ValueError("ragged rows")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "data", grid)

    def __setattr__(self, *a):
        raise AttributeError("ExactMatrix is immutable")

    @staticmethod
    def identity(n):
        return ExactMatrix([[_ONE if i == j else _ZERO for j in range(n)]
                            for i in range(n)])

    @staticmethod
    def zeros(rows, cols):
        return ExactMatrix([[_ZERO] * cols for _ in range(rows)])

    @staticmethod
    def from_fractions(grid):
        return ExactMatrix([[RatFunc.of(Fraction(x)) for x in row] for row in grid])

    def __getitem__(self, rc):
        r, c = rc
        return self.data[r][c]

    def row(self, i):
        return self.data[i]

    def column(self, j):
        return tuple(self.data[i][j] for i in range(self.rows))

    def hstack(self, other: "ExactMatrix"):
        if self.rows != other.rows:
            raise ValueError("row count mismatch")
        return ExactMatrix([self.data[i] + other.data[i] for i in range(self.rows)])

    def vstack(self, other: "ExactMatrix"):
        if self.cols != other.cols:
            raise ValueError("column count mismatch")
        return ExactMatrix(self.data + other.data)

    def submatrix(self, row_idx, col_idx):
        return ExactMatrix([[self.data[i][j] for j in col_idx] for i in row_idx])

    def transpose(self):
        return ExactMatrix([[self.data[i][j] for i in range(self.rows)]
                            for j in range(self.cols)])

    def __matmul__(self, other: "ExactMatrix"):
        if self.cols != other.rows:
            raise ValueError("inner dimension mismatch")
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = _ZERO
                for k in range(self.cols):
                    a = self.data[i][k]
                    if a.is_zero():
                        continue
                    b = other.data[k][j]
                    if b.is_zero():
                        continue
                    acc = acc + a * b
                row.append(acc)
            out.append(row)
        return ExactMatrix(out)

    def __add__(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return ExactMatrix([[self.data[i][j] + other.data[i][j]
                             for j in range(self.cols)] for i in range(self.rows)])

    def __sub__(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return ExactMatrix([[self.data[i][j] - other.data[i][j]
                             for j in range(self.cols)] for i in range(self.rows)])

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        if (self.rows, self.cols) != (other.rows, other.cols):
            return False
        return all(self.data[i][j] == other.data[i][j]
                   for i in range(self.rows) for j in range(self.cols))

    def __hash__(self):
        raise TypeError("ExactMatrix is not hashable")

    def is_zero(self):
        return all(e.is_zero() for row in self.data for e in row)

    def map(self, fn):
        return ExactMatrix([[fn(e) for e in row] for row in self.data])

    def to_fractions(self):
        out = []
        for row in self.data:
            if any(not e.num.is_constant() or not e.den.is_constant() for e in row):
                raise ValueError("matrix has non-constant entries")
            out.append([e.num.constant_value() / e.den.constant_value() for e in row])
        return out

    def to_float(self):
        import numpy as np
        return np.array([[float(f) for f in row] for row in self.to_fractions()],
                        dtype=float)

    def __repr__(self):
        body = "\n".join("  [" + ", ".join(str(e) for e in row) + "]"
                         for row in self.data)
        return f"ExactMatrix {self.rows}x{self.cols}\n{body}"


def evaluate(M: ExactMatrix, point: Mapping[str, Fraction]) -> ExactMatrix:
    """Evaluate every entry at the given variable binding.

    Raises DenominatorVanishes when the point hits any entry's pole, which is
    the signal that the point lies outside the admissible eigenvalue set.
    """
    point = {k: Fraction(v) for k, v in point.items()}
    return M.map(lambda e: RatFunc.of(e.evaluate(point)))


class RrefResult:
    """Outcome of exact Gauss-Jordan reduction: T @ M = E."""

    __slots__ = ("E", "T", "pivots", "pivot_factors")

    def __init__(self, E, T, pivots, pivot_factors):
        self.E = E
        self.T = T
        self.pivots = pivots
        self.pivot_factors = pivot_factors

    def __iter__(self):  # (E, T, pivots) unpacking
        return iter((self.E, self.T, self.pivots))

    @property
    def rank(self):
        return len(self.pivots)


def rref_with_transform(M: ExactMatrix) -> RrefResult:
    """Reduced row-echelon form over the rational-function field.

    Returns E, an invertible transform T with T @ M = E, the pivot column
    list, and the primitive numerator/denominator factors of every pivot
    (the locus where the generic reduction degenerates).

    Pivot choice: leftmost column, then lowest total degree, ties by row.
    """
    n = M.rows
    work = [list(row) for row in M.data]
    trans = [list(row) for row in ExactMatrix.identity(n).data]
    pivots = []
    factors = []
    pr = 0
    for col in range(M.cols):
        best = None
        for r in range(pr, n):
            e = work[r][col]
            if e.is_zero():
                continue
            key = (e.complexity(), r)
            if best is None or key < best[0]:
                best = (key, r)
        if best is None:
            continue
        r = best[1]
        if r != pr:
            work[pr], work[r] = work[r], work[pr]
            trans[pr], trans[r] = trans[r], trans[pr]
        piv = work[pr][col]
        for f in (piv.num, piv.den):
            if f.total_degree() > 0:
                factors.append(f)
        inv = piv.inv()
        work[pr] = [e * inv for e in work[pr]]
        trans[pr] = [e * inv for e in trans[pr]]
        for r2 in range(n):
            if r2 == pr:
                continue
            f = work[r2][col]
            if f.is_zero():
                continue
            work[r2] = [a - f * b for a, b in zip(work[r2], work[pr])]
            trans[r2] = [a - f * b for a, b in zip(trans[r2], trans[pr])]
        pivots.append(col)
        pr += 1
        if pr == n:
            break
    return RrefResult(ExactMatrix(work), ExactMatrix(trans), pivots, factors)


def exact_rank(M: ExactMatrix) -> int:
    """Rank over the rational(-function) field."""
    if M.rows == 0 or M.cols == 0:
        return 0
    try:
        return rank_fractions(M.to_fractions())
    except ValueError:
        return rref_with_transform(M).rank


def rank_fractions(grid) -> int:
    """Rank of a matrix of Fractions by exact elimination."""
    work = [list(map(Fraction, row)) for row in grid]
    if not work or not work[0]:
        return 0
    rows, cols = len(work), len(work[0])
    rank = 0
    for col in range(cols):
        sel = None
        for r in range(rank, rows):
            if work[r][col]:
                sel = r
                break
        if sel is None:
            continue
        work[rank], work[sel] = work[sel], work[rank]
        piv = work[rank][col]
        prow = work[rank]
        for r in range(rank + 1, rows):
            f = work[r][col]
            if f:
                f = f / piv
                row = work[r]
                for c in range(col, cols):
                    row[c] -= f * prow[c]
        rank += 1
        if rank == rows:
            break
    return rank


def poly_kernel(M: ExactMatrix):
    """Right kernel basis of a univariate polynomial matrix.

    The basis is computed over the field of rational functions and cleared
    to polynomial columns (each scaled by its least common denominator and
    content-normalized with positive leading coefficient).  Returns
    (basis: ExactMatrix with polynomial entries, rank over the field).
    """
    res = rref_with_transform(M)
    rank = res.rank
    pivset = set(res.pivots)
    free = [c for c in range(M.cols) if c not in pivset]
    columns = []
    for fc in free:
        vec = [_ZERO] * M.cols
        vec[fc] = _ONE
        for r, pc in enumerate(res.pivots):
            vec[pc] = -res.E[r, fc]
        lcd = MultiPoly.constant(1)
        for e in vec:
            lcd = lcm_best_effort(lcd, e.den)
        col = [(e * RatFunc.of(lcd)).as_poly() for e in vec]
        col = _normalize_poly_column(col)
        columns.append(col)
    if columns:
        basis = ExactMatrix([[columns[j][i] for j in range(len(columns))]
                             for i in range(M.cols)])
    else:
        basis = ExactMatrix.zeros(M.cols, 0)
    return basis, rank


def _normalize_poly_column(col):
    nz = [p for p in col if not p.is_zero()]
    if not nz:
        return col
    g = nz[0]
    for p in nz[1:]:
        g = gcd_best_effort(g, p)
        if g.total_degree() <= 0 and not any(g.monomial_content()):
            break
    if g.total_degree() > 0 or any(g.monomial_content()):
        col = [p.divexact(g) if not p.is_zero() else p for p in col]
        nz = [p for p in col if not p.is_zero()]
    content = Fraction(0)
    for p in nz:
        content = _frac_gcd(content, p.content()) if content else p.content()
    _, lead = nz[0].leading()
    if lead < 0:
        content = -content
    return [p.scale(1 / content) for p in col]
