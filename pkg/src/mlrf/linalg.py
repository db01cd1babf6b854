"""Exact rational linear algebra and linear programming.

Scalars are :class:`fractions.Fraction` (always kept in lowest terms with a
positive denominator).  Vectors are plain tuples of fractions; :class:`Matrix`
is a small immutable dense row-major matrix.  Nothing in this module touches
floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Optional, Sequence

Rational = Fraction
Vector = tuple

ZERO = Fraction(0)
ONE = Fraction(1)

LE, GE, EQ, LT, GT = "<=", ">=", "==", "<", ">"
_RELATIONS = (LE, GE, EQ, LT, GT)


def frac(value) -> Fraction:
    """Coerce ints, fractions and ``"p/q"`` strings to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("floating point values are not accepted")
    return Fraction(value)


def vec(values: Iterable) -> tuple:
    return tuple(frac(v) for v in values)


def zeros(n: int) -> tuple:
    return (ZERO,) * n


def unit(n: int, i: int) -> tuple:
    return tuple(ONE if j == i else ZERO for j in range(n))


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    if len(u) != len(v):
        raise ValueError(f"dimension mismatch: {len(u)} vs {len(v)}")
    total = ZERO
    for a, b in zip(u, v):
        if a and b:
            total += a * b
    return total


def vadd(u, v) -> tuple:
    return tuple(a + b for a, b in zip(u, v))


def vsub(u, v) -> tuple:
    return tuple(a - b for a, b in zip(u, v))


def vscale(k, u) -> tuple:
    return tuple(k * a for a in u)


def is_zero(u) -> bool:
    return not any(u)


def lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def primitive(u: Sequence[Fraction]) -> tuple:
    """Positive multiple of ``u`` with coprime integer entries."""
    den = 1
    for a in u:
        den = lcm(den, a.denominator)
    ints = [int(a * den) for a in u]
    g = 0
    for a in ints:
        g = gcd(g, a)
    if g == 0:
        return tuple(ZERO for _ in u)
    return tuple(Fraction(a // g) for a in ints)


class Matrix:
    """Immutable dense rational matrix."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Iterable], ncols: Optional[int] = None):
        rows = tuple(vec(r) for r in rows)
        if ncols is None:
            if not rows:
                raise ValueError("ncols required for an empty matrix")
            ncols = len(rows[0])
        for r in rows:
            if len(r) != ncols:
                raise ValueError("ragged matrix rows")
        self.rows = rows
        self.nrows = len(rows)
        self.ncols = ncols

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls((unit(n, i) for i in range(n)), ncols=n)

    @classmethod
    def zero(cls, m: int, n: int) -> "Matrix":
        return cls((zeros(n) for _ in range(m)), ncols=n)

    @property
    def shape(self) -> tuple:
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other) -> bool:
        return isinstance(other, Matrix) and self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        return hash((self.shape, self.rows))

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(a) for a in r) for r in self.rows)
        return f"Matrix([{body}])"

    def _same_shape(self, other: "Matrix"):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch: {self.shape} vs {other.shape}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._same_shape(other)
        return Matrix((vadd(a, b) for a, b in zip(self.rows, other.rows)), self.ncols)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._same_shape(other)
        return Matrix((vsub(a, b) for a, b in zip(self.rows, other.rows)), self.ncols)

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
            cols = other.columns()
            return Matrix(((dot(r, c) for c in cols) for r in self.rows), other.ncols)
        v = tuple(other)
        if len(v) != self.ncols:
            raise ValueError(f"cannot multiply {self.shape} by vector of length {len(v)}")
        return tuple(dot(r, v) for r in self.rows)

    def __pow__(self, k: int) -> "Matrix":
        if self.nrows != self.ncols:
            raise ValueError("matrix power needs a square matrix")
        result = Matrix.identity(self.nrows)
        for _ in range(k):
            result = result @ self
        return result

    def columns(self) -> tuple:
        return tuple(tuple(r[j] for r in self.rows) for j in range(self.ncols))

    def transpose(self) -> "Matrix":
        return Matrix(self.columns(), ncols=self.nrows)

    def is_zero(self) -> bool:
        return all(is_zero(r) for r in self.rows)

    def is_integral(self) -> bool:
        return all(a.denominator == 1 for r in self.rows for a in r)


# ---------------------------------------------------------------------------
# Gaussian elimination


def rref(rows: Sequence[Sequence[Fraction]], ncols: int, pivot_order: Optional[Sequence[int]] = None):
    """Reduced row echelon form.

    Returns ``(rows, pivots)`` where ``pivots[k]`` is the pivot column of row
    ``k``.  Zero rows are dropped.  ``pivot_order`` fixes the order in which
    columns are tried as pivots (default: left to right).
    """
    work = [list(vec(r)) for r in rows]
    order = list(range(ncols)) if pivot_order is None else list(pivot_order)
    pivots = []
    r = 0
    for c in order:
        if r == len(work):
            break
        piv = next((i for i in range(r, len(work)) if work[i][c]), None)
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        p = work[r][c]
        if p != 1:
            work[r] = [a / p for a in work[r]]
        prow = work[r]
        for i in range(len(work)):
            if i != r and work[i][c]:
                f = work[i][c]
                work[i] = [a - f * b for a, b in zip(work[i], prow)]
        pivots.append(c)
        r += 1
    out = [tuple(w) for w in work[:r]]
    return out, pivots


def rank(rows: Sequence[Sequence[Fraction]], ncols: int) -> int:
    return len(rref(rows, ncols)[1])


@dataclass(frozen=True)
class LinearSolution:
    """Outcome of :func:`gaussian_solve`.

    ``kind`` is ``"unique"``, ``"parametric"`` or ``"inconsistent"``.  For
    consistent systems every solution is ``particular + sum t_i kernel[i]``.
    """

    kind: str
    particular: Optional[tuple] = None
    kernel: tuple = ()


def gaussian_solve(M: Matrix, v: Sequence) -> LinearSolution:
    v = vec(v)
    if len(v) != M.nrows:
        raise ValueError(f"right-hand side has length {len(v)}, expected {M.nrows}")
    n = M.ncols
    aug = [r + (b,) for r, b in zip(M.rows, v)]
    red, pivots = rref(aug, n + 1, pivot_order=range(n + 1))
    if n in pivots:
        return LinearSolution("inconsistent")
    x = [ZERO] * n
    for row, p in zip(red, pivots):
        x[p] = row[n]
    free = [j for j in range(n) if j not in pivots]
    kernel = []
    for f in free:
        k = [ZERO] * n
        k[f] = ONE
        for row, p in zip(red, pivots):
            k[p] = -row[f]
        kernel.append(tuple(k))
    kind = "unique" if not kernel else "parametric"
    return LinearSolution(kind, tuple(x), tuple(kernel))


def nullspace(rows: Sequence[Sequence[Fraction]], ncols: int) -> list:
    red, pivots = rref(rows, ncols)
    basis = []
    for f in (j for j in range(ncols) if j not in pivots):
        k = [ZERO] * ncols
        k[f] = ONE
        for row, p in zip(red, pivots):
            k[p] = -row[f]
        basis.append(tuple(k))
    return basis


def integer_solve(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction], ncols: int) -> Optional[tuple]:
    """An integer solution of ``rows @ x == rhs`` or None if there is none.

    Column-style Hermite reduction: unimodular column operations bring the
    (integer-scaled) system to lower echelon form, after which the solution in
    the transformed coordinates is forced row by row.
    """
    H = []
    e = []
    for r, b in zip(rows, rhs):
        r, b = vec(r), frac(b)
        den = b.denominator
        for a in r:
            den = lcm(den, a.denominator)
        H.append([int(a * den) for a in r])
        e.append(b * den)
    m = len(H)
    W = [[int(i == j) for j in range(ncols)] for i in range(ncols)]  # columns of W

    def colop_swap(i, j):
        for row in H:
            row[i], row[j] = row[j], row[i]
        W[i], W[j] = W[j], W[i]

    def colop_sub(dst, src, q):
        # column dst -= q * column src
        for row in H:
            row[dst] -= q * row[src]
        W[dst] = [a - q * b for a, b in zip(W[dst], W[src])]

    col = 0
    pivot_rows = []
    for i in range(m):
        if col == ncols:
            break
        while True:
            nz = [j for j in range(col, ncols) if H[i][j]]
            if not nz:
                break
            j = min(nz, key=lambda j: abs(H[i][j]))
            if j != col:
                colop_swap(col, j)
            others = [j for j in range(col + 1, ncols) if H[i][j]]
            if not others:
                break
            for j in others:
                colop_sub(j, col, H[i][j] // H[i][col])
        if H[i][col]:
            pivot_rows.append((i, col))
            col += 1
    z = [Fraction(0)] * ncols
    piv_of_row = dict(pivot_rows)
    for i in range(m):
        p = piv_of_row.get(i)
        acc = e[i] - sum(H[i][j] * z[j] for j in range(ncols) if j != p and H[i][j])
        if p is not None:
            val = acc / H[i][p]
            if val.denominator != 1:
                return None
            z[p] = val
        elif acc != 0:
            return None
    # x = W z, where W holds the transformed columns
    x = [sum((W[j][k] * z[j] for j in range(ncols)), Fraction(0)) for k in range(ncols)]
    return tuple(x)


# ---------------------------------------------------------------------------
# Linear programming


@dataclass(frozen=True)
class LinCon:
    """A linear constraint ``coeffs . x  op  rhs``."""

    coeffs: tuple
    op: str
    rhs: Fraction

    def __post_init__(self):
        if self.op not in _RELATIONS:
            raise ValueError(f"unknown relation {self.op!r}")
        object.__setattr__(self, "coeffs", vec(self.coeffs))
        object.__setattr__(self, "rhs", frac(self.rhs))

    def holds(self, x) -> bool:
        lhs = dot(self.coeffs, x)
        return {
            LE: lhs <= self.rhs,
            GE: lhs >= self.rhs,
            EQ: lhs == self.rhs,
            LT: lhs < self.rhs,
            GT: lhs > self.rhs,
        }[self.op]


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "unbounded" | "infeasible"
    point: Optional[tuple] = None
    value: Optional[Fraction] = None

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"

    @property
    def feasible(self) -> bool:
        return self.status != "infeasible"


def _check_dims(constraints, n):
    for con in constraints:
        if len(con.coeffs) != n:
            raise ValueError(f"constraint has {len(con.coeffs)} coefficients, expected {n}")


def _pivot(T, r, c):
    row = T[r]
    p = row[c]
    if p != 1:
        row = [a / p for a in row]
        T[r] = row
    for i in range(len(T)):
        if i != r:
            f = T[i][c]
            if f:
                T[i] = [a - f * b if b else a for a, b in zip(T[i], row)]


def _run_simplex(T, basis, allowed):
    """Maximise with Bland's rule.  The last row of ``T`` is the objective row
    holding negated reduced costs; returns False if unbounded."""
    z = len(T) - 1
    while True:
        zrow = T[z]
        enter = next((j for j in allowed if zrow[j] < 0), None)
        if enter is None:
            return True
        best = None
        for i in range(z):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return False
        leave = best[1]
        _pivot(T, leave, enter)
        basis[leave] = enter


def lp_solve(constraints: Sequence[LinCon], objective: Sequence, sense: str = "max", nvars: Optional[int] = None) -> LPResult:
    """Exact two-phase simplex over free variables.

    ``constraints`` use ``<=``, ``>=`` or ``==``; strict relations belong to
    :func:`strict_feasible`.
    """
    objective = vec(objective)
    n = len(objective) if nvars is None else nvars
    if len(objective) != n:
        raise ValueError("objective has wrong dimension")
    _check_dims(constraints, n)
    if sense not in ("max", "min"):
        raise ValueError("sense must be 'max' or 'min'")
    for con in constraints:
        if con.op in (LT, GT):
            raise ValueError("strict constraints are not allowed in lp_solve")

    # columns: u (n), v (n), slacks, artificials; x = u - v
    m = len(constraints)
    nslack = sum(1 for con in constraints if con.op != EQ)
    ncols = 2 * n + nslack + m
    art0 = 2 * n + nslack
    T = []
    s = 2 * n
    for i, con in enumerate(constraints):
        row = [ZERO] * (ncols + 1)
        sign = -1 if con.rhs < 0 else 1
        for j, a in enumerate(con.coeffs):
            if a:
                row[j] = sign * a
                row[n + j] = -sign * a
        if con.op != EQ:
            row[s] = Fraction(sign if con.op == LE else -sign)
            s += 1
        row[art0 + i] = ONE
        row[-1] = sign * con.rhs
        T.append(row)
    basis = [art0 + i for i in range(m)]

    # phase 1: maximise -sum(artificials)
    zrow = [ZERO] * (ncols + 1)
    for j in range(art0, ncols):
        zrow[j] = ONE
    for row in T:
        zrow = [a - b for a, b in zip(zrow, row)]
    T.append(zrow)
    _run_simplex(T, basis, range(ncols))
    if T[-1][-1] != 0:
        return LPResult("infeasible")
    T.pop()
    # drive artificials out of the basis
    i = 0
    while i < len(T):
        if basis[i] >= art0:
            j = next((j for j in range(art0) if T[i][j]), None)
            if j is None:
                del T[i]
                del basis[i]
                continue
            _pivot(T, i, j)
            basis[i] = j
        i += 1
    T = [row[:art0] + [row[-1]] for row in T]

    sgn = 1 if sense == "max" else -1
    cost = [sgn * c for c in objective] + [-sgn * c for c in objective] + [ZERO] * nslack
    if any(cost):
        zrow = [-c for c in cost] + [ZERO]
        for r, bj in enumerate(basis):
            f = zrow[bj]
            if f:
                zrow = [a - f * b for a, b in zip(zrow, T[r])]
        T.append(zrow)
        if not _run_simplex(T, basis, range(art0)):
            return LPResult("unbounded")
        T.pop()
    values = [ZERO] * art0
    for r, bj in enumerate(basis):
        values[bj] = T[r][-1]
    point = tuple(values[j] - values[n + j] for j in range(n))
    return LPResult("optimal", point, dot(objective, point))


def feasible_point(constraints: Sequence[LinCon], nvars: int) -> Optional[tuple]:
    res = lp_solve(constraints, zeros(nvars), "max", nvars)
    return res.point if res.optimal else None


def strict_feasible(constraints: Sequence[LinCon], nvars: Optional[int] = None, witness: bool = False):
    """Decide feasibility of a system that may contain ``<`` and ``>``.

    Strict rows get a shared slack ``eps`` (bounded by 1) which is maximised;
    the system is feasible iff the optimum is positive.  With ``witness=True``
    returns the satisfying point (or None) instead of a boolean.
    """
    if nvars is None:
        if not constraints:
            raise ValueError("nvars required for an empty system")
        nvars = len(constraints[0].coeffs)
    _check_dims(constraints, nvars)
    strict = [c for c in constraints if c.op in (LT, GT)]
    if not strict:
        pt = feasible_point(constraints, nvars)
        return pt if witness else pt is not None
    lifted = []
    for c in constraints:
        if c.op == LT:
            lifted.append(LinCon(c.coeffs + (ONE,), LE, c.rhs))
        elif c.op == GT:
            lifted.append(LinCon(c.coeffs + (-ONE,), GE, c.rhs))
        else:
            lifted.append(LinCon(c.coeffs + (ZERO,), c.op, c.rhs))
    lifted.append(LinCon(zeros(nvars) + (ONE,), LE, ONE))
    res = lp_solve(lifted, zeros(nvars) + (ONE,), "max", nvars + 1)
    ok = res.optimal and res.value > 0
    if witness:
        return res.point[:nvars] if ok else None
    return ok
