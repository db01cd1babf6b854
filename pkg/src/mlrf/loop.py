"""Single-path linear-constraint loops and operations on transition relations."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .linalg import ONE, ZERO, Matrix, is_zero, rref, vadd, vec, zeros
from .polyhedron import Polyhedron

LEQ = "<="
EQUAL = "="


@dataclass(frozen=True)
class SLCLoop:
    """``while (B x <= b) do A x + A' x' <= c``.

    Each guard and update row carries its relation (``"<="`` or ``"="``).
    """

    names: tuple
    B: Matrix
    b: tuple
    A: Matrix
    A_primed: Matrix
    c: tuple
    guard_rel: tuple = ()
    update_rel: tuple = ()

    def __post_init__(self):
        n = len(self.names)
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "b", vec(self.b))
        object.__setattr__(self, "c", vec(self.c))
        if not self.guard_rel:
            object.__setattr__(self, "guard_rel", (LEQ,) * self.B.nrows)
        if not self.update_rel:
            object.__setattr__(self, "update_rel", (LEQ,) * self.A.nrows)
        if self.B.ncols != n or self.A.ncols != n or self.A_primed.ncols != n:
            raise ValueError("matrix column count must equal the number of variables")
        if self.B.nrows != len(self.b) or len(self.guard_rel) != len(self.b):
            raise ValueError("guard rows inconsistent with b")
        if not (self.A.nrows == self.A_primed.nrows == len(self.c) == len(self.update_rel)):
            raise ValueError("update rows inconsistent with c")
        for rel in self.guard_rel + self.update_rel:
            if rel not in (LEQ, EQUAL):
                raise ValueError(f"unsupported relation {rel!r}")

    @property
    def n(self) -> int:
        return len(self.names)

    @classmethod
    def from_rows(cls, names, guard=(), update=()):
        """Build from row lists.  Guard rows are ``(coeffs, rel, rhs)`` over x;
        update rows are ``(coeffs_x, coeffs_xprime, rel, rhs)``."""
        n = len(names)
        return cls(
            tuple(names),
            Matrix([g[0] for g in guard], ncols=n),
            tuple(g[2] for g in guard),
            Matrix([u[0] for u in update], ncols=n),
            Matrix([u[1] for u in update], ncols=n),
            tuple(u[3] for u in update),
            tuple(g[1] for g in guard),
            tuple(u[2] for u in update),
        )


class TransitionPoly:
    """A transition relation: a polyhedron over ``(x, x')``."""

    def __init__(self, poly: Polyhedron, names: Sequence[str], loop: Optional[SLCLoop] = None):
        if poly.dim != 2 * len(names):
            raise ValueError("transition polyhedron must have dimension 2n")
        self.poly = poly
        self.names = tuple(names)
        self.loop = loop

    @property
    def n(self) -> int:
        return len(self.names)

    def __repr__(self) -> str:
        return f"TransitionPoly(n={self.n}, rows={self.poly.num_rows})"

    def with_poly(self, poly: Polyhedron) -> "TransitionPoly":
        return TransitionPoly(poly, self.names, self.loop)

    def is_empty(self) -> bool:
        return self.poly.is_empty()

    def set_equals(self, other: "TransitionPoly") -> bool:
        return self.poly.set_equals(other.poly)

    def states(self) -> Polyhedron:
        return self.poly.project(range(self.n))

    def successors(self) -> Polyhedron:
        return self.poly.project(range(self.n, 2 * self.n))

    def all_names(self) -> list:
        return list(self.names) + [f"{v}'" for v in self.names]

    def format(self) -> list:
        return self.poly.format(self.all_names())


def build_transition_polyhedron(loop: SLCLoop) -> TransitionPoly:
    n = loop.n
    ineqs, eqs = [], []
    for row, rel, rhs in zip(loop.B.rows, loop.guard_rel, loop.b):
        (eqs if rel == EQUAL else ineqs).append((row + zeros(n), rhs))
    for ra, rp, rel, rhs in zip(loop.A.rows, loop.A_primed.rows, loop.update_rel, loop.c):
        (eqs if rel == EQUAL else ineqs).append((ra + rp, rhs))
    return TransitionPoly(Polyhedron(2 * n, ineqs, eqs), loop.names, loop)


def identity_relation(names: Sequence[str]) -> TransitionPoly:
    n = len(names)
    eqs = []
    for i in range(n):
        row = [ZERO] * (2 * n)
        row[i] = ONE
        row[n + i] = -ONE
        eqs.append((tuple(row), ZERO))
    return TransitionPoly(Polyhedron(2 * n, (), eqs), names)


def _place(row, n, blocks, total):
    """Spread a row over ``(x, x')`` into a wider space: block ``k`` of the
    source goes to block ``blocks[k]`` of the target."""
    out = [ZERO] * (total * n)
    for k, tb in enumerate(blocks):
        for j in range(n):
            out[tb * n + j] = row[k * n + j]
    return tuple(out)


def compose(S: TransitionPoly, T: TransitionPoly) -> TransitionPoly:
    """``{(x, z) | exists y. (x, y) in S and (y, z) in T}``."""
    if S.n != T.n:
        raise ValueError("relations over different variable counts")
    n = S.n
    ineqs = [(_place(a, n, (0, 1), 3), b) for a, b in S.poly.ineqs]
    ineqs += [(_place(a, n, (1, 2), 3), b) for a, b in T.poly.ineqs]
    eqs = [(_place(a, n, (0, 1), 3), b) for a, b in S.poly.eqs]
    eqs += [(_place(a, n, (1, 2), 3), b) for a, b in T.poly.eqs]
    joint = Polyhedron(3 * n, ineqs, eqs)
    keep = list(range(n)) + list(range(2 * n, 3 * n))
    return TransitionPoly(joint.project(keep), S.names)


def power(T: TransitionPoly, k: int) -> TransitionPoly:
    if k < 0:
        raise ValueError("power needs k >= 0")
    result = identity_relation(T.names)
    for i in range(k):
        result = T if i == 0 else compose(result, T)
        if result.is_empty():
            return TransitionPoly(Polyhedron.empty(2 * T.n), T.names)
    return result


def pre(T: TransitionPoly, k: int) -> Polyhedron:
    """States from which traces of length ``k`` start: ``proj_x(T^k)``."""
    if k < 1:
        raise ValueError("pre needs k >= 1")
    return power(T, k).states()


def restrict_states(T: TransitionPoly, states: Polyhedron) -> TransitionPoly:
    n = T.n
    ineqs = [(a + zeros(n), b) for a, b in states.ineqs]
    eqs = [(a + zeros(n), b) for a, b in states.eqs]
    return T.with_poly(T.poly.add_constraints(ineqs, eqs))


def displacement_rows(poly: Polyhedron, n: int):
    """Rows of the displacement form: ``(alpha, beta) . (x, x') <= c`` becomes
    ``(alpha + beta, beta) . (x, y) <= c``."""
    def conv(a):
        return vadd(a[:n], a[n:]) + a[n:]

    return [(conv(a), b) for a, b in poly.ineqs], [(conv(a), b) for a, b in poly.eqs]


def displacement(Q: TransitionPoly) -> Polyhedron:
    """Displacement polyhedron over ``(x, y)`` with ``y = x' - x``."""
    ineqs, eqs = displacement_rows(Q.poly, Q.n)
    return Polyhedron(2 * Q.n, ineqs, eqs)


def displacement_by_projection(Q: TransitionPoly) -> Polyhedron:
    """``proj_{x,y}(Q and x' = x + y)``, built by projection (independent route)."""
    n = Q.n
    ineqs = [(a + zeros(n), b) for a, b in Q.poly.ineqs]
    eqs = [(a + zeros(n), b) for a, b in Q.poly.eqs]
    for i in range(n):
        row = [ZERO] * (3 * n)
        row[n + i] = ONE  # x'
        row[i] = -ONE  # x
        row[2 * n + i] = -ONE  # y
        eqs.append((tuple(row), ZERO))
    joint = Polyhedron(3 * n, ineqs, eqs)
    return joint.project(list(range(n)) + list(range(2 * n, 3 * n)))


def displacement_matrix(loop: SLCLoop) -> Matrix:
    """``D = (B 0; A+A' A')`` built from the loop's blocks."""
    n = loop.n
    rows = [r + zeros(n) for r in loop.B.rows]
    rows += [vadd(a, p) + p for a, p in zip(loop.A.rows, loop.A_primed.rows)]
    return Matrix(rows, ncols=2 * n)


def transition_matrix(loop: SLCLoop) -> Matrix:
    n = loop.n
    rows = [r + zeros(n) for r in loop.B.rows]
    rows += [a + p for a, p in zip(loop.A.rows, loop.A_primed.rows)]
    return Matrix(rows, ncols=2 * n)


@dataclass(frozen=True)
class AffineUpdate:
    """``x' = U x + c``."""

    U: Matrix
    c: tuple

    def apply(self, x) -> tuple:
        return vadd(self.U @ x, self.c)

    def is_integral(self) -> bool:
        return self.U.is_integral() and all(v.denominator == 1 for v in self.c)


def extract_affine_update(Q: TransitionPoly) -> Optional[AffineUpdate]:
    """Read ``x' = U x + c`` off the equality rows, if they pin every primed
    variable.  Inequalities that imply equalities are not considered."""
    n = Q.n
    if not Q.poly.eqs:
        return None
    rows = [a + (b,) for a, b in Q.poly.eqs]
    order = list(range(n, 2 * n)) + list(range(n))
    red, pivots = rref(rows, 2 * n + 1, pivot_order=order)
    primed = {}
    for row, p in zip(red, pivots):
        if p >= n:
            if any(row[n + j] for j in range(n) if n + j != p):
                return None
            primed[p - n] = row
    if len(primed) != n:
        return None
    U, c = [], []
    for i in range(n):
        row = primed[i]
        # x'_i + g.x = e  ->  x'_i = -g.x + e
        U.append(tuple(-row[j] for j in range(n)))
        c.append(row[2 * n])
    return AffineUpdate(Matrix(U, ncols=n), tuple(c))
