"""Depth-bounded ranking-function decisions through the displacement
polyhedron ``y = x' - x``.

Every check here is a single LP feasibility question on a stacked system;
nothing is projected and no generators are enumerated.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .engine import MLRF_FOUND, NONTERMINATING, MLRF, RecurrentSet, Verdict, synthesize_nested
from .linalg import ONE, ZERO, Matrix, zeros
from .loop import TransitionPoly, displacement_rows, extract_affine_update
from .polyhedron import Polyhedron, nonneg_cone


@dataclass(frozen=True)
class StackedSystem:
    """``D(x, y0) <= c''`` followed by ``k`` homogeneous copies
    ``D(y_{i-1}, y_i) <= 0``, over ``(x, y0, ..., yk)``."""

    n: int
    k: int
    base_ineqs: tuple
    base_eqs: tuple
    poly: Polyhedron

    @property
    def dim(self) -> int:
        return self.n * (self.k + 2)

    @property
    def blocks(self) -> int:
        return self.k


def _spread(row, n, first, total):
    """Place a row over (u, v) at block positions ``first`` and ``first + 1``."""
    out = [ZERO] * total
    out[first * n:(first + 2) * n] = row
    return tuple(out)


def build_stacked(Q: TransitionPoly, k: int) -> StackedSystem:
    if k < 0:
        raise ValueError("k must be nonnegative")
    n = Q.n
    total = n * (k + 2)
    ineqs, eqs = displacement_rows(Q.poly, n)
    out_i = [(_spread(a, n, 0, total), b) for a, b in ineqs]
    out_e = [(_spread(a, n, 0, total), b) for a, b in eqs]
    for i in range(1, k + 1):
        out_i += [(_spread(a, n, i, total), ZERO) for a, _ in ineqs]
        out_e += [(_spread(a, n, i, total), ZERO) for a, _ in eqs]
    return StackedSystem(n, k, tuple(ineqs), tuple(eqs), Polyhedron(total, out_i, out_e))


def depth_decision(Q: TransitionPoly, d: int) -> bool:
    """True iff ``Q`` has a multiphase ranking function of depth ``d``."""
    if d < 0:
        raise ValueError("d must be nonnegative")
    return build_stacked(Q, d).poly.is_empty()


def depth_profile(Q: TransitionPoly, d_max: int) -> list:
    return [depth_decision(Q, d) for d in range(d_max + 1)]


def min_depth(Q: TransitionPoly, d_max: int) -> Optional[int]:
    if d_max < 0:
        raise ValueError("d_max must be nonnegative")
    for d in range(d_max + 1):
        if depth_decision(Q, d):
            return d
    return None


def fixpoints(Q: TransitionPoly) -> Polyhedron:
    """Transitions with ``x' = x``."""
    n = Q.n
    eqs = [(tuple(ONE if j == i else -ONE if j == n + i else ZERO for j in range(2 * n)), ZERO) for i in range(n)]
    return Q.poly.add_constraints(eqs=eqs)


def bounded_loop_analyze(Q: TransitionPoly) -> Optional[Verdict]:
    """Complete answer for loops with a bounded transition polyhedron, or
    None when ``Q`` is unbounded."""
    if Q.is_empty():
        return Verdict(MLRF_FOUND, mlrf=MLRF(()), iterations=0)
    if not Q.poly.is_bounded():
        return None
    fixed = fixpoints(Q)
    if not fixed.is_empty():
        fixed = fixed.remove_redundant()
        return Verdict(NONTERMINATING, recurrent=RecurrentSet(fixed, fixed.project(range(Q.n))), iterations=0)
    return Verdict(MLRF_FOUND, mlrf=synthesize_nested(Q, 1), iterations=0)


def nilpotency_certificate(Q: TransitionPoly) -> Optional[int]:
    """Least ``N <= n`` with ``(U - I)^N = 0`` for the affine update ``x' = Ux + c``."""
    update = extract_affine_update(Q)
    if update is None:
        raise ValueError("loop update is not a deterministic affine map")
    n = Q.n
    M = update.U - Matrix.identity(n)
    power = M
    for N in range(1, n + 1):
        if power.is_zero():
            return N
        power = power @ M
    return None


# -- the refinement operator in displacement coordinates ---------------------


def refine_by_generators(R: Polyhedron, n: int) -> Polyhedron:
    """Conjoin ``-a.y <= 0`` for the generators ``a`` of the nonnegative
    functions on ``proj_x(R)``."""
    gens = nonneg_cone(R, n)
    rows = [(zeros(n) + tuple(-v for v in g.coeffs), ZERO) for g in gens if any(g.coeffs)]
    return R.add_constraints(rows)


def refine_by_rows(R: Polyhedron, n: int) -> Polyhedron:
    """Conjoin ``M y <= 0`` (and ``E y = 0``) where ``proj_x(R)`` is
    ``{M x <= b, E x = e}``."""
    states = R.project(range(n))
    ineqs = [(zeros(n) + a, ZERO) for a, _ in states.ineqs]
    eqs = [(zeros(n) + a, ZERO) for a, _ in states.eqs]
    return R.add_constraints(ineqs, eqs)
