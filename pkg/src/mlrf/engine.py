"""Transition elimination, multiphase ranking function synthesis and
recurrent-set extraction."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .linalg import EQ, GE, LE, ONE, ZERO, LinCon, feasible_point, lp_solve, strict_feasible, vec, zeros
from .loop import TransitionPoly, extract_affine_update, pre, restrict_states
from .polyhedron import AffineFunc, Polyhedron, nonneg_cone

log = logging.getLogger(__name__)

MLRF_FOUND = "MLRF"
NONTERMINATING = "NONTERMINATING"
UNKNOWN = "UNKNOWN"

DEPTH_BOUND = "depth-bound"
ITERATION_CAP = "iteration-cap"
NEEDS_INTEGER_HULL = "integer hull required"
RATIONAL_ONLY = "rational recurrent set; integer nontermination not established"


class SynthesisError(RuntimeError):
    """The nested-template LP was infeasible where a ranking function must exist."""


class HypothesisViolation(ValueError):
    pass


@dataclass(frozen=True)
class MLRF:
    components: tuple = ()

    @property
    def depth(self) -> int:
        return len(self.components)

    def format(self, names=None) -> str:
        return "<" + ", ".join(c.format(names) for c in self.components) + ">"


@dataclass(frozen=True)
class RecurrentSet:
    transitions: Polyhedron
    states: Polyhedron


@dataclass(frozen=True)
class Limits:
    depth_bound: Optional[int] = 10
    max_iterations: int = 50

    def __post_init__(self):
        if self.depth_bound is not None and self.depth_bound <= 0:
            raise ValueError("depth bound must be positive")
        if self.max_iterations <= 0:
            raise ValueError("iteration cap must be positive")
        if self.depth_bound is not None and self.depth_bound > self.max_iterations:
            raise ValueError("depth bound exceeds the iteration cap")


@dataclass(frozen=True)
class IterationInfo:
    """Diagnostics for one application of the refinement operator."""

    iteration: int
    generators: int
    new_generators: int
    ineq_rows: int
    eq_rows: int


@dataclass
class Verdict:
    kind: str
    mlrf: Optional[MLRF] = None
    recurrent: Optional[RecurrentSet] = None
    reason: Optional[str] = None
    iterations: int = 0
    stable_index: Optional[int] = None
    trace: list = field(default_factory=list)
    integer_witness: Optional[tuple] = None
    mode: str = "rational"

    @property
    def depth(self) -> Optional[int]:
        return self.mlrf.depth if self.mlrf is not None else None


# ---------------------------------------------------------------------------
# the refinement operator


def _decrease_row(a: Sequence[Fraction]):
    """``a.x - a.x' <= 0`` as a row over (x, x')."""
    return (tuple(a) + tuple(-v for v in a), ZERO)


def f_step(Q: TransitionPoly) -> TransitionPoly:
    """Remove every transition on which some function that is nonnegative on
    all enabled states strictly decreases."""
    if Q.is_empty():
        raise ValueError("f_step needs a nonempty transition polyhedron")
    gens = nonneg_cone(Q.poly, Q.n)
    rows = [_decrease_row(g.coeffs) for g in gens if any(g.coeffs)]
    return Q.with_poly(Q.poly.add_constraints(rows))


def iterate_f(Q: TransitionPoly, k: int) -> TransitionPoly:
    """``F^k(Q)``; stops early (returning the empty set) once it is empty."""
    current = Q
    for _ in range(k):
        if current.is_empty():
            break
        current = current.with_poly(f_step(current).poly.remove_redundant())
    return current


def find_mlrf(Q: TransitionPoly, limits: Limits = Limits(), synthesize: bool = True, keep_iterates: bool = False) -> Verdict:
    """Iterate the refinement operator until the transition set is empty
    (ranking function of that depth), stops changing (recurrent set), or a
    limit fires.  With ``keep_iterates`` the polyhedra ``Q_0, Q_1, ...`` are
    attached to the verdict as ``verdict.iterates``."""
    n = Q.n
    current = Q
    used = set()
    trace = []
    iterates = [Q]
    i = 0
    while True:
        if current.is_empty():
            mlrf = synthesize_nested(Q, i) if synthesize else None
            verdict = Verdict(MLRF_FOUND, mlrf=mlrf, iterations=i, trace=trace)
            break
        if limits.depth_bound is not None and i >= limits.depth_bound:
            verdict = Verdict(UNKNOWN, reason=DEPTH_BOUND, iterations=i, trace=trace)
            break
        if i >= limits.max_iterations:
            verdict = Verdict(UNKNOWN, reason=ITERATION_CAP, iterations=i, trace=trace)
            break
        gens = nonneg_cone(current.poly, n)
        fresh = [g.coeffs for g in gens if any(g.coeffs) and g.coeffs not in used]
        used.update(fresh)
        refined = current.poly.add_constraints([_decrease_row(a) for a in fresh])
        i += 1
        trace.append(IterationInfo(i, len(gens), len(fresh), len(current.poly.ineqs), len(current.poly.eqs)))
        log.debug("iteration %d: %d generators (%d new)", i, len(gens), len(fresh))
        if not fresh or refined.includes(current.poly):
            S = current.poly
            states = S.project(range(n))
            verdict = Verdict(
                NONTERMINATING,
                recurrent=RecurrentSet(S, states),
                iterations=i,
                stable_index=i - 1,
                trace=trace,
            )
            break
        current = current.with_poly(refined.remove_redundant())
        iterates.append(current)
    if keep_iterates:
        verdict.iterates = iterates
    return verdict


# ---------------------------------------------------------------------------
# Farkas-based LP construction


class _LP:
    """Tiny builder for LPs whose unknowns are created on the fly."""

    def __init__(self):
        self.nvars = 0
        self.rows = []  # (dict, op, rhs)

    def new(self, k: int, nonneg: bool = False) -> list:
        ids = list(range(self.nvars, self.nvars + k))
        self.nvars += k
        if nonneg:
            for v in ids:
                self.rows.append(({v: ONE}, GE, ZERO))
        return ids

    def add(self, form: dict, op: str, rhs):
        self.rows.append((form, op, Fraction(rhs)))

    def solve(self, objective: Optional[dict] = None, sense: str = "min"):
        cons = []
        for form, op, rhs in self.rows:
            coeffs = [ZERO] * self.nvars
            for v, c in form.items():
                coeffs[v] += c
            cons.append(LinCon(tuple(coeffs), op, rhs))
        obj = [ZERO] * self.nvars
        for v, c in (objective or {}).items():
            obj[v] += c
        res = lp_solve(cons, obj, sense, self.nvars)
        return res.point if res.optimal else None

    def nonneg_on(self, P: Polyhedron, G: Sequence[dict], H: dict):
        """Require ``sum_j G[j] z_j + H >= 0`` for all ``z`` in ``P`` (nonempty),
        where ``G[j]`` and ``H`` are linear forms over the unknowns (a ``None``
        key holds a constant)."""
        lam = self.new(len(P.ineqs), nonneg=True)
        mu = self.new(len(P.eqs))
        for j in range(P.dim):
            form = {}
            for v, (a, _) in zip(lam, P.ineqs):
                if a[j]:
                    form[v] = a[j]
            for v, (a, _) in zip(mu, P.eqs):
                if a[j]:
                    form[v] = a[j]
            const = ZERO
            for v, c in G[j].items():
                if v is None:
                    const += c
                else:
                    form[v] = form.get(v, ZERO) + c
            self.add(form, EQ, -const)
        # lam.m + mu.e - H <= 0
        form = {}
        for v, (_, b) in zip(lam, P.ineqs):
            if b:
                form[v] = b
        for v, (_, b) in zip(mu, P.eqs):
            if b:
                form[v] = b
        const = ZERO
        for v, c in H.items():
            if v is None:
                const += c
            else:
                form[v] = form.get(v, ZERO) - c
        self.add(form, LE, const)


def _nested_lp(Q: TransitionPoly, d: int) -> Optional[MLRF]:
    n = Q.n
    if d == 0:
        return MLRF(()) if Q.is_empty() else None
    if Q.is_empty():
        return MLRF(tuple(AffineFunc(zeros(n), ZERO) for _ in range(d)))
    lp = _LP()
    coef = [lp.new(n) for _ in range(d)]
    const = [lp.new(1)[0] for _ in range(d)]
    P = Q.poly
    for i in range(d):
        G = [dict() for _ in range(2 * n)]
        for j in range(n):
            G[j][coef[i][j]] = ONE
            G[n + j][coef[i][j]] = -ONE
            if i > 0:
                G[j][coef[i - 1][j]] = G[j].get(coef[i - 1][j], ZERO) + ONE
        H = {None: -ONE}
        if i > 0:
            H[const[i - 1]] = ONE
        lp.nonneg_on(P, G, H)
    G = [dict() for _ in range(2 * n)]
    for j in range(n):
        G[j][coef[d - 1][j]] = ONE
    lp.nonneg_on(P, G, {const[d - 1]: ONE})
    point = lp.solve()
    if point is None:
        return None
    comps = tuple(AffineFunc(tuple(point[v] for v in coef[i]), point[const[i]]) for i in range(d))
    return MLRF(comps)


def synthesize_nested(Q: TransitionPoly, d: int) -> MLRF:
    """A nested ranking function of depth ``d``: ``drho_1 >= 1``,
    ``drho_i + rho_{i-1} >= 1`` and ``rho_d >= 0``, found with a single LP
    over Farkas multipliers."""
    result = _nested_lp(Q, d)
    if result is None:
        raise SynthesisError(f"no nested ranking function of depth {d}")
    return result


def conic_strengthen(P: Polyhedron, rhos: Sequence[AffineFunc], rho_k: AffineFunc) -> list:
    """Nonnegative ``mu`` with ``sum mu_i rho_i + rho_k >= 0`` on ``P``.

    Requires (i) every point of ``P`` has some ``rho_i > 0`` or ``rho_k >= 0``
    and (ii) some point of ``P`` has all ``rho_i <= 0``.
    """
    n = P.dim
    base = P.constraints()
    nonpos = [LinCon(r.coeffs, LE, -r.const) for r in rhos]
    if strict_feasible(base + nonpos + [LinCon(rho_k.coeffs, "<", -rho_k.const)], n):
        raise HypothesisViolation("hypothesis (i) fails: some point has every rho_i <= 0 and rho_k < 0")
    if feasible_point(base + nonpos, n) is None:
        raise HypothesisViolation("hypothesis (ii) fails: no point of P has every rho_i <= 0")
    lp = _LP()
    mu = lp.new(len(rhos), nonneg=True)
    G = []
    for j in range(n):
        form = {None: rho_k.coeffs[j]}
        for v, r in zip(mu, rhos):
            if r.coeffs[j]:
                form[v] = r.coeffs[j]
        G.append(form)
    H = {None: rho_k.const}
    for v, r in zip(mu, rhos):
        if r.const:
            H[v] = r.const
    lp.nonneg_on(P, G, H)
    point = lp.solve({v: ONE for v in mu})
    if point is None:
        raise SynthesisError("no strengthening coefficients found")
    values = [point[v] for v in mu]
    combined = rho_k
    for m, r in zip(values, rhos):
        combined = combined + r.scale(m)
    res = P.minimize(combined.coeffs)
    if not res.optimal or res.value + combined.const < 0:
        raise SynthesisError("strengthened function is not nonnegative")
    return values


def dellrf_membership(Q: TransitionPoly, b: int) -> Optional[AffineFunc]:
    """A linear ranking function for ``Q`` restricted to states that start
    traces of length ``b``, or None."""
    if b < 1:
        raise ValueError("b must be positive")
    if Q.is_empty():
        return AffineFunc(zeros(Q.n), ZERO)
    restricted = restrict_states(Q, pre(Q, b))
    result = _nested_lp(restricted, 1)
    return result.components[0] if result is not None else None


def analyze_integer(Q: TransitionPoly, limits: Limits = Limits()) -> Verdict:
    """Verdict for integer-valued variables.  Only integral transition
    polyhedra are handled; recurrent sets are trusted only for affine updates
    with integer coefficients and an integer point in the set."""
    if not Q.poly.is_integral():
        return Verdict(UNKNOWN, reason=NEEDS_INTEGER_HULL, mode="integer")
    verdict = find_mlrf(Q, limits)
    verdict.mode = "integer"
    if verdict.kind != NONTERMINATING:
        return verdict
    update = extract_affine_update(Q)
    if update is None:
        detail = "update is not affine"
    elif not update.is_integral():
        detail = "update coefficients are not integers"
    else:
        point = verdict.recurrent.transitions.integer_point()
        if point is not None:
            verdict.integer_witness = point[: Q.n]
            return verdict
        detail = "no integer point found in the recurrent set"
    verdict.kind = UNKNOWN
    verdict.reason = f"{RATIONAL_ONLY} ({detail})"
    return verdict
