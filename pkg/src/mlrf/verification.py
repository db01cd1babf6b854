"""Independent checkers for ranking functions and recurrent sets, plus a
concrete simulator for deterministic loops.

The checkers only use LP queries and projection; they never call into the
refinement engine.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .linalg import LE, LT, LinCon, lp_solve, strict_feasible, vec
from .loop import TransitionPoly, extract_affine_update
from .polyhedron import AffineFunc, Polyhedron


class NondeterministicLoop(ValueError):
    pass


@dataclass(frozen=True)
class MLRFCheck:
    ok: bool
    failed_phase: Optional[int] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def check_mlrf(Q: TransitionPoly, components: Sequence[AffineFunc]) -> MLRFCheck:
    """Phase by phase: every transition still unranked must decrease
    ``rho_i`` by at least 1; those with ``rho_i(x) >= 0`` are then ranked.
    Accept when no transition is left after the last phase."""
    components = list(getattr(components, "components", components))
    n = Q.n
    for i, rho in enumerate(components, start=1):
        if rho.dim != n:
            raise ValueError(f"component {i} has dimension {rho.dim}, loop has {n}")
    T = Q.poly.constraints()
    for i, rho in enumerate(components, start=1):
        a = rho.coeffs
        delta = a + tuple(-v for v in a)
        if strict_feasible(T + [LinCon(delta, LT, 1)], 2 * n):
            return MLRFCheck(False, i, f"component {i} decreases by less than 1 on some remaining transition")
        T = T + [LinCon(a + (0,) * n, LT, -rho.const)]
    if strict_feasible(T, 2 * n):
        return MLRFCheck(False, len(components) + 1, "some transition is not ranked by any component")
    return MLRFCheck(True)


def check_recurrent(S: Polyhedron, n: int) -> bool:
    """Every successor state of ``S`` is again a source state of ``S``."""
    if S.dim != 2 * n:
        raise ValueError("recurrent set must live in 2n dimensions")
    if S.is_empty():
        return True
    sources = S.project(range(n))
    targets = S.project(range(n, 2 * n))
    return sources.includes(targets)


def check_monotonic_recurrent(S: Polyhedron, n: int) -> bool:
    """``S`` is unchanged by the refinement operator: with the source states
    written as ``{M x <= b, E x = e}``, every transition of ``S`` satisfies
    ``M x' <= M x`` and ``E x' = E x``."""
    if S.dim != 2 * n:
        raise ValueError("recurrent set must live in 2n dimensions")
    if S.is_empty():
        return True
    sources = S.project(range(n))
    cons = S.constraints()
    for a, _ in sources.ineqs:
        res = lp_solve(cons, tuple(-v for v in a) + a, "max", 2 * n)
        if not res.optimal or res.value > 0:
            return False
    for a, _ in sources.eqs:
        for sense in ("max", "min"):
            res = lp_solve(cons, tuple(-v for v in a) + a, sense, 2 * n)
            if not res.optimal or res.value != 0:
                return False
    return True


@dataclass(frozen=True)
class Simulation:
    states: tuple
    terminated: bool
    stayed_inside: Optional[bool] = None


def simulate(Q: TransitionPoly, x0, steps: int, within: Optional[Polyhedron] = None) -> Simulation:
    """Run a deterministic loop from ``x0`` for at most ``steps`` iterations,
    stopping when no transition is enabled."""
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    update = extract_affine_update(Q)
    if update is None:
        raise NondeterministicLoop("loop update does not determine x' from x")
    x = vec(x0)
    if len(x) != Q.n:
        raise ValueError("initial state has the wrong dimension")
    states = [x]
    terminated = False
    for _ in range(steps):
        nxt = update.apply(x)
        if not Q.poly.contains(x + nxt):
            terminated = True
            break
        states.append(nxt)
        x = nxt
    inside = None if within is None else all(within.contains(s) for s in states)
    return Simulation(tuple(states), terminated, inside)
