"""The end-to-end pipeline behind ``mlrf analyze``: bounded fast path, the
refinement engine under limits, a displacement cross-check and independent
re-verification of whatever witness comes out."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .displacement import bounded_loop_analyze, depth_decision
from .engine import (
    DEPTH_BOUND,
    MLRF_FOUND,
    NONTERMINATING,
    UNKNOWN,
    Limits,
    Verdict,
    analyze_integer,
    find_mlrf,
    synthesize_nested,
)
from .loop import SLCLoop, TransitionPoly, build_transition_polyhedron
from .polyhedron import Polyhedron
from .verification import check_mlrf, check_monotonic_recurrent, check_recurrent

ENGINES = ("f-step", "displacement", "both")
MODES = ("rational", "integer")


@dataclass
class Analysis:
    loop: SLCLoop
    Q: TransitionPoly
    verdict: Verdict
    mode: str
    engine: str
    limits: Limits
    depth_profile: Optional[list] = None
    cross_check: Optional[bool] = None
    checks: dict = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        if self.cross_check is False or not all(self.checks.values()):
            return 2
        return {MLRF_FOUND: 0, NONTERMINATING: 1}.get(self.verdict.kind, 2)


def _displacement_only(Q: TransitionPoly, limits: Limits) -> Verdict:
    bound = limits.depth_bound if limits.depth_bound is not None else limits.max_iterations
    for d in range(bound + 1):
        if depth_decision(Q, d):
            return Verdict(MLRF_FOUND, mlrf=synthesize_nested(Q, d), iterations=d)
    return Verdict(UNKNOWN, reason=DEPTH_BOUND, iterations=bound)


def witness_checks(Q: TransitionPoly, verdict: Verdict) -> dict:
    """Run the independent checkers on the verdict's witness."""
    n = Q.n
    checks = {}
    if verdict.mlrf is not None:
        checks["mlrf"] = check_mlrf(Q, verdict.mlrf.components).ok
    if verdict.recurrent is not None:
        S = verdict.recurrent.transitions
        checks["nonempty"] = not S.is_empty()
        checks["subset"] = Q.poly.includes(S)
        checks["recurrent"] = check_recurrent(S, n)
        checks["monotonic"] = check_monotonic_recurrent(S, n)
    if verdict.integer_witness is not None:
        w = verdict.integer_witness
        states = verdict.recurrent.states if verdict.recurrent is not None else Polyhedron.universe(n)
        checks["integer_witness"] = all(v.denominator == 1 for v in w) and states.contains(w)
    return checks


def analyze_loop(loop: SLCLoop, limits: Limits = Limits(), mode: str = "rational", engine: str = "both") -> Analysis:
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}")
    Q = build_transition_polyhedron(loop)
    if mode == "integer":
        verdict = analyze_integer(Q, limits)
    else:
        verdict = bounded_loop_analyze(Q)
        if verdict is None:
            verdict = _displacement_only(Q, limits) if engine == "displacement" else find_mlrf(Q, limits)
    result = Analysis(loop, Q, verdict, mode, engine, limits)
    if engine == "both" and verdict.reason != "integer hull required":
        # the refinement engine says F^k(Q) is empty exactly for k >= depth
        top = verdict.depth if verdict.kind == MLRF_FOUND else verdict.iterations
        profile = [depth_decision(Q, d) for d in range(top + 1)]
        expected = [verdict.kind == MLRF_FOUND and d >= verdict.depth for d in range(top + 1)]
        result.depth_profile = profile
        result.cross_check = profile == expected
    result.checks = witness_checks(Q, verdict)
    return result
