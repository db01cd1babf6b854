"""Acceptance criteria, each checked exactly (rational arithmetic, no
tolerance).  Every test records a PASS/FAIL line that is printed in the
terminal summary; run ``pytest tests/test_acceptance.py -v`` to see them."""

import json
from fractions import Fraction as F

import pytest
from conftest import record
from randgen import rand_poly, rng_for

from mlrf import corpus
from mlrf.analysis import analyze_loop
from mlrf.displacement import bounded_loop_analyze, depth_decision
from mlrf.engine import (
    DEPTH_BOUND,
    MLRF_FOUND,
    NONTERMINATING,
    UNKNOWN,
    Limits,
    analyze_integer,
    dellrf_membership,
    find_mlrf,
    iterate_f,
)
from mlrf.linalg import vec
from mlrf.loop import SLCLoop, build_transition_polyhedron, pre, restrict_states
from mlrf.polyhedron import AffineFunc, GeneratorRep, Polyhedron, cone_contains, cones_equal, nonneg_cone
from mlrf.verification import check_mlrf, check_monotonic_recurrent, check_recurrent

CASES = 200


def _q(name):
    return build_transition_polyhedron(corpus.load(name).loop)


def _check(number, ok, detail):
    record(number, ok, detail)
    assert ok, detail


def test_criterion_01_loop1_depth_three():
    Q = _q("loop1")
    a = analyze_loop(corpus.load("loop1").loop)
    v = a.verdict
    paper = [AffineFunc((0, 0, 1), 1), AffineFunc((0, 1, 0), 1), AffineFunc((1, 0, 1), 1)]
    ok = (
        v.kind == MLRF_FOUND
        and v.depth == 3
        and check_mlrf(Q, paper).ok
        and check_mlrf(Q, v.mlrf.components).ok
    )
    _check(1, ok, f"kind={v.kind} depth={v.depth}; paper and synthesized witnesses checked")


def test_criterion_02_loop1_nonneg_cone():
    gens = [g.as_vector() for g in nonneg_cone(_q("loop1").poly, 3)]
    ok = cones_equal(gens, [vec((1, 0, 1, 0)), vec((0, 0, 0, 1))])
    _check(2, ok, f"{len(gens)} generators, cone equality checked both ways by LP")


def test_criterion_03_tiwari():
    Q = _q("tiwari")
    v = find_mlrf(Q)
    S = v.recurrent.transitions if v.recurrent else None
    states = Polyhedron(2, [((1, 0), -1)], [((2, -1), 0)])
    ok = (
        v.kind == NONTERMINATING
        and v.iterations == 3
        and v.recurrent.states.set_equals(states)
        and check_recurrent(S, 2)
        and check_monotonic_recurrent(S, 2)
    )
    _check(3, ok, f"kind={v.kind} after {v.iterations} refinement steps; states and both checkers")


def test_criterion_04_tiwari_shift():
    v = find_mlrf(_q("tiwari_shift"))
    states = Polyhedron(2, [((0, 2), -3)], [((4, -2), 1)])
    ok = v.kind == NONTERMINATING and v.recurrent.states.set_equals(states)
    _check(4, ok, f"kind={v.kind}; states set-equal {{-2x2 >= 3, 4x1 - 2x2 = 1}}")


def test_criterion_05_flip():
    v = find_mlrf(_q("flip"))
    half = Polyhedron(2, eqs=[((2, 0), 1), ((0, 2), 1)])
    full = Polyhedron(2, [((-1, 0), 0), ((1, 0), 1)], [((1, 1), 1)])
    ok = (
        v.kind == NONTERMINATING
        and v.stable_index == 2
        and v.recurrent.transitions.set_equals(half)
        and check_recurrent(full, 1)
        and not check_monotonic_recurrent(full, 1)
    )
    _check(5, ok, f"stable set reached after {v.stable_index} refinements ({v.iterations} applications); larger set recurrent, not monotonic")


def _loop10_iterates():
    return find_mlrf(_q("loop10"), Limits(8, 50), keep_iterates=True).iterates


def test_criterion_06_loop10():
    Q = _q("loop10")
    v = find_mlrf(Q, Limits(depth_bound=25, max_iterations=50))
    ok = v.kind == UNKNOWN and v.reason == DEPTH_BOUND
    iterates = _loop10_iterates()
    for i in range(1, 9):
        Qi = iterates[i]
        hand = Polyhedron(4, [((-1, 2 ** i, 0, 0), 0), ((0, -1, 0, 0), -1)], [((2, 0, -1, 0), 0), ((0, 3, 0, -1), 0)])
        gens = [g.as_vector() for g in nonneg_cone(Qi.poly, 2)]
        linear = [g[:2] for g in gens if any(g[:2])]
        ok = (
            ok
            and Qi.poly.set_equals(hand)
            and cones_equal(linear, [vec((0, 1)), vec((1, -(2 ** i)))])
            and cone_contains(gens, (0, 0, 1))
        )
    _check(6, ok, f"depth bound 25 gives {v.kind}/{v.reason}; Q_1..Q_8 match, cone coefficient parts match")


@pytest.mark.xfail(strict=True, reason="x2 - 1 >= 0 holds on every Q_i but is outside the stated lifted cone; see README")
def test_criterion_06_literal_lifted_cone():
    ok = True
    for i, Qi in enumerate(_loop10_iterates()[1:9], start=1):
        gens = [g.as_vector() for g in nonneg_cone(Qi.poly, 2)]
        ok = ok and cones_equal(gens, [vec((0, 1, 0)), vec((1, -(2 ** i), 0)), vec((0, 0, 1))])
    record(6, ok, "nonneg_cone(Q_i) vs {(0,1,0), (1,-2^i,0), (0,0,1)}: computed cone also holds (0,1,-1)")
    assert ok


def test_criterion_07_delta_lrf():
    Q = _q("dellrf3")
    rho = AffineFunc((-1, -1, -1, 3), 1)
    restricted = restrict_states(Q, pre(Q, 3))
    a = analyze_loop(corpus.load("dellrf3").loop)
    ok = (
        dellrf_membership(Q, 3) is not None
        and check_mlrf(restricted, [rho]).ok
        and a.verdict.kind == MLRF_FOUND
        and a.verdict.depth == 3
    )
    _check(7, ok, "membership for b=3, the given LRF on the restricted loop, depth 3")


@pytest.mark.xfail(strict=True, reason="the stated pre-set contains states with no transition; see README")
def test_criterion_07_literal_pre_set():
    Q = _q("dellrf3")
    stated = Polyhedron(4, [((0, -1, 0, -1), -1), ((0, 0, -1, -1), -1), ((-1, 0, 0, -1), 0)])
    ok = pre(Q, 3).set_equals(stated)
    computed = "; ".join(pre(Q, 3).format(list(Q.names)))
    record(7, ok, f"pre(Q,3) vs {{x2+x4 >= 1, x3+x4 >= 1, x1+x4 >= 0}}: computed {computed}")
    assert ok


def test_criterion_08_cross_pipeline():
    mismatches = []
    count = 0
    for name in corpus.names():
        Q = _q(name)
        for d in range(6):
            count += 1
            if depth_decision(Q, d) != iterate_f(Q, d).is_empty():
                mismatches.append((name, d))
    _check(8, not mismatches, f"{count} (loop, depth) pairs, mismatches: {mismatches or 'none'}")


def test_criterion_09_bounded_fast_path():
    flip = bounded_loop_analyze(_q("bounded_flip"))
    dec = bounded_loop_analyze(_q("bounded_dec"))
    ok = (
        flip.kind == NONTERMINATING
        and flip.recurrent.states.set_equals(Polyhedron(1, eqs=[((2,), 1)]))
        and dec.kind == MLRF_FOUND
        and dec.depth == 1
    )
    _check(9, ok, f"flip -> {flip.kind} at x = 1/2; decrement -> {dec.kind} depth {dec.depth}")


def test_criterion_10_integer_mode():
    r13 = find_mlrf(_q("loop13"))
    i13 = analyze_integer(_q("loop13"))
    i7 = analyze_integer(_q("tiwari"))
    ok = (
        r13.kind == NONTERMINATING
        and i13.kind == UNKNOWN
        and "not integers" in i13.reason
        and i7.kind == NONTERMINATING
        and i7.integer_witness == (-1, -2)
    )
    _check(10, ok, f"loop13 rational {r13.kind}, integer {i13.kind}; tiwari integer witness {tuple(str(x) for x in i7.integer_witness or ())}")


def _project_generators(P, k):
    g = P.generators()
    return GeneratorRep(
        k,
        tuple(v[:k] for v in g.vertices),
        tuple(r[:k] for r in g.rays),
        tuple(l[:k] for l in g.lines),
    )


def _property_suite():
    rng = rng_for(20240101)
    failures = {}
    counts = {}

    def tally(key, ok):
        counts[key] = counts.get(key, 0) + 1
        if not ok:
            failures[key] = failures.get(key, 0) + 1

    for _ in range(CASES):
        P = rand_poly(rng, rng.randint(1, 4))
        tally("round trip", Polyhedron.from_generators(P.generators()).set_equals(P))
    done = 0
    while done < CASES:
        d = rng.randint(2, 4)
        k = rng.randint(1, d - 1)
        P = rand_poly(rng, d)
        if P.is_empty():
            continue
        done += 1
        tally("cone/projection commute", P.recession_cone().project(range(k)).set_equals(P.project(range(k)).recession_cone()))
    for _ in range(CASES):
        d = rng.randint(2, 4)
        k = rng.randint(1, d - 1)
        P = rand_poly(rng, d)
        tally("FM vs generators", P.project(range(k)).set_equals(Polyhedron.from_generators(_project_generators(P, k))))
    for _ in range(CASES):
        P = rand_poly(rng, rng.randint(1, 4), max_rows=7)
        tally("remove_redundant", P.remove_redundant().set_equals(P))
    done = 0
    while done < CASES:
        n = rng.randint(1, 2)
        Q = rand_poly(rng, 2 * n)
        if Q.is_empty():
            continue
        done += 1
        gens = nonneg_cone(Q, n)
        X = Q.project(range(n))
        sound = all((lambda r, g: r.optimal and r.value + g.const >= 0)(X.minimize(g.coeffs), g) for g in gens)
        certs = [tuple(-x for x in a) + (b,) for a, b in X.ineqs]
        certs += [tuple(-x for x in a) + (b,) for a, b in X.eqs] + [tuple(a) + (-b,) for a, b in X.eqs]
        certs.append((0,) * n + (1,))
        weights = [rng.randint(0, 3) for _ in certs]
        target = tuple(sum(w * c[j] for w, c in zip(weights, certs)) for j in range(n + 1))
        complete = cone_contains([g.as_vector() for g in gens], target)
        tally("nonneg_cone", sound and complete)
    return counts, failures


def test_criterion_11_property_suites():
    counts, failures = _property_suite()
    ok = not failures and all(c >= CASES for c in counts.values())
    detail = ", ".join(f"{k} {counts[k] - failures.get(k, 0)}/{counts[k]}" for k in counts)
    _check(11, ok, detail)


def _random_loop(rng):
    n = 2
    names = ("a", "b")
    guard = []
    for _ in range(rng.randint(1, 2)):
        guard.append((tuple(rng.randint(-2, 2) for _ in range(n)), "<=", rng.randint(-2, 3)))
    update = []
    if rng.random() < 0.7:
        for i in range(n):
            ax = tuple(-rng.randint(-1, 2) if j == i else -rng.randint(-1, 1) for j in range(n))
            update.append((ax, tuple(int(i == j) for j in range(n)), "=", rng.randint(-2, 2)))
    else:
        for _ in range(rng.randint(1, 3)):
            update.append((tuple(rng.randint(-2, 2) for _ in range(n)), tuple(rng.randint(-2, 2) for _ in range(n)), "<=", rng.randint(-2, 2)))
    return SLCLoop.from_rows(names, guard, update)


def test_criterion_12_every_witness_verified():
    rng = rng_for(7)
    loops = [corpus.load(name).loop for name in corpus.names()]
    loops += [_random_loop(rng) for _ in range(60)]
    checked = failed = 0
    kinds = {}
    for L in loops:
        for mode in ("rational", "integer"):
            a = analyze_loop(L, Limits(6, 12), mode=mode)
            kinds[a.verdict.kind] = kinds.get(a.verdict.kind, 0) + 1
            Q = a.Q
            v = a.verdict
            if v.mlrf is not None:
                checked += 1
                failed += not check_mlrf(Q, v.mlrf.components).ok
            if v.recurrent is not None:
                checked += 1
                S = v.recurrent.transitions
                failed += not (Q.poly.includes(S) and not S.is_empty() and check_recurrent(S, Q.n) and check_monotonic_recurrent(S, Q.n))
            if a.cross_check is False:
                failed += 1
    summary = ", ".join(f"{k} {c}" for k, c in sorted(kinds.items()))
    _check(12, failed == 0, f"{checked} witnesses re-verified, {failed} failures ({summary}); benchmark-scale counts not reproduced")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
