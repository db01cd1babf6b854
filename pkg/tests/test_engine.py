from fractions import Fraction as F

import pytest

from mlrf import corpus
from mlrf.engine import (
    DEPTH_BOUND,
    ITERATION_CAP,
    MLRF_FOUND,
    NEEDS_INTEGER_HULL,
    NONTERMINATING,
    RATIONAL_ONLY,
    UNKNOWN,
    HypothesisViolation,
    Limits,
    SynthesisError,
    analyze_integer,
    conic_strengthen,
    dellrf_membership,
    f_step,
    find_mlrf,
    iterate_f,
    synthesize_nested,
)
from mlrf.loop import build_transition_polyhedron, power
from mlrf.parser import parse_loop
from mlrf.polyhedron import AffineFunc, Polyhedron
from mlrf.verification import check_mlrf, check_recurrent


def loop(text):
    return build_transition_polyhedron(parse_loop(text))


def decrease(a, n):
    return (tuple(a) + tuple(-v for v in a), 0)


def test_f_step_loop1(Q):
    T = Q("loop1")
    expected = T.poly.add_constraints([decrease((1, 0, 1), 3)])
    assert f_step(T).poly.set_equals(expected)


def test_f_step_tiwari_second_step(Q):
    T = Q("tiwari")
    Q1 = f_step(T)
    Q2 = f_step(Q1)
    assert Q2.poly.set_equals(Q1.poly.add_constraints([decrease((-2, 1), 2)]))


def test_f_step_flip(Q):
    T = Q("flip")
    Q1 = f_step(T)
    assert Q1.poly.set_equals(T.poly.add_constraints([((1, 0), F(1, 2))]))
    Q2 = f_step(Q1)
    assert Q2.poly.set_equals(Polyhedron(2, eqs=[((2, 0), 1), ((0, 2), 1)]))


def test_f_step_shrinks(Q):
    for name in corpus.names():
        T = Q(name)
        assert T.poly.includes(f_step(T).poly)


def test_f_step_needs_nonempty():
    with pytest.raises(ValueError):
        f_step(loop("vars: x\nguard: 0 <= -1\nupdate: x' = x"))


def test_find_mlrf_loop1(Q):
    v = find_mlrf(Q("loop1"))
    assert v.kind == MLRF_FOUND and v.depth == 3 and v.iterations == 3
    assert check_mlrf(Q("loop1"), v.mlrf.components).ok
    assert len(v.trace) == 3


def test_find_mlrf_tiwari(Q):
    v = find_mlrf(Q("tiwari"))
    assert v.kind == NONTERMINATING and v.iterations == 3 and v.stable_index == 2
    states = Polyhedron(2, [((1, 0), -1)], [((2, -1), 0)])
    assert v.recurrent.states.set_equals(states)
    assert f_step(Q("tiwari").with_poly(v.recurrent.transitions)).poly.set_equals(v.recurrent.transitions)


def test_find_mlrf_loop10_limits(Q):
    v = find_mlrf(Q("loop10"), Limits(depth_bound=25, max_iterations=50))
    assert v.kind == UNKNOWN and v.reason == DEPTH_BOUND and v.iterations == 25
    v = find_mlrf(Q("loop10"), Limits(depth_bound=None, max_iterations=6))
    assert v.kind == UNKNOWN and v.reason == ITERATION_CAP


def test_find_mlrf_loop10_iterates(Q):
    v = find_mlrf(Q("loop10"), Limits(6, 6), keep_iterates=True)
    for i, Qi in enumerate(v.iterates):
        hand = Polyhedron(4, [((-1, 2 ** i, 0, 0), 0), ((0, -1, 0, 0), -1)], [((2, 0, -1, 0), 0), ((0, 3, 0, -1), 0)])
        assert Qi.poly.set_equals(hand)


def test_find_mlrf_empty_loop():
    v = find_mlrf(loop("vars: x\nguard: 0 <= -1\nupdate: x' = x"))
    assert v.kind == MLRF_FOUND and v.depth == 0


def test_limits_validation():
    with pytest.raises(ValueError):
        Limits(depth_bound=60, max_iterations=50)
    with pytest.raises(ValueError):
        Limits(depth_bound=0)
    with pytest.raises(ValueError):
        Limits(max_iterations=0)
    assert Limits(None, 5).depth_bound is None


def test_optimal_depth_matches_iterates(Q):
    for name in ("loop1", "dellrf3", "bounded_dec"):
        T = Q(name)
        v = find_mlrf(T)
        k = v.depth
        assert iterate_f(T, k).is_empty()
        assert k == 0 or not iterate_f(T, k - 1).is_empty()


def test_synthesize_nested(Q):
    for name, d in (("loop1", 3), ("dellrf3", 3), ("bounded_dec", 1)):
        m = synthesize_nested(Q(name), d)
        assert m.depth == d and check_mlrf(Q(name), m.components).ok
    with pytest.raises(SynthesisError):
        synthesize_nested(Q("loop1"), 2)
    with pytest.raises(SynthesisError):
        synthesize_nested(Q("tiwari"), 1)


def test_paper_witnesses(Q):
    w = [AffineFunc((0, 0, 1), 1), AffineFunc((0, 1, 0), 1), AffineFunc((1, 0, 1), 1)]
    assert check_mlrf(Q("loop1"), w).ok
    w = [
        AffineFunc((-1, -1, -1, 3), 1),
        AffineFunc((F(-2, 3), F(-1, 3), 0, 1), 1),
        AffineFunc((F(-1, 4), 0, 0, F(1, 4)), 1),
    ]
    assert check_mlrf(Q("dellrf3"), w).ok


def test_conic_strengthen():
    P = Polyhedron(1, [((1,), 2), ((-1,), 0)])
    mu = conic_strengthen(P, [AffineFunc((1,), -1)], AffineFunc((-1,), 1))
    assert len(mu) == 1 and mu[0] >= 0
    for x in (0, 1, 2):
        assert mu[0] * (x - 1) + (1 - x) >= 0
    assert conic_strengthen(P, [], AffineFunc((1,), 0)) == []
    with pytest.raises(HypothesisViolation):
        conic_strengthen(Polyhedron(1, [((-1,), 0)]), [AffineFunc((1,), 0)], AffineFunc((0,), -1))
    with pytest.raises(HypothesisViolation):
        # no point with x - 5 <= 0 on {x >= 6}
        conic_strengthen(Polyhedron(1, [((-1,), -6)]), [AffineFunc((1,), -5)], AffineFunc((1,), 0))


def test_dellrf(Q):
    D = Q("dellrf3")
    rho = dellrf_membership(D, 3)
    assert rho is not None
    assert dellrf_membership(D, 2) is None
    lrf = dellrf_membership(Q("bounded_dec"), 1)
    assert lrf is not None and check_mlrf(Q("bounded_dec"), [lrf]).ok
    for b in (1, 2, 3):
        assert dellrf_membership(Q("tiwari"), b) is None
    with pytest.raises(ValueError):
        dellrf_membership(D, 0)


def test_dellrf_implies_depth(Q):
    D = Q("dellrf3")
    assert dellrf_membership(D, 3) is not None
    v = find_mlrf(D, Limits(3, 50))
    assert v.kind == MLRF_FOUND and v.depth <= 3


def test_power_empty_bounds_depth(Q):
    # x decreases by 1 inside [0, 1]: 1 -> 0 -> -1 is the longest run
    T = Q("bounded_dec")
    assert not power(T, 2).is_empty()
    assert power(T, 3).is_empty()
    assert find_mlrf(T).depth < 3


def test_integer_mode(Q):
    v = analyze_integer(Q("loop13"))
    assert v.kind == UNKNOWN and v.reason.startswith(RATIONAL_ONLY) and "not integers" in v.reason
    assert v.recurrent is not None
    v = analyze_integer(Q("tiwari"))
    assert v.kind == NONTERMINATING and v.integer_witness == (-1, -2)
    v = analyze_integer(loop("vars: x\nguard: 2*x <= 1, x >= 0\nupdate: x' = x"))
    assert v.kind == UNKNOWN and v.reason == NEEDS_INTEGER_HULL
    v = analyze_integer(Q("loop1"))
    assert v.kind == MLRF_FOUND and v.depth == 3


def test_recurrent_sets_verify(Q):
    for name in corpus.names():
        v = find_mlrf(Q(name))
        if v.kind == NONTERMINATING:
            assert check_recurrent(v.recurrent.transitions, Q(name).n)
