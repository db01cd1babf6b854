from fractions import Fraction as F
import random

from mlrf.linalg import Matrix
from mlrf.loop import (
    SLCLoop,
    build_transition_polyhedron,
    compose,
    displacement,
    displacement_by_projection,
    displacement_matrix,
    extract_affine_update,
    identity_relation,
    power,
    pre,
    transition_matrix,
)
from mlrf.parser import parse_loop
from mlrf.polyhedron import Polyhedron
from mlrf import corpus


def loop(text):
    return build_transition_polyhedron(parse_loop(text))


def test_transition_polyhedron_examples(Q):
    expected = Polyhedron(
        6,
        [((-1, 0, -1, 0, 0, 0), 0)],
        [((1, 1, 0, -1, 0, 0), 0), ((0, 1, 1, 0, -1, 0), 0), ((0, 0, 1, 0, 0, -1), 1)],
    )
    assert Q("loop1").poly.set_equals(expected)
    expected = Polyhedron(4, [((-1, 1, 0, 0), -1)], [((-1, 1, -1, 0), 0), ((0, 1, 0, -1), 0)])
    assert Q("tiwari").poly.set_equals(expected)
    assert loop("vars: x\nguard: 0 <= -1\nupdate: x' = x").is_empty()


def test_guard_rows_touch_only_x(Q):
    L = corpus.load("loop1").loop
    A = transition_matrix(L)
    for row in A.rows[: L.B.nrows]:
        assert not any(row[L.n:])


def test_compose_and_power(Q):
    T = Q("loop1")
    assert compose(T, identity_relation(T.names)).set_equals(T)
    T2 = compose(T, T)
    x = (F(5), F(1), F(1))
    x1 = (x[0] + x[1], x[1] + x[2], x[2] - 1)
    x2 = (x1[0] + x1[1], x1[1] + x1[2], x1[2] - 1)
    assert T2.poly.contains(x + x2) and x2[2] == x[2] - 2
    empty = T.with_poly(Polyhedron.empty(6))
    assert compose(T, empty).is_empty()
    assert power(T, 1).set_equals(T)
    assert power(T, 0).set_equals(identity_relation(T.names))
    assert power(empty, 2).is_empty()
    assert power(T, 3).set_equals(compose(power(T, 1), power(T, 2)))


def test_pre(Q):
    T = Q("loop1")
    assert pre(T, 1).set_equals(T.states())
    empty = T.with_poly(Polyhedron.empty(6))
    assert pre(empty, 1).is_empty()


def test_pre_delta_example_by_hand(Q):
    # x1 <= x3' <= x4 and the chain x3 <= x2' <= x4' - 1 <= x4 - 1 etc.
    D = Q("dellrf3")
    hand = Polyhedron(4, [((1, 0, 0, -1), 0), ((0, 1, 0, -1), -1), ((0, 0, 1, -1), -1)])
    assert pre(D, 3).set_equals(hand)


def test_power_additive_random():
    rng = random.Random(5)
    for _ in range(10):
        n = 2
        U = [[rng.randint(-1, 1) for _ in range(n)] for _ in range(n)]
        guard = [((rng.randint(-2, 2), rng.randint(-2, 2)), "<=", rng.randint(0, 3))]
        update = [(tuple(-u for u in U[i]), tuple(int(i == j) for j in range(n)), "=", rng.randint(-1, 1)) for i in range(n)]
        T = build_transition_polyhedron(SLCLoop.from_rows(("a", "b"), guard, update))
        for a, b in ((1, 1), (1, 2)):
            assert power(T, a + b).set_equals(compose(power(T, a), power(T, b)))


def test_displacement(Q):
    R = displacement(Q("loop1"))
    hand = Polyhedron(6, [((-1, 0, -1, 0, 0, 0), 0)], [((0, 1, 0, -1, 0, 0), 0), ((0, 0, 1, 0, -1, 0), 0), ((0, 0, 0, 0, 0, 1), -1)])
    assert R.set_equals(hand)
    ident = loop("vars: x\nguard: x >= 0\nupdate: x' = x")
    assert displacement(ident).set_equals(Polyhedron(2, [((-1, 0), 0)], [((0, 1), 0)]))
    for name in corpus.names():
        T = Q(name)
        R = displacement(T)
        assert R.set_equals(displacement_by_projection(T))
        assert R.project(range(T.n)).set_equals(T.states())


def test_displacement_matrix_blocks():
    L = corpus.load("tiwari").loop
    D = displacement_matrix(L)
    A2 = transition_matrix(L)
    n, p = L.n, L.B.nrows
    for i in range(A2.nrows):
        for j in range(2 * n):
            if i >= p and j < n:
                assert D[i, j] == A2[i, j] + A2[i, n + j]
            else:
                assert D[i, j] == A2[i, j]


def test_extract_affine_update(Q):
    u = extract_affine_update(Q("tiwari"))
    assert u.U == Matrix([(-1, 1), (0, 1)]) and u.c == (0, 0)
    u = extract_affine_update(Q("loop11"))
    assert u.U == Matrix([(3, 0), (0, 2)]) and u.c == (-2, 0)
    assert extract_affine_update(loop("vars: x1\nguard: x1 >= 0\nupdate: x1' <= x1")) is None
    assert extract_affine_update(Q("dellrf3")) is None


def test_affine_update_is_consistent():
    rng = random.Random(2)
    for name in corpus.names():
        T = build_transition_polyhedron(corpus.load(name).loop)
        u = extract_affine_update(T)
        if u is None:
            continue
        states = T.states()
        for _ in range(5):
            x = states.point()
            if x is None:
                break
            assert T.poly.contains(x + u.apply(x))
            states = states.add_constraints([(tuple(rng.choice((-1, 1)) if i == 0 else 0 for i in range(T.n)), rng.randint(-3, 3))])
