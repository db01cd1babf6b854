"""Seeded random instances for the property suites."""

import random
from fractions import Fraction

from mlrf.polyhedron import Polyhedron


def rand_row(rng, dim, lo=-5, hi=5):
    while True:
        a = tuple(Fraction(rng.randint(lo, hi)) for _ in range(dim))
        if any(a):
            return a


def rand_poly(rng, dim, max_rows=5, eq_prob=0.15, bounded_prob=0.0):
    """Random H-representation with small integer coefficients.  Rows are
    built around a random centre point so most instances are nonempty."""
    centre = tuple(Fraction(rng.randint(-3, 3)) for _ in range(dim))
    ineqs, eqs = [], []
    for _ in range(rng.randint(1, max_rows)):
        a = rand_row(rng, dim)
        val = sum(x * c for x, c in zip(a, centre))
        if rng.random() < eq_prob and len(eqs) < dim - 1:
            eqs.append((a, val))
        else:
            ineqs.append((a, val + rng.randint(-1, 4)))
    if rng.random() < bounded_prob:
        for j in range(dim):
            e = tuple(Fraction(int(i == j)) for i in range(dim))
            ineqs.append((e, centre[j] + 4))
            ineqs.append((tuple(-x for x in e), -centre[j] + 4))
    return Polyhedron(dim, ineqs, eqs)


def rng_for(seed):
    return random.Random(seed)
