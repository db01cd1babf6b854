"""Convex rational polyhedra.

A :class:`Polyhedron` is stored in constraint form: inequality rows
``a . x <= b`` and equality rows ``a . x == b``.  The generator form
(vertices, rays, lines) is computed on demand with the double description
method and cached on the instance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .linalg import (
    EQ,
    GE,
    LE,
    ONE,
    ZERO,
    LinCon,
    dot,
    feasible_point,
    integer_solve,
    is_zero,
    lp_solve,
    primitive,
    rref,
    unit,
    vadd,
    vec,
    vscale,
    vsub,
    zeros,
)

Row = tuple  # (coeffs, rhs)


def _canonical_row(a, b, equality: bool):
    """Scale ``(a, b)`` to coprime integers; equalities get a positive leading
    coefficient.  Returns None for trivially true rows and ``False`` for
    trivially false ones."""
    a = vec(a)
    b = Fraction(b)
    if is_zero(a):
        if (b == 0) if equality else (b >= 0):
            return None
        return False
    p = primitive(a + (b,))
    if equality:
        lead = next(x for x in p if x)
        if lead < 0:
            p = tuple(-x for x in p)
    return (p[:-1], p[-1])


@dataclass(frozen=True)
class AffineFunc:
    """``rho(x) = coeffs . x + const``."""

    coeffs: tuple
    const: Fraction = ZERO

    def __post_init__(self):
        object.__setattr__(self, "coeffs", vec(self.coeffs))
        object.__setattr__(self, "const", Fraction(self.const))

    @property
    def dim(self) -> int:
        return len(self.coeffs)

    def __call__(self, x) -> Fraction:
        return dot(self.coeffs, x) + self.const

    def as_vector(self) -> tuple:
        return self.coeffs + (self.const,)

    def __add__(self, other: "AffineFunc") -> "AffineFunc":
        return AffineFunc(vadd(self.coeffs, other.coeffs), self.const + other.const)

    def scale(self, k) -> "AffineFunc":
        k = Fraction(k)
        return AffineFunc(vscale(k, self.coeffs), k * self.const)

    def format(self, names: Optional[Sequence[str]] = None) -> str:
        names = names or [f"x{i + 1}" for i in range(self.dim)]
        return format_linear(self.coeffs, names, self.const)


def format_linear(coeffs, names, const=ZERO) -> str:
    parts = []
    for c, name in zip(coeffs, names):
        if not c:
            continue
        mag = abs(c)
        term = name if mag == 1 else f"{mag}*{name}"
        parts.append(("-" if c < 0 else "+", term))
    if const or not parts:
        parts.append(("-" if const < 0 else "+", str(abs(const))))
    first_sign, first = parts[0]
    text = ("-" if first_sign == "-" else "") + first
    for sign, term in parts[1:]:
        text += f" {sign} {term}"
    return text


@dataclass(frozen=True)
class GeneratorRep:
    """``convhull(vertices) + cone(rays)``.

    Lines of the lineality space are listed in ``lines`` and also appear in
    ``rays`` in both orientations, so ``rays`` alone describes the recession
    cone.  No vertices means the empty set.
    """

    dim: int
    vertices: tuple = ()
    rays: tuple = ()
    lines: tuple = ()

    @property
    def is_empty(self) -> bool:
        return not self.vertices


# ---------------------------------------------------------------------------
# double description


def _line_pivot(lines, h):
    for idx, l in enumerate(lines):
        hl = dot(h, l)
        if hl:
            return idx, l, hl
    return None


def cone_generators(dim: int, ineqs: Sequence[tuple], eqs: Sequence[tuple] = ()):
    """Lineality basis and extreme rays of ``{z : h.z <= 0 (ineqs), h.z == 0 (eqs)}``.

    Incremental double description starting from the whole space (all unit
    vectors as lines), with the combinatorial adjacency test.
    """
    lines = [unit(dim, i) for i in range(dim)]
    rays: list = []  # (vector, zero-set bitmask over processed inequalities)
    seen_mask = 0
    constraints = [(vec(h), True) for h in eqs] + [(vec(h), False) for h in ineqs]
    bit_index = 0
    for h, is_eq in constraints:
        if len(h) != dim:
            raise ValueError("constraint dimension mismatch")
        bit = 0 if is_eq else (1 << bit_index)
        if not is_eq:
            bit_index += 1
        found = _line_pivot(lines, h)
        if found is not None:
            idx, l, hl = found
            if hl > 0:
                l = vscale(-1, l)
                hl = -hl
            new_lines = []
            for j, other in enumerate(lines):
                if j == idx:
                    continue
                ho = dot(h, other)
                if ho:
                    other = primitive(vsub(other, vscale(ho / hl, l)))
                new_lines.append(other)
            new_rays = []
            for r, mask in rays:
                hr = dot(h, r)
                if hr:
                    r = primitive(vsub(r, vscale(hr / hl, l)))
                new_rays.append((r, mask | bit))
            if not is_eq:
                new_rays.append((primitive(l), seen_mask))
            lines = new_lines
            rays = new_rays
            seen_mask |= bit
            continue
        pos, neg, kept = [], [], []
        for idx, (r, mask) in enumerate(rays):
            hr = dot(h, r)
            if hr > 0:
                pos.append((idx, r, mask, hr))
            elif hr < 0:
                neg.append((idx, r, mask, hr))
            else:
                kept.append((r, mask | bit))
        if not is_eq:
            kept.extend((r, mask) for _, r, mask, _ in neg)
        masks = [mask for _, mask in rays]
        for ip, p, mp, hp in pos:
            for iq, q, mq, hq in neg:
                common = mp & mq
                adjacent = True
                for ir, mr in enumerate(masks):
                    if ir == ip or ir == iq:
                        continue
                    if common & mr == common:
                        adjacent = False
                        break
                if adjacent:
                    new = primitive(vsub(vscale(hp, q), vscale(hq, p)))
                    if not is_zero(new):
                        kept.append((new, common | bit))
        rays = kept
        seen_mask |= bit
    return lines, [r for r, _ in rays]


def _orth_reduce(v, basis_rows, gram_rows):
    """Project ``v`` onto the orthogonal complement of span(basis)."""
    if not basis_rows:
        return v
    k = len(basis_rows)
    rhs = [dot(b, v) for b in basis_rows]
    aug = [gram_rows[i] + (rhs[i],) for i in range(k)]
    red, piv = rref(aug, k + 1)
    coef = [ZERO] * k
    for row, p in zip(red, piv):
        coef[p] = row[k]
    out = v
    for c, b in zip(coef, basis_rows):
        if c:
            out = vsub(out, vscale(c, b))
    return out


def _canonical_lines(lines, dim):
    if not lines:
        return ()
    red, _ = rref(lines, dim)
    return tuple(primitive(r) for r in red)


# ---------------------------------------------------------------------------


class Polyhedron:
    """Closed convex rational polyhedron in constraint form."""

    def __init__(self, dim: int, ineqs: Iterable[Row] = (), eqs: Iterable[Row] = ()):
        self.dim = dim
        out_ineqs, out_eqs = [], []
        contradiction = False
        for rows, out, is_eq in ((ineqs, out_ineqs, False), (eqs, out_eqs, True)):
            for a, b in rows:
                if len(a) != dim:
                    raise ValueError(f"row has {len(a)} coefficients, polyhedron has dimension {dim}")
                row = _canonical_row(a, b, is_eq)
                if row is None:
                    continue
                if row is False:
                    contradiction = True
                    continue
                if row not in out:
                    out.append(row)
        if contradiction:
            out_ineqs, out_eqs = [(zeros(dim), -ONE)], []
        self.ineqs = tuple(out_ineqs)
        self.eqs = tuple(out_eqs)
        self._generators = None
        self._empty = True if contradiction else None

    # -- construction helpers -------------------------------------------------

    @classmethod
    def universe(cls, dim: int) -> "Polyhedron":
        return cls(dim)

    @classmethod
    def empty(cls, dim: int) -> "Polyhedron":
        return cls(dim, [(zeros(dim), -ONE)])

    @classmethod
    def from_constraints(cls, dim: int, constraints: Iterable[LinCon]) -> "Polyhedron":
        ineqs, eqs = [], []
        for c in constraints:
            if c.op == LE:
                ineqs.append((c.coeffs, c.rhs))
            elif c.op == GE:
                ineqs.append((vscale(-1, c.coeffs), -c.rhs))
            elif c.op == EQ:
                eqs.append((c.coeffs, c.rhs))
            else:
                raise ValueError("strict constraints cannot form a closed polyhedron")
        return cls(dim, ineqs, eqs)

    def constraints(self) -> list:
        return [LinCon(a, LE, b) for a, b in self.ineqs] + [LinCon(a, EQ, b) for a, b in self.eqs]

    def add_constraints(self, ineqs: Iterable[Row] = (), eqs: Iterable[Row] = ()) -> "Polyhedron":
        return Polyhedron(self.dim, self.ineqs + tuple(ineqs), self.eqs + tuple(eqs))

    def __repr__(self) -> str:
        return f"Polyhedron(dim={self.dim}, rows={self.num_rows})"

    @property
    def num_rows(self) -> int:
        return len(self.ineqs) + len(self.eqs)

    def format(self, names: Optional[Sequence[str]] = None) -> list:
        names = names or [f"x{i + 1}" for i in range(self.dim)]
        out = [f"{format_linear(a, names)} <= {b}" for a, b in self.ineqs]
        out += [f"{format_linear(a, names)} = {b}" for a, b in self.eqs]
        return out

    def contains(self, point) -> bool:
        x = vec(point)
        return all(dot(a, x) <= b for a, b in self.ineqs) and all(dot(a, x) == b for a, b in self.eqs)

    # -- LP queries -------------------------------------------------------------

    def maximize(self, objective):
        return lp_solve(self.constraints(), objective, "max", self.dim)

    def minimize(self, objective):
        return lp_solve(self.constraints(), objective, "min", self.dim)

    def point(self) -> Optional[tuple]:
        return feasible_point(self.constraints(), self.dim)

    def is_empty(self) -> bool:
        if self._empty is None:
            self._empty = self.point() is None
        return self._empty

    def is_bounded(self) -> bool:
        gens = self.generators()
        return not gens.rays

    # -- set operations -----------------------------------------------------------

    def intersect(self, other: "Polyhedron") -> "Polyhedron":
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        return Polyhedron(self.dim, self.ineqs + other.ineqs, self.eqs + other.eqs)

    __and__ = intersect

    def includes(self, other: "Polyhedron") -> bool:
        """True iff ``other`` is a subset of ``self``."""
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        if other.is_empty():
            return True
        if self.is_empty():
            return False
        cons = other.constraints()
        for a, b in self.ineqs:
            res = lp_solve(cons, a, "max", self.dim)
            if not res.optimal or res.value > b:
                return False
        for a, b in self.eqs:
            for sense in ("max", "min"):
                res = lp_solve(cons, a, sense, self.dim)
                if not res.optimal or res.value != b:
                    return False
        return True

    def set_equals(self, other: "Polyhedron") -> bool:
        return self.includes(other) and other.includes(self)

    def remove_redundant(self) -> "Polyhedron":
        """Same set with implicit equalities made explicit, independent
        equalities and no redundant inequality."""
        if self.is_empty():
            return Polyhedron.empty(self.dim)
        cons = self.constraints()
        ineqs = []
        eqs = list(self.eqs)
        for a, b in self.ineqs:
            res = lp_solve(cons, a, "min", self.dim)
            if res.optimal and res.value == b:
                eqs.append((a, b))
            else:
                ineqs.append((a, b))
        if eqs:
            red, _ = rref([a + (b,) for a, b in eqs], self.dim + 1)
            eqs = [(r[:-1], r[-1]) for r in red]
        eq_cons = [LinCon(a, EQ, b) for a, b in eqs]
        kept = list(ineqs)
        i = 0
        while i < len(kept):
            a, b = kept[i]
            others = eq_cons + [LinCon(x, LE, y) for j, (x, y) in enumerate(kept) if j != i]
            res = lp_solve(others, a, "max", self.dim)
            if res.optimal and res.value <= b:
                del kept[i]
            else:
                i += 1
        out = Polyhedron(self.dim, kept, eqs)
        out._empty = False
        return out

    # -- projection -----------------------------------------------------------------

    def project(self, coords: Sequence[int]) -> "Polyhedron":
        """Projection onto ``coords`` (in the given order) by Fourier-Motzkin
        elimination, substituting equalities first."""
        coords = list(coords)
        if any(c < 0 or c >= self.dim for c in coords) or len(set(coords)) != len(coords):
            raise ValueError("bad coordinate list")
        k = len(coords)
        if self.is_empty():
            return Polyhedron.empty(k)
        drop = [j for j in range(self.dim) if j not in coords]
        work = self
        while True:
            work = _substitute_equalities(work, drop)
            remaining = [j for j in drop if any(a[j] for a, _ in work.ineqs)]
            if not remaining:
                break

            def cost(j):
                p = sum(1 for a, _ in work.ineqs if a[j] > 0)
                n = sum(1 for a, _ in work.ineqs if a[j] < 0)
                return (p * n - p - n, j)

            v = min(remaining, key=cost)
            pos = [(a, b) for a, b in work.ineqs if a[v] > 0]
            neg = [(a, b) for a, b in work.ineqs if a[v] < 0]
            combined = [(a, b) for a, b in work.ineqs if not a[v]]
            for ap, bp in pos:
                for an, bn in neg:
                    fp, fn = -an[v], ap[v]
                    combined.append((vadd(vscale(fp, ap), vscale(fn, an)), fp * bp + fn * bn))
            work = Polyhedron(self.dim, combined, work.eqs).remove_redundant()
        return Polyhedron(
            k,
            [(tuple(a[c] for c in coords), b) for a, b in work.ineqs],
            [(tuple(a[c] for c in coords), b) for a, b in work.eqs],
        )

    def recession_cone(self) -> "Polyhedron":
        return Polyhedron(self.dim, [(a, ZERO) for a, _ in self.ineqs], [(a, ZERO) for a, _ in self.eqs])

    # -- generators -------------------------------------------------------------------

    def generators(self) -> GeneratorRep:
        if self._generators is None:
            self._generators = self._compute_generators()
        return self._generators

    def _compute_generators(self) -> GeneratorRep:
        n = self.dim
        if self._empty is True:
            return GeneratorRep(n)
        # homogenise: z = (x, t), a.x - b t <= 0, -t <= 0
        hom_ineqs = [tuple(-x for x in unit(n + 1, n))]
        hom_ineqs += [a + (-b,) for a, b in self.ineqs]
        hom_eqs = [a + (-b,) for a, b in self.eqs]
        lines, rays = cone_generators(n + 1, hom_ineqs, hom_eqs)
        if not any(r[n] > 0 for r in rays):
            self._empty = True
            return GeneratorRep(n)
        self._empty = False
        lines = _canonical_lines([l[:n] for l in lines], n)
        gram = [tuple(dot(u, v) for v in lines) for u in lines]
        vertices, out_rays = set(), set()
        for r in rays:
            if r[n] > 0:
                vertices.add(_orth_reduce(vscale(1 / r[n], r[:n]), lines, gram))
            else:
                d = primitive(_orth_reduce(r[:n], lines, gram))
                if not is_zero(d):
                    out_rays.add(d)
        for l in lines:
            out_rays.add(l)
            out_rays.add(vscale(-1, l))
        return GeneratorRep(n, tuple(sorted(vertices)), tuple(sorted(out_rays)), lines)

    @classmethod
    def from_generators(cls, gens: GeneratorRep) -> "Polyhedron":
        n = gens.dim
        if gens.is_empty:
            return cls.empty(n)
        # polar cone over (a, beta): a.v - beta <= 0, a.r <= 0
        ineqs = [vec(v) + (-ONE,) for v in gens.vertices]
        ineqs += [vec(r) + (ZERO,) for r in gens.rays]
        eqs = [vec(l) + (ZERO,) for l in gens.lines]
        lines, rays = cone_generators(n + 1, ineqs, eqs)
        out = cls(n, [(r[:n], r[n]) for r in rays], [(l[:n], l[n]) for l in lines])
        out._empty = False
        return out

    # -- integrality ---------------------------------------------------------------------

    def is_integral(self) -> bool:
        """Every minimal face contains an integer point."""
        gens = self.generators()
        if gens.is_empty:
            return True
        return all(_integer_point_on_face(v, gens.lines) is not None for v in gens.vertices)

    def integer_point(self, node_limit: int = 200) -> Optional[tuple]:
        """Some integer point of the polyhedron, or None when none was found
        (either none exists or the branch-and-bound budget ran out)."""
        gens = self.generators()
        if gens.is_empty:
            return None
        for v in gens.vertices:
            p = _integer_point_on_face(v, gens.lines)
            if p is not None and self.contains(p):
                return p
        if self.eqs and integer_solve([a for a, _ in self.eqs], [b for _, b in self.eqs], self.dim) is None:
            return None
        return _branch_and_bound(self, node_limit)


def _substitute_equalities(P: Polyhedron, drop) -> Polyhedron:
    """Use each equality mentioning a coordinate in ``drop`` to eliminate it."""
    eqs = [tuple(a) + (b,) for a, b in P.eqs]
    ineqs = [tuple(a) + (b,) for a, b in P.ineqs]
    kept = []
    while eqs:
        e = eqs.pop()
        v = next((j for j in drop if e[j]), None)
        if v is None:
            kept.append(e)
            continue
        ev = e[v]
        eqs = [vsub(r, vscale(r[v] / ev, e)) if r[v] else r for r in eqs]
        kept = [vsub(r, vscale(r[v] / ev, e)) if r[v] else r for r in kept]
        ineqs = [vsub(r, vscale(r[v] / ev, e)) if r[v] else r for r in ineqs]
    return Polyhedron(P.dim, [(r[:-1], r[-1]) for r in ineqs], [(r[:-1], r[-1]) for r in kept])


def _integer_point_on_face(v, lines) -> Optional[tuple]:
    if all(x.denominator == 1 for x in v):
        return tuple(v)
    if not lines:
        return None
    # v + L t integral  <=>  complement equations E x = E v solvable over Z
    n = len(v)
    comp = _complement_rows(lines, n)
    return integer_solve(comp, [dot(r, v) for r in comp], n)


def _complement_rows(lines, n):
    from .linalg import nullspace

    return [primitive(r) for r in nullspace(lines, n)]


def _branch_and_bound(P: Polyhedron, node_limit: int) -> Optional[tuple]:
    from math import ceil, floor

    stack = [P.constraints()]
    nodes = 0
    while stack and nodes < node_limit:
        cons = stack.pop()
        nodes += 1
        pt = feasible_point(cons, P.dim)
        if pt is None:
            continue
        j = next((i for i, x in enumerate(pt) if x.denominator != 1), None)
        if j is None:
            return pt
        e = unit(P.dim, j)
        stack.append(cons + [LinCon(e, GE, ceil(pt[j]))])
        stack.append(cons + [LinCon(e, LE, floor(pt[j]))])
    return None


# ---------------------------------------------------------------------------
# nonnegative functions


def nonneg_cone(Q: Polyhedron, nx: Optional[int] = None) -> list:
    """Generators ``(a, b)`` of the cone of affine functions ``a.x + b`` that
    are nonnegative on the projection of ``Q`` onto its first ``nx``
    coordinates (default: half of the dimension).

    Computed from the Farkas cone
    ``{(lam, mu, a, b) : lam.M + mu.E = (-a, 0), lam.m + mu.e <= b, lam >= 0}``
    without projecting ``Q``.
    """
    if nx is None:
        if Q.dim % 2:
            raise ValueError("odd dimension: pass nx explicitly")
        nx = Q.dim // 2
    if Q.is_empty():
        raise ValueError("nonneg_cone of an empty polyhedron")
    mi, me = len(Q.ineqs), len(Q.eqs)
    dim = mi + me + nx + 1
    rows = [a for a, _ in Q.ineqs] + [a for a, _ in Q.eqs]
    rhs = [b for _, b in Q.ineqs] + [b for _, b in Q.eqs]
    eqs = []
    for j in range(Q.dim):
        h = [r[j] for r in rows] + [ZERO] * (nx + 1)
        if j < nx:
            h[mi + me + j] = ONE
        eqs.append(tuple(h))
    ineqs = [tuple(rhs) + zeros(nx) + (-ONE,)]
    for i in range(mi):
        h = [ZERO] * dim
        h[i] = -ONE
        ineqs.append(tuple(h))
    lines, rays = cone_generators(dim, ineqs, eqs)
    start = mi + me
    gens = []
    for r in rays:
        gens.append(primitive(r[start:]))
    for l in lines:
        g = primitive(l[start:])
        gens.append(g)
        gens.append(vscale(-1, g))
    uniq = []
    for g in gens:
        if not is_zero(g) and g not in uniq:
            uniq.append(g)
    uniq.sort()
    # drop generators that are conic combinations of the others
    i = 0
    while i < len(uniq):
        others = uniq[:i] + uniq[i + 1:]
        if others and cone_contains(others, uniq[i]):
            del uniq[i]
        else:
            i += 1
    return [AffineFunc(g[:-1], g[-1]) for g in uniq]


def cone_contains(generators: Sequence[tuple], v: Sequence) -> bool:
    """LP membership of ``v`` in ``cone(generators)``."""
    v = vec(v)
    k = len(generators)
    if k == 0:
        return is_zero(v)
    cons = []
    for j in range(len(v)):
        cons.append(LinCon(tuple(g[j] for g in generators), EQ, v[j]))
    for i in range(k):
        cons.append(LinCon(unit(k, i), GE, ZERO))
    return feasible_point(cons, k) is not None


def cones_equal(gens_a: Sequence[tuple], gens_b: Sequence[tuple]) -> bool:
    return all(cone_contains(gens_b, g) for g in gens_a) and all(cone_contains(gens_a, g) for g in gens_b)
