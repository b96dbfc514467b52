"""Exact rational convex geometry for small dimensions (at most 4).

Everything is computed with :class:`fractions.Fraction`.  Facets are found by
brute force over point subsets, which is plenty for the handful of points the
anticanonical complexes involve.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

QVector = tuple[Fraction, ...]


def qvec(v: Iterable) -> QVector:
    return tuple(Fraction(x) for x in v)


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _primitive(v: Sequence[Fraction]) -> tuple[int, ...]:
    """Scale a nonzero rational vector to a primitive integer vector."""
    den = reduce(lambda a, b: a * b // math.gcd(a, b), (Fraction(x).denominator for x in v), 1)
    ints = [int(x * den) for x in v]
    g = reduce(math.gcd, (abs(x) for x in ints))
    return tuple(x // g for x in ints)


def _row_reduce(rows: list[list[Fraction]]) -> list[list[Fraction]]:
    """Reduced row echelon form, zero rows removed."""
    a = [list(r) for r in rows]
    out = []
    if not a:
        return out
    ncols = len(a[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        a[r] = [x / p for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        r += 1
        if r == len(a):
            break
    return a[:r]


def _null_space(rows: list[list[Fraction]], n: int) -> list[list[Fraction]]:
    """Basis of ``{x : row . x = 0 for all rows}`` in ``Q^n``."""
    rref = _row_reduce(rows) if rows else []
    pivots = []
    for row in rref:
        pivots.append(next(j for j, x in enumerate(row) if x != 0))
    free = [j for j in range(n) if j not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * n
        x[f] = Fraction(1)
        for row, p in zip(rref, pivots):
            x[p] = -row[f]
        basis.append(x)
    return basis


def _solve(a: list[list[Fraction]], b: list[Fraction]) -> list[Fraction] | None:
    """Unique solution of the square system ``a x = b`` or None if singular."""
    n = len(a)
    aug = [list(row) + [rhs] for row, rhs in zip(a, b)]
    rref = _row_reduce(aug)
    if len(rref) < n or any(rref[i][i] != 1 for i in range(n)):
        return None
    return [rref[i][n] for i in range(n)]


@dataclass(frozen=True)
class Polytope:
    """A bounded polyhedron carrying both descriptions.

    ``equations`` are pairs ``(a, b)`` meaning ``a . x = b``; ``inequalities``
    are pairs ``(a, b)`` meaning ``a . x <= b`` and are irredundant facets of
    the polytope inside its affine span.  Normals are primitive integer vectors.
    """

    ambient_dim: int
    vertices: tuple[QVector, ...]
    equations: tuple[tuple[tuple[int, ...], Fraction], ...] = ()
    inequalities: tuple[tuple[tuple[int, ...], Fraction], ...] = ()
    dim: int = field(default=-1)

    def contains(self, x: Sequence) -> bool:
        x = qvec(x)
        return all(_dot(a, x) == b for a, b in self.equations) and all(
            _dot(a, x) <= b for a, b in self.inequalities
        )


def _affine_span(points: Sequence[QVector]):
    """Direction basis (rref) and integral equations of the affine hull."""
    n = len(points[0])
    base = points[0]
    diffs = [list(_sub(p, base)) for p in points[1:]]
    directions = _row_reduce(diffs) if diffs else []
    normals = _null_space(directions, n) if directions else [
        [Fraction(int(i == j)) for j in range(n)] for i in range(n)
    ]
    eqs = []
    for nv in normals:
        a = _primitive(nv)
        eqs.append((a, _dot(a, base)))
    return directions, tuple(sorted(eqs))


def hull_facets(points: Iterable[Sequence]) -> Polytope:
    """H- and V-representation of the convex hull of finitely many points."""
    pts = sorted(set(qvec(p) for p in points))
    if not pts:
        raise ValueError("need at least one point")
    n = len(pts[0])
    if n > 4:
        raise ValueError("only ambient dimension <= 4 is supported")
    directions, eqs = _affine_span(pts)
    k = len(directions)
    if k == 0:
        return Polytope(n, (pts[0],), eqs, (), 0)
    facets = set()
    if k == 1:
        d = directions[0]
        a = _primitive(d)
        vals = [_dot(a, p) for p in pts]
        facets = {(a, max(vals)), (tuple(-x for x in a), -min(vals))}
    else:
        for subset in itertools.combinations(pts, k):
            rel = [_sub(p, subset[0]) for p in subset[1:]]
            # normal inside the span: combination of directions orthogonal to rel
            gram = [[_dot(d, r) for d in directions] for r in rel]
            coeffs = _null_space(gram, k)
            if len(coeffs) != 1:
                continue
            normal = [sum(c * d[j] for c, d in zip(coeffs[0], directions)) for j in range(n)]
            a = _primitive(normal)
            b = _dot(a, subset[0])
            vals = [_dot(a, p) for p in pts]
            if all(v <= b for v in vals):
                facets.add((a, b))
            elif all(v >= b for v in vals):
                facets.add((tuple(-x for x in a), -b))
    ineqs = tuple(sorted(facets))
    verts = []
    for p in pts:
        tight = [list(map(Fraction, a)) for a, b in ineqs if _dot(a, p) == b]
        # project tight normals onto the direction space to measure their rank there
        proj = [[_dot(t, d) for d in directions] for t in tight]
        if proj and len(_row_reduce(proj)) == k:
            verts.append(p)
    return Polytope(n, tuple(verts), eqs, ineqs, k)


def polytope_from_inequalities(ineqs: Sequence[tuple[Sequence[int], Fraction]], n: int) -> Polytope | None:
    """Polytope given by ``a . x <= b`` rows in ``Q^n``; None when empty.

    The inequality system must describe a bounded set.
    """
    rows = [(tuple(int(x) for x in a), Fraction(b)) for a, b in ineqs]
    candidates = set()
    for subset in itertools.combinations(rows, n):
        sol = _solve([list(map(Fraction, a)) for a, _ in subset], [b for _, b in subset])
        if sol is None:
            continue
        x = tuple(sol)
        if all(_dot(a, x) <= b for a, b in rows):
            candidates.add(x)
    if not candidates:
        return None
    return hull_facets(candidates)


def relint_contains(poly: Polytope, x: Sequence) -> bool:
    x = qvec(x)
    if len(x) != poly.ambient_dim:
        raise ValueError("dimension mismatch")
    if any(_dot(a, x) != b for a, b in poly.equations):
        return False
    return all(_dot(a, x) < b for a, b in poly.inequalities)


def _bounding_box(poly: Polytope):
    lo = [math.ceil(min(v[i] for v in poly.vertices)) for i in range(poly.ambient_dim)]
    hi = [math.floor(max(v[i] for v in poly.vertices)) for i in range(poly.ambient_dim)]
    return lo, hi


def lattice_points(poly: Polytope) -> list[tuple[int, ...]]:
    """All integer points of ``poly`` in lexicographic order."""
    if not poly.vertices:
        raise ValueError("unbounded or empty polytope")
    lo, hi = _bounding_box(poly)
    out = []
    for x in itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi))):
        if poly.contains(x):
            out.append(x)
    return out


def interior_lattice_points(poly: Polytope) -> list[tuple[int, ...]]:
    return [x for x in lattice_points(poly) if relint_contains(poly, x)]


def _simplices(poly: Polytope, pts: list[QVector]) -> list[tuple[QVector, ...]]:
    """Pulling triangulation from the lexicographically first vertex."""
    if poly.dim == 0:
        return [(pts[0],)]
    v0 = min(poly.vertices)
    out = []
    for a, b in poly.inequalities:
        if _dot(a, v0) == b:
            continue
        face_pts = [p for p in pts if _dot(a, p) == b]
        face = hull_facets(face_pts)
        for s in _simplices(face, list(face.vertices)):
            out.append((v0,) + s)
    return out


def normalized_volume(poly: Polytope) -> Fraction:
    """``d!`` times the Euclidean volume of a full-dimensional polytope."""
    if poly.dim != poly.ambient_dim:
        raise ValueError("normalized volume needs a full-dimensional polytope")
    total = Fraction(0)
    for simplex in _simplices(poly, list(poly.vertices)):
        edges = [[Fraction(x) for x in _sub(p, simplex[0])] for p in simplex[1:]]
        total += abs(_fraction_det(edges))
    return total


def _fraction_det(m: list[list[Fraction]]) -> Fraction:
    m = [list(r) for r in m]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for i in range(c + 1, n):
            f = m[i][c] / m[c][c]
            m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return det


def _is_lattice_polytope(poly: Polytope) -> bool:
    return all(x.denominator == 1 for v in poly.vertices for x in v)


def is_reflexive_2d(poly: Polytope) -> bool:
    if poly.ambient_dim != 2:
        raise ValueError("expected a polygon in the plane")
    if not _is_lattice_polytope(poly):
        raise ValueError("vertices must be lattice points")
    if poly.dim != 2:
        return False
    if interior_lattice_points(poly) != [(0, 0)]:
        return False
    return all(b == 1 for _, b in poly.inequalities)


def unimodular_equivalent(p: Polytope, q: Polytope) -> bool:
    """Whether a ``GL(2, Z)`` map carries the vertices of ``p`` onto those of ``q``."""
    if len(p.vertices) != len(q.vertices):
        return False
    pv = list(p.vertices)
    qv = set(q.vertices)
    anchor = next(
        ((a, b) for a, b in itertools.combinations(pv, 2) if a[0] * b[1] - a[1] * b[0] != 0),
        None,
    )
    if anchor is None:
        return set(pv) == qv
    p1, p2 = anchor
    det = p1[0] * p2[1] - p1[1] * p2[0]
    for q1, q2 in itertools.permutations(q.vertices, 2):
        # M [p1 p2] = [q1 q2]  =>  M = [q1 q2] [p1 p2]^-1
        inv = ((p2[1] / det, -p2[0] / det), (-p1[1] / det, p1[0] / det))
        m = [
            [q1[i] * inv[0][j] + q2[i] * inv[1][j] for j in range(2)]
            for i in range(2)
        ]
        if any(x.denominator != 1 for row in m for x in row):
            continue
        if abs(m[0][0] * m[1][1] - m[0][1] * m[1][0]) != 1:
            continue
        image = {tuple(m[i][0] * v[0] + m[i][1] * v[1] for i in range(2)) for v in pv}
        if image == qv:
            return True
    return False
