"""Exact integer linear algebra: normal forms, cokernels and abelian groups.

Matrices are plain lists of rows holding Python integers, so nothing in this
module can overflow.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import reduce
from math import gcd, prod
from typing import Iterator, Sequence

IntMatrix = list[list[int]]


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def mat_mul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> IntMatrix:
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def transpose(a: Sequence[Sequence[int]]) -> IntMatrix:
    return [list(col) for col in zip(*a)]


def vec_mat(v: Sequence[int], a: Sequence[Sequence[int]]) -> list[int]:
    """Row vector times matrix."""
    return [sum(v[i] * a[i][j] for i in range(len(v))) for j in range(len(a[0]))]


def determinant(a: Sequence[Sequence[int]]) -> int:
    """Fraction-free Bareiss elimination."""
    n = len(a)
    if n == 0:
        return 1
    m = [list(row) for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def smith_normal_form(m: Sequence[Sequence[int]]) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return ``(U, D, V)`` with ``U @ M @ V == D`` and ``U``, ``V`` unimodular.

    ``D`` is diagonal with non-negative entries ``d1 | d2 | ...``.
    """
    rows = len(m)
    cols = len(m[0]) if rows else 0
    d = [list(map(int, row)) for row in m]
    u = identity(rows)
    v = identity(cols)

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in d:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, c):
        # row_dst += c * row_src
        d[dst] = [x + c * y for x, y in zip(d[dst], d[src])]
        u[dst] = [x + c * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, c):
        for row in d:
            row[dst] += c * row[src]
        for row in v:
            row[dst] += c * row[src]

    t = 0
    while t < min(rows, cols):
        nonzero = [(abs(d[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if d[i][j]]
        if not nonzero:
            break
        _, pi, pj = min(nonzero)
        swap_rows(t, pi)
        swap_cols(t, pj)
        while True:
            done = True
            for i in range(t + 1, rows):
                q = d[i][t] // d[t][t]
                if q:
                    add_row(t, i, -q)
                if d[i][t]:
                    done = False
            for j in range(t + 1, cols):
                q = d[t][j] // d[t][t]
                if q:
                    add_col(t, j, -q)
                if d[t][j]:
                    done = False
            if done:
                # enforce divisibility of the remaining block
                bad = next(
                    (i for i in range(t + 1, rows) for j in range(t + 1, cols) if d[i][j] % d[t][t]),
                    None,
                )
                if bad is None:
                    break
                add_row(bad, t, 1)
                continue
            nonzero = [(abs(d[i][t]), i, t) for i in range(t, rows) if d[i][t]]
            nonzero += [(abs(d[t][j]), t, j) for j in range(t, cols) if d[t][j]]
            _, pi, pj = min(nonzero)
            if pi != t:
                swap_rows(t, pi)
            if pj != t:
                swap_cols(t, pj)
        if d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return u, d, v


def hermite_normal_form(m: Sequence[Sequence[int]]) -> IntMatrix:
    """Row-style HNF of the row lattice; zero rows are dropped.

    Pivots are positive and entries above a pivot lie in ``[0, pivot)``, so the
    result is a unique basis of the lattice spanned by the rows.
    """
    a = [list(map(int, row)) for row in m if any(row)]
    if not a:
        return []
    cols = len(a[0])
    r = 0
    for c in range(cols):
        if r == len(a):
            break
        while True:
            nz = [i for i in range(r, len(a)) if a[i][c]]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(a[i][c]))
            a[r], a[p] = a[p], a[r]
            finished = True
            for i in range(r + 1, len(a)):
                if a[i][c]:
                    q = a[i][c] // a[r][c]
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    if a[i][c]:
                        finished = False
            if finished:
                break
        if r < len(a) and a[r][c]:
            if a[r][c] < 0:
                a[r] = [-x for x in a[r]]
            for i in range(r):
                q = a[i][c] // a[r][c]
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
            r += 1
    return [row for row in a[:r]]


def rank(m: Sequence[Sequence[int]]) -> int:
    return len(hermite_normal_form(m))


def left_kernel(m: Sequence[Sequence[int]]) -> IntMatrix:
    """Integral basis of ``{y : y M = 0}``."""
    u, d, _ = smith_normal_form(m)
    r = sum(1 for i in range(min(len(d), len(d[0]) if d else 0)) if d[i][i])
    return [list(row) for row in u[r:]]


def right_kernel(m: Sequence[Sequence[int]]) -> IntMatrix:
    """Integral basis of ``{x : M x = 0}``, one basis vector per row."""
    return left_kernel(transpose(m))


def is_primitive(v: Sequence[int]) -> bool:
    if not any(v):
        raise ValueError("zero vector has no primitivity")
    return reduce(gcd, (abs(x) for x in v)) == 1


def lattice_contains(basis: Sequence[Sequence[int]], v: Sequence[int]) -> bool:
    """Membership of ``v`` in the row lattice spanned by ``basis``."""
    h = hermite_normal_form(basis)
    rest = list(v)
    for row in h:
        c = next(j for j, x in enumerate(row) if x)
        if rest[c] % row[c]:
            return False
        q = rest[c] // row[c]
        rest = [x - q * y for x, y in zip(rest, row)]
    return not any(rest)


# --------------------------------------------------------------------------
# finitely generated abelian groups


@dataclass(frozen=True)
class AbelianGroup:
    free_rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError(f"torsion orders {self.torsion} violate the divisibility chain")
        if any(d < 2 for d in self.torsion):
            raise ValueError("torsion orders must be at least 2")

    @property
    def torsion_order(self) -> int:
        return prod(self.torsion)

    def element(self, free: Sequence[int], torsion: Sequence[int] = ()) -> "GroupElement":
        if len(free) != self.free_rank or len(torsion) != len(self.torsion):
            raise ValueError("element shape does not match the group")
        return GroupElement(tuple(free), tuple(t % d for t, d in zip(torsion, self.torsion)))

    def zero(self) -> "GroupElement":
        return self.element([0] * self.free_rank, [0] * len(self.torsion))

    def add(self, a: "GroupElement", b: "GroupElement") -> "GroupElement":
        return self.element(
            [x + y for x, y in zip(a.free, b.free)],
            [x + y for x, y in zip(a.torsion, b.torsion)],
        )

    def scale(self, k: int, a: "GroupElement") -> "GroupElement":
        return self.element([k * x for x in a.free], [k * x for x in a.torsion])

    def sub(self, a: "GroupElement", b: "GroupElement") -> "GroupElement":
        return self.add(a, self.scale(-1, b))

    def torsion_elements(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(*(range(d) for d in self.torsion))

    def lift(self, a: "GroupElement") -> list[int]:
        return list(a.free) + list(a.torsion)

    def relations(self) -> IntMatrix:
        """Relation lattice of the presentation ``Z^(f+k) -> K``."""
        n = self.free_rank + len(self.torsion)
        rel = []
        for i, d in enumerate(self.torsion):
            row = [0] * n
            row[self.free_rank + i] = d
            rel.append(row)
        return rel

    def __str__(self) -> str:
        parts = ["Z"] * self.free_rank + [f"Z{d}" for d in self.torsion]
        return " x ".join(parts) if parts else "0"


@dataclass(frozen=True, order=True)
class GroupElement:
    free: tuple[int, ...]
    torsion: tuple[int, ...] = ()

    def as_list(self) -> list[int]:
        return list(self.free) + list(self.torsion)

    def __str__(self) -> str:
        return "(" + ", ".join([str(x) for x in self.free] + [f"{t}~" for t in self.torsion]) + ")"


class Cokernel:
    """``Z^c / im(M^T)``: the factor group by the row lattice of ``M``."""

    def __init__(self, m: Sequence[Sequence[int]]):
        m = [list(map(int, row)) for row in m]
        self.matrix = m
        self.cols = len(m[0])
        _, d, v = smith_normal_form(m)
        diag = [d[i][i] for i in range(min(len(d), self.cols))]
        r = sum(1 for x in diag if x)
        self._v = v
        self._rank = r
        self._tors_idx = [i for i in range(r) if diag[i] > 1]
        self.group = AbelianGroup(self.cols - r, tuple(diag[i] for i in self._tors_idx))

    def __call__(self, x: Sequence[int]) -> GroupElement:
        if len(x) != self.cols:
            raise ValueError(f"expected a vector of length {self.cols}")
        y = vec_mat(x, self._v)
        return self.group.element(y[self._rank:], [y[i] for i in self._tors_idx])

    def basis_images(self) -> list[GroupElement]:
        return [self(row) for row in identity(self.cols)]


def cokernel(m: Sequence[Sequence[int]]) -> tuple[AbelianGroup, Cokernel]:
    proj = Cokernel(m)
    return proj.group, proj


# --------------------------------------------------------------------------
# subgroups


@dataclass(frozen=True)
class Subgroup:
    ambient: AbelianGroup
    generators: tuple[GroupElement, ...]

    def preimage_basis(self) -> IntMatrix:
        """HNF basis of the preimage lattice in the presentation ``Z^(f+k)``."""
        rows = [self.ambient.lift(g) for g in self.generators] + self.ambient.relations()
        return hermite_normal_form(rows)

    def contains(self, a: GroupElement) -> bool:
        basis = self.preimage_basis()
        if not basis:
            return not any(self.ambient.lift(a))
        return lattice_contains(basis, self.ambient.lift(a))

    def __eq__(self, other):
        if not isinstance(other, Subgroup):
            return NotImplemented
        return self.ambient == other.ambient and self.preimage_basis() == other.preimage_basis()

    def __hash__(self):
        return hash((self.ambient, tuple(map(tuple, self.preimage_basis()))))


def _lattice_intersection(a: IntMatrix, b: IntMatrix, n: int) -> IntMatrix:
    if not a or not b:
        return []
    stacked = [list(r) for r in a] + [[-x for x in r] for r in b]
    ker = left_kernel(stacked)
    rows = [vec_mat(y[: len(a)], a) for y in ker]
    return hermite_normal_form(rows) if rows else []


def subgroup_intersection(a: Subgroup, b: Subgroup) -> Subgroup:
    if a.ambient != b.ambient:
        raise ValueError("subgroups live in different groups")
    k = a.ambient
    n = k.free_rank + len(k.torsion)
    basis = _lattice_intersection(a.preimage_basis(), b.preimage_basis(), n)
    gens = tuple(k.element(row[: k.free_rank], row[k.free_rank:]) for row in basis)
    gens = tuple(g for g in gens if g != k.zero())
    return Subgroup(k, gens)


def subgroup_index(a: Subgroup) -> int | float:
    """``[ambient : a]``; ``math.inf`` when the subgroup has smaller rank."""
    k = a.ambient
    n = k.free_rank + len(k.torsion)
    basis = a.preimage_basis()
    if len(basis) < n:
        return float("inf")
    return abs(prod(basis[i][i] for i in range(n)))


# --------------------------------------------------------------------------
# automorphisms


@dataclass(frozen=True)
class GroupAutomorphism:
    group: AbelianGroup
    free_images: tuple[GroupElement, ...]
    torsion_images: tuple[GroupElement, ...]

    def __call__(self, a: GroupElement) -> GroupElement:
        k = self.group
        out = k.zero()
        for c, img in zip(a.free, self.free_images):
            out = k.add(out, k.scale(c, img))
        for c, img in zip(a.torsion, self.torsion_images):
            out = k.add(out, k.scale(c, img))
        return out


def torsion_automorphisms(group: AbelianGroup) -> Iterator[tuple[GroupElement, ...]]:
    """Images of the torsion generators under every automorphism of the torsion part."""
    f = group.free_rank
    elems = list(group.torsion_elements())
    zero_free = (0,) * f
    options = []
    for d in group.torsion:
        options.append([t for t in elems if all((d * x) % e == 0 for x, e in zip(t, group.torsion))])
    order = group.torsion_order
    for images in itertools.product(*options):
        seen = set()
        for coeffs in elems:
            acc = [0] * len(group.torsion)
            for c, img in zip(coeffs, images):
                for i, x in enumerate(img):
                    acc[i] += c * x
            seen.add(tuple(x % e for x, e in zip(acc, group.torsion)))
        if len(seen) == order:
            yield tuple(GroupElement(zero_free, t) for t in images)


def group_automorphisms(group: AbelianGroup) -> Iterator[GroupAutomorphism]:
    """Every automorphism of ``Z^f x T`` for ``f <= 1``."""
    if group.free_rank > 1:
        raise NotImplementedError("automorphism enumeration needs free rank <= 1")
    tors_autos = list(torsion_automorphisms(group))
    if group.free_rank == 0:
        for imgs in tors_autos:
            yield GroupAutomorphism(group, (), imgs)
        return
    for sign in (1, -1):
        for shift in group.torsion_elements():
            free_img = group.element([sign], shift)
            for imgs in tors_autos:
                yield GroupAutomorphism(group, (free_img,), imgs)
