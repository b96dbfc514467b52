"""Formats, P-matrices and the graded rings ``C[T_ij, S_k] / <q>``."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property, reduce
from math import gcd
from typing import Sequence

import numpy as np

from . import _kernels
from .lattice_algebra import AbelianGroup, Cokernel, GroupElement, IntMatrix, determinant, rank


class SchemaError(ValueError):
    """Malformed P-matrix input; the message names the offending location."""


@dataclass(frozen=True)
class Format:
    """Defining data ``(n_0, ..., n_r)`` and ``m`` of a standard quadric."""

    n: tuple[int, ...]
    m: int

    def __post_init__(self):
        if len(self.n) < 2:
            raise ValueError("need at least two blocks")
        if any(x not in (1, 2) for x in self.n):
            raise ValueError("block sizes must be 1 or 2")
        if list(self.n) != sorted(self.n, reverse=True):
            raise ValueError("block sizes must be non-increasing")
        if self.m < 0:
            raise ValueError("m must be non-negative")

    @property
    def r(self) -> int:
        return len(self.n) - 1

    @property
    def num_vars(self) -> int:
        return sum(self.n) + self.m

    @property
    def exponents(self) -> tuple[tuple[int, ...], ...]:
        """``l_i = (1, 1)`` for a block of size two, ``(2,)`` otherwise."""
        return tuple((1, 1) if ni == 2 else (2,) for ni in self.n)

    @property
    def blocks(self) -> tuple[tuple[int, ...], ...]:
        """Column indices of each ``T_i`` block."""
        out, c = [], 0
        for ni in self.n:
            out.append(tuple(range(c, c + ni)))
            c += ni
        return tuple(out)

    @property
    def s_columns(self) -> tuple[int, ...]:
        start = sum(self.n)
        return tuple(range(start, start + self.m))

    @property
    def variable_names(self) -> list[str]:
        names = [f"T{i}{j + 1}" for i, ni in enumerate(self.n) for j in range(ni)]
        return names + [f"S{k + 1}" for k in range(self.m)]

    @property
    def exponent_of_column(self) -> list[int]:
        out = []
        for li in self.exponents:
            out.extend(li)
        return out + [0] * self.m

    @property
    def q_monomials(self) -> tuple[tuple[int, ...], ...]:
        mons = []
        for block, li in zip(self.blocks, self.exponents):
            e = [0] * self.num_vars
            for c, x in zip(block, li):
                e[c] = x
            mons.append(tuple(e))
        return tuple(mons)

    def relation_string(self) -> str:
        names = self.variable_names
        terms = []
        for mon in self.q_monomials:
            terms.append("".join(names[c] + ("^2" if e == 2 else "") for c, e in enumerate(mon) if e))
        return " + ".join(terms)

    def to_json(self) -> dict:
        return {"n": list(self.n), "m": self.m}


def build_p0(fmt: Format) -> IntMatrix:
    """The ``r x (n+m)`` block matrix with ``-l_0`` in the first block."""
    rows = []
    blocks = fmt.blocks
    for i in range(1, fmt.r + 1):
        row = [0] * fmt.num_vars
        for c, x in zip(blocks[0], fmt.exponents[0]):
            row[c] = -x
        for c, x in zip(blocks[i], fmt.exponents[i]):
            row[c] = x
        rows.append(row)
    return rows


@dataclass(frozen=True)
class PMatrix:
    format: Format
    D: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        d = tuple(tuple(int(x) for x in row) for row in self.D)
        object.__setattr__(self, "D", d)
        if any(len(row) != self.format.num_vars for row in d):
            raise ValueError("D rows must have n+m entries")

    @classmethod
    def from_rows(cls, fmt: Format, d: Sequence[Sequence[int]]) -> "PMatrix":
        return cls(fmt, tuple(tuple(row) for row in d))

    @property
    def s(self) -> int:
        return len(self.D)

    @cached_property
    def P(self) -> IntMatrix:
        return build_p0(self.format) + [list(row) for row in self.D]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(row[j] for row in self.P)

    @property
    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.format.num_vars)]

    def to_json(self) -> dict:
        return {"format": self.format.to_json(), "D": [list(row) for row in self.D]}

    @classmethod
    def from_json(cls, obj) -> "PMatrix":
        return parse_pmatrix(obj)


def parse_pmatrix(obj) -> PMatrix:
    """Read the ``{"format": {"n": [...], "m": k}, "D": [[...], ...]}`` schema."""
    if isinstance(obj, (str, bytes)):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise SchemaError("top level must be an object")
    for key in ("format", "D"):
        if key not in obj:
            raise SchemaError(f"missing key '{key}'")
    fmt_obj = obj["format"]
    if not isinstance(fmt_obj, dict) or "n" not in fmt_obj or "m" not in fmt_obj:
        raise SchemaError("'format' must be an object with keys 'n' and 'm'")
    n, m = fmt_obj["n"], fmt_obj["m"]
    if not isinstance(n, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in n):
        raise SchemaError("'format.n' must be a list of integers")
    if not isinstance(m, int) or isinstance(m, bool):
        raise SchemaError("'format.m' must be an integer")
    try:
        fmt = Format(tuple(n), m)
    except ValueError as exc:
        raise SchemaError(f"'format': {exc}") from exc
    d = obj["D"]
    if not isinstance(d, list) or not d:
        raise SchemaError("'D' must be a non-empty list of rows")
    for i, row in enumerate(d):
        if not isinstance(row, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in row):
            raise SchemaError(f"'D[{i}]' must be a list of integers")
        if len(row) != fmt.num_vars:
            raise SchemaError(f"'D[{i}]' has {len(row)} entries, expected n+m = {fmt.num_vars}")
    if fmt.r + len(d) > fmt.num_vars:
        raise SchemaError(f"r + s = {fmt.r + len(d)} exceeds n + m = {fmt.num_vars}")
    return PMatrix.from_rows(fmt, d)


# --------------------------------------------------------------------------
# validity and weights


def rational_weights(p: PMatrix | Sequence[Sequence[int]]) -> list[int]:
    """Signed maximal minors of a corank-one matrix, spanning its rational kernel.

    The sign is fixed so that the first nonzero entry is positive.
    """
    mat = p.P if isinstance(p, PMatrix) else [list(r) for r in p]
    rows, cols = len(mat), len(mat[0])
    if cols != rows + 1:
        raise ValueError(f"expected a corank-one shape, got {rows} x {cols}")
    w = []
    for j in range(cols):
        minor = [[row[c] for c in range(cols) if c != j] for row in mat]
        w.append((-1) ** j * determinant(minor))
    if not any(w):
        raise ValueError("matrix is rank deficient; its maximal minors all vanish")
    first = next(x for x in w if x)
    if first < 0:
        w = [-x for x in w]
    return w


@dataclass
class ValidityReport:
    non_primitive: list[int] = field(default_factory=list)
    duplicates: list[tuple[int, int]] = field(default_factory=list)
    spans: bool = True
    top_block_ok: bool = True
    messages: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.non_primitive and not self.duplicates and self.spans and self.top_block_ok

    def __bool__(self) -> bool:
        return self.ok


def validate_p(p: PMatrix, p_rows: Sequence[Sequence[int]] | None = None) -> ValidityReport:
    """Check primitivity, distinctness and the full-space cone condition.

    ``p_rows`` lets callers validate an explicit matrix whose top block might
    differ from ``P_0``.
    """
    mat = [list(r) for r in (p_rows if p_rows is not None else p.P)]
    rep = ValidityReport()
    p0 = build_p0(p.format)
    if mat[: len(p0)] != p0:
        rep.top_block_ok = False
        rep.messages.append("top block differs from P_0")
    cols = [tuple(row[j] for row in mat) for j in range(len(mat[0]))]
    names = p.format.variable_names
    for j, c in enumerate(cols):
        if not any(c) or reduce(gcd, (abs(x) for x in c)) != 1:
            rep.non_primitive.append(j)
            rep.messages.append(f"column {j} ({names[j]}) = {list(c)} is not primitive")
    for a, b in itertools.combinations(range(len(cols)), 2):
        if cols[a] == cols[b]:
            rep.duplicates.append((a, b))
            rep.messages.append(f"columns {a} ({names[a]}) and {b} ({names[b]}) coincide")
    if len(mat[0]) == len(mat) + 1:
        try:
            w = rational_weights(mat)
        except ValueError:
            w = [0]
        if not all(x > 0 for x in w):
            rep.spans = False
            rep.messages.append(f"columns do not span the space as a cone; rational weights {w}")
    else:
        full = rank(mat) == len(mat)
        # only corank one is decided here; larger corank needs a positive kernel vector search
        if not full or len(mat[0]) <= len(mat):
            rep.spans = False
            rep.messages.append("columns do not span the space as a cone")
        else:
            raise NotImplementedError("cone-spanning test implemented for corank one only")
    return rep


# --------------------------------------------------------------------------
# graded rings


@dataclass(frozen=True)
class GradedRing:
    """``C[T_1..T_N] / <q>`` graded by ``K``; ``q`` is a sum of monomials."""

    K: AbelianGroup
    degrees: tuple[GroupElement, ...]
    q_monomials: tuple[tuple[int, ...], ...]
    variable_names: tuple[str, ...] = ()

    def degree_of(self, exponent: Sequence[int]) -> GroupElement:
        out = self.K.zero()
        for e, d in zip(exponent, self.degrees):
            if e:
                out = self.K.add(out, self.K.scale(e, d))
        return out

    @property
    def deg_q(self) -> GroupElement:
        return self.degree_of(self.q_monomials[0])

    @property
    def minus_kappa(self) -> GroupElement:
        return self.K.sub(self.degree_of([1] * len(self.degrees)), self.deg_q)

    def is_homogeneous(self) -> bool:
        return len({self.degree_of(m) for m in self.q_monomials}) == 1

    @property
    def free_weights(self) -> list[int]:
        if self.K.free_rank != 1:
            raise ValueError("free weights are defined for rank-one gradings")
        return [d.free[0] for d in self.degrees]


def grading(p: PMatrix) -> GradedRing:
    """The ``K``-grading ``deg(T) = Q(e)`` with ``K = Z^(n+m) / im(P^*)``.

    The free coordinate of ``K`` is oriented so that generator degrees are
    non-negative there.
    """
    proj = Cokernel(p.P)
    k = proj.group
    degs = proj.basis_images()
    if k.free_rank == 1 and sum(d.free[0] for d in degs) < 0:
        degs = [k.element([-d.free[0]], d.torsion) for d in degs]
    ring = GradedRing(k, tuple(degs), p.format.q_monomials, tuple(p.format.variable_names))
    assert ring.is_homogeneous(), "q is inhomogeneous; P does not extend P_0"
    return ring


def _torsion_index(k: AbelianGroup, tors: Sequence[int]) -> int:
    idx = 0
    for t, d in zip(tors, k.torsion):
        idx = idx * d + (t % d)
    return idx


def torsion_shift_tables(k: AbelianGroup, degrees: Sequence[GroupElement]) -> np.ndarray:
    elems = list(k.torsion_elements()) or [()]
    perms = np.empty((len(degrees), len(elems)), dtype=np.int64)
    for i, d in enumerate(degrees):
        for j, e in enumerate(elems):
            perms[i, j] = _torsion_index(k, [a + b for a, b in zip(e, d.torsion)])
    return perms


def monomial_count_table(ring: GradedRing, max_degree: int, backend: str | None = None) -> np.ndarray:
    """``table[d, k]``: monomials of free degree ``d`` and torsion index ``k``."""
    weights = ring.free_weights
    if any(w <= 0 for w in weights):
        raise ValueError("monomial counting needs positive free weights")
    perms = torsion_shift_tables(ring.K, ring.degrees)
    return _kernels.monomial_counts(weights, perms, max_degree, backend=backend)


def component_dimensions(ring: GradedRing, ws: Sequence[GroupElement], backend: str | None = None) -> list[int]:
    """``dim R_w`` for each ``w``, as ``N(w) - N(w - deg q)``."""
    if not ws:
        return []
    top = max(w.free[0] for w in ws)
    if top < 0:
        return [0] * len(ws)
    table = monomial_count_table(ring, top, backend=backend)
    dq = ring.deg_q

    def count(w: GroupElement) -> int:
        if w.free[0] < 0:
            return 0
        return int(table[w.free[0], _torsion_index(ring.K, w.torsion)])

    return [count(w) - count(ring.K.sub(w, dq)) for w in ws]


def component_dimension(ring: GradedRing, w: GroupElement) -> int:
    return component_dimensions(ring, [w])[0]


def singular_locus_dim(fmt_or_ring: Format | GradedRing) -> int:
    """Dimension of ``Sing V(q)``: the variables absent from ``q`` stay free."""
    mons = fmt_or_ring.q_monomials
    nvars = len(mons[0])
    used = {c for mon in mons for c, e in enumerate(mon) if e}
    return nvars - len(used)
