"""The intrinsic quadric ``X(n, P, u)``: fan, divisor cones, anticanonical
complex, singularity type and numerical invariants.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import prod
from typing import Sequence

import numpy as np

from . import _kernels
from .convex_geometry import (
    Polytope,
    hull_facets,
    polytope_from_inequalities,
    relint_contains,
    lattice_points,
)
from .lattice_algebra import AbelianGroup, GroupElement, Subgroup, subgroup_index, subgroup_intersection
from .quadric_rings import GradedRing, PMatrix, component_dimensions, grading, monomial_count_table, singular_locus_dim

TERMINAL = "terminal"
CANONICAL = "canonical-not-terminal"
NOT_CANONICAL = "not-canonical"
NOT_LOG_TERMINAL = "not-log-terminal"


class OracleError(RuntimeError):
    pass


# --------------------------------------------------------------------------
# cones in a rank-one rational class group

_SIGNS = (-1, 0, 1)


@dataclass(frozen=True)
class SignCone:
    """A subset of ``K_Q = Q`` built from the sign classes ``-, 0, +``."""

    signs: frozenset

    @classmethod
    def generated_by(cls, values: Sequence[int]) -> "SignCone":
        s = {0} | {(v > 0) - (v < 0) for v in values}
        if -1 in s and 1 in s:
            s = set(_SIGNS)
        return cls(frozenset(s))

    def relint(self) -> "SignCone":
        if self.signs == frozenset({0, 1}):
            return SignCone(frozenset({1}))
        if self.signs == frozenset({0, -1}):
            return SignCone(frozenset({-1}))
        return self

    def __and__(self, other: "SignCone") -> "SignCone":
        return SignCone(self.signs & other.signs)

    def __contains__(self, value: int) -> bool:
        return ((value > 0) - (value < 0)) in self.signs

    @property
    def pointed(self) -> bool:
        return not ({-1, 1} <= self.signs)

    def __str__(self) -> str:
        names = {frozenset({0}): "{0}", frozenset({0, 1}): "Q>=0", frozenset({1}): "Q>0",
                 frozenset({0, -1}): "Q<=0", frozenset({-1}): "Q<0", frozenset(_SIGNS): "Q",
                 frozenset(): "{}"}
        return names.get(self.signs, str(sorted(self.signs)))


ALL = SignCone(frozenset(_SIGNS))


def _cone_of(ring: GradedRing, face: Sequence[int]) -> SignCone:
    return SignCone.generated_by([ring.degrees[i].free[0] for i in face])


# --------------------------------------------------------------------------
# fan


@dataclass(frozen=True)
class FanCone:
    rays: tuple[int, ...]  # column indices of P
    kind: str  # "big" or "leaf"
    elementary: bool = False


@dataclass
class FanData:
    x_faces: list[frozenset]
    cones: list[FanCone]
    elementary_big: list[tuple[int, ...]] = field(default_factory=list)


def _is_orbit_face(q_monomials, face: frozenset) -> bool:
    """Whether the torus orbit with nonzero coordinates exactly on ``face``
    meets ``V(q)``: true unless exactly one monomial of ``q`` survives."""
    surviving = sum(1 for mon in q_monomials if all(c in face for c, e in enumerate(mon) if e))
    return surviving != 1


def x_faces(ring: GradedRing, u: GroupElement) -> list[frozenset]:
    return faces_from_weights(ring.q_monomials, ring.free_weights, u.free[0])


def faces_from_weights(q_monomials, weights: Sequence[int], u_free: int) -> list[frozenset]:
    """X-faces of a rank-one grading given by the free generator weights."""
    n = len(weights)
    out = []
    for size in range(1, n + 1):
        for face in itertools.combinations(range(n), size):
            f = frozenset(face)
            if not _is_orbit_face(q_monomials, f):
                continue
            if u_free in SignCone.generated_by([weights[i] for i in face]).relint():
                out.append(f)
    return out


def relevant_cones(p: PMatrix, u: GroupElement | int, ring: GradedRing | None = None,
                   weights: Sequence[int] | None = None) -> FanData:
    """Cones of ``Sigma(u)`` whose torus orbits meet ``X``.

    Either a grading or the rank-one free ``weights`` must be available; ``u``
    may be given by its free part alone.
    """
    fmt = p.format
    u_free = u if isinstance(u, int) else u.free[0]
    if weights is None:
        ring = ring or grading(p)
        weights = ring.free_weights
    mov = SignCone.generated_by(weights)
    for drop in range(len(weights)):
        mov &= SignCone.generated_by([w for i, w in enumerate(weights) if i != drop])
    if u_free not in mov.relint():
        raise ValueError(f"u = {u} is not in the relative interior of the moving cone")
    faces = faces_from_weights(fmt.q_monomials, weights, u_free)
    block_of = {c: i for i, block in enumerate(fmt.blocks) for c in block}
    cones, elem = [], []
    for face in faces:
        rays = tuple(sorted(set(range(fmt.num_vars)) - face))
        hit = {block_of[c] for c in rays if c in block_of}
        if len(hit) == fmt.r + 1:
            counts = [sum(1 for c in rays if block_of.get(c) == i) for i in range(fmt.r + 1)]
            is_elem = all(c == 1 for c in counts) and not any(c in fmt.s_columns for c in rays)
            cones.append(FanCone(rays, "big", is_elem))
            if is_elem:
                elem.append(rays)
        elif len(hit) <= fmt.r - 1:
            cones.append(FanCone(rays, "leaf"))
        else:
            raise AssertionError(f"X-face {sorted(face)} gives a cone that is neither big nor leaf")
    return FanData(faces, cones, sorted(elem))


# --------------------------------------------------------------------------
# divisor classes


def effective_cone(ring: GradedRing) -> SignCone:
    return _cone_of(ring, range(len(ring.degrees)))


def movable_cone(ring: GradedRing) -> SignCone:
    n = len(ring.degrees)
    out = ALL
    for drop in range(n):
        out &= _cone_of(ring, [i for i in range(n) if i != drop])
    return out


def divisor_cones(ring: GradedRing, fan: FanData) -> dict[str, SignCone]:
    if ring.K.free_rank != 1:
        raise NotImplementedError("divisor cones are implemented for rank-one class groups")
    eff = effective_cone(ring)
    mov = movable_cone(ring)
    sample, ample = ALL, ALL
    for face in fan.x_faces:
        c = _cone_of(ring, sorted(face))
        sample &= c
        ample &= c.relint()
    if all(w > 0 for w in ring.free_weights):
        ray = SignCone(frozenset({0, 1}))
        assert eff == mov == sample == ray and ample == ray.relint(), "rank-one shortcut violated"
    return {"Eff": eff, "Mov": mov, "SAmple": sample, "Ample": ample}


def is_fano(ring: GradedRing) -> bool:
    return ring.minus_kappa.free[0] in movable_cone(ring).relint()


# --------------------------------------------------------------------------
# anticanonical complex


def ell_numbers(exponents: Sequence[int]) -> tuple[tuple[int, ...], int]:
    """``(l_sigma_0, ..., l_sigma_r)`` and ``l_sigma`` for exponents ``l_{i j_i}``."""
    total = prod(exponents)
    parts = tuple(total // e for e in exponents)
    return parts, sum(parts) - total


def v_sigma_prime(p: PMatrix, sigma: Sequence[int]) -> tuple[Fraction, ...]:
    exps = [p.format.exponent_of_column[c] for c in sigma]
    parts, ell = ell_numbers(exps)
    if ell <= 0:
        raise ValueError(f"l_sigma = {ell} <= 0: not log-terminal")
    v = [sum(k * p.P[row][c] for k, c in zip(parts, sigma)) for row in range(len(p.P))]
    return tuple(Fraction(x, ell) for x in v)


def leaf_directions(r: int) -> list[tuple[int, ...]]:
    """``e_0 = -(e_1 + ... + e_r)`` followed by ``e_1, ..., e_r``."""
    dirs = [tuple(-1 for _ in range(r))]
    for i in range(r):
        dirs.append(tuple(int(i == j) for j in range(r)))
    return dirs


@dataclass
class ACComplex:
    r: int
    s: int
    hull_points: list[tuple[Fraction, ...]]
    hull: Polytope
    cells: list[Polytope | None]  # per leaf, coordinates (t, y)
    delta: Polytope | None  # lineality slice, coordinates y

    def leaf_point(self, leaf: int, t: int, y: Sequence) -> tuple:
        e = leaf_directions(self.r)[leaf]
        return tuple(t * x for x in e) + tuple(y)


def build_ac_complex(p: PMatrix, fan: FanData) -> ACComplex:
    r, s = p.format.r, p.s
    vprimes = [v_sigma_prime(p, sigma) for sigma in fan.elementary_big]
    pts = [tuple(Fraction(x) for x in col) for col in p.columns] + vprimes
    hull = hull_facets(pts)
    cells = []
    for e in leaf_directions(r):
        ineqs = [((sum(a[i] * e[i] for i in range(r)),) + tuple(a[r:]), b) for a, b in hull.inequalities]
        ineqs.append(((-1,) + (0,) * s, Fraction(0)))
        cells.append(polytope_from_inequalities(ineqs, s + 1))
    delta_ineqs = [(tuple(a[r:]), b) for a, b in hull.inequalities]
    delta = polytope_from_inequalities(delta_ineqs, s)
    return ACComplex(r, s, pts, hull, cells, delta)


def origin_interior(p: PMatrix, fan: FanData) -> bool:
    """Whether 0 lies in the interior of the anticanonical complex.

    The complex is the hull cut down to the tropical variety, and the origin
    lies on every leaf, so this is interiority in the full-dimensional hull.
    """
    vprimes = [v_sigma_prime(p, sigma) for sigma in fan.elementary_big]
    hull = hull_facets([tuple(Fraction(x) for x in col) for col in p.columns] + vprimes)
    return hull.dim == len(p.P) and relint_contains(hull, (0,) * len(p.P))


def complex_lattice_points(ac: ACComplex) -> list[tuple[tuple[int, ...], bool]]:
    """Nonzero lattice points of the complex paired with an interior flag."""
    out = {}
    if ac.delta is not None:
        for y in lattice_points(ac.delta):
            x = (0,) * ac.r + tuple(y)
            out[x] = relint_contains(ac.delta, y)
    for leaf, cell in enumerate(ac.cells):
        if cell is None:
            continue
        for pt in lattice_points(cell):
            t, y = pt[0], pt[1:]
            if t == 0:
                continue
            # interior inside the leaf: strict on every facet but the lineality wall
            strict = all(
                sum(ai * xi for ai, xi in zip(a, pt)) < b
                for a, b in cell.inequalities
                if not (b == 0 and a[0] < 0 and not any(a[1:]))
            )
            out[ac.leaf_point(leaf, t, y)] = strict
    out.pop((0,) * (ac.r + ac.s), None)
    return sorted(out.items())


def singularity_type(ac: ACComplex, p: PMatrix) -> str:
    for sigma in _elementary_sets(p):
        if ell_numbers([p.format.exponent_of_column[c] for c in sigma])[1] <= 0:
            return NOT_LOG_TERMINAL
    points = complex_lattice_points(ac)
    cols = set(p.columns)
    if any(interior for _, interior in points):
        return NOT_CANONICAL
    if all(x in cols for x, _ in points):
        return TERMINAL
    return CANONICAL


def _elementary_sets(p: PMatrix):
    return itertools.product(*p.format.blocks)


SCALE = 12  # common denominator of every v_sigma' (l_sigma is 3 or 4)


def singularity_type_fast(p: PMatrix, fan: FanData, backend: str | None = None) -> str:
    """Same decision as :func:`singularity_type`, through the integer kernels.

    Relies on the complex being ``conv(points) ∩ trop(X)`` with the origin in
    the interior, so that interior points of the complex are exactly the
    points of the tropical variety interior to the 4-dimensional hull.
    """
    r, s = p.format.r, p.s
    if r + s != 4:
        raise NotImplementedError("the integer kernels handle ambient dimension 4")
    pts = [[SCALE * x for x in col] for col in p.columns]
    for sigma in fan.elementary_big:
        v = v_sigma_prime(p, sigma)
        scaled = [x * SCALE for x in v]
        if any(x.denominator != 1 for x in scaled):
            raise ValueError("v_sigma' denominator does not divide the kernel scale")
        pts.append([int(x) for x in scaled])
    leaf = np.array([list(e) + [0] * s for e in leaf_directions(r)], dtype=np.int64)
    interior, extra = _kernels.lattice_scan(np.array(pts), SCALE, leaf, np.array(p.columns), backend=backend)
    if interior:
        return NOT_CANONICAL
    return TERMINAL if extra == 0 else CANONICAL


# --------------------------------------------------------------------------
# invariants


def fano_index(k: AbelianGroup, minus_k: GroupElement) -> tuple[int, GroupElement]:
    """Largest ``q`` with ``minus_k = q * w``, together with a witness ``w``."""
    f = minus_k.free[0]
    if f <= 0:
        raise ValueError("anticanonical class must have positive free part")
    for q in sorted((d for d in range(1, f + 1) if f % d == 0), reverse=True):
        for tau in k.torsion_elements():
            w = k.element([f // q], tau)
            if k.scale(q, w) == minus_k:
                return q, w
    raise AssertionError("q = 1 always has a witness")


def picard_group(ring: GradedRing, faces: Sequence[frozenset]) -> Subgroup:
    k = ring.K
    pic = Subgroup(k, tuple(ring.degrees))
    # the intersection only depends on the inclusion-minimal faces
    minimal = [f for f in faces if not any(g < f for g in faces)]
    for face in minimal:
        pic = subgroup_intersection(pic, Subgroup(k, tuple(ring.degrees[i] for i in sorted(face))))
    return pic


def picard_index(ring: GradedRing, faces: Sequence[frozenset]) -> int:
    return subgroup_index(picard_group(ring, faces))


def anticanonical_degree(ring: GradedRing) -> Fraction:
    """``(-K)^dim`` for a rank-one grading from the weights alone."""
    w = ring.free_weights
    dim = len(w) - 2
    mu = ring.deg_q.free[0]
    kappa = ring.minus_kappa.free[0]
    return Fraction(mu * kappa**dim, ring.K.torsion_order * prod(w))


def anticanonical_dims(ring: GradedRing, depth: int, backend: str | None = None) -> list[int]:
    """``dim R_{m (-kappa)}`` for ``m = 0..depth``."""
    mk = ring.minus_kappa
    ws = [ring.K.scale(m, mk) for m in range(depth + 1)]
    return component_dimensions(ring, ws, backend=backend)


def cartier_index(ring: GradedRing, faces: Sequence[frozenset] | None = None) -> int:
    """Order of ``-K`` in ``Cl / Pic``."""
    if faces is None:
        faces = x_faces(ring, ring.minus_kappa)
    pic = picard_group(ring, faces)
    n = 1
    while not pic.contains(ring.K.scale(n, ring.minus_kappa)):
        n += 1
    return n


@dataclass(frozen=True)
class OracleReading:
    value: Fraction
    period: int  # quasi-period of the anticanonical Hilbert function
    depth_needed: int  # largest m sampled to see three equal differences per residue


def _step_differences(d: list[int], period: int, dim: int) -> int | None:
    """Common ``dim``-th difference of step ``period`` or None if there is none."""
    values = set()
    for rho in range(period):
        diffs = d[rho::period]
        for _ in range(dim):
            diffs = [b - a for a, b in zip(diffs, diffs[1:])]
        if len(diffs) < 3 or len(set(diffs)) != 1:
            return None
        values.add(diffs[0])
    return values.pop() if len(values) == 1 else None


def hilbert_reading(
    ring: GradedRing,
    depth: int = 60,
    backend: str | None = None,
    faces: Sequence[frozenset] | None = None,
) -> OracleReading:
    """``(-K)^dim`` read off the anticanonical Hilbert function.

    ``m -> dim R_{m(-kappa)}`` is a quasi-polynomial whose period ``P`` divides
    the Cartier index ``N`` of ``-K``.  On each residue class mod ``P`` it is a
    polynomial in ``m``, so its ``dim``-th difference with step ``P`` equals
    ``P^dim (-K)^dim``.  The smallest ``P`` giving three equal differences on
    every residue class wins.  Sampling goes up to ``max(depth, (dim+3) N)``.
    """
    dim = len(ring.degrees) - 2
    n = cartier_index(ring, faces)
    top = max(depth, (dim + 3) * n)
    d = anticanonical_dims(ring, top, backend=backend)
    for period in (p for p in range(1, n + 1) if n % p == 0):
        common = _step_differences(d, period, dim)
        if common is not None:
            return OracleReading(Fraction(common, period**dim), period, (dim + 3) * period - 1)
    raise OracleError(f"no quasi-period dividing {n} up to m = {top}")


def hilbert_oracle(
    ring: GradedRing,
    depth: int = 60,
    backend: str | None = None,
    faces: Sequence[frozenset] | None = None,
) -> Fraction:
    return hilbert_reading(ring, depth, backend, faces).value


@dataclass(frozen=True)
class InvariantSet:
    cl_group: AbelianGroup
    minus_K: GroupElement
    degree_matrix: tuple[GroupElement, ...]
    minusK_cubed: Fraction
    fano_index: int
    picard_index: int
    sing_dim: int
    omega: tuple[GroupElement, ...]
    omega_dims: tuple[int, ...]
    sing_type: str


def compute_invariants(ring: GradedRing, sing_type: str, faces: Sequence[frozenset] | None = None) -> InvariantSet:
    mk = ring.minus_kappa
    if faces is None:
        faces = x_faces(ring, mk)
    omega = tuple(sorted(set(ring.degrees)))
    return InvariantSet(
        cl_group=ring.K,
        minus_K=mk,
        degree_matrix=tuple(ring.degrees),
        minusK_cubed=anticanonical_degree(ring),
        fano_index=fano_index(ring.K, mk)[0],
        picard_index=picard_index(ring, faces),
        sing_dim=singular_locus_dim(ring),
        omega=omega,
        omega_dims=tuple(sorted(component_dimensions(ring, list(omega)))),
        sing_type=sing_type,
    )
