from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fanoquad.classification import REFLEXIVE_TRIANGLES
from fanoquad.convex_geometry import (
    hull_facets,
    interior_lattice_points,
    is_reflexive_2d,
    lattice_points,
    normalized_volume,
    polytope_from_inequalities,
    relint_contains,
    unimodular_equivalent,
)

points_2d = st.lists(st.tuples(st.integers(-5, 5), st.integers(-5, 5)), min_size=3, max_size=8)


def test_unit_square():
    sq = hull_facets([(0, 0), (1, 0), (0, 1), (1, 1)])
    assert sq.dim == 2
    assert len(sq.vertices) == 4
    assert len(sq.inequalities) == 4
    assert normalized_volume(sq) == 2
    assert interior_lattice_points(sq) == []


def test_cube_volume_and_points():
    cube = hull_facets([(x, y, z) for x in (0, 2) for y in (0, 2) for z in (0, 2)])
    assert normalized_volume(cube) == 6 * 8
    assert len(lattice_points(cube)) == 27
    assert interior_lattice_points(cube) == [(1, 1, 1)]


def test_simplex_in_4d():
    simplex = hull_facets([(0, 0, 0, 0), (1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)])
    assert simplex.dim == 4
    assert normalized_volume(simplex) == 1
    assert not relint_contains(simplex, (0, 0, 0, 0))
    assert relint_contains(simplex, (Fraction(1, 10),) * 4)


def test_lower_dimensional_polytope_has_equations():
    seg = hull_facets([(0, 0, 0), (2, 2, 0)])
    assert seg.dim == 1
    assert len(seg.equations) == 2
    assert relint_contains(seg, (1, 1, 0))
    assert not relint_contains(seg, (0, 0, 0))


def test_from_inequalities_matches_hull():
    tri = polytope_from_inequalities([((-1, 0), 0), ((0, -1), 0), ((1, 1), 3)], 2)
    assert set(tri.vertices) == {(0, 0), (3, 0), (0, 3)}
    assert polytope_from_inequalities([((1, 0), -1), ((-1, 0), -1), ((0, 1), 1), ((0, -1), 1)], 2) is None


@settings(max_examples=150, deadline=None)
@given(points_2d)
def test_vertices_and_facets_describe_same_set(pts):
    poly = hull_facets(pts)
    for p in pts:
        assert poly.contains(p)
    for v in poly.vertices:
        assert tuple(Fraction(x) for x in v) in {tuple(map(Fraction, p)) for p in pts}
    if poly.dim == 2:
        again = polytope_from_inequalities(poly.inequalities, 2)
        assert set(again.vertices) == set(poly.vertices)


@pytest.mark.parametrize("tri", REFLEXIVE_TRIANGLES)
def test_listed_triangles_are_reflexive(tri):
    assert is_reflexive_2d(hull_facets(tri))


def test_listed_triangles_are_pairwise_inequivalent():
    polys = [hull_facets(t) for t in REFLEXIVE_TRIANGLES]
    for i, a in enumerate(polys):
        for b in polys[i + 1:]:
            assert not unimodular_equivalent(a, b)


def test_non_reflexive_examples():
    # three interior lattice points
    assert not is_reflexive_2d(hull_facets([(-1, -1), (3, -1), (-1, 3)]))
    # no interior lattice point at all
    assert not is_reflexive_2d(hull_facets([(0, 0), (1, 0), (0, 1), (1, 1)]))
    with pytest.raises(ValueError):
        is_reflexive_2d(hull_facets([(0, 0), (Fraction(1, 2), 0), (0, 1)]))


def test_unimodular_equivalence_detects_shear():
    a = hull_facets([(1, 0), (0, 1), (-1, -1)])
    b = hull_facets([(1, 3), (0, 1), (-1, -4)])  # (x, y) -> (x, 3x + y)
    assert unimodular_equivalent(a, b)
