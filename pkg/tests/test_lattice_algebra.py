from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fanoquad.lattice_algebra import (
    AbelianGroup,
    Subgroup,
    cokernel,
    determinant,
    group_automorphisms,
    hermite_normal_form,
    lattice_contains,
    left_kernel,
    mat_mul,
    right_kernel,
    smith_normal_form,
    subgroup_index,
    subgroup_intersection,
)

small_matrices = st.integers(1, 5).flatmap(
    lambda rows: st.integers(1, 6).flatmap(
        lambda cols: st.lists(
            st.lists(st.integers(-9, 9), min_size=cols, max_size=cols), min_size=rows, max_size=rows
        )
    )
)


def _is_diagonal_chain(d):
    diag = []
    for i, row in enumerate(d):
        for j, x in enumerate(row):
            if i != j and x:
                return False
        if i < len(row):
            diag.append(row[i])
    nz = [x for x in diag if x]
    if any(x < 0 for x in diag) or diag[: len(nz)] != nz:
        return False
    return all(b % a == 0 for a, b in zip(nz, nz[1:]))


@settings(max_examples=1000, deadline=None)
@given(small_matrices)
def test_snf_contract(m):
    u, d, v = smith_normal_form(m)
    assert mat_mul(mat_mul(u, m), v) == d
    assert abs(determinant(u)) == 1
    assert abs(determinant(v)) == 1
    assert _is_diagonal_chain(d)


def test_snf_small_example():
    u, d, v = smith_normal_form([[2, 4, 4], [-6, 6, 12], [10, 4, 16]])
    assert [d[i][i] for i in range(3)] == [2, 2, 156]


@settings(max_examples=200, deadline=None)
@given(small_matrices)
def test_hnf_spans_same_lattice(m):
    h = hermite_normal_form(m)
    for row in m:
        assert lattice_contains(h, row)
    for row in h:
        assert lattice_contains(m, row) if any(map(any, m)) else not row
    assert hermite_normal_form(h) == h


@settings(max_examples=200, deadline=None)
@given(small_matrices)
def test_kernels(m):
    for y in left_kernel(m):
        assert all(sum(a * b for a, b in zip(y, col)) == 0 for col in zip(*m))
    for x in right_kernel(m):
        assert all(sum(a * b for a, b in zip(row, x)) == 0 for row in m)


def test_cokernel_of_relation_matrix():
    k, proj = cokernel([[2, 0, 0], [0, 4, 0]])
    assert k == AbelianGroup(1, (2, 4))
    assert proj([1, 0, 0]).torsion in {(1, 0), (1, 2)}
    assert proj([0, 0, 1]).free in {(1,), (-1,)}


def test_cokernel_torsion_order_is_minor_gcd():
    # Z^5 modulo the rows of a 4 x 5 matrix: torsion order = gcd of maximal minors
    m = [[-2, 2, 0, 0, 0], [-2, 0, 2, 0, 0], [1, 0, 0, 1, 0], [1, 0, 1, 0, 1]]
    k, _ = cokernel(m)
    minors = [abs(determinant([[row[c] for c in cols] for row in m])) for cols in itertools.combinations(range(5), 4)]
    from math import gcd
    from functools import reduce

    assert k.free_rank == 1
    assert k.torsion_order == reduce(gcd, minors)


@pytest.mark.parametrize(
    "group, count",
    [
        (AbelianGroup(1, ()), 2),
        (AbelianGroup(1, (2,)), 4),
        (AbelianGroup(1, (2, 2)), 48),
        (AbelianGroup(1, (2, 6)), 288),
        (AbelianGroup(1, (2, 2, 2)), 2688),
    ],
)
def test_automorphism_counts(group, count):
    autos = list(group_automorphisms(group))
    assert len(autos) == count
    elems = [group.element([f], t) for f in (-2, 1, 3) for t in group.torsion_elements()]
    for phi in autos[:50]:
        images = {phi(a) for a in elems}
        assert len(images) == len(elems)
        a, b = elems[1], elems[-1]
        assert phi(group.add(a, b)) == group.add(phi(a), phi(b))


def test_automorphisms_are_distinct():
    k = AbelianGroup(1, (2, 2))
    gens = [k.element([1], [0, 0]), k.element([0], [1, 0]), k.element([0], [0, 1])]
    tables = {tuple(phi(g) for g in gens) for phi in group_automorphisms(k)}
    assert len(tables) == 48


def test_abelian_group_rejects_bad_chain():
    with pytest.raises(ValueError):
        AbelianGroup(1, (4, 2))
    with pytest.raises(ValueError):
        AbelianGroup(1, (1,))


def test_subgroup_index_and_intersection():
    k = AbelianGroup(1, (2,))
    a = Subgroup(k, (k.element([2], [0]),))
    b = Subgroup(k, (k.element([3], [1]),))
    assert subgroup_index(a) == 4
    assert subgroup_index(b) == 6  # (3k, k mod 2)
    c = subgroup_intersection(a, b)
    assert subgroup_index(c) == 12
    assert c.contains(k.element([6], [0]))
    assert not c.contains(k.element([6], [1]))
    assert subgroup_index(Subgroup(k, (k.element([0], [1]),))) == float("inf")
