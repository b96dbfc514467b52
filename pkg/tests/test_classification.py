from __future__ import annotations

import random

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from fanoquad.classification import (
    ENUMERATORS,
    TRINOM1,
    TRINOM2,
    TRINOM3,
    ClassRecord,
    _column_swaps,
    _record_for,
    admissible_normal_form,
    graded_iso_test,
    quadrinomial_fixed,
    satisfies_bounds,
    trinom1_grid,
    trinom2_grid,
    trinom3_grid,
)
from fanoquad.lattice_algebra import AbelianGroup
from fanoquad.quadric_rings import PMatrix, build_p0
from fanoquad.variety_model import TERMINAL

# frozen after the first full run; see the decision ledger
EXPECTED_STATS = {
    "trinom1": dict(valid_candidates=210, canonical=210, terminal=0, normal_forms=57, classes=24),
    "trinom2": dict(valid_candidates=24257, canonical=173, terminal=6, normal_forms=59, classes=43),
    "trinom3": dict(valid_candidates=3482, canonical=90, terminal=11, normal_forms=36, classes=22),
    "quadrinomial": dict(valid_candidates=4, canonical=0, terminal=0, normal_forms=4, classes=4),
}


def test_raw_grid_sizes():
    assert sum(1 for _ in trinom1_grid()) == 480
    assert all(satisfies_bounds("trinom2", p) for _, p in trinom2_grid())
    assert all(satisfies_bounds("trinom3", p) for _, p in trinom3_grid())


@pytest.mark.parametrize("setting", sorted(ENUMERATORS))
def test_enumerated_candidates_satisfy_bounds(setting):
    cands = ENUMERATORS[setting]()
    assert cands
    assert all(satisfies_bounds(setting, p) for p in cands)


def test_setting_statistics(full_result):
    got = {k: vars(v) for k, v in full_result.stats.items()}
    assert got == EXPECTED_STATS


def test_terminal_classes(full_result):
    term = [r for r in full_result.records if r.invariants.sing_type == TERMINAL]
    summary = sorted((r.invariants.cl_group.torsion, r.invariants.minusK_cubed) for r in term)
    assert [t for t, _ in summary] == [(), (), (2,), (5,)]
    assert 54 in [k for _, k in summary]


def test_quadrinomial_records():
    recs = quadrinomial_fixed()
    assert [r.invariants.cl_group.torsion for r in recs] == [(2, 2, 2), (2, 2), (2, 2), (2, 6)]
    assert [r.invariants.picard_index for r in recs] == [32, 8, 48, 72]


def test_records_sorted_and_oracle_checked(full_result):
    keys = [r.sort_key() for r in full_result.records]
    assert keys == sorted(keys)
    assert all(r.oracle_degree == r.invariants.minusK_cubed for r in full_result.records)


def test_non_isomorphism_certificates(full_result):
    recs = full_result.records
    assert full_result.non_iso_certificates
    for i, j, reason in full_result.non_iso_certificates:
        res = graded_iso_test(recs[i - 1], recs[j - 1])
        assert not res
        assert reason


def test_iso_test_is_reflexive_and_symmetric(full_result):
    recs = full_result.records
    for r in recs[::7]:
        res = graded_iso_test(r, r)
        assert res and res.variable_map is not None
    for r in recs:
        for m in r.merged[:1]:
            other = _record_for(r.provenance, m[0], r.invariants.sing_type)
            assert graded_iso_test(r, other)
            assert graded_iso_test(other, r)


def test_merged_normal_forms_share_invariants(full_result):
    for r in full_result.records:
        for m in r.merged:
            other = _record_for(r.provenance, m[0], r.invariants.sing_type)
            assert other.signature == r.signature


def test_block_permutation_detected_by_iso_test():
    # swapping the two size-two blocks of a trinom3 matrix keeps the variety
    p = PMatrix.from_rows(TRINOM3, [[-2, -1, 0, 2, 0], [-3, -3, 0, 4, 1]])
    rec = _record_for("trinom3", p, "canonical-not-terminal")
    perm = [2, 3, 0, 1, 4]
    swapped_rows = [[row[c] for c in perm] for row in p.P]
    # restore the P_0 shape by row operations
    swapped_rows[0] = [-x for x in swapped_rows[0]]
    swapped_rows[1] = [a + b for a, b in zip(swapped_rows[1], swapped_rows[0])]
    assert swapped_rows[:2] == build_p0(TRINOM3)
    q = PMatrix.from_rows(TRINOM3, swapped_rows[2:])
    other = _record_for("trinom3", q, "canonical-not-terminal")
    assert graded_iso_test(rec, other)


# -- normal form invariance ------------------------------------------------


def _random_admissible(p: PMatrix, rng: random.Random) -> PMatrix:
    fmt = p.format
    p0 = build_p0(fmt)
    d = [list(row) for row in p.D]
    s = len(d)
    for _ in range(rng.randint(1, 6)):
        op = rng.randrange(4)
        if op == 0 and s > 1:
            i, j = rng.sample(range(s), 2)
            k = rng.choice([-2, -1, 1, 2])
            d[i] = [a + k * b for a, b in zip(d[i], d[j])]
        elif op == 1:
            i = rng.randrange(s)
            d[i] = [-x for x in d[i]]
        elif op == 2:
            i, r = rng.randrange(s), rng.randrange(len(p0))
            k = rng.choice([-3, -1, 1, 2])
            d[i] = [a + k * b for a, b in zip(d[i], p0[r])]
        else:
            perm = rng.choice(_column_swaps(fmt))
            d = [[row[c] for c in perm] for row in d]
    if s > 1 and rng.random() < 0.5:
        d.reverse()
    return PMatrix.from_rows(fmt, d)


@pytest.fixture(scope="module")
def nf_instances(full_result):
    out = [r.p_matrix for r in full_result.records if r.p_matrix is not None]
    out += [m[0] for r in full_result.records for m in r.merged][:20]
    return out


@settings(max_examples=30, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(seed=st.integers(0, 2**32 - 1), pick=st.integers(0, 10**6))
def test_normal_form_invariance(nf_instances, seed, pick):
    p = nf_instances[pick % len(nf_instances)]
    nf = admissible_normal_form(p)
    rng = random.Random(seed)
    for _ in range(100):
        assert admissible_normal_form(_random_admissible(p, rng)) == nf


def test_normal_form_is_idempotent(nf_instances):
    for p in nf_instances:
        nf = admissible_normal_form(p)
        assert admissible_normal_form(nf) == nf
