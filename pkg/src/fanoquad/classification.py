"""Enumeration of candidate P-matrices and deduplication up to graded isomorphism."""
from __future__ import annotations

import itertools
import logging
import math
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from .lattice_algebra import (
    AbelianGroup,
    GroupElement,
    group_automorphisms,
    hermite_normal_form,
    mat_mul,
    right_kernel,
    transpose,
)
from .quadric_rings import Format, GradedRing, PMatrix, build_p0, grading, rational_weights, validate_p
from .variety_model import (
    CANONICAL,
    TERMINAL,
    InvariantSet,
    OracleError,
    anticanonical_degree,
    build_ac_complex,
    compute_invariants,
    hilbert_reading,
    is_fano,
    origin_interior,
    relevant_cones,
    singularity_type_fast,
)

log = logging.getLogger(__name__)

TRINOM1 = Format((1, 1, 1), 2)
TRINOM2 = Format((2, 1, 1), 1)
TRINOM3 = Format((2, 2, 1), 0)
SETTINGS = {"trinom1": TRINOM1, "trinom2": TRINOM2, "trinom3": TRINOM3}

REFLEXIVE_TRIANGLES = (
    ((1, 0), (0, 1), (-1, -1)),
    ((1, 1), (-1, 1), (0, -1)),
    ((1, 1), (-1, 1), (-1, -2)),
    ((1, 1), (-1, 1), (-1, -3)),
    ((2, 1), (-1, 1), (-1, -2)),
)

CANONICAL_IMPORTED = "canonical-imported"


# --------------------------------------------------------------------------
# candidate grids


def trinom1_grid() -> Iterator[PMatrix]:
    """Every raw candidate: triangle x {0,1}^4 x vertex roles (480 in total)."""
    for tri in REFLEXIVE_TRIANGLES:
        for x2, x3, y2, y3 in itertools.product((0, 1), repeat=4):
            for a, b, z in itertools.permutations(tri):
                x4, y4 = a
                x5, y5 = b
                x1, y1 = z[0] - x2 - x3, z[1] - y2 - y3
                yield PMatrix.from_rows(TRINOM1, [[x1, x2, x3, x4, x5], [y1, y2, y3, y4, y5]])


def trinom2_weights(x2, x3, x4, x5, y3, y4, y5) -> tuple[int, ...]:
    return (
        4 * x2 * y5 + 2 * x3 * y5 - 2 * x5 * y3 + 2 * x4 * y5 - 2 * x5 * y4,
        -2 * x3 * y5 + 2 * x5 * y3 - 2 * x4 * y5 + 2 * x5 * y4,
        2 * x2 * y5,
        2 * x2 * y5,
        -2 * x2 * y3 - 2 * x2 * y4,
    )


def trinom3_weights(x2, x3, x5, y3, y5) -> tuple[int, ...]:
    return (
        2 * x2 * y3 - x3 * y5 + x5 * y3,
        x3 * y5 - x5 * y3,
        -x2 * y5,
        2 * x2 * y3 + x2 * y5,
        x2 * y3,
    )


def _open_int_range(lo: Fraction, hi: Fraction) -> range:
    """Integers strictly between two rationals."""
    return range(math.floor(lo) + 1, math.ceil(hi))


def trinom2_grid() -> Iterator[tuple[tuple[int, ...], PMatrix]]:
    """Parameters ``(x2, x3, x4, x5, y3, y4, y5)`` within the trinom2 bounds."""
    for y4 in (-1, 0, 1):
        for x4 in (0, 1):
            for y3 in range(-18 - y4, -y4):
                s = y3 + y4
                for x2 in range(1, 2 - s + 1):
                    if x2 == 1:
                        y5_max = 9
                    else:
                        y5_max = math.floor((x2 - Fraction(s, 2)) / (x2 - 1))
                    for y5 in range(1, y5_max + 1):
                        for x5 in range(1, abs(y5) + 1):
                            lo = Fraction(2 * x5 * y3 + 2 * x5 * y4 - 2 * x4 * y5 - 4 * x2 * y5, 2 * y5)
                            for x3 in _open_int_range(lo, Fraction(-x4)):
                                params = (x2, x3, x4, x5, y3, y4, y5)
                                yield params, PMatrix.from_rows(
                                    TRINOM2, [[0, x2, x3, x4, x5], [0, 0, y3, y4, y5]]
                                )


def trinom3_grid() -> Iterator[tuple[tuple[int, ...], PMatrix]]:
    """Parameters ``(x2, x3, x5, y3, y5)`` within the trinom3 bounds."""
    for x2 in (1, 2, 3):
        for y3 in range(1, math.floor(Fraction(72, 3 * (x2 + 1))) + 1):
            for y5 in range(-2 * y3 + 1, 0):
                for x5 in range(1, abs(y5) + 1):
                    lo = Fraction(2 * x2 * y3 + x5 * y3, y5)
                    hi = Fraction(x5 * y3, y5)
                    for x3 in _open_int_range(lo, hi):
                        params = (x2, x3, x5, y3, y5)
                        yield params, PMatrix.from_rows(TRINOM3, [[0, x2, x3, 0, x5], [0, 0, y3, 0, y5]])


def enumerate_trinom1() -> list[PMatrix]:
    return [p for p in trinom1_grid() if validate_p(p).ok]


def enumerate_trinom2() -> list[PMatrix]:
    return [p for params, p in trinom2_grid() if all(w > 0 for w in trinom2_weights(*params)) and validate_p(p).ok]


def enumerate_trinom3() -> list[PMatrix]:
    return [p for params, p in trinom3_grid() if all(w > 0 for w in trinom3_weights(*params)) and validate_p(p).ok]


ENUMERATORS = {"trinom1": enumerate_trinom1, "trinom2": enumerate_trinom2, "trinom3": enumerate_trinom3}


def satisfies_bounds(setting: str, p: PMatrix) -> bool:
    """Re-check a matrix against the published inequality systems."""
    d = p.D
    if setting == "trinom1":
        (x1, x2, x3, x4, x5), (y1, y2, y3, y4, y5) = d
        verts = {(x4, y4), (x5, y5), (x1 + x2 + x3, y1 + y2 + y3)}
        return {x2, x3, y2, y3} <= {0, 1} and any(verts == set(t) for t in REFLEXIVE_TRIANGLES)
    if setting == "trinom2":
        (x1, x2, x3, x4, x5), (y1, y2, y3, y4, y5) = d
        if (x1, y1, y2) != (0, 0, 0):
            return False
        s = y3 + y4
        ok = 0 < x2 <= 2 - s and 0 <= x4 <= 1 and 0 < x5 <= abs(y5) and -18 - y4 <= y3 < -y4 and -1 <= y4 <= 1
        ok = ok and Fraction(2 * x5 * y3 + 2 * x5 * y4 - 2 * x4 * y5 - 4 * x2 * y5, 2 * y5) < x3 < -x4 if y5 else False
        bound = 9 if x2 == 1 else (x2 - Fraction(s, 2)) / (x2 - 1)
        return bool(ok and 0 < y5 <= bound)
    if setting == "trinom3":
        (x1, x2, x3, x4, x5), (y1, y2, y3, y4, y5) = d
        if (x1, x4, y1, y2, y4) != (0, 0, 0, 0, 0) or y5 == 0:
            return False
        return (
            0 < x2 <= 3
            and Fraction(2 * x2 * y3 + x5 * y3, y5) < x3 < Fraction(x5 * y3, y5)
            and 0 < x5 <= abs(y5)
            and 0 < y3 <= Fraction(72, 3 * (x2 + 1))
            and -2 * y3 < y5 < 0
        )
    raise ValueError(f"unknown setting {setting!r}")


# --------------------------------------------------------------------------
# imported quadrinomial varieties


@dataclass(frozen=True)
class QuadrinomialDatum:
    relation: str
    q_monomials: tuple[tuple[int, ...], ...]
    variable_names: tuple[str, ...]
    torsion: tuple[int, ...]
    Q: tuple[tuple[int, ...], ...]  # free row followed by torsion rows
    minus_K: tuple[int, ...]


def _mon(n, *spec):
    e = [0] * n
    for c in spec:
        e[c] += 1
    return tuple(e)


_QUAD_A = tuple(_mon(5, c, c) for c in range(4))
_QUAD_B = (_mon(5, 0, 1),) + tuple(_mon(5, c, c) for c in (2, 3, 4))
_NAMES_A = ("T1", "T2", "T3", "T4", "S1")
_NAMES_B = ("T1", "T2", "T3", "T4", "T5")

QUADRINOMIAL_TABLE = (
    QuadrinomialDatum("T1^2 + T2^2 + T3^2 + T4^2", _QUAD_A, _NAMES_A, (2, 2, 2),
                      ((1, 1, 1, 1, 2), (1, 1, 1, 0, 1), (0, 0, 1, 0, 1), (1, 0, 0, 0, 1)), (4, 0, 0, 0)),
    QuadrinomialDatum("T1T2 + T3^2 + T4^2 + T5^2", _QUAD_B, _NAMES_B, (2, 2),
                      ((1, 1, 1, 1, 1), (0, 0, 1, 1, 0), (1, 1, 0, 1, 0)), (3, 0, 1)),
    QuadrinomialDatum("T1T2 + T3^2 + T4^2 + T5^2", _QUAD_B, _NAMES_B, (2, 2),
                      ((1, 3, 2, 2, 2), (1, 1, 1, 1, 0), (0, 0, 1, 0, 1)), (6, 0, 0)),
    QuadrinomialDatum("T1T2 + T3^2 + T4^2 + T5^2", _QUAD_B, _NAMES_B, (2, 6),
                      ((1, 1, 1, 1, 1), (1, 1, 1, 0, 0), (2, 4, 3, 3, 0)), (3, 1, 0)),
)


def quadrinomial_ring(datum: QuadrinomialDatum) -> GradedRing:
    k = AbelianGroup(1, datum.torsion)
    cols = list(zip(*datum.Q))
    degs = tuple(k.element([c[0]], c[1:]) for c in cols)
    return GradedRing(k, degs, datum.q_monomials, datum.variable_names)


# --------------------------------------------------------------------------
# records


@dataclass
class ClassRecord:
    provenance: str  # setting name or "quadrinomial-fixed"
    relation: str
    variable_names: tuple[str, ...]
    ring: GradedRing
    invariants: InvariantSet
    p_matrix: PMatrix | None = None
    merged: list = field(default_factory=list)  # normal forms folded into this record
    oracle_degree: Fraction | None = None
    oracle_depth: int | None = None  # samples the Hilbert-function oracle needed

    @property
    def signature(self) -> tuple:
        return iso_signature(self.invariants)

    def sort_key(self) -> tuple:
        inv = self.invariants
        p_key = tuple(itertools.chain.from_iterable(self.p_matrix.D)) if self.p_matrix else ()
        return (
            inv.cl_group.torsion,
            inv.minusK_cubed,
            inv.fano_index,
            inv.picard_index,
            inv.sing_dim,
            inv.omega_dims,
            tuple((w.free, w.torsion) for w in inv.degree_matrix),
            self.provenance,
            p_key,
        )


def iso_signature(inv: InvariantSet) -> tuple:
    return (
        inv.cl_group.free_rank,
        inv.cl_group.torsion,
        inv.minusK_cubed,
        inv.fano_index,
        inv.picard_index,
        inv.sing_dim,
        inv.omega_dims,
        len(inv.omega),
    )


def quadrinomial_fixed() -> list[ClassRecord]:
    out = []
    for datum in QUADRINOMIAL_TABLE:
        ring = quadrinomial_ring(datum)
        inv = compute_invariants(ring, CANONICAL_IMPORTED)
        out.append(ClassRecord("quadrinomial-fixed", datum.relation, datum.variable_names, ring, inv))
    return out


# --------------------------------------------------------------------------
# admissible normal form


def _kernel_basis(fmt: Format) -> list[list[int]]:
    """Integral basis of the functionals vanishing on the rows of ``P_0`` (as columns)."""
    return transpose(right_kernel(build_p0(fmt)))


def _column_swaps(fmt: Format) -> list[tuple[int, ...]]:
    """Column permutations among the admissible operations: reordering the
    two variables of a size-two block and permuting the ``S`` columns.

    Whole-block permutations are left to the isomorphism test.
    """
    perms = set()
    inner = [itertools.permutations(block) for block in fmt.blocks]
    for chosen in itertools.product(*inner):
        head = tuple(c for block in chosen for c in block)
        for s_perm in itertools.permutations(fmt.s_columns):
            perms.add(head + s_perm)
    return sorted(perms)


def _reduce_mod_p0(fmt: Format, row: list[int]) -> list[int]:
    p0 = build_p0(fmt)
    row = list(row)
    for i, block in enumerate(fmt.blocks[1:], start=1):
        c = block[0]
        lead = p0[i - 1][c]
        k = row[c] // lead
        if k:
            row = [x - k * y for x, y in zip(row, p0[i - 1])]
    return row


def _canonical_d(fmt: Format, d: list[list[int]], kernel: list[list[int]]) -> tuple[tuple[int, ...], ...]:
    f = mat_mul(d, kernel)
    s = len(d)
    aug = [list(f[i]) + [int(i == j) for j in range(s)] for i in range(s)]
    h = hermite_normal_form(aug)
    if len(h) != s:
        raise ValueError("D block is degenerate modulo P_0")
    u = [row[len(f[0]):] for row in h]
    reduced = mat_mul(u, d)
    return tuple(tuple(_reduce_mod_p0(fmt, row)) for row in reduced)


def admissible_normal_form(p: PMatrix) -> PMatrix:
    """Canonical representative under the admissible row and column operations."""
    fmt = p.format
    kernel = _kernel_basis(fmt)
    best = None
    for perm in _column_swaps(fmt):
        d = [[row[perm[c]] for c in range(fmt.num_vars)] for row in p.D]
        cand = _canonical_d(fmt, d, kernel)
        if best is None or cand < best:
            best = cand
    return PMatrix(fmt, best)


# --------------------------------------------------------------------------
# graded isomorphism


@dataclass
class IsoResult:
    isomorphic: bool
    automorphism: object = None
    variable_map: tuple[int, ...] | None = None
    reason: str = ""
    automorphisms_checked: int = 0

    def __bool__(self) -> bool:
        return self.isomorphic


def _monomial_maps(a: GradedRing, b: GradedRing, target_degs) -> Iterator[tuple[int, ...]]:
    qa = set(a.q_monomials)
    qb = set(b.q_monomials)
    n = len(a.degrees)
    for perm in itertools.permutations(range(n)):
        if any(target_degs[i] != b.degrees[perm[i]] for i in range(n)):
            continue
        image = set()
        for mon in qa:
            e = [0] * n
            for i, x in enumerate(mon):
                e[perm[i]] += x
            image.add(tuple(e))
        if image == qb:
            yield perm


def graded_iso_test(a: ClassRecord, b: ClassRecord) -> IsoResult:
    """Search for a class group automorphism matching the graded data of two records.

    A witness ``phi`` sends ``-kappa`` to ``-kappa`` and the generator degrees
    onto the other generator degrees with multiplicity.  When additionally a
    variable permutation carries one relation onto the other it is reported
    as well.  A negative answer means every automorphism was ruled out.
    """
    if a.signature != b.signature:
        return IsoResult(False, reason="invariant signatures differ")
    ra, rb = a.ring, b.ring
    if ra.K != rb.K:
        return IsoResult(False, reason="class groups differ")
    mult_b = _multiset(rb.degrees)
    omega_b = set(rb.degrees)
    checked = 0
    witness = None
    for phi in group_automorphisms(ra.K):
        checked += 1
        if phi(ra.minus_kappa) != rb.minus_kappa:
            continue
        imgs = [phi(d) for d in ra.degrees]
        if not set(imgs) <= omega_b or _multiset(imgs) != mult_b:
            continue
        perm = next(_monomial_maps(ra, rb, imgs), None)
        if perm is not None:
            return IsoResult(True, phi, perm, "degree map with variable permutation", checked)
        witness = witness or phi
    if witness is not None:
        return IsoResult(True, witness, None, "degree map", checked)
    return IsoResult(False, reason=f"none of {checked} automorphisms maps the generator degrees",
                     automorphisms_checked=checked)


def _multiset(items) -> dict:
    out = defaultdict(int)
    for x in items:
        out[x] += 1
    return dict(out)


# --------------------------------------------------------------------------
# driver


@dataclass
class SettingStats:
    valid_candidates: int = 0
    canonical: int = 0
    terminal: int = 0
    normal_forms: int = 0
    classes: int = 0


@dataclass
class ClassificationResult:
    records: list[ClassRecord]
    stats: dict[str, SettingStats]
    non_iso_certificates: list[tuple[int, int, str]] = field(default_factory=list)


def _screen(setting: str, candidates: Sequence[PMatrix]) -> list[tuple[PMatrix, str]]:
    """Keep the canonical Fano candidates together with their singularity type."""
    kept = []
    for p in candidates:
        w = rational_weights(p)
        g = math.gcd(*w)
        weights = [x // g for x in w]
        mk = sum(weights) - sum(e * x for e, x in zip(p.format.q_monomials[0], weights))
        if mk <= 0:
            continue
        try:
            fan = relevant_cones(p, mk, weights=weights)
        except ValueError:  # -K outside the moving cone: not Fano
            continue
        sing = singularity_type_fast(p, fan)
        if sing in (TERMINAL, CANONICAL):
            kept.append((p, sing))
    return kept


def _screen_chunk(args):
    setting, chunk = args
    return _screen(setting, chunk)


def screen_setting(setting: str, jobs: int = 1) -> tuple[list[PMatrix], list[tuple[PMatrix, str]]]:
    candidates = ENUMERATORS[setting]()
    if jobs <= 1 or len(candidates) < 1000:
        return candidates, _screen(setting, candidates)
    size = math.ceil(len(candidates) / (4 * jobs))
    chunks = [(setting, candidates[i:i + size]) for i in range(0, len(candidates), size)]
    kept = []
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for part in pool.map(_screen_chunk, chunks):
            kept.extend(part)
    return candidates, kept


def _record_for(setting: str, p: PMatrix, sing: str) -> ClassRecord:
    ring = grading(p)
    if not is_fano(ring):
        raise AssertionError(f"candidate {p.D} passed the screen but is not Fano")
    fan = relevant_cones(p, ring.minus_kappa, ring)
    if not origin_interior(p, fan):
        raise AssertionError(f"candidate {p.D}: origin not interior to the anticanonical complex")
    inv = compute_invariants(ring, sing, fan.x_faces)
    return ClassRecord(setting, p.format.relation_string(), tuple(p.format.variable_names), ring, inv, p)


def _dedup(records: list[ClassRecord]) -> tuple[list[ClassRecord], list[tuple]]:
    buckets = defaultdict(list)
    for rec in records:
        buckets[rec.signature].append(rec)
    kept, certs = [], []
    for sig in sorted(buckets, key=repr):
        reps: list[ClassRecord] = []
        for rec in buckets[sig]:
            for rep in reps:
                res = graded_iso_test(rec, rep)
                if res:
                    rep.merged.append((rec.p_matrix, res.automorphism, res.variable_map))
                    break
            else:
                reps.append(rec)
        for i, j in itertools.combinations(range(len(reps)), 2):
            res = graded_iso_test(reps[i], reps[j])
            assert not res
            certs.append((reps[i], reps[j], res.reason))
        kept.extend(reps)
    return kept, certs


def classify_all(settings: Sequence[str] = ("trinom1", "trinom2", "trinom3", "quadrinomial"),
                 oracle_depth: int = 60, jobs: int = 1, check_oracle: bool = True) -> ClassificationResult:
    stats: dict[str, SettingStats] = {}
    records: list[ClassRecord] = []
    certs = []
    for setting in settings:
        st = SettingStats()
        stats[setting] = st
        if setting == "quadrinomial":
            recs = quadrinomial_fixed()
            st.valid_candidates = st.normal_forms = st.classes = len(recs)
            records.extend(recs)
            continue
        candidates, kept = screen_setting(setting, jobs)
        st.valid_candidates = len(candidates)
        st.canonical = len(kept)
        st.terminal = sum(1 for _, s in kept if s == TERMINAL)
        forms = {}
        for p, sing in kept:
            nf = admissible_normal_form(p)
            forms.setdefault(nf.D, (nf, sing))
        st.normal_forms = len(forms)
        recs = [_record_for(setting, nf, sing) for _, (nf, sing) in sorted(forms.items())]
        recs, c = _dedup(recs)
        certs.extend(c)
        st.classes = len(recs)
        records.extend(recs)
        log.info("%s: %d valid, %d canonical, %d normal forms, %d classes",
                 setting, st.valid_candidates, st.canonical, st.normal_forms, st.classes)
    records.sort(key=ClassRecord.sort_key)
    if check_oracle:
        for rec in records:
            verify_degree(rec, oracle_depth)
    index = {id(r): i + 1 for i, r in enumerate(records)}
    cert_idx = [(index[id(a)], index[id(b)], why) for a, b, why in certs]
    return ClassificationResult(records, stats, cert_idx)


def verify_degree(rec: ClassRecord, depth: int) -> Fraction:
    formula = anticanonical_degree(rec.ring)
    try:
        reading = hilbert_reading(rec.ring, depth)
    except OracleError as exc:
        raise OracleError(f"{rec.provenance} {rec.p_matrix and rec.p_matrix.D}: {exc}") from exc
    oracle = reading.value
    if oracle != formula:
        raise OracleError(
            f"anticanonical degree mismatch for {rec.provenance} {rec.p_matrix and rec.p_matrix.D}: "
            f"formula {formula}, Hilbert function {oracle}"
        )
    rec.oracle_degree = oracle
    rec.oracle_depth = reading.depth_needed
    return oracle
