"""Command line front end: ``classify``, ``inspect`` and ``verify``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from collections import Counter, defaultdict
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .classification import (
    QUADRINOMIAL_TABLE,
    ClassificationResult,
    ClassRecord,
    classify_all,
    quadrinomial_ring,
)
from .quadric_rings import PMatrix, SchemaError, grading, parse_pmatrix, rational_weights, validate_p
from .variety_model import (
    build_ac_complex,
    compute_invariants,
    complex_lattice_points,
    is_fano,
    relevant_cones,
    singularity_type,
    v_sigma_prime,
)

SCHEMA = "fanoquad.classification/1"
ALL_SETTINGS = ("trinom1", "trinom2", "trinom3", "quadrinomial")
MIN_ORACLE_DEPTH = 12
OUTPUT_DIR_ENV = "FANOQUAD_OUTPUT_DIR"

EXPECTED_TOTAL = 79
EXPECTED_TRINOMIAL = 75
EXPECTED_QUADRINOMIAL = 4
ORACLE_DEPTH_BOUND = 60

# (p(X), dim of the singular locus of the total coordinate space) per record,
# for every group of records sharing class group, Fano index and -K^3 that
# the invariants alone do not separate
PROOF_TABLE_BLOCKS = (
    ((24, 1), (24, 0)),
    ((48, 1), (24, 1)),
    ((240, 1), (120, 1)),
    ((24, 1), (48, 1)),
    ((9, 0), (9, 0)),
    ((54, 0), (18, 0)),
    ((16, 0), (16, 1), (8, 1)),
    ((48, 1), (48, 1)),
    ((36, 0), (36, 0), (36, 1)),
    ((64, 1), (64, 1)),
    ((8, 2), (8, 1), (8, 0)),
    ((48, 2), (48, 1), (48, 0)),
    ((72, 2), (72, 1), (72, 0)),
)


# --------------------------------------------------------------------------
# serialization


def _fraction_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def q_matrix_rows(rec: ClassRecord) -> list[list[int]]:
    """Generator degrees as a matrix: free row(s) first, then torsion rows."""
    cols = [d.as_list() for d in rec.invariants.degree_matrix]
    return [list(row) for row in zip(*cols)]


def record_to_dict(no: int, rec: ClassRecord) -> dict:
    inv = rec.invariants
    return {
        "no": no,
        "provenance": rec.provenance,
        "relation": rec.relation,
        "variables": list(rec.variable_names),
        "cl": {"free_rank": inv.cl_group.free_rank, "torsion": list(inv.cl_group.torsion)},
        "Q": q_matrix_rows(rec),
        "minus_K": inv.minus_K.as_list(),
        "minus_K_cubed": _fraction_str(inv.minusK_cubed),
        "fano_index": inv.fano_index,
        "picard_index": inv.picard_index,
        "sing_dim": inv.sing_dim,
        "sing_type": inv.sing_type,
        "omega_dims": list(inv.omega_dims),
        "p_matrix": rec.p_matrix.to_json() if rec.p_matrix else None,
        "merged_normal_forms": [[list(row) for row in m[0].D] for m in rec.merged],
        "oracle": {
            "minus_K_cubed": _fraction_str(rec.oracle_degree) if rec.oracle_degree is not None else None,
            "depth": rec.oracle_depth,
        },
    }


def result_to_dict(result: ClassificationResult) -> dict:
    return {
        "schema": SCHEMA,
        "settings": list(result.stats),
        "stats": {k: asdict(v) for k, v in result.stats.items()},
        "records": [record_to_dict(i, r) for i, r in enumerate(result.records, 1)],
        "non_isomorphism_certificates": [list(c) for c in result.non_iso_certificates],
    }


def dumps_json(doc: dict) -> str:
    """Canonical JSON text; ``dumps_json(json.loads(s)) == s`` for emitted ``s``."""
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


CSV_HEADER = (
    "no", "provenance", "relation", "cl", "q_rows", "q_colmajor", "minus_K",
    "minus_K_cubed", "fano_index", "picard_index", "sing_dim", "sing_type", "p_matrix_D",
)


def _cl_string(cl: dict) -> str:
    parts = ["Z"] * cl["free_rank"] + [f"Z{d}" for d in cl["torsion"]]
    return " x ".join(parts)


def dumps_csv(doc: dict) -> str:
    """One row per record.  ``q_colmajor`` lists the Q-matrix column by column,
    each column being ``q_rows`` entries (free part, then torsion parts)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in doc["records"]:
        cols = list(zip(*r["Q"]))
        w.writerow([
            r["no"], r["provenance"], r["relation"], _cl_string(r["cl"]), len(r["Q"]),
            " ".join(str(x) for col in cols for x in col),
            " ".join(map(str, r["minus_K"])), r["minus_K_cubed"], r["fano_index"],
            r["picard_index"], r["sing_dim"], r["sing_type"],
            json.dumps(r["p_matrix"]["D"]) if r["p_matrix"] else "",
        ])
    return buf.getvalue()


def _element_str(v: Sequence[int], free_rank: int) -> str:
    return "(" + ", ".join([str(x) for x in v[:free_rank]] + [f"{x}~" for x in v[free_rank:]]) + ")"


def dumps_table(doc: dict) -> str:
    head = ("No", "Cox ring relation", "Cl(X)", "Q", "-K", "-K^3", "q", "p", "singularities")
    rows = []
    for r in doc["records"]:
        f = r["cl"]["free_rank"]
        q = " ".join(_element_str(col, f) for col in zip(*r["Q"]))
        rows.append((
            str(r["no"]), r["relation"], _cl_string(r["cl"]), q, _element_str(r["minus_K"], f),
            r["minus_K_cubed"], str(r["fano_index"]), str(r["picard_index"]), r["sing_type"],
        ))
    widths = [max(len(x) for x in col) for col in zip(head, *rows)]

    def line(cells):
        return " | ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()

    out = [line(head), "-+-".join("-" * w for w in widths)]
    out.extend(line(r) for r in rows)
    return "\n".join(out) + "\n"


FORMATTERS = {"json": dumps_json, "csv": dumps_csv, "table": dumps_table}


# --------------------------------------------------------------------------
# verification against embedded reference data


@dataclass
class Check:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def check_count(result: ClassificationResult) -> Check:
    quad = sum(1 for r in result.records if r.provenance == "quadrinomial-fixed")
    tri = len(result.records) - quad
    ok = (len(result.records), tri, quad) == (EXPECTED_TOTAL, EXPECTED_TRINOMIAL, EXPECTED_QUADRINOMIAL)
    return Check(
        "classification count", ok,
        f"{len(result.records)} classes ({tri} trinomial + {quad} quadrinomial), "
        f"expected {EXPECTED_TOTAL} ({EXPECTED_TRINOMIAL} + {EXPECTED_QUADRINOMIAL})",
    )


def check_quadrinomial_table(result: ClassificationResult) -> Check:
    recs = [r for r in result.records if r.provenance == "quadrinomial-fixed"]
    problems = []
    remaining = list(recs)
    for k, datum in enumerate(QUADRINOMIAL_TABLE, 1):
        ring = quadrinomial_ring(datum)
        expected_q = [list(row) for row in datum.Q]
        match = next(
            (r for r in remaining
             if r.relation == datum.relation
             and r.invariants.cl_group.torsion == datum.torsion
             and q_matrix_rows(r) == expected_q
             and r.invariants.minus_K.as_list() == list(datum.minus_K)),
            None,
        )
        if ring.minus_kappa.as_list() != list(datum.minus_K):
            problems.append(f"row {k}: computed -K {ring.minus_kappa} differs from the table")
        if match is None:
            problems.append(f"row {k}: no matching record")
        else:
            remaining.remove(match)
    ok = not problems and not remaining and len(recs) == len(QUADRINOMIAL_TABLE)
    return Check("quadrinomial table", ok, "; ".join(problems) or f"{len(recs)} records match exactly")


def block_groups(records: Sequence[ClassRecord]) -> dict[tuple, Counter]:
    groups: dict[tuple, Counter] = defaultdict(Counter)
    for r in records:
        inv = r.invariants
        key = (inv.cl_group, inv.fano_index, inv.minusK_cubed)
        groups[key][(inv.picard_index, inv.sing_dim)] += 1
    return groups


def match_blocks(records: Sequence[ClassRecord], blocks=PROOF_TABLE_BLOCKS) -> dict[int, tuple] | None:
    """Assign each block to its own record group containing it as a sub-multiset."""
    groups = block_groups(records)
    keys = sorted(groups, key=repr)
    need = [Counter(b) for b in blocks]
    candidates = [[k for k in keys if not (n - groups[k])] for n in need]
    order = sorted(range(len(blocks)), key=lambda i: len(candidates[i]))
    assignment: dict[int, tuple] = {}

    def search(pos: int) -> bool:
        if pos == len(order):
            return True
        i = order[pos]
        used = set(assignment.values())
        for k in candidates[i]:
            if k in used:
                continue
            assignment[i] = k
            if search(pos + 1):
                return True
            del assignment[i]
        return False

    return dict(assignment) if search(0) else None


def check_blocks(result: ClassificationResult) -> Check:
    assignment = match_blocks(result.records)
    if assignment is None:
        groups = block_groups(result.records)
        missing = [b for b in PROOF_TABLE_BLOCKS if not any(not (Counter(b) - g) for g in groups.values())]
        return Check("invariant blocks", False, f"no disjoint assignment; unmatched blocks {missing}")
    return Check("invariant blocks", True, f"all {len(PROOF_TABLE_BLOCKS)} blocks found in distinct groups")


def check_oracle(result: ClassificationResult, bound: int = ORACLE_DEPTH_BOUND) -> tuple[Check, Check]:
    wrong = [i for i, r in enumerate(result.records, 1)
             if r.oracle_degree is None or r.oracle_degree != r.invariants.minusK_cubed]
    deep = [(i, r.oracle_depth) for i, r in enumerate(result.records, 1)
            if r.oracle_depth is not None and r.oracle_depth > bound]
    eq = Check("oracle degree equality", not wrong,
               f"{len(result.records) - len(wrong)}/{len(result.records)} records agree exactly")
    depth = Check(f"oracle stabilization within depth {bound}", not deep,
                  "all records" if not deep else
                  f"{len(deep)} records need more (record, depth): {deep}")
    return eq, depth


def run_checks(result: ClassificationResult) -> list[Check]:
    return [check_count(result), check_quadrinomial_table(result), check_blocks(result), *check_oracle(result)]


# --------------------------------------------------------------------------
# commands


def _resolve_out(path: str) -> Path:
    p = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


def cmd_classify(args) -> int:
    settings = ALL_SETTINGS if args.setting == "all" else (args.setting,)
    result = classify_all(settings, oracle_depth=args.oracle_depth, jobs=args.jobs)
    text = FORMATTERS[args.format](result_to_dict(result))
    if args.out:
        out = _resolve_out(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
        print(f"wrote {len(result.records)} records to {out}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    return 0


def inspect_report(p: PMatrix) -> tuple[list[str], int]:
    lines = [f"format n={list(p.format.n)} m={p.format.m}", f"relation {p.format.relation_string()}"]
    lines += ["P ="] + ["  " + " ".join(f"{x:3d}" for x in row) for row in p.P]
    report = validate_p(p)
    if not report.ok:
        lines.append("invalid P-matrix:")
        lines += ["  " + m for m in report.messages]
        return lines, 1
    ring = grading(p)
    lines.append(f"rational weights {rational_weights(p)}")
    lines.append(f"Cl(X) = {ring.K}")
    lines.append("generator degrees " + " ".join(f"{n}:{d}" for n, d in zip(p.format.variable_names, ring.degrees)))
    lines.append(f"-K = {ring.minus_kappa}")
    if not is_fano(ring):
        lines.append("not Fano: -K is not in the interior of the moving cone")
        return lines, 1
    fan = relevant_cones(p, ring.minus_kappa, ring)
    lines.append("relevant cones " + " ".join(
        f"{c.kind}{'*' if c.elementary else ''}{list(c.rays)}" for c in fan.cones))
    for sigma in fan.elementary_big:
        v = v_sigma_prime(p, sigma)
        lines.append(f"v'_sigma{list(sigma)} = ({', '.join(_fraction_str(x) for x in v)})")
    ac = build_ac_complex(p, fan)
    if ac.delta is not None:
        lines.append("lineality slice vertices " + " ".join(
            "(" + ", ".join(_fraction_str(x) for x in v) + ")" for v in ac.delta.vertices))
    points = complex_lattice_points(ac)
    cols = set(p.columns)
    for x, interior in points:
        tag = "interior" if interior else ("column" if x in cols else "boundary")
        lines.append(f"  lattice point {x} {tag}")
    sing = singularity_type(ac, p)
    lines.append(f"singularities {sing}")
    inv = compute_invariants(ring, sing, fan.x_faces)
    lines.append(f"-K^3 = {_fraction_str(inv.minusK_cubed)}")
    lines.append(f"Fano index {inv.fano_index}, Picard index {inv.picard_index}, "
                 f"dim Sing of total coordinate space {inv.sing_dim}")
    return lines, 0


def cmd_inspect(args) -> int:
    try:
        text = Path(args.path).read_text()
        p = parse_pmatrix(text)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    lines, status = inspect_report(p)
    print("\n".join(lines))
    return status


def cmd_verify(args) -> int:
    result = classify_all(ALL_SETTINGS, oracle_depth=args.oracle_depth, jobs=args.jobs)
    checks = run_checks(result)
    for c in checks:
        print(c.line())
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return 0 if failed == 0 else 1


def _depth(value: str) -> int:
    m = int(value)
    if m < MIN_ORACLE_DEPTH:
        raise argparse.ArgumentTypeError(f"oracle depth must be at least {MIN_ORACLE_DEPTH}")
    return m


def _jobs(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError("need at least one worker")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fanoquad",
        description="Canonical Fano intrinsic quadrics of dimension three and Picard number one.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="run the classification and write the record list")
    c.add_argument("--setting", choices=("all",) + ALL_SETTINGS, default="all")
    c.add_argument("--format", choices=tuple(FORMATTERS), default="table")
    c.add_argument("--out", help=f"output file (relative paths honour ${OUTPUT_DIR_ENV})")
    c.add_argument("--oracle-depth", type=_depth, default=ORACLE_DEPTH_BOUND)
    c.add_argument("--jobs", type=_jobs, default=1)
    c.set_defaults(func=cmd_classify)

    i = sub.add_parser("inspect", help="analyse a single P-matrix given as JSON")
    i.add_argument("path")
    i.set_defaults(func=cmd_inspect)

    v = sub.add_parser("verify", help="check the classification against embedded reference data")
    v.add_argument("--oracle-depth", type=_depth, default=ORACLE_DEPTH_BOUND)
    v.add_argument("--jobs", type=_jobs, default=1)
    v.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
