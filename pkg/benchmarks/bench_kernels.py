"""Compare the numba and numpy backends of the hot kernels.

Run with ``python benchmarks/bench_kernels.py [--repeat N]``.  Both backends
are timed on the same inputs and their outputs are checked for equality.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from fanoquad import _kernels
from fanoquad.classification import enumerate_trinom3
from fanoquad.quadric_rings import grading, monomial_count_table
from fanoquad.variety_model import relevant_cones, singularity_type_fast


def _screen_inputs(limit: int):
    out = []
    for p in enumerate_trinom3()[:limit]:
        ring = grading(p)
        try:
            fan = relevant_cones(p, ring.minus_kappa, ring)
        except ValueError:
            continue
        out.append((p, fan))
    return out


def _time(fn, repeat: int) -> tuple[float, object]:
    best, result = float("inf"), None
    for _ in range(repeat):
        t = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t)
    return best, result


def bench_scan(inputs, repeat: int) -> None:
    def run(backend):
        return [singularity_type_fast(p, fan, backend=backend) for p, fan in inputs]

    run("numba")  # compile outside the timing loop
    t_nb, r_nb = _time(lambda: run("numba"), repeat)
    t_np, r_np = _time(lambda: run("numpy"), repeat)
    assert r_nb == r_np, "backends disagree on singularity types"
    print(f"lattice scan   {len(inputs):5d} complexes  numba {t_nb:8.4f}s  numpy {t_np:8.4f}s  "
          f"speedup {t_np / t_nb:6.2f}x")


def bench_counts(inputs, depth: int, repeat: int) -> None:
    rings = [grading(p) for p, _ in inputs]

    def run(backend):
        return [monomial_count_table(r, depth * r.minus_kappa.free[0], backend=backend) for r in rings]

    run("numba")
    t_nb, r_nb = _time(lambda: run("numba"), repeat)
    t_np, r_np = _time(lambda: run("numpy"), repeat)
    assert all(np.array_equal(a, b) for a, b in zip(r_nb, r_np)), "backends disagree on counts"
    print(f"monomial count {len(rings):5d} rings      numba {t_nb:8.4f}s  numpy {t_np:8.4f}s  "
          f"speedup {t_np / t_nb:6.2f}x")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--limit", type=int, default=400, help="number of trinom3 candidates")
    ap.add_argument("--depth", type=int, default=60, help="anticanonical multiples counted")
    args = ap.parse_args()
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")
    inputs = _screen_inputs(args.limit)
    bench_scan(inputs, args.repeat)
    bench_counts(inputs[:50], args.depth, args.repeat)


if __name__ == "__main__":
    main()
