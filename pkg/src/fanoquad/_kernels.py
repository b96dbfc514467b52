"""Hot integer loops: anticanonical lattice-point scans and monomial counting.

Each kernel exists twice, as a numba ``@njit`` function and as a plain numpy
version with identical semantics.  ``FANOQUAD_BACKEND=numpy`` forces the
numpy path; otherwise numba is used whenever it imports.

All arithmetic is int64.  Inputs here are tiny (coordinates below a few
hundred after scaling) so the products stay far below 2**62; the monomial
counter switches to Python integers when its bound says otherwise.
"""
from __future__ import annotations

import itertools
import math
import os

import numpy as np

try:
    import numba as nb

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

BACKEND = os.environ.get("FANOQUAD_BACKEND", "numba" if HAVE_NUMBA else "numpy").lower()
if BACKEND not in ("numba", "numpy"):
    raise ValueError(f"FANOQUAD_BACKEND must be 'numba' or 'numpy', got {BACKEND!r}")
if BACKEND == "numba" and not HAVE_NUMBA:
    BACKEND = "numpy"


def njit(*args, **kwargs):
    if HAVE_NUMBA:
        return nb.njit(*args, **kwargs)
    return lambda func: func


# --------------------------------------------------------------------------
# facets of a full-dimensional point configuration in Z^4


def _facets_numpy(points: np.ndarray) -> np.ndarray:
    """Facet inequalities ``a . x <= b`` as rows ``(a0, a1, a2, a3, b)``."""
    k = points.shape[0]
    combos = np.array(list(itertools.combinations(range(k), 4)), dtype=np.int64)
    base = points[combos[:, 0]]
    d = np.stack([points[combos[:, j]] - base for j in (1, 2, 3)], axis=1)  # (C, 3, 4)
    normals = np.empty((len(combos), 4), dtype=np.int64)
    for c in range(4):
        cols = [j for j in range(4) if j != c]
        m = d[:, :, cols]
        det = (
            m[:, 0, 0] * (m[:, 1, 1] * m[:, 2, 2] - m[:, 1, 2] * m[:, 2, 1])
            - m[:, 0, 1] * (m[:, 1, 0] * m[:, 2, 2] - m[:, 1, 2] * m[:, 2, 0])
            + m[:, 0, 2] * (m[:, 1, 0] * m[:, 2, 1] - m[:, 1, 1] * m[:, 2, 0])
        )
        normals[:, c] = det if c % 2 == 0 else -det
    keep = np.any(normals != 0, axis=1)
    normals, base = normals[keep], base[keep]
    b = np.einsum("ij,ij->i", normals, base)
    vals = normals @ points.T  # (C, k)
    upper = np.all(vals <= b[:, None], axis=1)
    lower = np.all(vals >= b[:, None], axis=1)
    normals = np.where(lower[:, None] & ~upper[:, None], -normals, normals)
    b = np.where(lower & ~upper, -b, b)
    sel = upper | lower
    rows = np.concatenate([normals[sel], b[sel, None]], axis=1)
    if len(rows) == 0:
        return rows
    g = np.gcd.reduce(np.abs(rows[:, :4]), axis=1)
    rows = rows // g[:, None]
    return np.unique(rows, axis=0)


@njit(cache=True)
def _facets_numba(points):
    k = points.shape[0]
    maxf = k * (k - 1) * (k - 2) * (k - 3) // 24
    out = np.empty((maxf, 5), dtype=np.int64)
    nf = 0
    d = np.empty((3, 4), dtype=np.int64)
    nrm = np.empty(4, dtype=np.int64)
    minor_cols = np.array([[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]], dtype=np.int64)
    for i0 in range(k):
        for i1 in range(i0 + 1, k):
            for i2 in range(i1 + 1, k):
                for i3 in range(i2 + 1, k):
                    for c in range(4):
                        d[0, c] = points[i1, c] - points[i0, c]
                        d[1, c] = points[i2, c] - points[i0, c]
                        d[2, c] = points[i3, c] - points[i0, c]
                    nonzero = False
                    for c in range(4):
                        a0 = minor_cols[c, 0]
                        a1 = minor_cols[c, 1]
                        a2 = minor_cols[c, 2]
                        det = (
                            d[0, a0] * (d[1, a1] * d[2, a2] - d[1, a2] * d[2, a1])
                            - d[0, a1] * (d[1, a0] * d[2, a2] - d[1, a2] * d[2, a0])
                            + d[0, a2] * (d[1, a0] * d[2, a1] - d[1, a1] * d[2, a0])
                        )
                        nrm[c] = det if c % 2 == 0 else -det
                        if det != 0:
                            nonzero = True
                    if not nonzero:
                        continue
                    b = 0
                    for c in range(4):
                        b += nrm[c] * points[i0, c]
                    up = True
                    lo = True
                    for j in range(k):
                        v = 0
                        for c in range(4):
                            v += nrm[c] * points[j, c]
                        if v > b:
                            up = False
                        if v < b:
                            lo = False
                    if not (up or lo):
                        continue
                    sgn = 1 if up else -1
                    g = 0
                    for c in range(4):
                        g = math.gcd(g, abs(nrm[c]))
                    row = np.empty(5, dtype=np.int64)
                    for c in range(4):
                        row[c] = sgn * nrm[c] // g
                    row[4] = sgn * b // g
                    dup = False
                    for f in range(nf):
                        same = True
                        for c in range(5):
                            if out[f, c] != row[c]:
                                same = False
                                break
                        if same:
                            dup = True
                            break
                    if not dup:
                        out[nf] = row
                        nf += 1
    return out[:nf]


# --------------------------------------------------------------------------
# lattice points of conv(points) on the tropical variety


def _scan_numpy(points, scale, leaf_dirs, columns):
    """Return ``(interior, extra)``: counts of nonzero lattice points of the
    complex that are interior, resp. that are not among ``columns``."""
    facets = _facets_numpy(points)
    a, b = facets[:, :4], facets[:, 4]
    lo = np.floor_divide(points.min(axis=0), scale)
    hi = -np.floor_divide(-points.max(axis=0), scale)
    tmax = int(np.abs(np.concatenate([lo[:2], hi[:2]])).max())
    ys = np.array(list(itertools.product(range(lo[2], hi[2] + 1), range(lo[3], hi[3] + 1))), dtype=np.int64)
    cand = [np.concatenate([np.zeros((len(ys), 2), dtype=np.int64), ys], axis=1)]
    for e in leaf_dirs:
        for t in range(1, tmax + 1):
            pts = np.empty((len(ys), 4), dtype=np.int64)
            pts[:, :2] = t * e[:2]
            pts[:, 2:] = ys
            cand.append(pts)
    cand = np.concatenate(cand)
    cand = cand[np.any(cand != 0, axis=1)]
    vals = (cand @ a.T) * scale
    inside = np.all(vals <= b, axis=1)
    strict = np.all(vals < b, axis=1)
    cand, strict = cand[inside], strict[inside]
    interior = int(strict.sum())
    if len(cand) and len(columns):
        is_col = np.any(np.all(cand[:, None, :] == columns[None, :, :], axis=2), axis=1)
    else:
        is_col = np.zeros(len(cand), dtype=bool)
    extra = int((~is_col).sum())
    return interior, extra


@njit(cache=True)
def _scan_numba(points, scale, leaf_dirs, columns):
    facets = _facets_numba(points)
    nf = facets.shape[0]
    lo = np.empty(4, dtype=np.int64)
    hi = np.empty(4, dtype=np.int64)
    for c in range(4):
        mn = points[0, c]
        mx = points[0, c]
        for j in range(points.shape[0]):
            mn = min(mn, points[j, c])
            mx = max(mx, points[j, c])
        lo[c] = mn // scale
        hi[c] = -((-mx) // scale)
    tmax = 0
    for c in range(2):
        tmax = max(tmax, abs(lo[c]), abs(hi[c]))
    interior = 0
    extra = 0
    p = np.empty(4, dtype=np.int64)
    nleaf = leaf_dirs.shape[0]
    for li in range(-1, nleaf):
        t_lo = 0 if li < 0 else 1
        t_hi = 0 if li < 0 else tmax
        for t in range(t_lo, t_hi + 1):
            for y0 in range(lo[2], hi[2] + 1):
                for y1 in range(lo[3], hi[3] + 1):
                    if li < 0:
                        p[0] = 0
                        p[1] = 0
                    else:
                        p[0] = t * leaf_dirs[li, 0]
                        p[1] = t * leaf_dirs[li, 1]
                    p[2] = y0
                    p[3] = y1
                    if p[0] == 0 and p[1] == 0 and y0 == 0 and y1 == 0:
                        continue
                    inside = True
                    strict = True
                    for f in range(nf):
                        v = 0
                        for c in range(4):
                            v += facets[f, c] * p[c]
                        v *= scale
                        if v > facets[f, 4]:
                            inside = False
                            break
                        if v == facets[f, 4]:
                            strict = False
                    if not inside:
                        continue
                    if strict:
                        interior += 1
                    is_col = False
                    for j in range(columns.shape[0]):
                        if (
                            columns[j, 0] == p[0]
                            and columns[j, 1] == p[1]
                            and columns[j, 2] == p[2]
                            and columns[j, 3] == p[3]
                        ):
                            is_col = True
                            break
                    if not is_col:
                        extra += 1
    return interior, extra


def facets(points: np.ndarray, backend: str | None = None) -> np.ndarray:
    points = np.ascontiguousarray(points, dtype=np.int64)
    if (backend or BACKEND) == "numba":
        rows = _facets_numba(points)
        return rows[np.lexsort(rows.T[::-1])] if len(rows) else rows
    return _facets_numpy(points)


def lattice_scan(points, scale, leaf_dirs, columns, backend: str | None = None) -> tuple[int, int]:
    """Count nonzero lattice points of ``conv(points / scale)`` lying on the
    union of the rays ``leaf_dirs`` times the last two coordinates.

    Returns ``(interior, extra)`` where ``interior`` counts points in the
    interior of the hull and ``extra`` counts points that are not ``columns``.
    """
    points = np.ascontiguousarray(points, dtype=np.int64)
    leaf_dirs = np.ascontiguousarray(leaf_dirs, dtype=np.int64)
    columns = np.ascontiguousarray(columns, dtype=np.int64)
    if (backend or BACKEND) == "numba":
        i, e = _scan_numba(points, np.int64(scale), leaf_dirs, columns)
        return int(i), int(e)
    return _scan_numpy(points, int(scale), leaf_dirs, columns)


# --------------------------------------------------------------------------
# monomial counts in Z x T


def _count_numpy(weights, perms, max_degree, dtype):
    t = perms.shape[1]
    f = np.zeros((max_degree + 1, t), dtype=dtype)
    f[0, 0] = 1
    for w, perm in zip(weights, perms):
        for d in range(w, max_degree + 1):
            f[d, perm] += f[d - w]
    return f


@njit(cache=True)
def _count_numba(weights, perms, max_degree):
    t = perms.shape[1]
    f = np.zeros((max_degree + 1, t), dtype=np.int64)
    f[0, 0] = 1
    for i in range(weights.shape[0]):
        w = weights[i]
        for d in range(w, max_degree + 1):
            for j in range(t):
                f[d, perms[i, j]] += f[d - w, j]
    return f


def monomial_counts(weights, perms, max_degree: int, backend: str | None = None) -> np.ndarray:
    """``f[d, k]`` = number of monomials of free degree ``d`` and torsion class ``k``.

    ``weights`` are the positive free degrees of the variables; ``perms[i]`` is
    the permutation of torsion-class indices given by adding the torsion part
    of variable ``i``.
    """
    weights = np.ascontiguousarray(weights, dtype=np.int64)
    perms = np.ascontiguousarray(perms, dtype=np.int64)
    n = len(weights)
    # crude bound on the total number of monomials of degree <= max_degree
    bound = math.comb(max_degree + n, n) if n else 1
    if bound >= 2**62:
        return _count_numpy(weights, perms, max_degree, object)
    if (backend or BACKEND) == "numba":
        return _count_numba(weights, perms, max_degree)
    return _count_numpy(weights, perms, max_degree, np.int64)
