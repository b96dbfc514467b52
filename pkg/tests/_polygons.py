"""Exhaustive search for lattice polygons in a box whose only interior
lattice point is the origin.  Integer arithmetic only; the recognizer under
test is applied afterwards."""
from __future__ import annotations

import itertools


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _hull(pts):
    pts = sorted(set(pts))
    if len(pts) < 3:
        return pts
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _side(h, p):
    """1 strictly inside, 0 on the boundary, -1 outside a ccw polygon."""
    s = 1
    for a, b in zip(h, h[1:] + h[:1]):
        c = _cross(a, b, p)
        if c < 0:
            return -1
        if c == 0:
            s = 0
    return s


def _interior(h):
    xs = [p[0] for p in h]
    ys = [p[1] for p in h]
    box = itertools.product(range(min(xs), max(xs) + 1), range(min(ys), max(ys) + 1))
    return [p for p in box if _side(h, p) == 1]


def polygons_with_unique_interior_origin(bound: int = 4) -> list[tuple[tuple[int, int], ...]]:
    pts = [(x, y) for x in range(-bound, bound + 1) for y in range(-bound, bound + 1)]
    origin = (0, 0)
    seen, stack, found = set(), [], set()
    for tri in itertools.combinations(pts, 3):
        if _cross(*tri) == 0:
            continue
        h = _hull(tri)
        if _side(h, origin) < 0 or origin in h or any(q != origin for q in _interior(h)):
            continue
        key = tuple(h)
        if key not in seen:
            seen.add(key)
            stack.append(h)
    while stack:
        h = stack.pop()
        if _side(h, origin) == 1:
            found.add(tuple(h))
        for p in pts:
            if _side(h, p) >= 0:
                continue
            h2 = _hull(h + [p])
            key = tuple(h2)
            if key in seen:
                continue
            seen.add(key)
            if all(q == origin for q in _interior(h2)):
                stack.append(h2)
    return sorted(found)
