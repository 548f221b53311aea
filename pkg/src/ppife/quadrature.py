"""Quadrature on triangles, cut sub-polygons, edges and two-cut partitions."""

from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import dataclass

import numpy as np

# Symmetric rules on the reference triangle: barycentric points, weights summing to 1.
_S15 = math.sqrt(15.0)
_a5, _b5 = (6.0 - _S15) / 21.0, (6.0 + _S15) / 21.0
_TRI_RULES = {
    1: (np.array([[1 / 3, 1 / 3, 1 / 3]]), np.array([1.0])),
    2: (
        np.array([[2 / 3, 1 / 6, 1 / 6], [1 / 6, 2 / 3, 1 / 6], [1 / 6, 1 / 6, 2 / 3]]),
        np.full(3, 1 / 3),
    ),
    5: (
        np.array(
            [
                [1 / 3, 1 / 3, 1 / 3],
                [1 - 2 * _a5, _a5, _a5],
                [_a5, 1 - 2 * _a5, _a5],
                [_a5, _a5, 1 - 2 * _a5],
                [1 - 2 * _b5, _b5, _b5],
                [_b5, 1 - 2 * _b5, _b5],
                [_b5, _b5, 1 - 2 * _b5],
            ]
        ),
        np.array([9 / 40] + [(155 - _S15) / 1200] * 3 + [(155 + _S15) / 1200] * 3),
    ),
}
_TRI_RULES[3] = _TRI_RULES[4] = _TRI_RULES[5]

VOLUME_DEGREE = 2
EDGE_DEGREE = 2
ERROR_DEGREE = 5


@dataclass
class QuadRule:
    points: np.ndarray  # (n, 2)
    weights: np.ndarray  # (n,)

    @property
    def area(self) -> float:
        return float(self.weights.sum())

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


def reference_rule(degree: int):
    """Barycentric points and unit-sum weights of the triangle rule for ``degree``."""
    if degree not in _TRI_RULES:
        raise ValueError(f"triangle quadrature degree must be in 1..5, got {degree}")
    return _TRI_RULES[degree]


def signed_area(poly) -> float:
    p = np.asarray(poly, dtype=float)
    x, y = p[:, 0], p[:, 1]
    return 0.5 * float(x[:-1] @ y[1:] - x[1:] @ y[:-1] + x[-1] * y[0] - x[0] * y[-1])


def _tri_area(a, b, c) -> float:
    return 0.5 * abs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))


@lru_cache(maxsize=None)
def _gauss(n):
    s, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (s + 1.0), 0.5 * w


def triangle_rule(vertices, degree: int = VOLUME_DEGREE) -> QuadRule:
    v = np.asarray(vertices, dtype=float)
    area = abs(signed_area(v))
    scale = max(np.ptp(v[:, 0]), np.ptp(v[:, 1]), 1e-300)
    if area <= 1e-14 * scale * scale:
        raise ValueError("degenerate triangle")
    bary, w = reference_rule(degree)
    return QuadRule(bary @ v, w * area)


def polygon_rule(poly, degree: int = VOLUME_DEGREE, refine: int = 0) -> QuadRule:
    """Fan-triangulate a convex polygon from its first vertex.

    Sliver triangles with zero area are dropped.  ``refine`` splits each fan
    triangle uniformly into ``4**refine`` pieces.
    """
    p = np.asarray(poly, dtype=float)
    bary, w = reference_rule(degree)
    pts, wts = [], []
    for k in range(1, len(p) - 1):
        tri = np.array([p[0], p[k], p[k + 1]])
        for sub in _subdivide(tri, refine):
            area = _tri_area(*sub)
            if area == 0.0:
                continue
            pts.append(bary @ sub)
            wts.append(w * area)
    if not pts:
        return QuadRule(np.zeros((0, 2)), np.zeros(0))
    return QuadRule(np.vstack(pts), np.concatenate(wts))


def _subdivide(tri, levels):
    tris = [tri]
    for _ in range(levels):
        nxt = []
        for a, b, c in tris:
            ab, bc, ca = (a + b) / 2, (b + c) / 2, (c + a) / 2
            nxt += [np.array(t) for t in ((a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca))]
        tris = nxt
    return tris


def cut_rule(cut, side: int, degree: int = VOLUME_DEGREE, refine: int = 0) -> QuadRule:
    """Rule on the minus (``side=-1``) or plus (``side=+1``) part of a cut element."""
    poly = cut.minus_polygon if side < 0 else cut.plus_polygon
    return polygon_rule(poly, degree, refine)


def edge_rule(a, b, degree: int = EDGE_DEGREE) -> QuadRule:
    """Gauss-Legendre rule on the segment ab with arc-length weights."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    length = float(np.hypot(*(b - a)))
    if length == 0.0:
        raise ValueError("zero-length edge")
    s, w = _gauss(max(1, (degree + 2) // 2))
    return QuadRule(a + s[:, None] * (b - a), w * length)


def clip_halfplane(poly, point, normal, keep: int):
    """Sutherland-Hodgman clip of a convex polygon to ``keep * (x - point).normal >= 0``."""
    out = []
    n = len(poly)
    if n == 0:
        return out
    d = [keep * float(np.dot(np.subtract(q, point), normal)) for q in poly]
    for k in range(n):
        p, q = poly[k], poly[(k + 1) % n]
        dp, dq = d[k], d[(k + 1) % n]
        if dp >= 0:
            out.append(np.asarray(p, dtype=float))
        if (dp > 0 and dq < 0) or (dp < 0 and dq > 0):
            s = dp / (dp - dq)
            out.append(np.asarray(p, dtype=float) + s * (np.asarray(q) - np.asarray(p)))
    return out


def union_regions(vertices, cut_old, cut_new, side_old: int = 0, side_new: int = 0):
    """Partition an element into convex regions where both cuts are one-sided.

    Returns a list of ``(polygon, s_old, s_new)``.  A missing cut is replaced
    by the constant side label ``side_old``/``side_new`` of that element.
    """
    tri = [np.asarray(v, dtype=float) for v in vertices]
    if cut_old is None:
        pieces = [(tri, side_old)]
    else:
        pieces = [(cut_old.minus_polygon, -1), (cut_old.plus_polygon, 1)]
    if cut_new is None:
        return [(list(p), s, side_new) for p, s in pieces if len(p) >= 3]
    if cut_old is not None and cut_new is cut_old:
        return [(list(p), s, s) for p, s in pieces if len(p) >= 3]
    regions = []
    for poly, s_old in pieces:
        for s_new in (-1, 1):
            clipped = clip_halfplane(list(poly), cut_new.D, cut_new.normal, s_new)
            if len(clipped) >= 3 and abs(signed_area(clipped)) > 0.0:
                regions.append((clipped, s_old, s_new))
    return regions


def union_cut_rule(vertices, cut_old, cut_new, degree: int = VOLUME_DEGREE,
                   side_old: int = 0, side_new: int = 0):
    """Quadrature on the common refinement of two cuts of the same element.

    Returns ``(rule, s_old, s_new)`` triples, one per region.
    """
    if cut_old is None and cut_new is None:
        return [(triangle_rule(vertices, degree), side_old, side_new)]
    return [
        (polygon_rule(poly, degree), so, sn)
        for poly, so, sn in union_regions(vertices, cut_old, cut_new, side_old, side_new)
    ]
