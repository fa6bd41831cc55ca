"""Planar polygon helpers: shoelace area, CCW ordering and convex clipping."""
from __future__ import annotations

import numpy as np

__all__ = ["signed_area", "polygon_area", "canonical_ccw", "clip_convex", "polygon_intersection_area"]


def signed_area(poly) -> float:
    """Shoelace sum; positive for counter-clockwise vertex order."""
    p = np.asarray(poly, dtype=float)
    if len(p) < 3:
        return 0.0
    x, y = p[:, 0], p[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def polygon_area(poly) -> float:
    """Absolute area of a simple polygon given as an (n, 2) vertex sequence."""
    return abs(signed_area(poly))


def canonical_ccw(poly) -> np.ndarray:
    """Sort vertices by angle about their centroid.

    Repairs bow-tie orderings of convex point sets (e.g. ACBD instead of ABCD)
    and starts from the vertex with the smallest angle so equal sets compare equal.
    """
    p = np.asarray(poly, dtype=float)
    c = p.mean(axis=0)
    ang = np.arctan2(p[:, 1] - c[1], p[:, 0] - c[0])
    return p[np.argsort(ang, kind="stable")]


def _clip_halfplane(pts, a, b):
    # keep the left side of the directed edge a -> b
    out = []
    n = len(pts)
    ax, ay = a
    ex, ey = b[0] - ax, b[1] - ay
    side = [ex * (p[1] - ay) - ey * (p[0] - ax) for p in pts]
    for k in range(n):
        p, q = pts[k], pts[(k + 1) % n]
        sp, sq = side[k], side[(k + 1) % n]
        if sp >= 0:
            out.append(p)
        if (sp >= 0) != (sq >= 0):
            t = sp / (sp - sq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return out


def clip_convex(subject, clip) -> np.ndarray:
    """Sutherland-Hodgman clip of ``subject`` against a convex CCW ``clip`` polygon."""
    pts = [tuple(map(float, p)) for p in np.asarray(subject, dtype=float)]
    c = [tuple(map(float, p)) for p in np.asarray(clip, dtype=float)]
    for k in range(len(c)):
        if len(pts) < 3:
            return np.empty((0, 2))
        pts = _clip_halfplane(pts, c[k], c[(k + 1) % len(c)])
    if len(pts) < 3:
        return np.empty((0, 2))
    return np.array(pts)


def polygon_intersection_area(a, b) -> float:
    """Area of the intersection of two convex polygons (any vertex order)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if len(a) < 3 or len(b) < 3:
        return 0.0
    amin, amax = a.min(axis=0), a.max(axis=0)
    bmin, bmax = b.min(axis=0), b.max(axis=0)
    if np.any(amax <= bmin) or np.any(bmax <= amin):
        return 0.0
    a = canonical_ccw(a)
    b = canonical_ccw(b)
    return polygon_area(clip_convex(a, b))
