"""Grid/refinement machinery shared by the value maximization and conjugation.

Two independent refinement routes live here on purpose: the multistart
golden-section path drives the production maximizer, while the plain ternary
search is reserved for the brute-force oracle so the two never share code.
"""

from __future__ import annotations

import math

import numpy as np

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0  # 0.618...
_INV_PHI2 = 1.0 - _INV_PHI


def search_grid(lo: float, hi: float, m: int) -> np.ndarray:
    """Endpoint-inclusive uniform grid (used for seeding and brute scans)."""
    return np.linspace(lo, hi, m)


def anchor_grid(lo: float, hi: float, m: int) -> np.ndarray:
    """Right-open uniform grid; contains the center of a symmetric interval."""
    return lo + (hi - lo) * np.arange(m) / m


def golden_max_vec(f_vec, a, b, iters: int = 60):
    """Vectorized golden-section maximization over per-row brackets [a, b].

    ``f_vec`` maps an array of abscissae to an array of values (``-inf``
    allowed). Returns ``(x_best, f_best)`` per bracket after a fixed number
    of interval reductions; 60 reductions shrink any desk-scale bracket
    below 1e-12.
    """
    a = np.asarray(a, dtype=float).copy()
    b = np.asarray(b, dtype=float).copy()
    x1 = a + _INV_PHI2 * (b - a)
    x2 = a + _INV_PHI * (b - a)
    f1 = f_vec(x1)
    f2 = f_vec(x2)
    for _ in range(iters):
        keep_left = f1 >= f2
        b = np.where(keep_left, x2, b)
        a = np.where(keep_left, a, x1)
        x1_new = a + _INV_PHI2 * (b - a)
        x2_new = a + _INV_PHI * (b - a)
        # the surviving interior point keeps its value; one new probe per bracket
        probe = np.where(keep_left, x1_new, x2_new)
        fp = f_vec(probe)
        f1, f2 = np.where(keep_left, fp, f2), np.where(keep_left, f1, fp)
        x1, x2 = x1_new, x2_new
    mid = 0.5 * (a + b)
    fm = f_vec(mid)
    best = np.where(f1 >= np.maximum(f2, fm), x1, np.where(f2 >= fm, x2, mid))
    fbest = np.maximum(np.maximum(f1, f2), fm)
    return best, fbest


def ternary_max(f, lo: float, hi: float, iters: int = 120):
    """Scalar derivative-free maximization by interval thirds (oracle path)."""
    for _ in range(iters):
        third = (hi - lo) / 3.0
        m1 = lo + third
        m2 = hi - third
        if f(m1) < f(m2):
            lo = m1
        else:
            hi = m2
    x = 0.5 * (lo + hi)
    return x, f(x)


def cluster_points(points, values, radius: float):
    """Greedy clustering by descending value; returns (rep_point, rep_value) list.

    Representatives are at least ``radius`` apart; ties in value break by
    coordinates so the result is deterministic.
    """
    pts = [np.atleast_1d(np.asarray(p, dtype=float)) for p in points]
    order = sorted(range(len(pts)), key=lambda i: (-values[i], tuple(pts[i])))
    reps = []
    rep_mat = None
    for i in order:
        v = values[i]
        if not np.isfinite(v):
            continue
        p = pts[i]
        if rep_mat is None or np.min(np.linalg.norm(rep_mat - p, axis=1)) >= radius:
            reps.append((p, float(v)))
            rep_mat = np.vstack([rep_mat, p[None, :]]) if rep_mat is not None else p[None, :]
    return reps
