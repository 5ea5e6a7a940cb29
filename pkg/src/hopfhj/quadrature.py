"""Adaptive Simpson quadrature used by the accumulated-Hamiltonian integrals."""

from __future__ import annotations

_MAX_DEPTH = 48


def _simpson(f, a, fa, b, fb):
    m = 0.5 * (a + b)
    fm = f(m)
    return m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb)


def _recurse(f, a, fa, b, fb, eps, whole, m, fm, depth):
    lm, flm, left = _simpson(f, a, fa, m, fm)
    rm, frm, right = _simpson(f, m, fm, b, fb)
    delta = left + right - whole
    if depth <= 0 or abs(delta) <= 15.0 * eps:
        return left + right + delta / 15.0
    half = 0.5 * eps
    return _recurse(f, a, fa, m, fm, half, left, lm, flm, depth - 1) + _recurse(
        f, m, fm, b, fb, half, right, rm, frm, depth - 1
    )


def adaptive_simpson(f, a: float, b: float, tol: float = 1e-10) -> float:
    """Integrate ``f`` over [a, b] to absolute tolerance ``tol``."""
    if a == b:
        return 0.0
    fa, fb = f(a), f(b)
    m, fm, whole = _simpson(f, a, fa, b, fb)
    return _recurse(f, a, fa, b, fb, tol, whole, m, fm, _MAX_DEPTH)
