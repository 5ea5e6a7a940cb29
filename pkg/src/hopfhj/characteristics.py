"""Characteristic curves of the problem and their classification.

Because H depends only on (t, p), the characteristic system integrates in
closed quadrature: the momentum p = sigma_y(y) is constant along a curve and

    x(t, y) = y + int_0^t H_p(tau, sigma_y(y)) dtau.

A curve through (t0, x0) is *type I* there when its momentum belongs to the
maximizer set l(t0, x0), *type II* otherwise. Along a type-II curve the
membership flips exactly once, at the transition time located by
:func:`transition_theta`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import expr as ex
from .conjugate import _as_box, _as_point, conjugate_argmax
from .errors import NonMonotonePredicateError, PreconditionError, ResolutionFailure
from .hopf import UNCLASSIFIED, HJProblem, MaximizerSet, evaluate
from .optimize import search_grid
from .quadrature import adaptive_simpson

__all__ = [
    "TYPE_I",
    "TYPE_II",
    "CharClassification",
    "ThetaBracket",
    "MomentumMismatchWarning",
    "curve_point",
    "curve_points_vec",
    "classical_value",
    "backward_initial",
    "default_y_box",
    "ell_star",
    "classify_char",
    "transition_theta",
]

TYPE_I = "type-I"
TYPE_II = "type-II"

_RESIDUAL_TOL = 1e-6
_MOMENTUM_TOL = 1e-6


class MomentumMismatchWarning(UserWarning):
    """sigma_y at the recovered initial point differs from the requested momentum."""


def sigma_grad(prob: HJProblem, y) -> np.ndarray:
    return prob.sigma.gradient(_as_point(y, prob.n))


def _sigma_grad_vec(prob: HJProblem, y_arr: np.ndarray) -> np.ndarray:
    out = ex.directional_derivative(
        prob.sigma.sigma, {"x1": 1.0}, {"x1": np.asarray(y_arr, dtype=float)}
    )
    arr = np.asarray(out, dtype=float)
    if arr.shape != np.shape(y_arr):
        arr = np.broadcast_to(arr, np.shape(y_arr)).copy()
    return arr


def curve_point(prob: HJProblem, y, t: float) -> np.ndarray:
    """Position x(t, y) of the characteristic emanating from (0, y)."""
    prob.check_time(t)
    y = _as_point(y, prob.n)
    return y + prob.cumulative_Hp(sigma_grad(prob, y), t)


def curve_points_vec(prob: HJProblem, y_arr: np.ndarray, t: float) -> np.ndarray:
    """Vectorized curve positions for n = 1."""
    y_arr = np.asarray(y_arr, dtype=float)
    p_arr = _sigma_grad_vec(prob, y_arr)
    return y_arr + prob.cumulative_Hp_vec(t, p_arr)


def classical_value(prob: HJProblem, y, t: float) -> float:
    """Value carried by the characteristic strip from (0, y) up to time t."""
    prob.check_time(t)
    y = _as_point(y, prob.n)
    p0 = sigma_grad(prob, y)
    sig = prob.sigma.value(y)
    from .hopf import Separable  # local import to avoid cycle noise

    if isinstance(prob.a2_class, Separable):
        g, k = prob._gk(t)
        b = {"t": 0.0}
        for i in range(prob.n):
            b[f"p{i + 1}"] = p0[i]
            b[f"q{i + 1}"] = p0[i]
        h = ex.evaluate(prob.a2_class.h, b)
        hp = np.array(
            [
                ex.directional_derivative(
                    prob.a2_class.h, {f"p{i + 1}": 1.0, f"q{i + 1}": 1.0}, b
                )
                for i in range(prob.n)
            ]
        )
        return sig + g * (float(np.dot(hp, p0)) - h) - k
    if prob._t_free:
        return sig + t * (float(np.dot(prob.H_p(0.0, p0), p0)) - prob.H_value(0.0, p0))

    def integrand(s):
        return float(np.dot(prob.H_p(s, p0), p0)) - prob.H_value(s, p0)

    return sig + adaptive_simpson(integrand, 0.0, t, 1e-10)


def backward_initial(prob: HJProblem, t0: float, x0, p0) -> np.ndarray:
    """Initial point y = x0 - int_0^t0 H_p(tau, p0) dtau of the p0-curve.

    When sigma_y at the recovered y misses p0 by more than 1e-6 (sigma_y not
    injective around the anchor) a :class:`MomentumMismatchWarning` is issued.
    """
    prob.check_time(t0)
    x0 = _as_point(x0, prob.n)
    p0 = _as_point(p0, prob.n)
    y = x0 - prob.cumulative_Hp(p0, t0)
    gap = float(np.linalg.norm(sigma_grad(prob, y) - p0))
    if gap > _MOMENTUM_TOL:
        warnings.warn(
            f"sigma_y(y) misses the requested momentum by {gap:.3e}",
            MomentumMismatchWarning,
            stacklevel=2,
        )
    return y


def default_y_box(prob: HJProblem) -> np.ndarray:
    """Initial-point search box: the momentum box mapped through the conjugate
    maximizers for n = 1, the sigma search box otherwise."""
    if prob.n == 1:
        lo = float(conjugate_argmax(prob.sigma, prob.q_box[0, 0])[0])
        hi = float(conjugate_argmax(prob.sigma, prob.q_box[0, 1])[0])
        if hi < lo:
            lo, hi = hi, lo
        pad = 1e-3 * (hi - lo) + 1e-9
        return np.array([[lo - pad, hi + pad]])
    return prob.sigma.x_search_box.copy()


def _newton_polish(f, y, lo, hi, iters=3):
    for _ in range(iters):
        h = 1e-7 * (1.0 + abs(y))
        d = (f(y + h) - f(y - h)) / (2.0 * h)
        if d == 0.0 or not math.isfinite(d):
            break
        step = f(y) / d
        y_new = y - step
        if not (lo <= y_new <= hi):
            break
        y = y_new
    return y


def ell_star(prob: HJProblem, t0: float, x0, y_box=None, grid: int = 1024) -> list:
    """All initial points whose characteristic passes through (t0, x0).

    n = 1: scan a ``grid``-point mesh of the y-box, bracket sign changes of
    the residual, bisect to 1e-10 and Newton-polish. Completeness holds at
    grid resolution. n >= 2 falls back to multistart root finding and is
    best effort. An empty result raises :class:`ResolutionFailure` since
    l(t0,x0) is contained in sigma_y of this set.
    """
    prob.check_time(t0)
    x0 = _as_point(x0, prob.n)
    box = _as_box(y_box) if y_box is not None else default_y_box(prob)

    if prob.n == 1:
        ys = search_grid(box[0, 0], box[0, 1], grid)
        res = curve_points_vec(prob, ys, t0) - x0[0]

        def f(y):
            return float(curve_point(prob, y, t0)[0]) - x0[0]

        roots = []
        for i in range(len(ys) - 1):
            a, fa = ys[i], res[i]
            b, fb = ys[i + 1], res[i + 1]
            if fa == 0.0:
                roots.append(float(a))
                continue
            if fa * fb < 0.0:
                while b - a > 1e-10:
                    m = 0.5 * (a + b)
                    fm = f(m)
                    if fm == 0.0:
                        a = b = m
                        break
                    if fa * fm < 0.0:
                        b, fb = m, fm
                    else:
                        a, fa = m, fm
                roots.append(_newton_polish(f, 0.5 * (a + b), box[0, 0], box[0, 1]))
        if res[-1] == 0.0:
            roots.append(float(ys[-1]))
        out = []
        for r in sorted(roots):
            if not out or r - out[-1] > 1e-9 * (box[0, 1] - box[0, 0]):
                out.append(r)
        if not out:
            raise ResolutionFailure(
                f"no characteristic through (t={t0}, x={x0[0]}) at grid {grid}"
            )
        return [np.array([r]) for r in out]

    from scipy.optimize import root

    per_axis = 32
    axes = [search_grid(box[i, 0], box[i, 1], per_axis) for i in range(prob.n)]
    mesh = np.meshgrid(*axes, indexing="ij")
    seeds = np.stack([g.ravel() for g in mesh], axis=1)

    def fun(y):
        return curve_point(prob, y, t0) - x0

    found = []
    for s in seeds:
        sol = root(fun, s, method="hybr")
        if not sol.success:
            continue
        y = np.asarray(sol.x, dtype=float)
        if np.any(y < box[:, 0]) or np.any(y > box[:, 1]):
            continue
        if np.linalg.norm(fun(y)) > _RESIDUAL_TOL:
            continue
        if all(np.linalg.norm(y - z) > 1e-6 * np.linalg.norm(box[:, 1] - box[:, 0]) for z in found):
            found.append(y)
    if not found:
        raise ResolutionFailure(f"no characteristic found through (t={t0}, x={x0})")
    return sorted(found, key=lambda y: tuple(y))


@dataclass
class CharClassification:
    """Type-I/type-II verdict for the characteristic from y at an anchor point."""

    kind: str  # TYPE_I or TYPE_II
    anchor: tuple
    witness: MaximizerSet
    y: np.ndarray
    momentum: np.ndarray
    distance: float
    borderline: bool = False


def classify_char(prob: HJProblem, t0: float, x0, y) -> CharClassification:
    """Type I iff sigma_y(y) lies within the match tolerance of l(t0, x0)."""
    prob.check_time(t0)
    x0 = _as_point(x0, prob.n)
    y = _as_point(y, prob.n)
    residual = float(np.linalg.norm(curve_point(prob, y, t0) - x0))
    if residual > _RESIDUAL_TOL:
        raise PreconditionError(
            f"curve from y={y} misses the anchor by {residual:.3e} (> {_RESIDUAL_TOL})"
        )
    ms = evaluate(prob, t0, x0)
    p = sigma_grad(prob, y)
    dist = min(float(np.linalg.norm(p - pt)) for pt in ms.points)
    mtol = prob.match_tolerance
    return CharClassification(
        kind=TYPE_I if dist <= mtol else TYPE_II,
        anchor=(t0, x0),
        witness=ms,
        y=y,
        momentum=p,
        distance=dist,
        borderline=0.5 * mtol <= dist <= 2.0 * mtol,
    )


@dataclass
class ThetaBracket:
    """Bracket around the type-II -> type-I transition time on a curve."""

    lo: float
    hi: float
    probes: list = field(default_factory=list)

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo


_THETA_SCAN = 16


def transition_theta(prob: HJProblem, t0: float, x0, y0, rel_tol: float = 1e-6) -> ThetaBracket:
    """Locate the time where the curve from y0 turns type I.

    Requires a type-II classification at (t0, x0) and a declared structural
    class of H (the transition result also assumes H and sigma are C2, which
    is the caller's obligation; expressions are not checked for smoothness).
    The singleton predicate is assumed monotone along the curve; more than
    one alternation on the coarse scan raises
    :class:`NonMonotonePredicateError` carrying every probe.
    """
    cls = classify_char(prob, t0, x0, y0)
    if cls.kind != TYPE_II:
        raise PreconditionError("transition time is defined for type-II curves only")
    if prob.a2_class == UNCLASSIFIED:
        raise PreconditionError("structural class of H must be declared (not unclassified)")
    y0 = _as_point(y0, prob.n)
    p0 = sigma_grad(prob, y0)
    mtol = prob.match_tolerance

    def predicate(s: float) -> bool:
        xs = curve_point(prob, y0, s)
        ms = evaluate(prob, s, xs)
        return ms.is_singleton and float(np.linalg.norm(ms.points[0] - p0)) <= mtol

    probes = []
    svals = [t0 * i / _THETA_SCAN for i in range(_THETA_SCAN + 1)]
    pattern = []
    for s in svals:
        val = predicate(s)
        pattern.append(val)
        probes.append((s, val))
    flips = sum(1 for a, b in zip(pattern, pattern[1:]) if a != b)
    if not pattern[0] or flips != 1:
        raise NonMonotonePredicateError(
            f"singleton predicate not monotone on [0, {t0}] ({flips} alternations)", probes
        )
    idx = pattern.index(False)
    lo, hi = svals[idx - 1], svals[idx]
    target = rel_tol * t0
    while hi - lo > target:
        mid = 0.5 * (lo + hi)
        val = predicate(mid)
        probes.append((mid, val))
        if val:
            lo = mid
        else:
            hi = mid
    return ThetaBracket(lo=lo, hi=hi, probes=probes)
