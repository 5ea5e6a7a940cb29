"""Numeric Legendre-Fenchel conjugation of convex initial data.

The conjugate sup is always taken over a user-declared compact search box;
a boundary-escape heuristic (double the box, see if the sup keeps growing)
stands in for membership of the effective domain. Subdifferentials of the
conjugate are estimated from one-sided difference quotients of the box-sup
values, which stay meaningful even where the escape heuristic would fire.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from . import expr as ex
from .errors import (
    ConjugateDomainError,
    InconsistencyError,
    PreconditionError,
    ProblemValidationError,
)
from .optimize import cluster_points, golden_max_vec, search_grid, ternary_max

__all__ = ["ConvexData", "Subdifferential", "conjugate_value", "subdifferential", "check_affine_segment"]

INF = math.inf

_CONVEXITY_PAIRS = 1000
_CONVEXITY_TOL = 1e-9
_GRID_PER_AXIS = 64
_BOUNDARY_FRAC = 1e-9
_ESCAPE_GAIN = 1e-6


def _as_box(box) -> np.ndarray:
    b = np.asarray(box, dtype=float)
    if b.ndim == 1:
        b = b.reshape(1, 2)
    if b.ndim != 2 or b.shape[1] != 2:
        raise ProblemValidationError("box must be an (n, 2) array of [lo, hi] rows")
    return b


def _as_point(p, n) -> np.ndarray:
    q = np.atleast_1d(np.asarray(p, dtype=float))
    if q.shape != (n,):
        raise ValueError(f"expected a point of dimension {n}, got shape {q.shape}")
    return q


@dataclass
class ConvexData:
    """Convex initial data sigma with the search box for its conjugate sup.

    ``sigma`` may be passed as source text; the dimension is taken from the
    box. Construction samples midpoint convexity on 1000 random pairs.
    """

    sigma: Union[ex.Expr, str]
    x_search_box: Sequence
    lipschitz_hint: Optional[float] = None
    _memo: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.x_search_box = _as_box(self.x_search_box)
        if np.any(self.x_search_box[:, 1] <= self.x_search_box[:, 0]):
            raise ProblemValidationError("x_search_box must have positive volume")
        if isinstance(self.sigma, str):
            self.sigma = ex.parse(self.sigma, self.n)
        if self.lipschitz_hint is not None and self.lipschitz_hint <= 0:
            raise ProblemValidationError("lipschitz_hint must be positive")
        self._check_midpoint_convexity()

    @property
    def n(self) -> int:
        return self.x_search_box.shape[0]

    def value(self, x) -> float:
        x = _as_point(x, self.n)
        return ex.evaluate(self.sigma, {f"x{i + 1}": x[i] for i in range(self.n)})

    def value_vec(self, xs: np.ndarray) -> np.ndarray:
        """Vectorized sigma over rows of ``xs`` (shape (m, n) or (m,) for n=1)."""
        xs = np.asarray(xs, dtype=float)
        if xs.ndim == 1:
            xs = xs.reshape(-1, 1)
        out = ex.evaluate(self.sigma, {f"x{i + 1}": xs[:, i] for i in range(self.n)})
        return np.broadcast_to(np.asarray(out, dtype=float), (xs.shape[0],))

    def gradient(self, x) -> np.ndarray:
        x = _as_point(x, self.n)
        bindings = {f"x{i + 1}": x[i] for i in range(self.n)}
        return np.array(
            [ex.directional_derivative(self.sigma, {f"x{i + 1}": 1.0}, bindings) for i in range(self.n)]
        )

    def _check_midpoint_convexity(self):
        rng = np.random.default_rng(0)
        lo, hi = self.x_search_box[:, 0], self.x_search_box[:, 1]
        a = lo + (hi - lo) * rng.random((_CONVEXITY_PAIRS, self.n))
        b = lo + (hi - lo) * rng.random((_CONVEXITY_PAIRS, self.n))
        fa = self.value_vec(a)
        fb = self.value_vec(b)
        fm = self.value_vec(0.5 * (a + b))
        gap = fm - 0.5 * (fa + fb)
        worst = float(np.max(gap))
        if worst > _CONVEXITY_TOL:
            i = int(np.argmax(gap))
            raise ProblemValidationError(
                f"sigma failed sampled midpoint convexity by {worst:.3e} at x={a[i]}, {b[i]}"
            )


# ---------------------------------------------------------------------------
# conjugate sup

def _box_sup(c: ConvexData, q: np.ndarray, box: np.ndarray):
    """Polished sup of <x,q> - sigma(x) over ``box``; returns (value, argmax)."""
    if c.n == 1:
        grid = search_grid(box[0, 0], box[0, 1], _GRID_PER_AXIS)
        vals = grid * q[0] - c.value_vec(grid)
        i = int(np.argmax(vals))
        lo = grid[max(i - 1, 0)]
        hi = grid[min(i + 1, len(grid) - 1)]

        def f_vec(xs):
            return xs * q[0] - c.value_vec(xs)

        xs, fs = golden_max_vec(f_vec, np.array([lo]), np.array([hi]), iters=80)
        if fs[0] >= vals[i]:
            return float(fs[0]), np.array([float(xs[0])])
        return float(vals[i]), np.array([grid[i]])

    axes = [search_grid(box[k, 0], box[k, 1], _GRID_PER_AXIS) for k in range(c.n)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    vals = pts @ q - c.value_vec(pts)
    i = int(np.argmax(vals))
    x0 = pts[i]

    from scipy.optimize import minimize

    def neg(x):
        return -(float(np.dot(x, q)) - c.value(x))

    res = minimize(neg, x0, method="L-BFGS-B", bounds=[tuple(b) for b in box],
                   options={"ftol": 1e-15, "gtol": 1e-12})
    if -res.fun >= vals[i]:
        return float(-res.fun), np.asarray(res.x, dtype=float)
    return float(vals[i]), x0


def _conjugate_full(c: ConvexData, q) -> tuple:
    """(escape_aware_value, box_sup_value, argmax) with memoization."""
    qa = _as_point(q, c.n)
    key = tuple(qa.tolist())
    hit = c._memo.get(key)
    if hit is not None:
        return hit
    box = c.x_search_box
    val, xstar = _box_sup(c, qa, box)
    width = box[:, 1] - box[:, 0]
    on_boundary = bool(
        np.any(xstar - box[:, 0] <= _BOUNDARY_FRAC * width)
        or np.any(box[:, 1] - xstar <= _BOUNDARY_FRAC * width)
    )
    out_val = val
    if on_boundary:
        center = 0.5 * (box[:, 0] + box[:, 1])
        doubled = np.stack([center - width, center + width], axis=1)
        val2, _ = _box_sup(c, qa, doubled)
        if val2 > val + _ESCAPE_GAIN:
            out_val = INF
    result = (out_val, val, xstar)
    c._memo[key] = result
    return result


def conjugate_value(c: ConvexData, q) -> float:
    """sigma*(q) as the polished box sup; +inf when the sup escapes the box."""
    return _conjugate_full(c, q)[0]


def conjugate_argmax(c: ConvexData, q) -> np.ndarray:
    """Maximizer of <x,q> - sigma(x) over the search box (box-sup, no escape)."""
    return _conjugate_full(c, q)[2]


# ---------------------------------------------------------------------------
# subdifferential of the conjugate

@dataclass
class Subdifferential:
    """One-dimensional interval [lower, upper] of subgradients of sigma* at p0.

    Estimates are relative to the search box: where the true slope blows up
    the corresponding ``unbounded_*`` flag is set and the numeric endpoint is
    only a box-capped bound. For n > 1 either ``gradient`` (stable smooth
    point) or ``samples`` (best-effort supporting slopes) is populated.
    """

    lower: Optional[float] = None
    upper: Optional[float] = None
    unbounded_above: bool = False
    unbounded_below: bool = False
    gradient: Optional[np.ndarray] = None
    samples: Optional[list] = None

    @property
    def is_singleton(self) -> bool:
        if self.gradient is not None:
            return True
        if self.lower is None or self.upper is None or self.unbounded_above or self.unbounded_below:
            return False
        return abs(self.upper - self.lower) <= 1e-6 * (1.0 + abs(self.upper))


def _one_sided_quotients(c: ConvexData, p0: float, probe_radius: float, side: int):
    """Quotients (S(p0 + s*h) - S(p0)) / (s*h) over h = r * 2^-j, j = 0..8."""
    s0 = _conjugate_full(c, p0)[1]
    qs = []
    for j in range(9):
        h = probe_radius * 0.5**j
        sh = _conjugate_full(c, p0 + side * h)[1]
        qs.append(side * (sh - s0) / h)
    return qs


def _diverging(qs) -> bool:
    tail = [abs(v) for v in qs[-5:]]
    if tail[-1] < 1.0:
        return False
    ratios = [tail[i + 1] / max(tail[i], 1e-300) for i in range(len(tail) - 1)]
    return all(r >= 1.25 for r in ratios)


def subdifferential(c: ConvexData, p0, probe_radius: float = 0.1) -> Subdifferential:
    """Subgradient set of sigma* at ``p0`` estimated from difference quotients.

    n = 1: Richardson-extrapolated one-sided quotients give the interval
    endpoints; sustained quotient growth across the small radii raises the
    unbounded flags instead of reporting a number.
    """
    if probe_radius <= 0:
        raise ValueError("probe_radius must be positive")
    n = c.n
    p0a = _as_point(p0, n)

    if n == 1:
        p = float(p0a[0])
        esc_here = math.isinf(_conjugate_full(c, p)[0])
        if esc_here:
            esc_lo = math.isinf(_conjugate_full(c, p - probe_radius)[0])
            esc_hi = math.isinf(_conjugate_full(c, p + probe_radius)[0])
            if esc_lo and esc_hi:
                raise ConjugateDomainError(f"p0={p} lies outside dom sigma*")
        q_right = _one_sided_quotients(c, p, probe_radius, +1)
        q_left = _one_sided_quotients(c, p, probe_radius, -1)
        out = Subdifferential()
        if _diverging(q_left):
            # left derivative running to +inf (convex S: quotients increase leftward)
            out.unbounded_above = True
        else:
            out.lower = 2.0 * q_left[-1] - q_left[-2]
        if _diverging(q_right):
            out.unbounded_below = True
        else:
            out.upper = 2.0 * q_right[-1] - q_right[-2]
        return out

    # n > 1: central-difference gradient when stable, else sampled slopes.
    if math.isinf(_conjugate_full(c, p0a)[0]):
        raise ConjugateDomainError("p0 lies outside dom sigma*")

    def grad_at(h):
        g = np.empty(n)
        for i in range(n):
            e = np.zeros(n)
            e[i] = h
            g[i] = (_conjugate_full(c, p0a + e)[1] - _conjugate_full(c, p0a - e)[1]) / (2 * h)
        return g

    g1 = grad_at(probe_radius / 4)
    g2 = grad_at(probe_radius / 8)
    if np.max(np.abs(g1 - g2)) <= 1e-6:
        return Subdifferential(gradient=g2)
    rng = np.random.default_rng(0)
    samples = []
    for _ in range(16):
        u = rng.standard_normal(n)
        u /= np.linalg.norm(u)
        samples.append(conjugate_argmax(c, p0a + probe_radius / 8 * u))
    return Subdifferential(samples=samples)


# ---------------------------------------------------------------------------
# affine-segment test (conjugates of C1 data must not contain one)

_SEGMENT_TOL = 1e-8
_MIDPOINT_TOL = 1e-6


def check_affine_segment(v: Callable, p, p0, y, n: int = 1) -> bool:
    """True iff v is affine with slope y along the whole segment [p, p0].

    ``y`` must be a subgradient of v at p0; this is spot-checked through the
    subgradient inequality at 100 segment samples. A positive equality test
    that fails the 50-sample midpoint verification raises
    :class:`InconsistencyError` (the caller's v is not convex).
    """
    pa = _as_point(p, n)
    p0a = _as_point(p0, n)
    ya = _as_point(y, n)

    def call(z):
        return float(v(float(z[0]) if n == 1 else z))

    vp = call(pa)
    vp0 = call(p0a)
    rng = np.random.default_rng(0)
    for s in rng.random(100):
        z = p0a + s * (pa - p0a)
        if call(z) < vp0 + float(np.dot(ya, z - p0a)) - _SEGMENT_TOL:
            raise PreconditionError("y fails the subgradient inequality at p0")

    lhs = float(np.dot(ya, pa - p0a))
    if abs(lhs - (vp - vp0)) > _SEGMENT_TOL:
        return False
    for s in np.linspace(0.0, 1.0, 50):
        z = p0a + s * (pa - p0a)
        want = float(np.dot(ya, z)) - float(np.dot(ya, p0a)) + vp0
        if abs(call(z) - want) > _MIDPOINT_TOL:
            raise InconsistencyError(
                "affine endpoints but a non-affine interior sample: v is not convex"
            )
    return True
