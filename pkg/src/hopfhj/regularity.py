"""Regularity analysis of the Hopf-type value: points, strips, singular traces.

A point is regular exactly when its maximizer set is a singleton; the
gradient there is (-H(t, q*), q*). Reachable gradients at any point are the
maximizer set mapped through the same formula. Strip and trace claims are
grid-relative by construction and every report records the resolutions used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import partial
from typing import Optional, Sequence

import numpy as np

from .conjugate import _as_box, _as_point
from .characteristics import (
    curve_points_vec,
    default_y_box,
    ell_star,
    sigma_grad,
)
from .errors import PreconditionError, ResolutionFailure
from .hopf import HJProblem, MaximizerSet, evaluate
from .optimize import anchor_grid, search_grid
from .parallel import parallel_map

__all__ = [
    "REGULAR",
    "SINGULAR",
    "BORDERLINE",
    "PointReport",
    "InjectivityReport",
    "StripLevel",
    "StripReport",
    "TraceStep",
    "SingularTrace",
    "ApproachabilityReport",
    "classify_point",
    "reachable_gradients",
    "membership_halfdiff",
    "fd_gradient",
    "injectivity_test",
    "strip_scan",
    "trace_singularities",
    "pde_residual",
    "approachability",
]

REGULAR = "regular"
SINGULAR = "singular"
BORDERLINE = "borderline"

BORDERLINE_BAND = 10.0  # borderline when a runner-up sits within 10x value tolerance


@dataclass
class PointReport:
    """Verdict for one (t, x) with the gradient or reachable-gradient payload."""

    anchor: tuple
    verdict: str
    u: float
    gradient: Optional[tuple]  # (u_t, u_x) at regular points
    reachable: list  # [(-H(t,q), q) for q in ell]
    ell: MaximizerSet


def classify_point(prob: HJProblem, t: float, x) -> PointReport:
    """Regular/singular verdict by cluster count of the maximizer set.

    Borderline flags a singleton whose best excluded cluster sits within
    ten value tolerances of the max, so near-ties never flip silently.
    """
    prob.check_time(t)
    x = _as_point(x, prob.n)
    ms = evaluate(prob, t, x)
    if len(ms.points) >= 2:
        verdict = SINGULAR
    elif ms.second_gap is not None and ms.second_gap <= BORDERLINE_BAND * ms.value_tolerance:
        verdict = BORDERLINE
    else:
        verdict = REGULAR
    reachable = [(-prob.H_value(t, q), q) for q in ms.points]
    gradient = reachable[0] if verdict == REGULAR else None
    return PointReport(
        anchor=(t, x),
        verdict=verdict,
        u=ms.value,
        gradient=gradient,
        reachable=reachable,
        ell=ms,
    )


def reachable_gradients(prob: HJProblem, t0: float, x0) -> list:
    """The set {(-H(t0, q), q) : q in l(t0, x0)} of reachable gradients."""
    prob.check_time(t0)
    ms = evaluate(prob, t0, _as_point(x0, prob.n))
    return [(-prob.H_value(t0, q), q) for q in ms.points]


# ---------------------------------------------------------------------------
# sub/superdifferential membership

_MEMBER_MARGIN = 1e-3
_RADII_J = range(3, 13)
_N_DIRECTIONS = 32


def membership_halfdiff(
    prob: HJProblem, t0: float, x0, p: float, q, side: str, seed: int = 0
) -> str:
    """Sampled limsup/liminf test of (p, q) against D+ or D- at (t0, x0).

    The difference quotient is probed on 32 seeded unit directions in
    (t, x)-space at radii 2^-j, j = 3..12 (clipped to stay inside (0, T)),
    then linearly extrapolated in the radius. Returns "member",
    "non_member", or "inconclusive" when the extrapolants have not settled
    across the last four radii.
    """
    if side not in ("super", "sub"):
        raise ValueError("side must be 'super' or 'sub'")
    prob.check_time(t0)
    x0 = _as_point(x0, prob.n)
    q = _as_point(q, prob.n)
    u0 = evaluate(prob, t0, x0).value

    rng = np.random.default_rng(seed)
    dirs = rng.standard_normal((_N_DIRECTIONS, prob.n + 1))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)

    limit = min(t0, prob.T - t0)
    radii = [2.0**-j for j in _RADII_J if 2.0**-j < limit]
    if len(radii) < 5:
        raise PreconditionError("anchor too close to the time boundary for the radius ladder")

    extremes = []
    for rho in radii:
        taus = []
        for d in dirs:
            h = rho * d[0]
            k = rho * d[1:]
            u = evaluate(prob, t0 + h, x0 + k).value
            taus.append((u - u0 - p * h - float(np.dot(q, k))) / rho)
        extremes.append(max(taus) if side == "super" else min(taus))

    extrap = [2.0 * extremes[i + 1] - extremes[i] for i in range(len(extremes) - 1)]
    tail = extrap[-4:]
    if max(tail) - min(tail) > _MEMBER_MARGIN:
        return "inconclusive"
    estimate = tail[-1]
    if side == "super":
        return "member" if estimate <= _MEMBER_MARGIN else "non_member"
    return "member" if estimate >= -_MEMBER_MARGIN else "non_member"


# ---------------------------------------------------------------------------
# finite-difference gradients

def fd_gradient(prob: HJProblem, t: float, x, h: float, check: bool = False):
    """Central-difference gradient of the value; optionally h vs h/2 checked.

    Returns (u_t, u_x) or, with ``check``, (u_t, u_x, consistent) where
    ``consistent`` is False when halving the step moves any component by
    more than 1e-3 (the stencil straddles a kink).
    """
    x = _as_point(x, prob.n)
    if t - h < 0.0 or t + h > prob.T:
        raise PreconditionError("finite-difference stencil crosses t=0 or t=T")

    def grad(step):
        ut = (evaluate(prob, t + step, x).value - evaluate(prob, t - step, x).value) / (2 * step)
        ux = np.empty(prob.n)
        for i in range(prob.n):
            e = np.zeros(prob.n)
            e[i] = step
            ux[i] = (evaluate(prob, t, x + e).value - evaluate(prob, t, x - e).value) / (2 * step)
        return ut, ux

    ut, ux = grad(h)
    if not check:
        return ut, ux
    ut2, ux2 = grad(h / 2)
    consistent = abs(ut - ut2) <= 1e-3 and float(np.max(np.abs(ux - ux2))) <= 1e-3
    return ut2, ux2, consistent


def pde_residual(prob: HJProblem, t: float, x, h: Optional[float] = None) -> float:
    """|u_t + H(t, u_x)| from central differences at a regular point."""
    x = _as_point(x, prob.n)
    report = classify_point(prob, t, x)
    if report.verdict != REGULAR:
        raise PreconditionError(f"point (t={t}, x={x}) is {report.verdict}, not regular")
    if h is None:
        h = 1e-5 * (1.0 + float(np.linalg.norm(x)))
    ut, ux = fd_gradient(prob, t, x, h)
    return abs(ut + prob.H_value(t, ux))


# ---------------------------------------------------------------------------
# injectivity and strips

@dataclass
class InjectivityReport:
    injective: bool
    witness: Optional[tuple]  # offending (y, y') pair
    t: float
    grid: int


def injectivity_test(
    prob: HJProblem, t: float, y_box=None, grid: int = 1024
) -> InjectivityReport:
    """Grid check that y -> x(t, y) is one-to-one.

    n = 1 checks strict monotonicity of successive differences; any sign
    change yields the witness pair. n >= 2 does a pairwise collision scan at
    threshold 1e-8 * diam and is best effort.
    """
    prob.check_time(t)
    box = _as_box(y_box) if y_box is not None else default_y_box(prob)
    if prob.n == 1:
        ys = search_grid(box[0, 0], box[0, 1], grid)
        xs = curve_points_vec(prob, ys, t)
        d = np.diff(xs)
        if np.all(d > 0.0) or np.all(d < 0.0):
            return InjectivityReport(True, None, t, grid)
        ref = 1.0 if d[np.argmax(np.abs(d))] > 0 else -1.0
        bad = np.nonzero(ref * d <= 0.0)[0][0]
        return InjectivityReport(False, (float(ys[bad]), float(ys[bad + 1])), t, grid)

    from .characteristics import curve_point

    axes = [search_grid(box[i, 0], box[i, 1], grid) for i in range(prob.n)]
    mesh = np.meshgrid(*axes, indexing="ij")
    ys = np.stack([g.ravel() for g in mesh], axis=1)
    xs = np.array([curve_point(prob, y, t) for y in ys])
    thresh = 1e-8 * float(np.linalg.norm(box[:, 1] - box[:, 0]))
    for i in range(len(ys)):
        d = np.linalg.norm(xs[i + 1 :] - xs[i], axis=1)
        hit = np.nonzero(d <= thresh)[0]
        if hit.size:
            j = i + 1 + int(hit[0])
            return InjectivityReport(False, (ys[i], ys[j]), t, grid)
    return InjectivityReport(True, None, t, grid)


@dataclass
class StripLevel:
    t: float
    singleton_ok: bool
    injective_ok: bool
    all_type1_ok: bool


@dataclass
class StripReport:
    """Largest verified differentiability strip with per-level evidence.

    ``t_star`` is the largest grid level below which (inclusive) every level
    had singleton maximizer sets at every x-grid point; the claim is relative
    to the recorded grid resolutions.
    """

    t_star: float
    levels: list
    grids: dict


def _strip_level(args):
    prob, t, xs, y_box, y_grid, mtol = args
    singleton_ok = True
    all_type1 = True
    for xv in xs:
        report = classify_point(prob, t, xv)
        if report.verdict != REGULAR:
            singleton_ok = False
        try:
            roots = ell_star(prob, t, xv, y_box=y_box, grid=y_grid)
        except ResolutionFailure:
            all_type1 = False
            continue
        for y in roots:
            p = sigma_grad(prob, y)
            dist = min(float(np.linalg.norm(p - pt)) for pt in report.ell.points)
            if dist > mtol:
                all_type1 = False
    inj = injectivity_test(prob, t, y_box=y_box, grid=y_grid)
    return StripLevel(t=t, singleton_ok=singleton_ok, injective_ok=inj.injective, all_type1_ok=all_type1)


def strip_scan(
    prob: HJProblem,
    x_box,
    t_levels: int,
    x_grid: int,
    y_grid: int = 1024,
    workers: Optional[int] = None,
) -> StripReport:
    """Scan descending time levels for singleton/injectivity/type-I evidence.

    Levels are T*j/(t_levels+1); the x grid is right-open uniform so the
    center of a symmetric box lies on it. Work partitions across workers by
    level with a deterministic merge.
    """
    if t_levels < 2:
        raise PreconditionError("t_levels must be at least 2")
    box = _as_box(x_box)
    if box.shape[0] != prob.n:
        raise PreconditionError("x_box dimension mismatch")
    if prob.n == 1:
        xs = [float(v) for v in anchor_grid(box[0, 0], box[0, 1], x_grid)]
    else:
        axes = [anchor_grid(box[i, 0], box[i, 1], x_grid) for i in range(prob.n)]
        mesh = np.meshgrid(*axes, indexing="ij")
        xs = list(np.stack([g.ravel() for g in mesh], axis=1))
    ts = [prob.T * j / (t_levels + 1) for j in range(t_levels, 0, -1)]
    y_box = default_y_box(prob)
    tasks = [(prob, t, xs, y_box, y_grid, prob.match_tolerance) for t in ts]
    levels = parallel_map(_strip_level, tasks, workers=workers)

    t_star = 0.0
    for level in sorted(levels, key=lambda lv: lv.t):
        if not level.singleton_ok:
            break
        t_star = level.t
    return StripReport(
        t_star=t_star,
        levels=levels,
        grids={"t_levels": t_levels, "x_grid": x_grid, "y_grid": y_grid,
               "ell_star_grid": y_grid},
    )


# ---------------------------------------------------------------------------
# singularity propagation

@dataclass
class TraceStep:
    t: float
    x: np.ndarray
    ell: MaximizerSet


@dataclass
class SingularTrace:
    """Forward-in-time chain of singular points from a singular seed."""

    seed: tuple
    steps: list
    epsilon: float
    delta: float
    terminated: dict  # {"kind": "reached_T"} or {"kind": "gap", "resolution": h}


def _ball_candidate(args):
    prob, t, xv = args
    report = classify_point(prob, t, xv)
    if report.verdict != SINGULAR:
        return None
    # rank singular candidates by the value of their second cluster
    return (report.ell.point_values[1], xv, report.ell)


def _search_ball(prob, t, center, eps, m, workers):
    if prob.n == 1:
        pts = [float(v) for v in anchor_grid(float(center[0]) - eps, float(center[0]) + eps, m)]
    else:
        axes = [anchor_grid(center[i] - eps, center[i] + eps, m) for i in range(prob.n)]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = [p for p in np.stack([g.ravel() for g in mesh], axis=1)
               if np.linalg.norm(p - center) <= eps]
    hits = [h for h in parallel_map(_ball_candidate, [(prob, t, p) for p in pts], workers=workers)
            if h is not None]
    if not hits:
        return None
    hits.sort(key=lambda h: (-h[0], tuple(np.atleast_1d(h[1]))))
    return hits[0]


def _sup_hp(prob, t_lo, t_hi):
    ts = search_grid(t_lo, t_hi, 64)
    if prob.n == 1:
        qs = search_grid(prob.q_box[0, 0], prob.q_box[0, 1], 64)
        return max(float(np.max(np.abs(prob.H_p_vec(float(t), qs)))) for t in ts)
    axes = [search_grid(prob.q_box[i, 0], prob.q_box[i, 1], 64) for i in range(prob.n)]
    mesh = np.meshgrid(*axes, indexing="ij")
    qs = np.stack([g.ravel() for g in mesh], axis=1)
    worst = 0.0
    for t in ts:
        for q in qs:
            worst = max(worst, float(np.max(np.abs(prob.H_p(float(t), q)))))
    return worst


def trace_singularities(
    prob: HJProblem,
    t0: float,
    x0,
    eps: float,
    t_end: float,
    ball_grid: int = 128,
    workers: Optional[int] = None,
) -> SingularTrace:
    """Propagate a singular point forward in eps-balls until t_end.

    The time step delta is chosen so that delta * sup|H_p| <= eps over the
    momentum box (64 x 64 sample); each step scans a ball grid for singular
    points, refines the grid once on failure, and otherwise terminates with
    the unresolved gap resolution.
    """
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    x0 = _as_point(x0, prob.n)
    if not (t0 < t_end <= prob.T):
        raise PreconditionError("need t0 < t_end <= T")
    seed_report = classify_point(prob, t0, x0)
    if seed_report.verdict != SINGULAR:
        raise PreconditionError(f"seed (t={t0}, x={x0}) is {seed_report.verdict}, not singular")

    sup_hp = _sup_hp(prob, t0, t_end)
    delta = (t_end - t0) / 8.0
    if sup_hp > 0.0:
        delta = min(eps / sup_hp, delta)

    steps = [TraceStep(t=t0, x=x0, ell=seed_report.ell)]
    t = t0
    terminated = {"kind": "reached_T"}
    while t < t_end - 1e-12:
        t_next = min(t + delta, t_end)
        hit = _search_ball(prob, t_next, steps[-1].x, eps, ball_grid, workers)
        if hit is None:
            hit = _search_ball(prob, t_next, steps[-1].x, eps, 2 * ball_grid, workers)
        if hit is None:
            terminated = {"kind": "gap", "resolution": 2.0 * eps / (2 * ball_grid)}
            break
        _, xv, ell = hit
        steps.append(TraceStep(t=t_next, x=_as_point(xv, prob.n), ell=ell))
        t = t_next
    return SingularTrace(
        seed=(t0, x0), steps=steps, epsilon=eps, delta=delta, terminated=terminated
    )


# ---------------------------------------------------------------------------
# reachable-gradient approachability

@dataclass
class ApproachabilityReport:
    """Search evidence that each reachable gradient is a gradient limit.

    ``matched[i]`` records whether some sampled regular point's
    finite-difference gradient came within ``match_radius`` of target i;
    a False is a resolution report, not a refutation. ``gradients`` holds
    every accepted (u_t, u_x) sample for external cluster checks.
    """

    targets: list
    matched: list
    distances: list
    gradients: list
    n_regular: int
    n_dropped: int
    samples: int
    radius: float
    match_radius: float


def _approach_sample(args):
    prob, t, xv, h = args
    try:
        report = classify_point(prob, t, xv)
        if report.verdict != REGULAR:
            return None
        ut, ux, ok = fd_gradient(prob, t, xv, h, check=True)
    except PreconditionError:
        return None
    if not ok:
        return ("dropped",)
    return (ut, ux)


def approachability(
    prob: HJProblem,
    t0: float,
    x0,
    samples: int = 10_000,
    radius: float = 1e-2,
    match_radius: float = 1e-2,
    seed: int = 0,
    workers: Optional[int] = None,
) -> ApproachabilityReport:
    """Sample the (t, x)-ball around the anchor for regular-point gradients.

    Finite-difference gradients whose h and h/2 estimates disagree by more
    than 1e-3 are dropped (the stencil straddles a kink). Distances to each
    reachable-gradient target are reported in the (u_t, u_x) metric.
    """
    x0 = _as_point(x0, prob.n)
    targets = reachable_gradients(prob, t0, x0)
    rng = np.random.default_rng(seed)
    dim = prob.n + 1
    dirs = rng.standard_normal((samples, dim))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    radii = radius * rng.random(samples) ** (1.0 / dim)
    tasks = []
    for d, r in zip(dirs, radii):
        t = t0 + r * d[0]
        xv = x0 + r * d[1:]
        if not (0.0 < t < prob.T):
            continue
        h = 1e-5 * (1.0 + float(np.linalg.norm(xv)))
        if t - h <= 0.0 or t + h >= prob.T:
            continue
        tasks.append((prob, t, xv, h))
    results = parallel_map(_approach_sample, tasks, workers=workers)

    gradients = []
    dropped = 0
    for res in results:
        if res is None:
            continue
        if res[0] == "dropped":
            dropped += 1
            continue
        gradients.append(res)

    matched, distances = [], []
    for pt, qt in targets:
        tvec = np.concatenate(([pt], np.atleast_1d(qt)))
        best = math.inf
        for ut, ux in gradients:
            g = np.concatenate(([ut], np.atleast_1d(ux)))
            best = min(best, float(np.linalg.norm(g - tvec)))
        distances.append(best)
        matched.append(best <= match_radius)
    return ApproachabilityReport(
        targets=targets,
        matched=matched,
        distances=distances,
        gradients=gradients,
        n_regular=len(gradients) + dropped,
        n_dropped=dropped,
        samples=len(tasks),
        radius=radius,
        match_radius=match_radius,
    )
