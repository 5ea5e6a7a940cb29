"""The Hopf-type value u(t,x), its maximizer sets, and the compactness probe.

u(t,x) is the maximum over the momentum box of

    phi(t, x, q) = <x, q> - sigma*(q) - int_0^t H(tau, q) dtau.

All maximizations are box-constrained: the user-declared ``q_box`` is the
compact surrogate for the growth condition that keeps maximizers bounded,
and ``boundary_contact`` on the returned set exposes when the box binds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from . import expr as ex
from .conjugate import ConvexData, _as_box, _as_point, conjugate_value
from .errors import (
    EvalDomainError,
    NumericFailure,
    PreconditionError,
    ProblemValidationError,
)
from .optimize import cluster_points, golden_max_vec, search_grid, ternary_max
from .quadrature import adaptive_simpson

__all__ = [
    "HJProblem",
    "MaximizerSet",
    "Separable",
    "A1Verdict",
    "CONVEX_IN_P",
    "CONCAVE_IN_P",
    "STRICTLY_CONCAVE_IN_P",
    "UNCLASSIFIED",
    "cumulative_H",
    "phi",
    "evaluate",
    "argmax_brute",
    "check_A1",
]

NEG_INF = -math.inf

QUAD_TOL = 1e-10
CLUSTER_RADIUS_FRAC = 1e-6
VALUE_TOL_FRAC = 1e-9
SEEDS_PER_AXIS = {1: 64, 2: 32, 3: 12}
TOP_SEEDS = 16

CONVEX_IN_P = "convex-in-p"
CONCAVE_IN_P = "concave-in-p"
STRICTLY_CONCAVE_IN_P = "strictly-concave-in-p"
UNCLASSIFIED = "unclassified"


@dataclass(frozen=True)
class Separable:
    """Structural split H(t,p) = g(t) h(p) + k(t) with sign-definite g."""

    g: ex.Expr
    h: ex.Expr
    k: ex.Expr

    @staticmethod
    def from_strings(g: str, h: str, k: str, n: int) -> "Separable":
        return Separable(ex.parse(g, n), ex.parse(h, n), ex.parse(k, n))


A2Class = Union[str, Separable]


def _momentum_bindings(n: int, t, q):
    b = {"t": t}
    for i in range(n):
        b[f"p{i + 1}"] = q[i]
        b[f"q{i + 1}"] = q[i]
    return b


def _spread(val, shape):
    """Expression results may collapse to scalars; restore the grid shape."""
    arr = np.asarray(val, dtype=float)
    if arr.shape == shape:
        return arr
    return np.broadcast_to(arr, shape).copy()


@dataclass
class HJProblem:
    """Problem data for u_t + H(t, Du) = 0, u(0,.) = sigma, on (0,T) x R^n.

    ``sigma_star`` optionally declares the conjugate in closed form (with an
    optional effective-domain box ``sigma_star_domain``); otherwise the
    conjugate is computed numerically from ``sigma``. The structural
    ``a2_class`` declaration is validated by sampling at construction.
    Instances are immutable after construction and safe to share; the
    quadrature memo tables behave as write-once caches.
    """

    n: int
    T: float
    H: Union[ex.Expr, str]
    sigma: ConvexData
    q_box: Sequence
    sigma_star: Union[ex.Expr, str, None] = None
    sigma_star_domain: Optional[Sequence] = None
    a2_class: A2Class = UNCLASSIFIED
    name: str = ""
    _gk_cache: dict = field(default_factory=dict, repr=False, compare=False)
    _cum_cache: dict = field(default_factory=dict, repr=False, compare=False)
    _cum_hp_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise ProblemValidationError("n must be a positive integer")
        if not (self.T > 0):
            raise ProblemValidationError("T must be positive")
        self.q_box = _as_box(self.q_box)
        if self.q_box.shape[0] != self.n:
            raise ProblemValidationError("q_box dimension mismatch")
        if np.any(self.q_box[:, 1] <= self.q_box[:, 0]):
            raise ProblemValidationError("q_box must have positive volume")
        if isinstance(self.H, str):
            self.H = ex.parse(self.H, self.n)
        if isinstance(self.sigma_star, str):
            self.sigma_star = ex.parse(self.sigma_star, self.n)
        if self.sigma_star_domain is not None:
            self.sigma_star_domain = _as_box(self.sigma_star_domain)
        if self.sigma.n != self.n:
            raise ProblemValidationError("sigma dimension mismatch")
        self._t_free = "t" not in ex.variables(self.H)
        self._validate_a2()

    # -- structural validation ------------------------------------------------

    def _validate_a2(self):
        a2 = self.a2_class
        if a2 == UNCLASSIFIED:
            return
        rng = np.random.default_rng(0)
        lo, hi = self.q_box[:, 0], self.q_box[:, 1]
        if isinstance(a2, Separable):
            ts = rng.uniform(0.0, self.T, 1000)
            qs = lo + (hi - lo) * rng.random((1000, self.n))
            worst = 0.0
            for t, q in zip(ts, qs):
                b = _momentum_bindings(self.n, float(t), q)
                got = ex.evaluate(self.H, b)
                want = ex.evaluate(a2.g, b) * ex.evaluate(a2.h, b) + ex.evaluate(a2.k, b)
                worst = max(worst, abs(got - want))
            if worst > 1e-9:
                raise ProblemValidationError(
                    f"separable split misses H by {worst:.3e} on sampled points"
                )
            tgrid = self.T * (np.arange(1, 1001)) / 1001.0
            gvals = np.array([ex.evaluate(a2.g, {"t": float(t)}) for t in tgrid])
            if gvals.max() > 0 and gvals.min() < 0:
                raise ProblemValidationError("separable g(t) changes sign on (0,T)")
            return
        if a2 not in (CONVEX_IN_P, CONCAVE_IN_P, STRICTLY_CONCAVE_IN_P):
            raise ProblemValidationError(f"unknown a2_class {a2!r}")
        sign = 1.0 if a2 == CONVEX_IN_P else -1.0
        for _ in range(1000):
            t = float(rng.uniform(0.0, self.T))
            a = lo + (hi - lo) * rng.random(self.n)
            b = lo + (hi - lo) * rng.random(self.n)
            fa = self.H_value(t, a)
            fb = self.H_value(t, b)
            fm = self.H_value(t, 0.5 * (a + b))
            if sign * (fm - 0.5 * (fa + fb)) > 1e-9:
                kind = "convexity" if sign > 0 else "concavity"
                raise ProblemValidationError(f"sampled midpoint {kind} of H(t,.) failed")

    # -- basic geometry --------------------------------------------------------

    @property
    def q_diam(self) -> float:
        return float(np.linalg.norm(self.q_box[:, 1] - self.q_box[:, 0]))

    @property
    def cluster_radius(self) -> float:
        return CLUSTER_RADIUS_FRAC * self.q_diam

    @property
    def match_tolerance(self) -> float:
        return 1e-5 * self.q_diam

    def check_time(self, t: float):
        if not (0.0 <= t <= self.T):
            raise PreconditionError(f"t={t} outside [0, {self.T}]")

    # -- Hamiltonian evaluation -------------------------------------------------

    def H_value(self, t: float, q) -> float:
        return ex.evaluate(self.H, _momentum_bindings(self.n, t, _as_point(q, self.n)))

    def H_value_vec(self, t: float, q_arr: np.ndarray) -> np.ndarray:
        out = ex.evaluate(self.H, _momentum_bindings(1, t, [np.asarray(q_arr, dtype=float)]))
        return _spread(out, np.shape(q_arr))

    def H_p(self, t: float, q) -> np.ndarray:
        """Momentum gradient of H; momentum may be spelled p_i or q_i in H."""
        q = _as_point(q, self.n)
        b = _momentum_bindings(self.n, t, q)
        return np.array(
            [
                ex.directional_derivative(self.H, {f"p{i + 1}": 1.0, f"q{i + 1}": 1.0}, b)
                for i in range(self.n)
            ]
        )

    def H_p_vec(self, t: float, q_arr: np.ndarray) -> np.ndarray:
        b = _momentum_bindings(1, t, [np.asarray(q_arr, dtype=float)])
        out = ex.directional_derivative(self.H, {"p1": 1.0, "q1": 1.0}, b)
        return _spread(out, np.shape(q_arr))

    # -- conjugate of the initial data -------------------------------------------

    def sigma_star_value(self, q) -> float:
        """sigma*(q); +inf encodes escape from the effective domain."""
        q = _as_point(q, self.n)
        if self.sigma_star is not None:
            if self.sigma_star_domain is not None:
                dom = self.sigma_star_domain
                if np.any(q < dom[:, 0]) or np.any(q > dom[:, 1]):
                    return math.inf
            try:
                return ex.evaluate(
                    self.sigma_star, _momentum_bindings(self.n, 0.0, q)
                )
            except EvalDomainError:
                return math.inf
        return conjugate_value(self.sigma, q)

    def sigma_star_vec(self, q_arr: np.ndarray) -> np.ndarray:
        q_arr = np.asarray(q_arr, dtype=float)
        if self.sigma_star is not None and self.sigma_star_domain is None:
            try:
                return _spread(
                    ex.evaluate(self.sigma_star, _momentum_bindings(1, 0.0, [q_arr])),
                    q_arr.shape,
                )
            except EvalDomainError:
                out = np.empty(q_arr.shape)
                for i in range(q_arr.size):
                    out[i] = self.sigma_star_value(q_arr[i])
                return out
        out = np.full(q_arr.shape, math.inf)
        if self.sigma_star is not None:
            dom = self.sigma_star_domain
            mask = (q_arr >= dom[0, 0]) & (q_arr <= dom[0, 1])
            if np.any(mask):
                qm = q_arr[mask]
                try:
                    vals = ex.evaluate(self.sigma_star, _momentum_bindings(1, 0.0, [qm]))
                    out[mask] = _spread(vals, qm.shape)
                except EvalDomainError:
                    for i in np.nonzero(mask)[0]:
                        out[i] = self.sigma_star_value(q_arr[i])
            return out
        for i in range(q_arr.size):
            out[i] = conjugate_value(self.sigma, q_arr[i])
        return out

    # -- accumulated Hamiltonian --------------------------------------------------

    def _gk(self, t: float):
        hit = self._gk_cache.get(t)
        if hit is None:
            a2 = self.a2_class
            g = adaptive_simpson(lambda s: ex.evaluate(a2.g, {"t": s}), 0.0, t, 1e-12)
            k = adaptive_simpson(lambda s: ex.evaluate(a2.k, {"t": s}), 0.0, t, 1e-12)
            hit = (g, k)
            self._gk_cache[t] = hit
        return hit

    def cumulative(self, q, t: float) -> float:
        """int_0^t H(tau, q) dtau to absolute tolerance 1e-10, memoized."""
        q = _as_point(q, self.n)
        if isinstance(self.a2_class, Separable):
            g, k = self._gk(t)
            return g * ex.evaluate(self.a2_class.h, _momentum_bindings(self.n, 0.0, q)) + k
        if self._t_free:
            return t * self.H_value(0.0, q)
        key = (tuple(q.tolist()), t)
        hit = self._cum_cache.get(key)
        if hit is None:
            hit = adaptive_simpson(lambda s: self.H_value(s, q), 0.0, t, QUAD_TOL)
            self._cum_cache[key] = hit
        return hit

    def cumulative_vec(self, t: float, q_arr: np.ndarray) -> np.ndarray:
        if isinstance(self.a2_class, Separable):
            g, k = self._gk(t)
            h = ex.evaluate(self.a2_class.h, _momentum_bindings(1, 0.0, [np.asarray(q_arr, dtype=float)]))
            return g * _spread(h, np.shape(q_arr)) + k
        if self._t_free:
            return t * self.H_value_vec(0.0, q_arr)
        return np.array([self.cumulative(v, t) for v in np.asarray(q_arr, dtype=float)])

    def cumulative_Hp(self, p0, t: float) -> np.ndarray:
        """int_0^t H_p(tau, p0) dtau per axis, same engine and tolerance."""
        p0 = _as_point(p0, self.n)
        if isinstance(self.a2_class, Separable):
            g, _ = self._gk(t)
            b = _momentum_bindings(self.n, 0.0, p0)
            hp = np.array(
                [
                    ex.directional_derivative(
                        self.a2_class.h, {f"p{i + 1}": 1.0, f"q{i + 1}": 1.0}, b
                    )
                    for i in range(self.n)
                ]
            )
            return g * hp
        if self._t_free:
            return t * self.H_p(0.0, p0)
        key = (tuple(p0.tolist()), t)
        hit = self._cum_hp_cache.get(key)
        if hit is None:
            hit = np.array(
                [
                    adaptive_simpson(lambda s: float(self.H_p(s, p0)[i]), 0.0, t, QUAD_TOL)
                    for i in range(self.n)
                ]
            )
            self._cum_hp_cache[key] = hit
        return hit

    def cumulative_Hp_vec(self, t: float, p_arr: np.ndarray) -> np.ndarray:
        """Vectorized cumulative_Hp for n = 1."""
        if isinstance(self.a2_class, Separable):
            g, _ = self._gk(t)
            b = _momentum_bindings(1, 0.0, [np.asarray(p_arr, dtype=float)])
            hp = ex.directional_derivative(self.a2_class.h, {"p1": 1.0, "q1": 1.0}, b)
            return g * _spread(hp, np.shape(p_arr))
        if self._t_free:
            return t * self.H_p_vec(0.0, p_arr)
        return np.array([float(self.cumulative_Hp(v, t)[0]) for v in np.asarray(p_arr, dtype=float)])


# ---------------------------------------------------------------------------
# operations

@dataclass
class MaximizerSet:
    """Clustered global maximizers of phi(t,x,.) over the momentum box.

    ``points`` holds one representative per near-maximal cluster (pairwise at
    least ``cluster_radius`` apart, values within ``value_tolerance`` of
    ``value``). ``second_gap`` is the value gap to the best excluded cluster,
    if any; ``boundary_contact`` flags representatives pressed against the
    box walls.
    """

    value: float
    points: list
    point_values: list
    cluster_radius: float
    value_tolerance: float
    boundary_contact: bool
    second_gap: Optional[float] = None

    @property
    def is_singleton(self) -> bool:
        return len(self.points) == 1


def cumulative_H(prob: HJProblem, q, t: float) -> float:
    """Accumulated Hamiltonian int_0^t H(tau, q) dtau."""
    prob.check_time(t)
    return prob.cumulative(q, t)


def phi(prob: HJProblem, t: float, x, q) -> float:
    """<x,q> - sigma*(q) - int_0^t H(tau,q) dtau; -inf when sigma*(q) = +inf."""
    prob.check_time(t)
    x = _as_point(x, prob.n)
    q = _as_point(q, prob.n)
    ss = prob.sigma_star_value(q)
    if math.isinf(ss):
        return NEG_INF
    return float(np.dot(x, q)) - ss - prob.cumulative(q, t)


def _phi_vec(prob: HJProblem, t: float, x: float, q_arr: np.ndarray) -> np.ndarray:
    q_arr = np.asarray(q_arr, dtype=float)
    ss = prob.sigma_star_vec(q_arr)
    m = np.isfinite(ss)
    if m.all():
        return x * q_arr - ss - prob.cumulative_vec(t, q_arr)
    out = np.full(q_arr.shape, NEG_INF)
    if np.any(m):
        qm = q_arr[m]
        out[m] = x * qm - ss[m] - prob.cumulative_vec(t, qm)
    return out


def _wall_distance(prob: HJProblem, p: np.ndarray) -> float:
    lo, hi = prob.q_box[:, 0], prob.q_box[:, 1]
    return float(min(np.min(p - lo), np.min(hi - p)))


def _finish(prob, reps):
    if not reps:
        raise NumericFailure("phi is -inf on the whole momentum box")
    best = reps[0][1]
    vtol = VALUE_TOL_FRAC * (1.0 + abs(best))
    ell = [(p, v) for p, v in reps if v >= best - vtol]
    second_gap = best - reps[len(ell)][1] if len(reps) > len(ell) else None
    radius = prob.cluster_radius
    contact = any(_wall_distance(prob, p) <= radius for p, _ in ell)
    return MaximizerSet(
        value=best,
        points=[p for p, _ in ell],
        point_values=[v for _, v in ell],
        cluster_radius=radius,
        value_tolerance=vtol,
        boundary_contact=contact,
        second_gap=second_gap,
    )


def _evaluate_1d(prob: HJProblem, t: float, x: float) -> MaximizerSet:
    lo, hi = prob.q_box[0]
    seeds = search_grid(lo, hi, SEEDS_PER_AXIS[1])
    vals = _phi_vec(prob, t, x, seeds)
    if not np.any(np.isfinite(vals)):
        raise NumericFailure("phi is -inf on the whole momentum box")

    finite = np.isfinite(vals)
    order = np.argsort(-np.where(finite, vals, -np.inf), kind="stable")
    cand = set(int(i) for i in order[:TOP_SEEDS] if finite[i])
    # every discrete local max gets refined too: near-ties must not be lost
    m = len(seeds)
    for i in range(m):
        if not finite[i]:
            continue
        left_ok = i == 0 or vals[i] >= vals[i - 1]
        right_ok = i == m - 1 or vals[i] >= vals[i + 1]
        if left_ok and right_ok:
            cand.add(i)
    cand = sorted(cand)
    a = np.array([seeds[i - 1] if i > 0 else lo for i in cand])
    b = np.array([seeds[i + 1] if i < m - 1 else hi for i in cand])

    def f_vec(qs):
        return _phi_vec(prob, t, x, qs)

    raw_pts, raw_fv = golden_max_vec(f_vec, a, b, iters=60)
    # a run that collapsed onto an interior-seed bracket edge was chasing a
    # maximum owned by the neighbouring (overlapping) bracket; keeping it
    # would fabricate a phantom near-tie cluster one spacing away
    pts, fv = [], []
    for j, i in enumerate(cand):
        edge_tol = 1e-7 * (b[j] - a[j])
        if raw_pts[j] - a[j] <= edge_tol and i >= 2:
            continue
        if b[j] - raw_pts[j] <= edge_tol and i <= m - 3:
            continue
        pts.append(raw_pts[j])
        fv.append(float(raw_fv[j]))
    # keep a raw seed only when the grid genuinely beat every refinement
    best_refined = max(fv) if fv else NEG_INF
    for i in cand:
        if vals[i] > best_refined:
            pts.append(seeds[i])
            fv.append(float(vals[i]))
    reps = cluster_points(pts, fv, prob.cluster_radius)
    return _finish(prob, reps)


def _evaluate_nd(prob: HJProblem, t: float, x: np.ndarray) -> MaximizerSet:
    from scipy.optimize import minimize

    per_axis = SEEDS_PER_AXIS.get(prob.n, 8)
    axes = [search_grid(prob.q_box[i, 0], prob.q_box[i, 1], per_axis) for i in range(prob.n)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in mesh], axis=1)
    vals = np.array([phi(prob, t, x, p) for p in pts])
    if not np.any(np.isfinite(vals)):
        raise NumericFailure("phi is -inf on the whole momentum box")
    order = np.argsort(-np.where(np.isfinite(vals), vals, -np.inf), kind="stable")
    bounds = [tuple(b) for b in prob.q_box]

    refined, fvals = [], []
    for i in order[:TOP_SEEDS]:
        if not np.isfinite(vals[i]):
            continue

        def neg(q):
            v = phi(prob, t, x, q)
            return -v if np.isfinite(v) else 1e300

        res = minimize(neg, pts[i], method="L-BFGS-B", bounds=bounds,
                       options={"ftol": 1e-15, "gtol": 1e-12})
        if np.isfinite(res.fun) and -res.fun >= vals[i]:
            refined.append(np.asarray(res.x, dtype=float))
            fvals.append(float(-res.fun))
        else:
            refined.append(pts[i])
            fvals.append(float(vals[i]))
    reps = cluster_points(refined, fvals, prob.cluster_radius)
    return _finish(prob, reps)


def evaluate(prob: HJProblem, t: float, x) -> MaximizerSet:
    """Hopf-type value and maximizer set at (t, x).

    Multistart box-constrained maximization of phi(t,x,.): a uniform seed
    grid, golden-section (n = 1) or projected quasi-Newton (n > 1) refinement
    of the leading seeds, then clustering. Any cluster within the value
    tolerance of the best joins the set; over-inclusion is deliberate so
    singularity detection errs toward flagging.
    """
    prob.check_time(t)
    x = _as_point(x, prob.n)
    if prob.n == 1:
        return _evaluate_1d(prob, t, float(x[0]))
    return _evaluate_nd(prob, t, x)


def argmax_brute(prob: HJProblem, t: float, x, grid_per_axis: int) -> MaximizerSet:
    """Dense-grid oracle for :func:`evaluate`.

    Exhaustive scan of the momentum box; for n = 1 each discrete local max is
    sharpened by a plain ternary search inside its bracketing cells (a route
    deliberately independent of the golden-section multistart). n >= 2 stays
    raw-grid, best effort.
    """
    if grid_per_axis < 2:
        raise PreconditionError("grid_per_axis must be at least 2")
    prob.check_time(t)
    x = _as_point(x, prob.n)

    if prob.n == 1:
        lo, hi = prob.q_box[0]
        grid = search_grid(lo, hi, grid_per_axis)
        vals = _phi_vec(prob, t, float(x[0]), grid)
        if not np.any(np.isfinite(vals)):
            raise NumericFailure("phi is -inf on the whole momentum box")
        m = len(grid)
        cand_pts, cand_vals = [], []

        def f(q):
            return phi(prob, t, x, q)

        for i in range(m):
            if not np.isfinite(vals[i]):
                continue
            left_ok = i == 0 or vals[i] >= vals[i - 1]
            right_ok = i == m - 1 or vals[i] >= vals[i + 1]
            if not (left_ok and right_ok):
                continue
            a = grid[i - 1] if i > 0 else lo
            b = grid[i + 1] if i < m - 1 else hi
            qp, fp = ternary_max(f, a, b, iters=120)
            if fp >= vals[i]:
                cand_pts.append(qp)
                cand_vals.append(fp)
            else:
                cand_pts.append(grid[i])
                cand_vals.append(float(vals[i]))
        reps = cluster_points(cand_pts, cand_vals, prob.cluster_radius)
        return _finish(prob, reps)

    axes = [search_grid(prob.q_box[i, 0], prob.q_box[i, 1], grid_per_axis) for i in range(prob.n)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in mesh], axis=1)
    vals = np.array([phi(prob, t, x, p) for p in pts])
    if not np.any(np.isfinite(vals)):
        raise NumericFailure("phi is -inf on the whole momentum box")
    best = float(np.max(vals))
    vtol = VALUE_TOL_FRAC * (1.0 + abs(best))
    keep = vals >= best - vtol
    reps = cluster_points(list(pts[keep]), list(vals[keep]), prob.cluster_radius)
    return _finish(prob, reps)


@dataclass
class A1Verdict:
    """Outcome of the sampled compactness probe around an anchor point."""

    kind: str  # "pass" | "fail" | "inconclusive"
    witness: Optional[tuple] = None  # (t, x, MaximizerSet) for a failure
    min_boundary_distance: float = math.inf
    samples: int = 0


def check_A1(prob: HJProblem, t0: float, x0, r: float, samples: int, seed: int = 0) -> A1Verdict:
    """Probe whether maximizers stay interior near (t0, x0).

    Draws (t, x) from the l1-ball of radius r (t clipped to [0, T)), and
    fails with a witness as soon as a maximizer set presses against the
    momentum box. This is a sampled surrogate, never a proof: "pass" means
    every sampled maximizer kept at least 1% of the box diameter clear.
    """
    if r <= 0:
        raise PreconditionError("r must be positive")
    x0 = _as_point(x0, prob.n)
    rng = np.random.default_rng(seed)
    min_dist = math.inf
    drawn = 0
    guard = 0
    while drawn < samples:
        guard += 1
        if guard > 1000 * samples + 1000:
            raise NumericFailure("could not sample the l1-ball inside [0, T)")
        u = rng.uniform(-r, r, prob.n + 1)
        if np.sum(np.abs(u)) >= r:
            continue
        t = t0 + u[0]
        if not (0.0 <= t < prob.T):
            continue
        drawn += 1
        ms = evaluate(prob, float(t), x0 + u[1:])
        if ms.boundary_contact:
            return A1Verdict(
                kind="fail",
                witness=(float(t), x0 + u[1:], ms),
                min_boundary_distance=0.0,
                samples=drawn,
            )
        for p in ms.points:
            min_dist = min(min_dist, _wall_distance(prob, p))
    kind = "pass" if min_dist > 0.01 * prob.q_diam else "inconclusive"
    return A1Verdict(kind=kind, min_boundary_distance=min_dist, samples=drawn)
