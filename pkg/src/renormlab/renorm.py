"""Dynamics of decomposed unimodal maps and their renormalization.

A decomposed unimodal map is a pair (decomposition, peak value): the map
itself is f = Phi o q_t, with Phi the composed decomposition and q_t the
canonical fold.  This module computes the dynamical data of such a map --
the fixed point p right of the critical point, the side interval [p, b]
with f(b) = -p, the renormalizability test, the dynamical geometry obtained
by pulling the side and central intervals back through the decomposition,
and the new peak value after rescaling the fold.  One renormalization step
couples the geometric operator with that new peak value; on top of it sit
the peak-value window scan, the invariant-peak solver and damped outer
iterations producing truncation fixed points and periodic orbits of the
renormalization operator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _cheb, timetree
from .decompspace import (
    Decomposition,
    Geometry,
    compose_all,
    decomposition_distance,
    geometric_renormalize,
    geometry_blend,
    geometry_distance,
    identity_decomposition,
    pullback_intervals,
    pure_decomposition,
)
from .diffspace import FoldingMap, NonlinearityProfile, OrientedInterval, identity_profile
from .errors import (
    ConfigError,
    DepthMismatch,
    DomainError,
    NoFixedPoint,
    NonConvergence,
    NoSideInterval,
    NoWindow,
)

_BISECT_STEPS = 48


class DecomposedMap:
    """A unimodal map presented as a decomposition plus a fold parameter.

    The observed map is f = Phi o q_t where Phi composes the decomposition
    in descending time order.  It satisfies f(+-1) = -1 with its maximum
    f(0) = Phi(2t - 1) at the critical point.  The composition is built
    lazily and kept; pass ``observed`` to reuse one already at hand.
    """

    def __init__(self, decomposition: Decomposition, t: float, alpha: float,
                 observed: NonlinearityProfile | None = None):
        self.fold = FoldingMap(float(alpha), float(t))
        self.decomposition = decomposition
        self.t = float(t)
        self.alpha = float(alpha)
        self._observed = observed

    @property
    def observed(self) -> NonlinearityProfile:
        if self._observed is None:
            self._observed = compose_all(self.decomposition)
        return self._observed

    def __repr__(self):
        return (f"DecomposedMap(alpha={self.alpha}, t={self.t:.6f}, "
                f"depth={self.decomposition.depth})")


def observed_eval(f: DecomposedMap, x):
    """The observed unimodal map: Phi(q_t(x)) for scalar or array x."""
    return f.observed.evaluate(f.fold.evaluate(x))


def _side_structure(obs: NonlinearityProfile, alpha: float, t_values: np.ndarray):
    """Peak image, map fixed point and side point for an array of fold levels.

    For each t: f0 = Phi(2t-1) is the peak image; p solves f(p) = p on (0,1)
    and b solves f(b) = -p on (p,1), both by lockstep bisection (f - id and
    f + p are strictly decreasing there, so the brackets never break).  The
    p and b columns are meaningless where f0 <= 0; callers mask on f0.
    """
    t = np.atleast_1d(np.asarray(t_values, dtype=float))
    f0 = obs._eval(2.0 * t - 1.0)

    def f_at(x):
        return obs._eval(-2.0 * t * np.exp(alpha * np.log(x)) + (2.0 * t - 1.0))

    lo, hi = np.zeros_like(t), np.ones_like(t)
    for _ in range(_BISECT_STEPS):
        mid = 0.5 * (lo + hi)
        above = f_at(mid) - mid > 0.0
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    p = 0.5 * (lo + hi)

    lo, hi = p.copy(), np.ones_like(t)
    for _ in range(_BISECT_STEPS):
        mid = 0.5 * (lo + hi)
        above = f_at(mid) + p > 0.0
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    b = 0.5 * (lo + hi)
    return f0, p, b


def _checked_structure(f: DecomposedMap):
    f0, p, b = _side_structure(f.observed, f.alpha, np.array([f.t]))
    if not f0[0] > 0.0:
        raise NoFixedPoint(
            f"peak image {f0[0]:.6f} does not rise above the diagonal (t={f.t:.6f})")
    return float(f0[0]), float(p[0]), float(b[0])


def find_fixed_point_p(f: DecomposedMap) -> float:
    """The fixed point p in (0,1) of the observed map, by bisection."""
    return _checked_structure(f)[1]


def side_interval(f: DecomposedMap, p: float):
    """(b, S1, S2): b solves f(b) = -p; S1 = [p,b] flag +, S2 = [-p,p] flag -."""
    if not 0.0 < p < 1.0:
        raise NoSideInterval(f"fixed point {p} leaves no room for a side interval")
    obs, alpha, t = f.observed, f.alpha, f.t
    lo, hi = p, 1.0
    for _ in range(_BISECT_STEPS + 12):
        mid = 0.5 * (lo + hi)
        val = float(obs._eval(-2.0 * t * math.exp(alpha * math.log(mid)) + (2.0 * t - 1.0)))
        if val + p > 0.0:
            lo = mid
        else:
            hi = mid
    b = 0.5 * (lo + hi)
    return b, OrientedInterval(p, b, "+"), OrientedInterval(-p, p, "-")


def is_renormalizable(f: DecomposedMap) -> bool:
    """Whether the peak image lands in the side interval [p, b]."""
    f0, p, b = _checked_structure(f)
    return bool(p <= f0 <= b)


def _rho_from(geom: Geometry, f: DecomposedMap) -> float:
    # innermost recorded s1 pullback = full preimage of S1 under the composition
    inner = geom.s1["1" * f.decomposition.depth]
    rho = (f.fold.peak - inner.lo) / (inner.hi - inner.lo)
    if not -1e-9 <= rho <= 1.0 + 1e-9:
        raise DomainError(f"rescaled peak value {rho:.6f} falls outside [0, 1]")
    return min(max(rho, 0.0), 1.0)


def peak_value_rho(f: DecomposedMap) -> float:
    """The fold parameter of the rescaled first return map.

    With [l, r] the full preimage of the side interval under the composed
    decomposition, rho = (q_t(0) - l)/(r - l); the identity q_t(p) = l makes
    this equal to 2*t*p^alpha / (r - l).
    """
    f0, p, b = _checked_structure(f)
    ends = f.observed.inverse(np.array([p, b]))
    rho = (f.fold.peak - float(ends[0])) / (float(ends[1]) - float(ends[0]))
    if not -1e-9 <= rho <= 1.0 + 1e-9:
        raise DomainError(f"rescaled peak value {rho:.6f} falls outside [0, 1]")
    return min(max(rho, 0.0), 1.0)


def dynamical_geometry(f: DecomposedMap) -> Geometry:
    """Pull the side and central intervals back through the decomposition."""
    f0, p, b = _checked_structure(f)
    return pullback_intervals(
        f.decomposition,
        OrientedInterval(p, b, "+"),
        OrientedInterval(-p, p, "-"),
    )


@dataclass(frozen=True)
class RenormStep:
    """One renormalization step: the new map plus the data that produced it."""

    renormalized: DecomposedMap
    geometry_used: Geometry
    p: float
    b: float
    rho: float


def renormalize(f: DecomposedMap, *, truncate: bool = True) -> RenormStep:
    """One step of the dynamical renormalization operator.

    The decomposition is renormalized geometrically with the dynamical
    geometry of f; the fold is rescaled to parameter rho.  With ``truncate``
    the new decomposition keeps the input depth (the deepest level is
    dropped); without it the exact one-level-deeper image is returned, which
    reproduces the classical first return map to the central interval.
    """
    f0, p, b = _checked_structure(f)
    if not f0 <= b:
        raise DomainError(
            f"map is not renormalizable: peak image {f0:.6f} overshoots the side point {b:.6f}")
    geom = pullback_intervals(
        f.decomposition,
        OrientedInterval(p, b, "+"),
        OrientedInterval(-p, p, "-"),
    )
    rho = _rho_from(geom, f)
    new_dec = geometric_renormalize(geom, f.alpha, f.decomposition, truncate=truncate)
    return RenormStep(DecomposedMap(new_dec, rho, f.alpha), geom, p, b, rho)


def classical_first_return_oracle(f: DecomposedMap, x):
    """h^{-1} o f o f o h with h(x) = -p*x: plain evaluation, no eta machinery.

    Reference implementation of the rescaled first return map to [-p, p];
    the renormalize() output must match it pointwise before truncation.
    """
    p = find_fixed_point_p(f)
    xv = np.asarray(x, dtype=float)
    return -observed_eval(f, observed_eval(f, -p * xv)) / p


@dataclass(frozen=True)
class WindowResult:
    """Renormalizable peak-value range(s) of a diffeomorphism.

    t_min/t_max bound the first (lowest) window; ``windows`` lists every
    connected window found by the scan, so more than one entry means the
    renormalizable set is not a single strip.
    """

    t_min: float
    t_max: float
    windows: tuple

    @property
    def multiple(self) -> bool:
        return len(self.windows) > 1

    def __iter__(self):
        return iter((self.t_min, self.t_max))


def _scan_grid(scan_step: float) -> np.ndarray:
    return 0.5 + scan_step * np.arange(1, int(round(0.5 / scan_step)))


def _bisect_predicate(pred, outside: float, inside: float, tol: float) -> float:
    """Shrink [outside, inside] keeping pred False/True; return the True side."""
    while abs(inside - outside) > tol:
        mid = 0.5 * (outside + inside)
        if pred(mid):
            inside = mid
        else:
            outside = mid
    return inside


def _illinois(fun, ta: float, tb: float, fa: float, fb: float, tol: float) -> float:
    """Root of fun on a sign-change bracket by false position, Illinois cut."""
    if fa == 0.0:
        return ta
    if fb == 0.0:
        return tb
    for _ in range(80):
        tm = tb - fb * (tb - ta) / (fb - fa)
        lo, hi = (ta, tb) if ta < tb else (tb, ta)
        if not lo < tm < hi:
            tm = 0.5 * (ta + tb)
        fm = fun(tm)
        if fm == 0.0 or abs(tb - ta) <= tol:
            return tm
        if (fm < 0.0) == (fb < 0.0):
            fa *= 0.5
        else:
            ta, fa = tb, fb
        tb, fb = tm, fm
    return tb


def renormalization_window(phi: Decomposition, alpha: float, *,
                           scan_step: float = 1e-3,
                           refine_tol: float = 1e-10) -> WindowResult:
    """Scan (1/2, 1) for renormalizable peak values and refine the edges.

    The scan marks every grid level whose map has its peak image inside the
    side interval; connected runs become windows, each edge sharpened by
    predicate bisection to refine_tol.  All windows are reported; the first
    one fills t_min/t_max.
    """
    obs = compose_all(phi)
    ts = _scan_grid(scan_step)
    f0, p, b = _side_structure(obs, alpha, ts)
    mask = (f0 > 0.0) & (f0 <= b)
    if not mask.any():
        raise NoWindow(
            f"no renormalizable peak value in (0.5, 1) at scan step {scan_step:g}")

    def renormalizable_at(t):
        f0s, ps, bs = _side_structure(obs, alpha, np.array([t]))
        return bool(f0s[0] > 0.0 and f0s[0] <= bs[0])

    idx = np.flatnonzero(mask)
    runs = []
    start = prev = int(idx[0])
    for i in idx[1:]:
        i = int(i)
        if i != prev + 1:
            runs.append((start, prev))
            start = i
        prev = i
    runs.append((start, prev))

    windows = []
    for i0, i1 in runs:
        lo_out = 0.5 if i0 == 0 else float(ts[i0 - 1])
        hi_out = 1.0 if i1 == len(ts) - 1 else float(ts[i1 + 1])
        lo = _bisect_predicate(renormalizable_at, lo_out, float(ts[i0]), refine_tol)
        hi = _bisect_predicate(renormalizable_at, hi_out, float(ts[i1]), refine_tol)
        windows.append((lo, hi))
    return WindowResult(windows[0][0], windows[0][1], tuple(windows))


def _solve_peak(obs: NonlinearityProfile, alpha: float, *,
                tol: float = 1e-12, scan_step: float = 2e-3) -> float:
    """Invariant fold level: t with rho(t) = t, bracketed on the scan grid."""
    ts = _scan_grid(scan_step)
    f0, p, b = _side_structure(obs, alpha, ts)
    mask = (f0 > 0.0) & (f0 <= b)
    if not mask.any():
        raise NoWindow(
            f"no renormalizable peak value in (0.5, 1) at scan step {scan_step:g}")
    idx = np.flatnonzero(mask)
    ends = obs.inverse(np.concatenate([p[idx], b[idx]]))
    l, r = ends[:idx.size], ends[idx.size:]
    gap = (2.0 * ts[idx] - 1.0 - l) / (r - l) - ts[idx]

    def gap_at(t):
        f0s, ps, bs = _side_structure(obs, alpha, np.array([t]))
        e = obs.inverse(np.array([float(ps[0]), float(bs[0])]))
        return (2.0 * t - 1.0 - float(e[0])) / (float(e[1]) - float(e[0])) - t

    adjacent = (np.diff(idx) == 1) & (gap[:-1] * gap[1:] <= 0.0)
    cross = np.flatnonzero(adjacent)
    if cross.size == 0:
        raise NoFixedPoint("the rescaled peak value never crosses the diagonal in the window")
    i = int(cross[0])
    return _illinois(gap_at, float(ts[idx[i]]), float(ts[idx[i] + 1]),
                     float(gap[i]), float(gap[i + 1]), tol)


def solve_peak_value(phi: Decomposition, alpha: float, *, tol: float = 1e-12) -> float:
    """The peak value left invariant by renormalization over phi's window."""
    return _solve_peak(compose_all(phi), alpha, tol=tol)


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for the outer fixed-point and orbit solvers."""

    alpha: float
    depth: int = 8
    grid: int = 64
    tol: float = 1e-8
    max_iter: int = 200
    damping: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if not self.alpha > 1.0:
            raise ConfigError("alpha must exceed 1")
        if self.depth < 1:
            raise ConfigError("depth must be at least 1")
        if self.grid < 16:
            raise ConfigError("grid must be at least 16")
        if not self.tol > 0.0:
            raise ConfigError("tol must be positive")
        if self.max_iter < 1:
            raise ConfigError("max_iter must be at least 1")
        if not 0.0 < self.damping <= 1.0:
            raise ConfigError("damping must lie in (0, 1]")


@dataclass
class FixedPointReport:
    """A converged truncation fixed point (or one element of a cycle).

    residual_geometry is the distance between the dynamical geometry of the
    certified map and the geometry it was built from; residual_peak is the
    defect |rho - t| of the peak-value invariance.  delta_estimate is filled
    in by the spectral layer when requested; coincident marks cycle elements
    that collapse onto a fixed point.
    """

    alpha: float
    depth: int
    grid: int
    t_star: float
    geometry_star: Geometry
    pure_star: Decomposition
    residual_geometry: float
    residual_peak: float
    iterations: int
    delta_estimate: float | None = None
    coincident: bool | None = None

    def to_dict(self) -> dict:
        data = {
            "alpha": float(self.alpha),
            "depth": int(self.depth),
            "grid": int(self.grid),
            "t_star": float(self.t_star),
            "residual_geometry": float(self.residual_geometry),
            "residual_peak": float(self.residual_peak),
            "iterations": int(self.iterations),
            "geometry": self.geometry_star.to_dict(),
            "decomposition": self.pure_star.to_dict(self.alpha),
        }
        if self.delta_estimate is not None:
            data["delta_estimate"] = float(self.delta_estimate)
        if self.coincident is not None:
            data["coincident"] = bool(self.coincident)
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "FixedPointReport":
        return cls(
            alpha=float(data["alpha"]),
            depth=int(data["depth"]),
            grid=int(data["grid"]),
            t_star=float(data["t_star"]),
            geometry_star=Geometry.from_dict(data["geometry"]),
            pure_star=Decomposition.from_dict(data["decomposition"]),
            residual_geometry=float(data["residual_geometry"]),
            residual_peak=float(data["residual_peak"]),
            iterations=int(data["iterations"]),
            delta_estimate=(None if data.get("delta_estimate") is None
                            else float(data["delta_estimate"])),
            coincident=data.get("coincident"),
        )


def _pure_tol(config: SolverConfig) -> float:
    return min(1e-10, 0.1 * config.tol)


def _seed_geometry(alpha: float, depth: int, grid: int) -> Geometry:
    """Dynamical data of the bare fold: the identity decomposition's geometry."""
    dec = identity_decomposition(depth, grid)
    obs = identity_profile(grid)
    t0 = _solve_peak(obs, alpha)
    return dynamical_geometry(DecomposedMap(dec, t0, alpha, observed=obs))


def _undamped_step(g: Geometry, alpha: float, grid: int, tol: float):
    """geometry -> (pure decomposition, its map, peak value, image geometry)."""
    phi = pure_decomposition(g, alpha, tol=tol, grid=grid)
    obs = compose_all(phi)
    t = _solve_peak(obs, alpha)
    dm = DecomposedMap(phi, t, alpha, observed=obs)
    return dm, dynamical_geometry(dm)


def _outer_solve(config: SolverConfig, k: int, initial_geometry: Geometry | None):
    g = (_seed_geometry(config.alpha, config.depth, config.grid)
         if initial_geometry is None else initial_geometry)
    if g.depth != config.depth:
        raise DepthMismatch(
            f"initial geometry depth {g.depth} differs from configured depth {config.depth}")
    ptol = _pure_tol(config)
    t_prev = None
    trace = []
    for it in range(1, config.max_iter + 1):
        g_img = g
        t_first = None
        for _ in range(k):
            dm, g_img = _undamped_step(g_img, config.alpha, config.grid, ptol)
            if t_first is None:
                t_first = dm.t
        resid = geometry_distance(g_img, g) + (1.0 if t_prev is None else abs(t_first - t_prev))
        trace.append(resid)
        if resid <= config.tol:
            return g, it, trace
        g = geometry_blend(config.damping, g_img, g)
        t_prev = t_first
    raise NonConvergence(
        f"outer iteration stuck at residual {trace[-1]:.3e} after {config.max_iter} "
        f"steps (tol {config.tol:.1e})", tuple(trace))


def _cycle_reports(config: SolverConfig, g: Geometry, iterations: int, k: int):
    ptol = _pure_tol(config)
    maps, geoms = [], []
    cur = g
    for _ in range(k):
        dm, nxt = _undamped_step(cur, config.alpha, config.grid, ptol)
        maps.append(dm)
        geoms.append(cur)
        cur = nxt
    reports = []
    for j in range(k):
        # for j < k-1 the image geometry is geoms[j+1] itself, distance 0;
        # the wrap-around distance is the cycle closure residual
        resid_geom = geometry_distance(cur, geoms[0]) if j == k - 1 else 0.0
        reports.append(FixedPointReport(
            alpha=config.alpha,
            depth=config.depth,
            grid=config.grid,
            t_star=maps[j].t,
            geometry_star=geoms[j],
            pure_star=maps[j].decomposition,
            residual_geometry=resid_geom,
            residual_peak=abs(peak_value_rho(maps[j]) - maps[j].t),
            iterations=iterations,
        ))
    if k > 1:
        diam = max(geometry_distance(geoms[i], geoms[j])
                   for i in range(k) for j in range(i + 1, k))
        diam += max(abs(maps[i].t - maps[j].t)
                    for i in range(k) for j in range(i + 1, k))
        flag = bool(diam <= config.tol)
        for rep in reports:
            rep.coincident = flag
    return reports


def find_fixed_point(config: SolverConfig,
                     initial_geometry: Geometry | None = None) -> FixedPointReport:
    """Damped outer iteration for a truncation fixed point.

    State is the geometry g: each pass solves the pure decomposition of g,
    re-solves the invariant peak value, takes the resulting dynamical
    geometry, and blends it into g with the damping weight.  Convergence is
    declared when the geometry movement plus the peak-value movement drops
    below tol; the report is then rebuilt by one undamped pass from the
    converged geometry, so its residuals are genuine certificates rather
    than echoes of the stopping test.
    """
    g, iterations, _ = _outer_solve(config, 1, initial_geometry)
    return _cycle_reports(config, g, iterations, 1)[0]


def find_periodic_orbit(config: SolverConfig, k: int,
                        initial_geometry: Geometry | None = None):
    """Damped outer iteration on the k-fold renormalization step.

    Returns the cycle as k reports; the last one's residual_geometry is the
    closure defect of the cycle.  k = 1 reduces to find_fixed_point.  When
    the cycle diameter is below tol every report is flagged coincident: the
    orbit has collapsed onto a fixed point.
    """
    if k < 1:
        raise ConfigError("orbit length k must be at least 1")
    g, iterations, _ = _outer_solve(config, k, initial_geometry)
    return _cycle_reports(config, g, iterations, k)


def renormalization_orbit_diagnostics(f: DecomposedMap, steps: int, *,
                                      pure_tol: float = 1e-10):
    """Track the distance to the pure-decomposition set along an orbit.

    Each record holds the current peak value, the decomposition's distance
    to the pure decomposition of its own dynamical geometry, and that
    geometry's contraction factor.  After each record the map is renormalized
    (truncated) and the peak value re-solved, which keeps the orbit inside
    the renormalizable window.
    """
    records = []
    current = f
    for step in range(steps):
        geom = dynamical_geometry(current)
        pure = pure_decomposition(geom, current.alpha, tol=pure_tol,
                                  grid=current.decomposition.grid)
        records.append({
            "step": step,
            "peak": current.t,
            "distance": decomposition_distance(current.decomposition, pure),
            "kappa": geom.contraction_factor,
        })
        if step == steps - 1:
            break
        new_dec = renormalize(current).renormalized.decomposition
        obs = compose_all(new_dec)
        current = DecomposedMap(new_dec, _solve_peak(obs, current.alpha),
                                current.alpha, observed=obs)
    return records


def random_decomposed_map(alpha: float, depth: int, grid: int, seed: int, *,
                          scale: float = 0.25) -> DecomposedMap:
    """A random analytic decomposed map with its peak value already solved.

    Node nonlinearities are short Chebyshev series with geometrically
    decaying coefficients, shrunk per level so the total nonlinearity stays
    resolvable on the grid and a renormalization window exists.
    """
    rng = np.random.default_rng(seed)
    times = timetree.DecompositionTimes(depth)
    x = _cheb.nodes(grid)
    decay = 0.6 ** np.arange(8)
    nodes = {}
    for w in times.indices_descending():
        coeffs = rng.standard_normal(8) * decay * (scale * 0.45 ** len(w))
        nodes[w] = NonlinearityProfile(_cheb.chebval(x, coeffs))
    dec = Decomposition(times, nodes)
    obs = compose_all(dec)
    return DecomposedMap(dec, _solve_peak(obs, alpha), alpha, observed=obs)
