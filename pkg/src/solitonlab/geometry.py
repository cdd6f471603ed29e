"""Profile curves and glued fields built from phase-plane solutions.

Three kinds of geometric output:

* graph profiles f(s): quadrature of a slope trajectory, with dense
  evaluators (cubic Hermite between fine samples, Taylor series inside
  the center handoff radius for the bowl);
* wing profiles alpha(y): direct integration of the second-order wing
  equation from an apex (alpha' = 0), split into monotone branches that
  invert back to graphs f(s) = y(alpha); spindles are wings whose both
  ends reach the rotation axis with lightlike slope;
* the hybrid field u(x, y) = f1(sqrt(x^2-y^2)) / f2(sqrt(y^2-x^2)) on a
  Lorentzian plane, glued across the lightcone x = +-y from the two
  center-regular profiles of the boost reduction.  Because both pieces
  are even with matched Taylor data, u = q(x^2 - y^2) for one analytic q
  and the gluing is smooth; a sign flip on f2 breaks exactly that.

The timelike boost family with |slope| < 1 mirrors the spacelike strip
classification under q = -f; timelike_family_from_strip builds its
members from the canonical strip solutions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import cumulative_simpson, solve_ivp
from scipy.interpolate import CubicHermiteSpline, CubicSpline

from .core import FlowParams, PhaseState, Trajectory, boost, rhs_wing
from .classify import (
    SolutionClassTag,
    classify,
    compute_bowl,
    compute_separatrix,
    integrate_bidirectional,
)
from .engine import (
    IntegratorConfig,
    bowl_series_coeffs,
    eval_series,
    integrate,
    integrate_series,
)
from .verify import GridField


@dataclass
class ProfileCurve:
    """A sampled profile in graph form (s, f, w = f') or wing form (y, alpha, alpha').

    Graph curves may carry dense evaluators f_dense/w_dense valid on the
    sampled span (and down to s = 0 for series-anchored curves).
    truncated marks graphs clipped by a slope blow-up; contact marks wing
    ends that reached the axis floor, with the lightlike touch location
    extrapolated in contact_y.
    """

    kind: str
    params: FlowParams
    s: Optional[np.ndarray] = None
    f: Optional[np.ndarray] = None
    w: Optional[np.ndarray] = None
    y: Optional[np.ndarray] = None
    alpha: Optional[np.ndarray] = None
    alpha_prime: Optional[np.ndarray] = None
    f0: float = 0.0
    truncated: bool = False
    apex: Optional[Tuple[float, float]] = None
    contact: Tuple[bool, bool] = (False, False)
    contact_y: Tuple[Optional[float], Optional[float]] = (None, None)
    arm_stop: Tuple[str, str] = ("span", "span")
    f_dense: Optional[Callable] = None
    w_dense: Optional[Callable] = None

    def __post_init__(self) -> None:
        if self.kind not in ("graph", "wing"):
            raise ValueError(f"kind must be 'graph' or 'wing', got {self.kind!r}")
        if self.kind == "graph" and (self.s is None or self.f is None or self.w is None):
            raise ValueError("graph curves need s, f and w sample arrays")
        if self.kind == "wing" and (self.y is None or self.alpha is None
                                    or self.alpha_prime is None):
            raise ValueError("wing curves need y, alpha and alpha_prime arrays")


def build_graph(trajectory: Trajectory, f0: float = 0.0,
                samples: int = 4001) -> ProfileCurve:
    """Integrate a slope trajectory into a height profile f(s).

    f is the cumulative Simpson integral of the dense slope over a fine
    uniform resampling, anchored to f(left end) = f0, with a cubic
    Hermite interpolant for off-node evaluation.  Trajectories that ended
    in blow-up yield a curve flagged truncated (the graph is clipped at
    the last resolved sample before the pole).
    """
    s0, s1 = trajectory.s_span
    if samples < 5:
        raise ValueError("need at least 5 resampling nodes")
    s_grid = np.linspace(s0, s1, samples)
    w_grid = np.asarray(trajectory.w_at(s_grid), dtype=float)
    f_grid = f0 + cumulative_simpson(w_grid, x=s_grid, initial=0.0)
    spline = CubicHermiteSpline(s_grid, f_grid, w_grid)
    trunc = any(t is not None and t.kind.value == "blow_up"
                for t in (trajectory.termination_left, trajectory.termination_right))
    w_of = trajectory.w_at

    def w_dense(q):
        return w_of(q)

    def f_dense(q):
        out = spline(np.asarray(q, dtype=float))
        return float(out) if out.ndim == 0 else out

    return ProfileCurve(kind="graph", params=trajectory.params, s=s_grid,
                        f=f_grid, w=w_grid, f0=f0, truncated=trunc,
                        f_dense=f_dense, w_dense=w_dense)


def bowl_curve(params: FlowParams, cfg: IntegratorConfig = IntegratorConfig(),
               order: int = 13, s_start: float = 1e-4,
               samples: int = 20001) -> ProfileCurve:
    """The bowl profile with evaluators valid on all of [0, s_max].

    Inside the series handoff radius the height comes from the integrated
    center Taylor series (f(0) = 0); outside, from Simpson quadrature of
    the cached bowl trajectory on a fine grid.  The sampling is dense
    enough that interpolation error stays near rounding, which matters
    when the curve seeds finite-difference fields.
    """
    traj = compute_bowl(params, cfg, s_start=s_start, order=order)
    fc = integrate_series(bowl_series_coeffs(params, order))
    f_at_start = float(eval_series(fc, s_start))
    s_grid = np.linspace(s_start, cfg.s_max, samples)
    w_grid = np.asarray(traj.w_at(s_grid), dtype=float)
    f_grid = f_at_start + cumulative_simpson(w_grid, x=s_grid, initial=0.0)
    spline = CubicHermiteSpline(s_grid, f_grid, w_grid)
    s_hi = cfg.s_max
    w_of = traj.w_at

    def f_dense(q):
        q = np.asarray(q, dtype=float)
        if np.any(q > s_hi * (1 + 1e-12)) or np.any(q < 0.0):
            raise ValueError(f"bowl evaluator domain is [0, {s_hi}]")
        out = np.where(q < s_start, eval_series(fc, np.minimum(q, s_start)),
                       spline(np.clip(q, s_start, s_hi)))
        return float(out) if out.ndim == 0 else out

    def w_dense(q):
        return w_of(q)

    return ProfileCurve(kind="graph", params=params, s=s_grid, f=f_grid,
                        w=w_grid, f0=0.0, f_dense=f_dense, w_dense=w_dense)


@dataclass
class WingResult:
    """A wing profile with its monotone branches inverted to graphs."""

    wing: ProfileCurve
    branches: Tuple[ProfileCurve, ...]


def _wing_arm(params: FlowParams, s0: float, y0: float, y_end: float,
              cfg: IntegratorConfig, alpha_floor: float, alpha_ceil: float,
              steep_cap: float):
    """Integrate the wing equation from the apex toward y_end.

    Stops at the axis floor (lightlike contact), the height ceiling, or a
    vertical tangent (|alpha'| -> infinity at finite y, where the wing
    chart ends; the square-root approach makes large caps unreachable in
    double precision, so steep_cap stays moderate).  Returns the solution
    and the stop reason.
    """
    tiny = alpha_floor * 1e-3
    ap_clamp = 100.0 * steep_cap

    def f(y, state):
        # trial stages may probe past the floor or the steepness cap
        a = max(state[0], tiny)
        ap = min(max(state[1], -ap_clamp), ap_clamp)
        return [state[1], rhs_wing(params, a, ap)]

    def hit_floor(y, state):
        return state[0] - alpha_floor

    def hit_ceil(y, state):
        return state[0] - alpha_ceil

    def hit_steep(y, state):
        return abs(state[1]) - steep_cap

    hit_floor.terminal = True
    hit_ceil.terminal = True
    hit_steep.terminal = True
    sol = solve_ivp(f, (y0, y_end), [s0, 0.0], method=cfg.method,
                    rtol=cfg.rel_tol, atol=cfg.abs_tol, max_step=cfg.max_step,
                    dense_output=True, events=[hit_floor, hit_ceil, hit_steep])
    if sol.status == -1:
        raise RuntimeError(f"wing integration failed: {sol.message}")
    if len(sol.t_events[0]):
        stop = "contact"
    elif len(sol.t_events[1]):
        stop = "ceiling"
    elif len(sol.t_events[2]):
        stop = "steep"
    else:
        stop = "span"
    return sol, stop


def _invert_branch(params: FlowParams, sol, y0: float, s0: float,
                   apex_pad: float, samples: int) -> Optional[ProfileCurve]:
    """Resample one wing arm and invert it to a graph f(s) = y(alpha)."""
    y_end = sol.t[-1]
    if abs(y_end - y0) <= 2 * apex_pad:
        return None
    y_grid = np.linspace(y0, y_end, samples)
    state = sol.sol(y_grid)
    a, ap = state[0], state[1]
    keep = (np.abs(a - s0) > apex_pad) & (np.abs(y_grid - y0) > apex_pad)
    if np.count_nonzero(keep) < 8:
        return None
    y_b, a_b, ap_b = y_grid[keep], a[keep], ap[keep]
    order = np.argsort(a_b)
    s_b, f_b, w_raw = a_b[order], y_b[order], ap_b[order]
    # clip to the strictly monotone stretch next to the apex
    d = np.diff(s_b)
    bad = np.where(d <= 0)[0]
    if len(bad):
        cut = bad[0] + 1
        s_b, f_b, w_raw = s_b[:cut], f_b[:cut], w_raw[:cut]
        if len(s_b) < 8:
            return None
    w_b = 1.0 / w_raw
    w_spline = CubicSpline(s_b, w_b)
    f_spline = CubicHermiteSpline(s_b, f_b, w_b)

    def w_dense(q):
        out = w_spline(np.asarray(q, dtype=float))
        return float(out) if out.ndim == 0 else out

    def f_dense(q):
        out = f_spline(np.asarray(q, dtype=float))
        return float(out) if out.ndim == 0 else out

    return ProfileCurve(kind="graph", params=params, s=s_b, f=f_b, w=w_b,
                        f0=float(f_b[0]), f_dense=f_dense, w_dense=w_dense)


def build_wing(params: FlowParams, s0: float, y0: float = 0.0,
               cfg: IntegratorConfig = IntegratorConfig(),
               y_span: Optional[float] = None, alpha_floor: float = 1e-4,
               apex_pad: float = 1e-3, samples: int = 4001,
               steep_cap: float = 1e6) -> WingResult:
    """Wing profile through the apex (y0, s0), with inverted branches.

    The apex is a strict extremum (alpha''(y0) = ep*h(s0) != 0), so each
    arm is monotone and inverts to a graph branch f(s) with slope
    w = 1/alpha'; branches exclude an apex neighborhood where the
    inversion divides by alpha' -> 0.  Arms stop at the axis floor
    (lightlike contact, extrapolated touch point recorded), at the height
    ceiling s_max, at a vertical tangent (|alpha'| = steep_cap; the wing
    continues past it only as a graph over the height, i.e. in the
    inverted branch), or at y0 +- y_span; arm_stop records which.

    The translation direction breaks the y -> -y symmetry, so the two
    arms differ: a rotational spindle, for instance, is egg-shaped rather
    than mirror-symmetric.
    """
    if s0 <= 0.0:
        raise ValueError("apex height s0 must be positive")
    if abs(rhs_wing(params, s0, 0.0)) == 0.0:
        raise ValueError("degenerate apex: alpha''(y0) = 0")
    span = cfg.s_max if y_span is None else float(y_span)
    ceil = cfg.s_max

    arms = {}
    for side, y_end in (("left", y0 - span), ("right", y0 + span)):
        arms[side] = _wing_arm(params, s0, y0, y_end, cfg, alpha_floor, ceil,
                               steep_cap)

    y_parts, a_parts, ap_parts = [], [], []
    contact = []
    contact_y = []
    stops = []
    for side in ("left", "right"):
        sol, stop = arms[side]
        n = max(9, int(samples) // 2)
        y_g = np.linspace(y0, sol.t[-1], n)
        st = sol.sol(y_g)
        if side == "left":
            y_parts.append(y_g[::-1][:-1])
            a_parts.append(st[0][::-1][:-1])
            ap_parts.append(st[1][::-1][:-1])
        else:
            y_parts.append(y_g)
            a_parts.append(st[0])
            ap_parts.append(st[1])
        stops.append(stop)
        contact.append(stop == "contact")
        if stop == "contact":
            a_e, ap_e = st[0][-1], st[1][-1]
            contact_y.append(float(y_g[-1] - a_e / ap_e))
        else:
            contact_y.append(None)

    y_all = np.concatenate([y_parts[0], y_parts[1]])
    a_all = np.concatenate([a_parts[0], a_parts[1]])
    ap_all = np.concatenate([ap_parts[0], ap_parts[1]])
    wing = ProfileCurve(kind="wing", params=params, y=y_all, alpha=a_all,
                        alpha_prime=ap_all, apex=(y0, s0),
                        contact=(contact[0], contact[1]),
                        contact_y=(contact_y[0], contact_y[1]),
                        arm_stop=(stops[0], stops[1]))

    branches = []
    for side in ("left", "right"):
        br = _invert_branch(params, arms[side][0], y0, s0, apex_pad, samples)
        if br is not None:
            branches.append(br)
    return WingResult(wing=wing, branches=tuple(branches))


def build_spindle(params: FlowParams, s0: float,
                  cfg: IntegratorConfig = IntegratorConfig(),
                  alpha_floor: float = 1e-4, y_span: Optional[float] = None,
                  samples: int = 4001) -> ProfileCurve:
    """Closed wing profile touching the axis at both ends.

    Requires an apex that is a strict maximum (rhs_wing(s0, 0) < 0, the
    rotational timelike regime); both arms then descend to the axis at
    finite height with slope tending to a lightlike +-1.  The profile is
    reported down to alpha = alpha_floor with the two axis touch points
    extrapolated linearly.
    """
    if rhs_wing(params, s0, 0.0) >= 0.0:
        raise ValueError("no spindle: the apex is not a maximum for these "
                         "parameters (rhs_wing(s0, 0) >= 0)")
    res = build_wing(params, s0, 0.0, cfg, y_span=y_span,
                     alpha_floor=alpha_floor, samples=samples)
    wing = res.wing
    if not all(wing.contact):
        raise ValueError("spindle arms did not reach the axis inside the "
                         "y-span; widen y_span")
    return wing


def quadrant_of(x, y):
    """Lightcone quadrant index: 1 right, 2 top, 3 left, 4 bottom, 0 on cone."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    t = x * x - y * y
    q = np.zeros(np.broadcast(x, y).shape, dtype=int)
    q[(t > 0) & (x > 0)] = 1
    q[(t < 0) & (y > 0)] = 2
    q[(t > 0) & (x < 0)] = 3
    q[(t < 0) & (y < 0)] = 4
    return q


_ADJACENT_PAIRS = ({1, 2}, {2, 3}, {3, 4}, {4, 1})


def _validate_mask(mask: Sequence[int]) -> Tuple[int, ...]:
    qs = tuple(sorted(set(int(q) for q in mask)))
    if not set(qs) <= {1, 2, 3, 4}:
        raise ValueError(f"quadrant mask entries must be in 1..4, got {mask}")
    if len(qs) < 2:
        raise ValueError("hybrid gluing needs at least two quadrants")
    if len(qs) == 2 and set(qs) not in _ADJACENT_PAIRS:
        raise ValueError(f"quadrants {qs} are not cyclically adjacent; opposite "
                         "pieces only meet at the origin and cannot be glued")
    return qs


@dataclass
class HybridField:
    """Glued lightcone-invariant graph on the Lorentzian plane.

    u(x, y) is f1(sqrt(x^2-y^2)) on the included side quadrants,
    f2_sign * f2(sqrt(y^2-x^2)) on the included top/bottom ones, and 0 on
    the lightcone; outside the mask it evaluates to NaN.  u_tilde lifts
    to higher dimension by rotational symmetry in the spatial slot:
    u_tilde(xvec, y) = u(|xvec|, y).  coeffs_f1/coeffs_f2 are the height
    Taylor coefficients at the origin (f2 as built, before any sign flip).
    """

    order: int
    mask: Tuple[int, ...]
    f2_sign: int
    coeffs_f1: np.ndarray
    coeffs_f2: np.ndarray
    params_side: FlowParams
    params_topbottom: FlowParams
    u: Callable = field(repr=False)
    u_tilde: Callable = field(repr=False)


def center_profile_eval(params: FlowParams, order: int = 12,
                        series_radius: float = 0.5, r_max: float = 5.0,
                        cfg: IntegratorConfig = IntegratorConfig(),
                        samples: int = 6001) -> Tuple[Callable, Callable]:
    """Dense (height, slope) evaluators on [0, r_max] for the center-regular
    profile of any sign pattern.

    Works where bowl_curve cannot: sign patterns without barriers (for
    instance the Euclidean rotational case, or the spacelike side of the
    boost reduction) also admit exactly one profile with vanishing center
    slope, anchored here by its center series and continued by forward
    integration, which is stable toward the large-s attractor for every
    pattern.
    """
    a = bowl_series_coeffs(params, order)
    fc = integrate_series(a)
    w_start = float(eval_series(a, series_radius))
    f_start = float(eval_series(fc, series_radius))
    run_cfg = IntegratorConfig(rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol,
                               max_step=cfg.max_step, min_step=cfg.min_step,
                               escape_threshold=cfg.escape_threshold,
                               s_max=max(r_max, series_radius * 2),
                               s_min_eps=cfg.s_min_eps, method=cfg.method)
    traj = integrate(params, PhaseState(series_radius, w_start),
                     "toward_infinity", run_cfg)
    s_grid = np.linspace(series_radius, run_cfg.s_max, samples)
    w_grid = np.asarray(traj.w_at(s_grid), dtype=float)
    f_grid = f_start + cumulative_simpson(w_grid, x=s_grid, initial=0.0)
    spline = CubicHermiteSpline(s_grid, f_grid, w_grid)
    s_hi = run_cfg.s_max
    w_of = traj.w_at

    def _check(r):
        r = np.asarray(r, dtype=float)
        if np.any(r < 0.0) or np.any(r > s_hi * (1 + 1e-12)):
            raise ValueError(f"radial evaluator domain is [0, {s_hi}]")
        return r

    def f_eval(r):
        r = _check(r)
        out = np.where(r < series_radius,
                       eval_series(fc, np.minimum(r, series_radius)),
                       spline(np.clip(r, series_radius, s_hi)))
        return float(out) if out.ndim == 0 else out

    def w_eval(r):
        r = _check(r)
        out = np.where(r < series_radius,
                       eval_series(a, np.minimum(r, series_radius)),
                       np.asarray(w_of(np.clip(r, series_radius, s_hi)),
                                  dtype=float))
        return float(out) if out.ndim == 0 else out

    return f_eval, w_eval


def build_hybrid(order: int = 12, mask: Sequence[int] = (1, 2, 3, 4),
                 extent: float = 2.0, nodes: int = 201,
                 cfg: IntegratorConfig = IntegratorConfig(),
                 f2_sign: int = +1, series_radius: float = 0.5,
                 tube_cells: int = 3) -> Tuple[HybridField, GridField]:
    """Assemble the glued lightcone-invariant graph and a grid sample.

    The two pieces are the center-regular profiles of the boost reduction
    on the spacelike and timelike sides of the cone (both with vanishing
    center slope, evaluated by series inside series_radius and by
    integration beyond).  mask picks 2, 3 or 4 cyclically adjacent
    quadrants.  f2_sign = -1 deliberately breaks the gluing (a control
    for the smoothness scan: the order-2 transverse jump then persists
    under refinement instead of decaying).

    Returns the field plus a GridField sample on [-extent, extent]^2 with
    Lorentzian signature (+, -), masked on a tube_cells-wide tube around
    the lightcone and on excluded quadrants.
    """
    qs = _validate_mask(mask)
    if f2_sign not in (-1, +1):
        raise ValueError("f2_sign must be +-1")
    if order < 5:
        raise ValueError("need series order >= 5 for a faithful gluing test")
    p1 = boost(2, "spacelike")
    p2 = boost(2, "timelike")
    r_need = extent * 1.05 + 0.5
    f1 = center_profile_eval(p1, order, series_radius, r_need, cfg)[0]
    f2 = center_profile_eval(p2, order, series_radius, r_need, cfg)[0]
    a1 = bowl_series_coeffs(p1, order)
    a2 = bowl_series_coeffs(p2, order)
    mask_set = set(qs)

    def u(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        x, y = np.broadcast_arrays(x, y)
        t = x * x - y * y
        r = np.sqrt(np.abs(t))
        out = np.full(t.shape, np.nan)
        out[t == 0.0] = 0.0
        q = quadrant_of(x, y)
        for qi in mask_set:
            sel = q == qi
            if not np.any(sel):
                continue
            if qi in (1, 3):
                out[sel] = f1(r[sel])
            else:
                out[sel] = f2_sign * f2(r[sel])
        return float(out) if out.ndim == 0 else out

    def u_tilde(xvec, y):
        xvec = np.asarray(xvec, dtype=float)
        r_sp = np.sqrt(np.sum(xvec * xvec, axis=-1))
        return u(r_sp, y)

    hyb = HybridField(order=order, mask=qs, f2_sign=f2_sign,
                      coeffs_f1=integrate_series(a1),
                      coeffs_f2=integrate_series(a2),
                      params_side=p1, params_topbottom=p2, u=u, u_tilde=u_tilde)

    ax = np.linspace(-extent, extent, nodes)
    X, Y = np.meshgrid(ax, ax, indexing="ij")
    values = u(X, Y)
    h = float(ax[1] - ax[0])
    dist_cone = np.minimum(np.abs(X - Y), np.abs(X + Y)) / math.sqrt(2.0)
    gmask = dist_cone <= tube_cells * h
    qgrid = quadrant_of(X, Y)
    for qi in (1, 2, 3, 4):
        if qi not in mask_set:
            gmask |= qgrid == qi
    grid = GridField(axes=(ax, ax), signature=(+1, -1), eps_prime=+1,
                     values=values, mask=gmask)
    return hyb, grid


_DEFAULT_TIMELIKE = (
    SolutionClassTag.BOWL, SolutionClassTag.BELOW_BOWL,
    SolutionClassTag.ABOVE_BOWL, SolutionClassTag.GAMMA_MINUS_BLOWUP,
    SolutionClassTag.SEPARATRIX, SolutionClassTag.GAMMA_PLUS_GLOBAL,
    SolutionClassTag.GAMMA_PLUS_BLOWUP, SolutionClassTag.CONSTANT_PLUS,
    SolutionClassTag.CONSTANT_MINUS,
)


def timelike_family_from_strip(params: FlowParams,
                               class_request: "SolutionClassTag | str",
                               cfg: IntegratorConfig = IntegratorConfig(),
                               strip_state: Optional[Tuple[float, float]] = None,
                               samples: int = 4001) -> ProfileCurve:
    """A timelike-boost profile realizing a requested strip class.

    The timelike pattern (et = -1, ep = +1) maps onto the canonical strip
    under q = -f, so each strip class has a timelike graph realization:
    the profile is built on the canonical side and flipped back.
    strip_state optionally picks the representative as (s0, w0) in
    canonical strip coordinates (w0 = -f'); by default a midline point
    between the bowl and the relevant barrier (or the canonical solution
    itself for bowl/separatrix/constants) is used.
    """
    if not (params.eps_tilde == -1 and params.eps_prime == +1):
        raise ValueError("timelike family needs boost-timelike parameters "
                         "(eps_tilde=-1, eps_prime=+1)")
    tag = (class_request if isinstance(class_request, SolutionClassTag)
           else SolutionClassTag(str(class_request)))
    if tag not in _DEFAULT_TIMELIKE:
        raise ValueError(f"unsupported class request {tag}")
    canon, _flip = params.canonical_strip()
    c = canon.fiber_coeff

    if tag is SolutionClassTag.BOWL and strip_state is None:
        base = bowl_curve(canon, cfg)
    elif tag is SolutionClassTag.SEPARATRIX and strip_state is None:
        sep = compute_separatrix(canon, cfg)
        base = build_graph(sep.trajectory, f0=0.0, samples=samples)
    else:
        if strip_state is None:
            bowl = compute_bowl(canon, cfg)
            wb = float(bowl.w_at(c))
            if tag is SolutionClassTag.BELOW_BOWL:
                state = (c, 0.5 * (wb - 1.0))
            elif tag is SolutionClassTag.ABOVE_BOWL:
                state = (c, 0.5 * (wb + 1.0))
            elif tag is SolutionClassTag.GAMMA_MINUS_BLOWUP:
                state = (c, -2.0)
            elif tag is SolutionClassTag.CONSTANT_PLUS:
                state = (c, 1.0)
            elif tag is SolutionClassTag.CONSTANT_MINUS:
                state = (c, -1.0)
            else:
                sep = compute_separatrix(canon, cfg)
                if tag is SolutionClassTag.GAMMA_PLUS_GLOBAL:
                    state = (sep.anchor, 0.5 * (1.0 + sep.value))
                else:
                    state = (sep.anchor, sep.value + 1.0)
        else:
            state = (float(strip_state[0]), float(strip_state[1]))
            got = classify(canon, state[0], state[1], cfg).tag
            if got is not tag:
                raise ValueError(f"strip state {state} classifies as {got.value}, "
                                 f"not the requested {tag.value}")
        traj = integrate_bidirectional(canon, state[0], state[1], cfg)
        base = build_graph(traj, f0=0.0, samples=samples)

    fd, wd = base.f_dense, base.w_dense

    def f_dense(q):
        out = -np.asarray(fd(q), dtype=float)
        return float(out) if out.ndim == 0 else out

    def w_dense(q):
        out = -np.asarray(wd(q), dtype=float)
        return float(out) if out.ndim == 0 else out

    return ProfileCurve(kind="graph", params=params, s=base.s, f=-base.f,
                        w=-base.w, f0=-base.f0, truncated=base.truncated,
                        f_dense=f_dense, w_dense=w_dense)
