"""Core vocabulary for translating-soliton profile ODEs.

A translating soliton invariant under a one-parameter family of isometries
of a flat product (Euclidean or Lorentzian) reduces to a profile f(s) over
a single base coordinate s > 0 satisfying

    f''(s) = (et + ep * f'(s)**2) * (1 - f'(s) * h(s)),    h(s) = et * c / s,

where ep = +-1 is the metric sign of the profile direction, et = +-1 the
sign of the base direction, and c > 0 the fiber coefficient of the group
action (c = n - 1 for the rotational action on an n-dimensional base).
In first-order form w = f' the phase plane (s, w) carries the whole
classification: for et*ep = -1 the horizontal lines w = +-1 are invariant
barriers, and the curve w = s * et / c (where the second factor of the
right-hand side vanishes) is the locus of critical points of solutions.

Profiles that are not graphs over s are handled in the transposed "wing"
form alpha(y), with y the height coordinate:

    alpha''(y) = (ep + et * alpha'(y)**2) * (h(alpha(y)) - alpha'(y)).

This module holds the parameter and state types, the two right-hand
sides, the phase-plane bookkeeping (regions, critical line, concavity at
critical points), and the unit-gradient reparametrization used when
switching between graph and wing descriptions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, NamedTuple, Optional

import numpy as np
from scipy.integrate import cumulative_trapezoid

# |w -+ 1| within this counts as sitting on a barrier (machine equality).
BARRIER_TOL = 1e-12

# |ep + et*w**2| below this counts as lightlike when reading causal type.
# Barrier-approaching slopes plateau at +-1 exactly in double precision,
# so this is a machine-noise floor, not a physical band.
LIGHTLIKE_TOL = 1e-13


@dataclass(frozen=True)
class FlowParams:
    """Parameter bundle for one reduced profile equation.

    n is the dimension of the flat base, eps_prime the metric sign of the
    profile (graph) direction, eps_tilde the sign of the base coordinate
    direction, and fiber_coeff the coefficient c in h(s) = eps_tilde*c/s.
    fiber_coeff = None picks the rotational value n - 1.
    """

    n: int = 3
    eps_prime: int = -1
    eps_tilde: int = +1
    fiber_coeff: Optional[float] = None

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"base dimension must be >= 2, got {self.n}")
        if self.eps_prime not in (-1, +1):
            raise ValueError(f"eps_prime must be +-1, got {self.eps_prime}")
        if self.eps_tilde not in (-1, +1):
            raise ValueError(f"eps_tilde must be +-1, got {self.eps_tilde}")
        if self.fiber_coeff is None:
            object.__setattr__(self, "fiber_coeff", float(self.n - 1))
        if not self.fiber_coeff > 0:
            raise ValueError(f"fiber_coeff must be > 0, got {self.fiber_coeff}")

    def h(self, s):
        """Mean-curvature term h(s) = eps_tilde * c / s of the orbit foliation."""
        return self.eps_tilde * self.fiber_coeff / s

    @property
    def has_barriers(self) -> bool:
        """True when w = +-1 are invariant lines (eps_tilde*eps_prime = -1)."""
        return self.eps_tilde * self.eps_prime == -1

    def canonical_strip(self) -> "tuple[FlowParams, int]":
        """Map onto the spacelike-rotational sign pattern (et=+1, ep=-1).

        Returns (params, flip) with flip = -1 when the profile slope must be
        negated (the timelike pattern et=-1, ep=+1 mirrors onto the canonical
        one under w -> -w).  Raises for sign patterns without barriers.
        """
        if self.eps_tilde == +1 and self.eps_prime == -1:
            return self, +1
        if self.eps_tilde == -1 and self.eps_prime == +1:
            return FlowParams(self.n, eps_prime=-1, eps_tilde=+1,
                              fiber_coeff=self.fiber_coeff), -1
        raise ValueError("no strip structure: need eps_tilde*eps_prime = -1")


def rotational(n: int = 3, eps_prime: int = -1) -> FlowParams:
    """Parameters for the rotation-invariant reduction on an n-dimensional base."""
    return FlowParams(n=n, eps_prime=eps_prime, eps_tilde=+1, fiber_coeff=n - 1)


def boost(n: int = 2, region: str = "spacelike", strict_fiber: bool = False) -> FlowParams:
    """Parameters for the boost-invariant reduction on a Lorentzian base.

    region selects the side of the lightcone the orbits foliate: "spacelike"
    (radial coordinate is spacelike, eps_tilde = +1) or "timelike".  The
    profile direction is spacelike either way (eps_prime = +1).  The default
    fiber coefficient n - 1 comes from recomputing the divergence of the
    radial position field; strict_fiber = True forces the coefficient 1
    instead.  The two agree on a two-dimensional base.
    """
    if region not in ("spacelike", "timelike"):
        raise ValueError(f"region must be 'spacelike' or 'timelike', got {region!r}")
    c = 1.0 if strict_fiber else float(n - 1)
    return FlowParams(n=n, eps_prime=+1,
                      eps_tilde=+1 if region == "spacelike" else -1,
                      fiber_coeff=c)


class PhaseState(NamedTuple):
    """A point (s, w) of the phase plane, w = f'(s)."""

    s: float
    w: float


class Region(Enum):
    """Where a phase point sits relative to the barrier lines w = +-1."""

    INNER_STRIP = "inner_strip"
    GAMMA_PLUS = "gamma_plus"
    GAMMA_MINUS = "gamma_minus"
    BARRIER_PLUS = "barrier_plus"
    BARRIER_MINUS = "barrier_minus"


def region_of(w: float, tol: float = BARRIER_TOL) -> Region:
    """Classify a slope value against the barriers, with a machine-equality band."""
    if not np.isfinite(w):
        raise ValueError(f"slope must be finite, got {w}")
    if abs(w - 1.0) <= tol:
        return Region.BARRIER_PLUS
    if abs(w + 1.0) <= tol:
        return Region.BARRIER_MINUS
    if w > 1.0:
        return Region.GAMMA_PLUS
    if w < -1.0:
        return Region.GAMMA_MINUS
    return Region.INNER_STRIP


def rhs(params: FlowParams, s, w):
    """Phase-plane right-hand side w'(s) = (et + ep*w^2) * (1 - w*h(s)).

    Vectorized over s and w; s must be positive.
    """
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0.0):
        raise ValueError("base coordinate s must be positive")
    w = np.asarray(w, dtype=float)
    val = (params.eps_tilde + params.eps_prime * w * w) * (1.0 - w * params.h(s))
    return float(val) if val.ndim == 0 else val


def rhs_wing(params: FlowParams, alpha, alpha_prime):
    """Wing-form right-hand side alpha''(y) = (ep + et*a'^2) * (h(alpha) - a').

    Vectorized; alpha must be positive.
    """
    alpha = np.asarray(alpha, dtype=float)
    if np.any(alpha <= 0.0):
        raise ValueError("wing profile alpha must be positive")
    ap = np.asarray(alpha_prime, dtype=float)
    val = (params.eps_prime + params.eps_tilde * ap * ap) * (params.h(alpha) - ap)
    return float(val) if val.ndim == 0 else val


def critical_line(params: FlowParams, s):
    """Slope on the critical locus: the w with 1 - w*h(s) = 0, i.e. w = s*et/c."""
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0.0):
        raise ValueError("base coordinate s must be positive")
    val = s * params.eps_tilde / params.fiber_coeff
    return float(val) if val.ndim == 0 else val


def critical_concavity(params: FlowParams, s1: float) -> float:
    """Second derivative w''(s1) of a solution at a critical point s1.

    On the critical line the first factor survives and only the derivative
    of (1 - w h) contributes: w'' = (et + ep*w1^2) * (-h'(s1)*w1) with
    w1 = critical_line(s1).  Positive means the critical point is a strict
    minimum of w, negative a strict maximum, zero only on a barrier.
    """
    if s1 <= 0.0:
        raise ValueError("base coordinate s must be positive")
    w1 = critical_line(params, s1)
    dh = -params.eps_tilde * params.fiber_coeff / (s1 * s1)
    return (params.eps_tilde + params.eps_prime * w1 * w1) * (-dh * w1)


def causal_sign(params: FlowParams, w, tol: float = LIGHTLIKE_TOL) -> int:
    """Causal type of the graph along a slope sample: sign of ep + et*w^2.

    Returns +1 (timelike) or -1 (spacelike) when every sample that is
    numerically distinguishable from the lightlike locus agrees, else 0
    (mixed, or entirely lightlike as for the barrier constants).
    Barrier-asymptotic samples sit at +-1 exactly in double precision and
    are ignored rather than letting them mask the open-region sign.
    """
    q = params.eps_prime + params.eps_tilde * np.asarray(w, dtype=float) ** 2
    q = np.atleast_1d(q)[np.abs(np.atleast_1d(q)) > tol]
    if q.size == 0:
        return 0
    pos, neg = np.any(q > 0.0), np.any(q < 0.0)
    if pos and neg:
        return 0
    return +1 if pos else -1


class TerminationKind(Enum):
    """Why an integration stopped at one end of its span."""

    BLOW_UP = "blow_up"
    DOMAIN_BOUNDARY_ZERO = "domain_boundary_zero"
    REACHED_S_MAX = "reached_s_max"
    BARRIER_CONTACT = "barrier_contact"


@dataclass(frozen=True)
class Termination:
    """Endpoint record: the kind plus the location/value evidence.

    For BLOW_UP, s is the extrapolated pole location and sign the direction
    (+1 for w -> +inf).  For the other kinds value carries the final slope.
    """

    kind: TerminationKind
    s: Optional[float] = None
    value: Optional[float] = None
    sign: Optional[int] = None


@dataclass
class Trajectory:
    """A solution arc of the phase-plane equation.

    Samples are the accepted integration nodes, strictly increasing in s.
    dense, when present, evaluates w(s) anywhere inside the sampled span.
    termination_left/right may be None at an end that is simply the start
    of a one-sided integration.
    """

    params: FlowParams
    s: np.ndarray
    w: np.ndarray
    termination_left: Optional[Termination] = None
    termination_right: Optional[Termination] = None
    events: List = field(default_factory=list)
    dense: Optional[Callable] = None

    def __post_init__(self) -> None:
        self.s = np.asarray(self.s, dtype=float)
        self.w = np.asarray(self.w, dtype=float)
        if self.s.shape != self.w.shape:
            raise ValueError("sample arrays s and w must have equal shape")
        if self.s.size >= 2 and not np.all(np.diff(self.s) > 0.0):
            raise ValueError("samples must be strictly increasing in s")

    @property
    def s_span(self) -> "tuple[float, float]":
        return float(self.s[0]), float(self.s[-1])

    def causal_sign(self) -> int:
        """Causal type over all samples: +1, -1, or 0 for mixed/lightlike."""
        return causal_sign(self.params, self.w)

    def w_at(self, s):
        """Evaluate the slope at interior points, preferring dense output."""
        if self.dense is not None:
            return self.dense(s)
        return np.interp(s, self.s, self.w)


def reparametrize_unit_gradient(s: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Arc parameter v with dv/ds = 1/z(s) and v = 0 at the left endpoint.

    z must be a positive tabulated function on a strictly increasing grid;
    the integral uses the composite trapezoid rule, so v is as accurate as
    the grid is fine.  The result is strictly increasing, hence a bijection
    onto its range.
    """
    s = np.asarray(s, dtype=float)
    z = np.asarray(z, dtype=float)
    if s.ndim != 1 or s.size < 2 or s.shape != z.shape:
        raise ValueError("need matching 1-d grids with at least two nodes")
    if not np.all(np.diff(s) > 0.0):
        raise ValueError("grid must be strictly increasing")
    if not np.all(z > 0.0):
        raise ValueError("z must be positive to invert the gradient")
    return cumulative_trapezoid(1.0 / z, s, initial=0.0)
