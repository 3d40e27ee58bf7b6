"""1D front homogenization: effective velocities from the reduced ODE.

The scaled front ODE x'(t) = q * g(x, t) turns the oscillating free-boundary
problem into a one-dimensional integration; long-time averages of x(T)/T
estimate the homogenized velocity r(q). Obstacle-clipped fronts measure the
flatness functionals whose decay thresholds define the candidate velocities
r_lower and r_upper.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import quad

from .errors import NumericalError, ValidationError
from .medium import Medium, MediumBounds, estimate_bounds


@dataclass(frozen=True)
class FrontProblem:
    """Front ODE data: x' = q * g(x/eps, t/eps) from position x0."""

    medium: Medium
    q: float
    x0: float = 0.0
    eps: float = 1.0

    def __post_init__(self):
        if self.medium.dim != 1:
            raise ValidationError(
                f"front problems are one-dimensional, medium has dim {self.medium.dim}"
            )
        if not self.q > 0:
            raise ValidationError(f"q must be > 0, got {self.q}")
        if not self.eps > 0:
            raise ValidationError(f"eps must be > 0, got {self.eps}")


@dataclass(frozen=True, eq=False)
class FrontTrace:
    """Sampled front path: strictly increasing positions on a uniform grid."""

    times: np.ndarray
    positions: np.ndarray
    dt: float


class Side(Enum):
    SUB = "sub"
    SUPER = "super"


@dataclass(frozen=True, eq=False)
class ObstacleFront:
    """Clipped front dynamics staying on one side of the moving obstacle r*t."""

    q: float
    r: float
    eps: float
    side: Side
    trace: FrontTrace


@dataclass(frozen=True, eq=False)
class FlatnessTrace:
    """Running maximum detachment of a constrained front from the obstacle."""

    times: np.ndarray
    phi: np.ndarray
    side: Optional[Side] = None


@dataclass(frozen=True)
class VelocityEstimate:
    """Finite-T effective velocity r_hat = (x(T) - x0)/T with 1/T error bar."""

    q: float
    r_hat: float
    T: float
    error_bound: float
    refined: float


@dataclass(frozen=True, eq=False)
class VelocityCurve:
    """Effective-velocity samples over a q-grid with a shared error bound."""

    q: np.ndarray
    r_hat: np.ndarray
    refined: np.ndarray
    T: float
    error_bound: float


def integrate_front(p: FrontProblem, T: float, dt: float) -> FrontTrace:
    """Classical fourth-order one-step integration of the front ODE."""
    if not T > 0:
        raise ValidationError(f"T must be > 0, got {T}")
    if not dt > 0:
        raise ValidationError(f"dt must be > 0, got {dt}")
    steps = max(1, round(T / dt))
    h = T / steps
    fn = p.medium._fn
    q, eps = p.q, p.eps
    inv = 1.0 / eps

    positions = np.empty(steps + 1)
    positions[0] = x = float(p.x0)
    half = 0.5 * h
    for k in range(steps):
        t = k * h
        k1 = q * fn({"x1": x * inv, "t": t * inv})
        k2 = q * fn({"x1": (x + half * k1) * inv, "t": (t + half) * inv})
        k3 = q * fn({"x1": (x + half * k2) * inv, "t": (t + half) * inv})
        k4 = q * fn({"x1": (x + h * k3) * inv, "t": (t + h) * inv})
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        positions[k + 1] = x
    if not np.all(np.isfinite(positions)):
        raise NumericalError("medium evaluation produced a non-finite front position")
    if not np.all(np.diff(positions) > 0):
        raise NumericalError("front positions failed to increase; reduce dt")
    times = np.linspace(0.0, T, steps + 1)
    return FrontTrace(times=times, positions=positions, dt=h)


def effective_velocity(medium: Medium, q: float, T: float = 100.0,
                       x0: float = 0.0, dt: float = 0.01) -> VelocityEstimate:
    """Estimate r(q) by (x(T) - x0)/T; the period squeeze gives error 1/T.

    Also reports a Richardson-style extrapolation from the T and T/2 averages.
    """
    if not T >= 10:
        raise ValidationError(f"T must be >= 10 for a stable average, got {T}")
    p = FrontProblem(medium=medium, q=q, x0=x0, eps=1.0)
    steps = max(2, round(T / dt))
    steps += steps % 2
    trace = integrate_front(p, T, T / steps)
    x_half = float(trace.positions[steps // 2])
    x_full = float(trace.positions[-1])
    r_hat = (x_full - x0) / T
    r_half = (x_half - x0) / (T / 2.0)
    return VelocityEstimate(q=q, r_hat=r_hat, T=T, error_bound=1.0 / T,
                            refined=2.0 * r_hat - r_half)


def harmonic_mean_oracle(medium: Medium, q: float) -> float:
    """Effective velocity q / integral(1/g) for time-independent media.

    Independent quadrature route: no ODE integration is involved, so this
    value cross-checks effective_velocity on static media.
    """
    if medium.dim != 1:
        raise ValidationError("harmonic mean oracle is one-dimensional")
    if not q > 0:
        raise ValidationError(f"q must be > 0, got {q}")
    xs = np.linspace(0.0, 1.0, 33)
    base = np.asarray(medium(xs, 0.0))
    for tt in (0.25, 0.5, 0.75):
        dev = float(np.abs(np.asarray(medium(xs, tt)) - base).max())
        if dev > 1e-9:
            raise ValidationError(
                f"medium is time-dependent (deviation {dev} at t={tt}); "
                "the harmonic-mean formula only applies to static media"
            )
    integral, _err = quad(lambda s: 1.0 / medium(s, 0.0), 0.0, 1.0,
                          epsabs=1e-12, epsrel=1e-12, limit=200)
    return q / integral


def _final_flatness(medium: Medium, q: float, r: float, eps: float,
                    side: Side, T: float, dt: float) -> float:
    """Final running-max detachment of the clipped front (no trace storage)."""
    fn = medium._fn
    steps = max(1, round(T / dt))
    h = T / steps
    inv = 1.0 / eps
    y = 0.0
    phi = 0.0
    is_super = side is Side.SUPER
    for k in range(steps):
        g = fn({"x1": y * inv, "t": (k * h) * inv})
        free = y + h * q * g
        obstacle = r * (k + 1) * h
        if is_super:
            y = free if free > obstacle else obstacle
            d = y - obstacle
        else:
            y = free if free < obstacle else obstacle
            d = obstacle - y
        if d > phi:
            phi = d
    return phi


def obstacle_front(medium: Medium, q: float, r: float, eps: float, side: Side,
                   T: float = 1.0, dt: Optional[float] = None
                   ) -> tuple[ObstacleFront, FlatnessTrace]:
    """Clipped explicit front staying above (Super) or below (Sub) r*t.

    Super side: y_{k+1} = max(y_k + dt*q*g^eps(y_k, t_k), r*t_{k+1}), with
    detachment phi = running max of (y - r*t); Sub side symmetric with min
    and r*t - z. The step must resolve the oscillation: dt <= eps/10.
    """
    if medium.dim != 1:
        raise ValidationError("obstacle fronts are one-dimensional")
    if not (q > 0 and r > 0 and eps > 0 and T > 0):
        raise ValidationError("q, r, eps, T must all be > 0")
    if not isinstance(side, Side):
        raise ValidationError(f"side must be a Side, got {side!r}")
    if dt is None:
        dt = eps / 20.0
    if not 0 < dt <= eps / 10.0 + 1e-15:
        raise ValidationError(f"dt must satisfy 0 < dt <= eps/10, got {dt}")
    fn = medium._fn
    steps = max(1, round(T / dt))
    h = T / steps
    inv = 1.0 / eps
    is_super = side is Side.SUPER

    positions = np.empty(steps + 1)
    phis = np.empty(steps + 1)
    positions[0] = y = 0.0
    phis[0] = phi = 0.0
    for k in range(steps):
        g = fn({"x1": y * inv, "t": (k * h) * inv})
        free = y + h * q * g
        obstacle = r * (k + 1) * h
        if is_super:
            y = free if free > obstacle else obstacle
            d = y - obstacle
        else:
            y = free if free < obstacle else obstacle
            d = obstacle - y
        if d > phi:
            phi = d
        positions[k + 1] = y
        phis[k + 1] = phi
    times = np.linspace(0.0, T, steps + 1)
    trace = FrontTrace(times=times, positions=positions, dt=h)
    front = ObstacleFront(q=q, r=r, eps=eps, side=side, trace=trace)
    return front, FlatnessTrace(times=times, phi=phis, side=side)


@dataclass(frozen=True)
class FlatnessCheckReport:
    """Monotonicity and one-sided Lipschitz verification of a flatness trace."""

    monotone: bool
    lipschitz_ok: bool
    rate: float
    slack_rate: float
    max_excess: float
    passed: bool


def flatness_lipschitz_check(trace: FlatnessTrace, q: float, r: float,
                             bounds: MediumBounds,
                             side: Optional[Side] = None) -> FlatnessCheckReport:
    """Check phi nondecreasing and increments <= h*(rate + q*L*dt).

    The rate is (M*q - r)+ on the Super side and (r - m*q)+ on the Sub side;
    the q*L*dt term absorbs the explicit-step sampling of g along one step
    and the resolution bias of the estimated bounds.
    """
    side = side if side is not None else trace.side
    if side is None:
        raise ValidationError("flatness trace has no side; pass side explicitly")
    phi = np.asarray(trace.phi, dtype=float)
    times = np.asarray(trace.times, dtype=float)
    if phi.shape != times.shape or phi.size < 2:
        raise ValidationError("trace needs matching times/phi with >= 2 samples")
    dphi = np.diff(phi)
    h = np.diff(times)
    monotone = bool(np.all(dphi >= -1e-12))
    if side is Side.SUPER:
        rate = max(bounds.M * q - r, 0.0)
    else:
        rate = max(r - bounds.m * q, 0.0)
    dt = float(h.max())
    slack_rate = q * bounds.L * dt
    excess = dphi - h * (rate + slack_rate)
    max_excess = float(excess.max())
    lipschitz_ok = max_excess <= 1e-12
    return FlatnessCheckReport(monotone=monotone, lipschitz_ok=lipschitz_ok,
                               rate=rate, slack_rate=slack_rate,
                               max_excess=max_excess,
                               passed=monotone and lipschitz_ok)


@dataclass(frozen=True)
class CandidateReport:
    """Bisection output for the homogenized velocity candidates.

    r_lower is the largest obstacle speed whose Sub-side flatness stays below
    eps^beta for every eps in the list; r_upper the smallest speed whose
    Super-side flatness does. Iterating yields (r_lower, r_upper).
    """

    r_lower: float
    r_upper: float
    beta: float
    eps_list: tuple
    bounds: MediumBounds
    diagnostics: dict = field(compare=False)

    def __iter__(self):
        return iter((self.r_lower, self.r_upper))


def homogenized_candidates(medium: Medium, q: float, beta: float = 0.9,
                           eps_list: Sequence[float] = (0.05, 0.02, 0.01, 0.005),
                           T: float = 1.0, dt: Optional[float] = None,
                           resolution: int = 80) -> CandidateReport:
    """Bisect the flatness-threshold predicates over r in [m*q, M*q].

    The Sub-side predicate (flatness < eps^beta for all eps) is monotone
    nonincreasing in r, so its sup is found by bisection from a true lower
    anchor at m*q; the Super-side predicate is nondecreasing and its inf is
    anchored at M*q. Bracket failures raise instead of clamping.
    """
    if medium.dim != 1:
        raise ValidationError("candidate extraction is one-dimensional")
    if not q > 0:
        raise ValidationError(f"q must be > 0, got {q}")
    if not 0.8 < beta < 1.0:
        raise ValidationError(f"beta must lie in (4/5, 1), got {beta}")
    if not T > 0:
        raise ValidationError(f"T must be > 0, got {T}")
    eps_list = tuple(float(e) for e in eps_list)
    if not eps_list or any(e <= 0 for e in eps_list):
        raise ValidationError("eps_list must be nonempty and positive")
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValidationError("eps_list must be strictly decreasing")
    if dt is not None and min(eps_list) < 10.0 * dt - 1e-15:
        raise ValidationError("every eps must be at least 10*dt")

    bounds = estimate_bounds(medium, resolution=resolution)
    diagnostics: dict = {"beta": beta, "eps_list": eps_list}

    if bounds.M - bounds.m <= 1e-9:
        c = float(medium(0.0, 0.0))
        diagnostics["constant_medium"] = c
        return CandidateReport(r_lower=c * q, r_upper=c * q, beta=beta,
                               eps_list=eps_list, bounds=bounds,
                               diagnostics=diagnostics)

    def flatness_profile(r: float, side: Side) -> dict:
        return {e: _final_flatness(medium, q, r, e, side, T,
                                   dt if dt is not None else e / 20.0)
                for e in eps_list}

    def predicate(r: float, side: Side) -> bool:
        for e in eps_list:
            step = dt if dt is not None else e / 20.0
            if _final_flatness(medium, q, r, e, side, T, step) >= e ** beta:
                return False
        return True

    lo_anchor, hi_anchor = bounds.m * q, bounds.M * q

    # r_lower = sup of the Sub-side down-set {r : flatness stays small}
    if not predicate(lo_anchor, Side.SUB):
        raise NumericalError(
            "candidate bracket failure: Sub-side flatness exceeds the "
            "threshold already at r = m*q"
        )
    if predicate(hi_anchor, Side.SUB):
        r_lower = hi_anchor
    else:
        lo, hi = lo_anchor, hi_anchor
        while hi - lo > 1e-4:
            mid = 0.5 * (lo + hi)
            if predicate(mid, Side.SUB):
                lo = mid
            else:
                hi = mid
        r_lower = lo

    # r_upper = inf of the Super-side up-set {r : flatness stays small}
    if not predicate(hi_anchor, Side.SUPER):
        raise NumericalError(
            "candidate bracket failure: Super-side flatness exceeds the "
            "threshold even at r = M*q"
        )
    if predicate(lo_anchor, Side.SUPER):
        r_upper = lo_anchor
    else:
        lo, hi = lo_anchor, hi_anchor
        while hi - lo > 1e-4:
            mid = 0.5 * (lo + hi)
            if predicate(mid, Side.SUPER):
                hi = mid
            else:
                lo = mid
        r_upper = hi

    diagnostics["sub"] = {"candidate": r_lower,
                          "flatness": flatness_profile(r_lower, Side.SUB),
                          "thresholds": {e: e ** beta for e in eps_list}}
    diagnostics["super"] = {"candidate": r_upper,
                            "flatness": flatness_profile(r_upper, Side.SUPER),
                            "thresholds": {e: e ** beta for e in eps_list}}
    return CandidateReport(r_lower=r_lower, r_upper=r_upper, beta=beta,
                           eps_list=eps_list, bounds=bounds,
                           diagnostics=diagnostics)


def _curve_batch(medium: Medium, qs: np.ndarray, T: float, dt: float,
                 x0: float) -> tuple[np.ndarray, np.ndarray]:
    """Joint RK4 sweep over a q-array; returns (r_hat, refined) per q."""
    fn = medium._fn
    steps = max(2, round(T / dt))
    steps += steps % 2
    h = T / steps
    half = 0.5 * h
    x = np.full(qs.shape, float(x0))
    x_half = None
    for k in range(steps):
        t = k * h
        k1 = qs * fn({"x1": x, "t": t})
        k2 = qs * fn({"x1": x + half * k1, "t": t + half})
        k3 = qs * fn({"x1": x + half * k2, "t": t + half})
        k4 = qs * fn({"x1": x + h * k3, "t": t + h})
        x = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if k + 1 == steps // 2:
            x_half = x.copy()
    if not np.all(np.isfinite(x)):
        raise NumericalError("medium evaluation produced a non-finite front position")
    r_hat = (x - x0) / T
    r_half = (x_half - x0) / (T / 2.0)
    return r_hat, 2.0 * r_hat - r_half


def velocity_curve(medium: Medium, q_min: float, q_max: float, samples: int,
                   T: float = 200.0, dt: float = 0.02,
                   x0: float = 0.0) -> VelocityCurve:
    """Effective velocities over a q-grid, integrated jointly in one sweep."""
    if not 0 < q_min < q_max:
        raise ValidationError(f"need 0 < q_min < q_max, got {q_min}, {q_max}")
    if not (isinstance(samples, int) and samples >= 2):
        raise ValidationError(f"samples must be an integer >= 2, got {samples!r}")
    if not T >= 10:
        raise ValidationError(f"T must be >= 10, got {T}")
    if not dt > 0:
        raise ValidationError(f"dt must be > 0, got {dt}")
    if medium.dim != 1:
        raise ValidationError("velocity curves are one-dimensional")

    qs = np.linspace(q_min, q_max, samples)
    r_hat, refined = _curve_batch(medium, qs, T, dt, x0)
    return VelocityCurve(q=qs, r_hat=r_hat, refined=refined,
                         T=T, error_bound=1.0 / T)
