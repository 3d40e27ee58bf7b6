"""Closed-form radial sub/supersolution barriers and quantitative bounds.

Expanding barriers grow from a point source at the slow speed bound m;
contracting barriers close a hole no faster than the fast bound M allows.
Both are radial profiles glued to a moving free-boundary radius rho(t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .errors import NumericalError, ValidationError
from .medium import Medium, eval_scaled


@dataclass(frozen=True)
class RadialExpanding:
    """Self-similar expanding barrier with front rho(t) = sqrt(alpha*K*m*t)."""

    n: int
    m: float
    K: float
    A: float
    alpha: float

    def rho(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise ValidationError("rho(t) needs t >= 0")
        out = np.sqrt(self.alpha * self.K * self.m * t)
        return float(out) if out.ndim == 0 else out

    def rho_prime(self, t):
        if not t > 0:
            raise ValidationError("rho'(t) needs t > 0")
        return self.alpha * self.K * self.m / (2.0 * self.rho(t))

    def profile(self, s):
        """Radial profile psi(s), s = |x|/rho(t): K inside s<=A, 0 at s>=1."""
        s = np.asarray(s, dtype=float)
        if self.n >= 3:
            raw = self.K * np.maximum(s ** (2 - self.n) - 1.0, 0.0) / (
                self.A ** (2 - self.n) - 1.0)
        else:
            with np.errstate(divide="ignore"):
                raw = self.K * np.maximum(-np.log(s), 0.0) / (-math.log(self.A))
        out = np.minimum(raw, self.K)
        return float(out) if out.ndim == 0 else out

    def value(self, x_norm, t):
        if not t > 0:
            raise ValidationError("barrier value needs t > 0")
        return self.profile(np.asarray(x_norm, dtype=float) / self.rho(t))

    def front_gradient(self, t):
        """|D psi^+| at |x| = rho(t), the one-sided slope at the front."""
        if not t > 0:
            raise ValidationError("front gradient needs t > 0")
        if self.n >= 3:
            slope = self.K * (self.n - 2) / (self.A ** (2 - self.n) - 1.0)
        else:
            slope = self.K / (-math.log(self.A))
        return slope / self.rho(t)


def expanding_barrier(n: int, m: float, K: float, A: float) -> RadialExpanding:
    """Expanding barrier; alpha = 2(n-2)/(A^{2-n}-1), or 2/(-ln A) for n=2."""
    if not (isinstance(n, int) and n >= 2):
        raise ValidationError(f"n must be an integer >= 2, got {n!r}")
    if not (m > 0 and K > 0):
        raise ValidationError(f"need m > 0 and K > 0, got m={m}, K={K}")
    if not 0 < A < 1:
        raise ValidationError(f"A must be in (0, 1), got {A}")
    if n >= 3:
        alpha = 2.0 * (n - 2) / (A ** (2 - n) - 1.0)
    else:
        alpha = 2.0 / (-math.log(A))
    return RadialExpanding(n=n, m=m, K=K, A=A, alpha=alpha)


def check_expanding_fbc(b: RadialExpanding, t: float) -> float:
    """Residual |rho'(t) - m*|Dpsi^+|(rho(t))| of the free-boundary law."""
    if not t > 0:
        raise ValidationError(f"t must be > 0, got {t}")
    return abs(b.rho_prime(t) - b.m * b.front_gradient(t))


def _contracting_lhs(n: int, mu: float, rho):
    """Monotone decreasing left side of the contracting radius equation."""
    rho = np.asarray(rho, dtype=float)
    if n >= 3:
        out = (0.5 * rho ** 2 - mu ** (2 - n) * rho ** n / n) / (2 - n)
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            out = 0.5 * rho ** 2 * (np.log(rho / mu) - 0.5)
    return float(out) if out.ndim == 0 else out


def contracting_radius(n: int, M: float, mu: float,
                       Kfun: Callable[[float], float], t: float) -> float:
    """Root rho in (0, mu) of the contracting radius equation at time t.

    Kfun is the cumulative integral of the boundary flux chi; admissibility
    needs M*Kfun(t) in (-mu^2/(2n), 0).
    """
    if not (isinstance(n, int) and n >= 2):
        raise ValidationError(f"n must be an integer >= 2, got {n!r}")
    if not (M > 0 and mu > 0):
        raise ValidationError(f"need M > 0 and mu > 0, got M={M}, mu={mu}")
    target = M * float(Kfun(t))
    if not -(mu ** 2) / (2 * n) < target < 0:
        raise ValidationError(
            f"t outside admissible window: M*K(t) = {target} not in "
            f"({-(mu ** 2) / (2 * n)}, 0)"
        )
    lo = 1e-14 * mu
    hi = mu * (1.0 - 1e-14)
    flo = _contracting_lhs(n, mu, lo) - target
    fhi = _contracting_lhs(n, mu, hi) - target
    if not (flo > 0 > fhi):
        raise NumericalError("contracting radius bracket failed")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _contracting_lhs(n, mu, mid) - target > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-12:
            break
    else:
        raise NumericalError("contracting radius bisection did not converge")
    return 0.5 * (lo + hi)


def _contracting_lhs_slope(n: int, mu: float, rho: float) -> float:
    if n >= 3:
        return (rho - mu ** (2 - n) * rho ** (n - 1)) / (2 - n)
    return rho * math.log(rho / mu)


@dataclass(frozen=True, eq=False)
class RadialContracting:
    """Contracting barrier data: flux chi, its integral K, earliest time t0."""

    n: int
    M: float
    mu: float
    chi: Callable[[float], float]
    Kfun: Callable[[float], float]
    t0: float

    def rho(self, t: float) -> float:
        return contracting_radius(self.n, self.M, self.mu, self.Kfun, t)


def contracting_barrier(n: int, M: float, mu: float,
                        chi: Callable[[float], float],
                        Kfun: Callable[[float], float] | None = None
                        ) -> RadialContracting:
    """Package a contracting barrier; quadrature supplies K when not given."""
    if Kfun is None:
        def Kfun(t, _chi=chi):
            val, _err = quad(_chi, 0.0, t, epsabs=1e-10, epsrel=1e-10)
            return val
    target = -(mu ** 2) / (2 * n * M)
    lo = -1.0
    while Kfun(lo) > target:
        lo *= 2.0
        if lo < -1e9:
            lo = -math.inf
            break
    if lo == -math.inf:
        t0 = -math.inf
    else:
        hi = 0.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if Kfun(mid) > target:
                hi = mid
            else:
                lo = mid
            if hi - lo <= 1e-12 * max(1.0, abs(lo)):
                break
        t0 = 0.5 * (lo + hi)
    return RadialContracting(n=n, M=M, mu=mu, chi=chi, Kfun=Kfun, t0=t0)


def closing_criterion(n: int, M: float, mu: float,
                      chi: Callable[[float], float],
                      t1: float, t2: float) -> bool:
    """True iff the integral of chi over [t1, t2] is below mu^2/(2nM)."""
    if not t1 < t2:
        raise ValidationError(f"need t1 < t2, got {t1}, {t2}")
    integral, _err = quad(chi, t1, t2, epsabs=1e-10, epsrel=1e-10)
    return integral < mu ** 2 / (2 * n * M)


def nondegeneracy_bound(n: int, M: float, mu: float, dt: float) -> float:
    """Lower bound mu^2/(2nM*dt) on the peak value needed to close a hole."""
    if not (n >= 2 and M > 0 and mu > 0 and dt > 0):
        raise ValidationError("all parameters must be positive (n >= 2)")
    return mu ** 2 / (2 * n * M * dt)


def expansion_radius(n: int, K: float, M: float, dt: float) -> float:
    """Upper bound sqrt(2nKM*dt) on how far the wet set can spread."""
    if not (n >= 2 and K > 0 and M > 0 and dt >= 0):
        raise ValidationError("need n >= 2, K > 0, M > 0, dt >= 0")
    return math.sqrt(2 * n * K * M * dt)


def rational_bound_check(n: int, M: float, mu: float, sigma: float,
                         A: float, eps: float) -> bool:
    """Evaluate sigma < eps*(exp(mu^2/(2nMA)) - 1) exactly as written."""
    if not (n >= 2 and M > 0 and mu > 0 and A > 0 and eps > 0 and sigma >= 0):
        raise ValidationError("parameters must be positive (sigma >= 0)")
    return sigma < eps * (math.exp(mu ** 2 / (2 * n * M * A)) - 1.0)


def thin_cylinder_phi(xp_norm, xn, n: int):
    """Comparison profile sqrt(1+|x'|^2/n)*cos(x_n) - 3/2 and its Laplacian.

    Superharmonic (laplacian < 0) on |x_n| < pi/2; vectorized over inputs.
    """
    if not (isinstance(n, int) and n >= 1):
        raise ValidationError(f"n must be an integer >= 1, got {n!r}")
    r = np.asarray(xp_norm, dtype=float)
    xn = np.asarray(xn, dtype=float)
    w = np.sqrt(1.0 + r ** 2 / n)
    value = w * np.cos(xn) - 1.5
    lap = -(n + 2 * r ** 2 + n * r ** 2 + r ** 4) * np.cos(xn) / (
        n ** 2 * ((n + r ** 2) / n) ** 1.5)
    if value.ndim == 0:
        return float(value), float(lap)
    return value, lap


def thin_cylinder_margin(R: float, K: float, delta: float, n: int) -> float:
    """Shrunk radius R' = R - (6 sqrt(n)/pi) (K+2) delta."""
    if not (R > 0 and K > 0 and delta > 0 and n >= 1):
        raise ValidationError("need R, K, delta > 0 and n >= 1")
    return R - (6.0 * math.sqrt(n) / math.pi) * (K + 2.0) * delta


@dataclass(frozen=True)
class RadialPerturbation:
    """Radial profile phi on the annulus 1 <= |x| <= 2 with phi^(2-n) harmonic.

    Fixed by phi(2) = 1 and phi(1) = 6; satisfies phi*lap(phi) =
    (n-1)|Dphi|^2 (the perturbation inequality holds with equality).
    """

    n: int
    a: float
    b: float

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        w = self.a + self.b * s ** (2 - self.n)
        out = w ** (1.0 / (2 - self.n))
        return float(out) if out.ndim == 0 else out

    def deriv(self, s):
        s = np.asarray(s, dtype=float)
        n = self.n
        w = self.a + self.b * s ** (2 - n)
        beta = (n - 1.0) / (2.0 - n)
        out = self.b * s ** (1 - n) * w ** beta
        return float(out) if out.ndim == 0 else out

    def second_deriv(self, s):
        s = np.asarray(s, dtype=float)
        n = self.n
        w = self.a + self.b * s ** (2 - n)
        beta = (n - 1.0) / (2.0 - n)
        out = (self.b * (1 - n) * s ** (-n) * w ** beta
               + self.b ** 2 * (n - 1) * s ** (2 - 2 * n) * w ** (beta - 1))
        return float(out) if out.ndim == 0 else out

    def laplacian(self, s):
        s = np.asarray(s, dtype=float)
        out = self.second_deriv(s) + (self.n - 1) * self.deriv(s) / s
        return float(out) if out.ndim == 0 else out

    def inequality_residual(self, s):
        """phi*lap(phi) - (n-1)|Dphi|^2, nonnegative up to rounding."""
        s = np.asarray(s, dtype=float)
        out = self(s) * self.laplacian(s) - (self.n - 1) * self.deriv(s) ** 2
        return float(out) if out.ndim == 0 else out


def radial_perturbation(n: int) -> RadialPerturbation:
    """Solve the two boundary conditions for (a, b) and verify the inequality."""
    if not (isinstance(n, int) and n >= 3):
        raise ValidationError(
            f"radial perturbation requires integer n >= 3, got {n!r}"
        )
    # phi(2) = 1 and phi(1) = 6 in the harmonic variable w = phi^(2-n)
    b = (1.0 - 6.0 ** (2 - n)) / (2.0 ** (2 - n) - 1.0)
    a = 6.0 ** (2 - n) - b
    rp = RadialPerturbation(n=n, a=a, b=b)
    radii = np.linspace(1.0, 2.0, 100)
    res = rp.inequality_residual(radii)
    # The identity holds exactly; the tolerance only absorbs rounding, so it
    # must scale with the size of the cancelling terms (which grows ~6^{2n-2}).
    budget = 1e-9 * np.maximum(1.0, (n - 1) * rp.deriv(radii) ** 2)
    if np.any(res < -budget):
        worst = np.min(res / budget)
        raise NumericalError(
            f"radial perturbation inequality violated: scaled residual {worst}"
        )
    return rp


class PerturbedContractingField:
    """Contracting barrier minus kappa*(|x|^2 - rho(t)^2)_+, constant flux.

    Supplies value/dt/grad/laplacian closed forms on the annulus, making it
    a strict superbarrier for media bounded above by M - delta (kappa small).
    """

    def __init__(self, n: int, M: float, mu: float, chi0: float, kappa: float):
        if not (isinstance(n, int) and n >= 2):
            raise ValidationError(f"n must be an integer >= 2, got {n!r}")
        if not (M > 0 and mu > 0 and chi0 > 0 and kappa >= 0):
            raise ValidationError("need M, mu, chi0 > 0 and kappa >= 0")
        self.n = n
        self.M = M
        self.mu = mu
        self.chi0 = chi0
        self.kappa = kappa
        self.t0 = -(mu ** 2) / (2 * n * M * chi0)

    def rho(self, t: float) -> float:
        return contracting_radius(self.n, self.M, self.mu,
                                  lambda s: self.chi0 * s, t)

    def rho_prime(self, t: float) -> float:
        return self.M * self.chi0 / _contracting_lhs_slope(self.n, self.mu, self.rho(t))

    def _profile_parts(self, s: float, t: float):
        rho = self.rho(t)
        n, mu = self.n, self.mu
        if n >= 3:
            N = rho ** (2 - n) - s ** (2 - n)
            D = rho ** (2 - n) - mu ** (2 - n)
            dNDs = (n - 2) * s ** (1 - n) / D
            dNDrho = (2 - n) * rho ** (1 - n) * (s ** (2 - n) - mu ** (2 - n)) / D ** 2
        else:
            N = math.log(s / rho)
            D = math.log(mu / rho)
            dNDs = 1.0 / (s * D)
            dNDrho = math.log(s / mu) / (rho * D ** 2)
        return rho, N / D, dNDs, dNDrho

    def value(self, x, t: float) -> float:
        x = np.asarray(x, dtype=float)
        s = float(np.linalg.norm(x))
        rho, ratio, _, _ = self._profile_parts(max(s, 1e-300), t)
        if s <= rho:
            return 0.0
        return self.chi0 * ratio - self.kappa * (s ** 2 - rho ** 2)

    def _snap(self, x, t: float) -> tuple[float, float]:
        """Radius |x| with values within rounding of rho(t) snapped onto it.

        Derivatives at the front mean positive-side limits, so a radius that
        lands a few ulps inside rho must not fall into the zero region.
        """
        s = float(np.linalg.norm(np.asarray(x, dtype=float)))
        rho = self.rho(t)
        if abs(s - rho) <= 1e-12 * rho:
            return rho, rho
        return s, rho

    def dt(self, x, t: float) -> float:
        s, rho = self._snap(x, t)
        if s < rho:
            return 0.0
        _, _, _, dNDrho = self._profile_parts(max(s, 1e-300), t)
        rp = self.rho_prime(t)
        return self.chi0 * dNDrho * rp + self.kappa * 2.0 * rho * rp

    def grad(self, x, t: float) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        s, rho = self._snap(x, t)
        if s == 0.0 or s < rho:
            return np.zeros_like(x)
        _, _, dNDs, _ = self._profile_parts(s, t)
        radial = self.chi0 * dNDs - 2.0 * self.kappa * s
        return radial * x / float(np.linalg.norm(x))

    def laplacian(self, x, t: float) -> float:
        s, rho = self._snap(x, t)
        if s < rho:
            return 0.0
        return -2.0 * self.n * self.kappa


@dataclass(frozen=True)
class BarrierReport:
    """Margins/violations of the strict superbarrier inequalities."""

    margins: dict
    residuals: dict
    verdict: dict
    passed: bool
    interior_count: int
    front_count: int


def check_superbarrier(field, medium: Medium, samples, c: float,
                       eps: float = 1.0) -> BarrierReport:
    """Verify -lap > c inside and |Dphi+| > c, phi_t - g|Dphi+|^2 > c on the front.

    `field` provides value/dt/grad/laplacian at the sampled (x, t) points;
    front points are those with |value| <= 1e-8 * (max sampled |value|).
    """
    if not c > 0:
        raise ValidationError(f"c must be > 0, got {c}")
    samples = list(samples)
    if not samples:
        raise ValidationError("no sample points supplied")
    values = [float(field.value(x, t)) for x, t in samples]
    scale = max(max(abs(v) for v in values), 1e-300)
    front_tol = 1e-8 * scale

    inf = math.inf
    margins = {"interior_superharmonic": inf, "front_gradient": inf,
               "front_speed": inf}
    interior_count = front_count = 0
    for (x, t), v in zip(samples, values):
        if v > front_tol:
            interior_count += 1
            margin = -float(field.laplacian(x, t)) - c
            margins["interior_superharmonic"] = min(
                margins["interior_superharmonic"], margin)
        elif abs(v) <= front_tol:
            front_count += 1
            grad = np.asarray(field.grad(x, t), dtype=float)
            gnorm = float(np.linalg.norm(grad))
            speed = float(field.dt(x, t)) - float(eval_scaled(medium, eps, x, t)) * gnorm ** 2
            margins["front_gradient"] = min(margins["front_gradient"], gnorm - c)
            margins["front_speed"] = min(margins["front_speed"], speed - c)
        # points with v < -front_tol lie outside the closed positive set

    residuals = {k: max(0.0, -v) if math.isfinite(v) else 0.0
                 for k, v in margins.items()}
    verdict = {k: math.isfinite(v) and v > 0 for k, v in margins.items()
               if math.isfinite(v)}
    passed = all(verdict.values()) if verdict else False
    return BarrierReport(margins=margins, residuals=residuals, verdict=verdict,
                         passed=passed, interior_count=interior_count,
                         front_count=front_count)
