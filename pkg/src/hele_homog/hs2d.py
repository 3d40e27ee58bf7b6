"""2D strip simulator for the oscillatory free-boundary law V = g |Du+|.

The wet region {0 < x < h(y, t)} in a strip (periodic in y) is mapped to a
rectangle by the boundary-fitted coordinate xt = x / h(y); the pressure is
harmonic in the wet region with u = psi0 at the inlet x = 0 and u = 0 on the
front, and the front graph h advances along its normal at speed g^eps |Du+|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Optional, Sequence, Union

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.linalg import spsolve
from scipy.spatial.distance import cdist

from .errors import NumericalError, ValidationError
from .geometry import PlanarWave
from .homog1d import FlatnessTrace, Side
from .medium import Medium, estimate_bounds, eval_scaled


@dataclass(frozen=True)
class StripDomain:
    """Strip (0, Lx) x (0, Ly), periodic in y, on an nx-by-ny grid."""

    Lx: float
    Ly: float
    nx: int
    ny: int

    def __post_init__(self):
        if not (self.Lx > 0 and self.Ly > 0):
            raise ValidationError(f"Lx, Ly must be > 0, got {self.Lx}, {self.Ly}")
        if not (isinstance(self.nx, int) and isinstance(self.ny, int)
                and self.nx >= 8 and self.ny >= 8):
            raise ValidationError(
                f"nx, ny must be integers >= 8, got {self.nx!r}, {self.ny!r}"
            )

    @property
    def dy(self) -> float:
        return self.Ly / self.ny

    @property
    def dx_ref(self) -> float:
        return self.Lx / self.nx

    @property
    def y_nodes(self) -> np.ndarray:
        return np.arange(self.ny) * self.dy


@dataclass(frozen=True, eq=False)
class FrontGraph:
    """Single-valued front depth h_j at every tangential node, at time t."""

    heights: np.ndarray
    t: float


@dataclass(frozen=True, eq=False)
class SimConfig:
    """Simulation data: domain, medium (dim 2), inlet pressure, time horizon.

    dt (when given) caps the step; otherwise the CFL policy
    dt = cfl * spacing / (M * max slope) decides alone.
    """

    domain: StripDomain
    medium: Medium
    eps: float
    psi0: float
    T: float
    h0: Union[float, np.ndarray] = 1.0
    cfl: float = 0.4
    dt: Optional[float] = None
    save_every: int = 1

    def __post_init__(self):
        if self.medium.dim != 2:
            raise ValidationError(
                f"2D simulation needs a dim-2 medium, got dim {self.medium.dim}"
            )
        if not self.eps > 0:
            raise ValidationError(f"eps must be > 0, got {self.eps}")
        if not self.psi0 > 0:
            raise ValidationError(f"psi0 must be > 0, got {self.psi0}")
        if not self.T > 0:
            raise ValidationError(f"T must be > 0, got {self.T}")
        if not 0 < self.cfl <= 1:
            raise ValidationError(f"cfl must be in (0, 1], got {self.cfl}")
        if self.dt is not None and not self.dt > 0:
            raise ValidationError(f"dt must be > 0 when given, got {self.dt}")
        if not (isinstance(self.save_every, int) and self.save_every >= 1):
            raise ValidationError(f"save_every must be an integer >= 1")

    @cached_property
    def speed_bound(self) -> float:
        return estimate_bounds(self.medium, resolution=40).M

    def initial_front(self) -> FrontGraph:
        ny = self.domain.ny
        h = np.asarray(self.h0, dtype=float)
        if h.ndim == 0:
            h = np.full(ny, float(h))
        if h.shape != (ny,):
            raise ValidationError(
                f"h0 must be a scalar or a length-{ny} array, got shape {h.shape}"
            )
        margin = 2.0 * self.domain.dx_ref
        if not (np.all(h > margin) and np.all(h < self.domain.Lx - margin)):
            raise ValidationError(
                "initial front must stay 2 grid cells inside the strip"
            )
        return FrontGraph(heights=h, t=0.0)


def _front_derivatives(h: np.ndarray, dy: float) -> tuple[np.ndarray, np.ndarray]:
    hp = (np.roll(h, -1) - np.roll(h, 1)) / (2.0 * dy)
    hpp = (np.roll(h, -1) - 2.0 * h + np.roll(h, 1)) / dy ** 2
    return hp, hpp


def _solve_pressure(domain: StripDomain, h: np.ndarray, psi0: float
                    ) -> tuple[np.ndarray, np.ndarray]:
    """Solve the mapped Laplace equation; return (u grid, |Du| at the front).

    In xt = x/h(y) the equation becomes
      (1 + xt^2 h'^2) u_xtxt + h^2 u_yy - 2 xt h h' u_xty
        + xt (2 h'^2 - h h'') u_xt = 0,
    discretized with centered second-order differences on the unit square,
    u = psi0 at xt = 0, u = 0 at xt = 1, periodic in y.
    """
    nx, ny, dy = domain.nx, domain.ny, domain.dy
    dxt = 1.0 / nx
    hp, hpp = _front_derivatives(h, dy)

    ii, jj = np.meshgrid(np.arange(1, nx), np.arange(ny), indexing="ij")
    ii = ii.ravel()
    jj = jj.ravel()
    xt = ii * dxt
    H = h[jj]
    Hp = hp[jj]
    Hpp = hpp[jj]

    a = 1.0 + xt ** 2 * Hp ** 2
    b = H ** 2
    c = xt * H * Hp
    d = xt * (2.0 * Hp ** 2 - H * Hpp)

    center = -2.0 * a / dxt ** 2 - 2.0 * b / dy ** 2
    east = a / dxt ** 2 + d / (2.0 * dxt)
    west = a / dxt ** 2 - d / (2.0 * dxt)
    north = b / dy ** 2
    south = b / dy ** 2
    cross = c / (2.0 * dxt * dy)
    stencil = [
        (0, 0, center),
        (1, 0, east), (-1, 0, west),
        (0, 1, north), (0, -1, south),
        (1, 1, -cross), (1, -1, cross), (-1, 1, cross), (-1, -1, -cross),
    ]

    n_unknown = (nx - 1) * ny
    rows_idx = (ii - 1) * ny + jj
    rhs = np.zeros(n_unknown)
    rows, cols, vals = [], [], []
    for di, dj, coef in stencil:
        ni = ii + di
        nj = (jj + dj) % ny
        interior = (ni >= 1) & (ni <= nx - 1)
        inlet = ni == 0
        rows.append(rows_idx[interior])
        cols.append(((ni - 1) * ny + nj)[interior])
        vals.append(np.broadcast_to(coef, ii.shape)[interior])
        if np.any(inlet):
            np.add.at(rhs, rows_idx[inlet],
                      -np.broadcast_to(coef, ii.shape)[inlet] * psi0)
        # neighbors at ni == nx sit on the front where u = 0: dropped

    mat = csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n_unknown, n_unknown),
    )
    sol = spsolve(mat, rhs)
    if not np.all(np.isfinite(sol)):
        raise NumericalError("pressure solve produced non-finite values")

    u = np.empty((nx + 1, ny))
    u[0, :] = psi0
    u[1:nx, :] = sol.reshape(nx - 1, ny)
    u[nx, :] = 0.0

    # one-sided second-order normal slope at xt = 1 (u[nx] = 0)
    uxt = (u[nx - 2, :] - 4.0 * u[nx - 1, :]) / (2.0 * dxt)
    grad = np.abs(uxt) * np.sqrt(1.0 + hp ** 2) / h
    return u, grad


def _advance(state: FrontGraph, config: SimConfig,
             dt_cap: Optional[float] = None) -> tuple[FrontGraph, dict]:
    domain = config.domain
    h = np.asarray(state.heights, dtype=float)
    margin = 2.0 * domain.dx_ref
    if np.any(h >= domain.Lx - margin):
        raise NumericalError(
            "front leaves the strip: heights within 2 grid cells of x = Lx"
        )
    if np.any(h <= margin):
        raise NumericalError(
            "front leaves the strip: heights within 2 grid cells of x = 0"
        )
    hp, _ = _front_derivatives(h, domain.dy)
    if np.abs(hp).max() > 5.0:
        raise NumericalError(
            f"graph condition violated: front slope {np.abs(hp).max():.3g} > 5"
        )

    u, grad = _solve_pressure(domain, h, config.psi0)
    points = np.stack([h, domain.y_nodes], axis=-1)
    g = np.asarray(eval_scaled(config.medium, config.eps, points, state.t))
    slope = grad * np.sqrt(1.0 + hp ** 2)  # dh/dt = V * sqrt(1 + h_y^2)
    rate = g * slope

    spacing = min(float(h.min()) / domain.nx, domain.dy)
    peak = config.speed_bound * float(slope.max())
    if not peak > 0:
        raise NumericalError("front slope estimate vanished; cannot set a step")
    dt = config.cfl * spacing / peak
    if config.dt is not None:
        dt = min(dt, config.dt)
    if dt_cap is not None:
        dt = min(dt, dt_cap)
    if not dt > 0:
        raise NumericalError(f"step size collapsed to {dt}")

    new = FrontGraph(heights=h + dt * rate, t=state.t + dt)
    info = {"dt": dt, "u_min": float(u.min()), "u_max": float(u.max()),
            "max_grad": float(grad.max()), "mean_depth": float(h.mean())}
    return new, info


def step(state: FrontGraph, config: SimConfig,
         dt_cap: Optional[float] = None) -> FrontGraph:
    """One explicit front advance: solve pressure, move h along the normal."""
    new, _info = _advance(state, config, dt_cap)
    return new


@dataclass(frozen=True, eq=False)
class SimHistory:
    """Saved fronts plus per-step pressure ranges for invariant checks."""

    config: SimConfig
    times: np.ndarray
    fronts: tuple
    u_min: np.ndarray
    u_max: np.ndarray
    total_steps: int

    @property
    def final_front(self) -> FrontGraph:
        return self.fronts[-1]

    def mean_depths(self) -> np.ndarray:
        return np.array([f.heights.mean() for f in self.fronts])

    def front_speed(self, t_start: float, t_end: float) -> float:
        """Least-squares slope of the mean depth over [t_start, t_end]."""
        mask = (self.times >= t_start) & (self.times <= t_end)
        if mask.sum() < 2:
            raise ValidationError("not enough saved fronts in the fit window")
        coeffs = np.polyfit(self.times[mask], self.mean_depths()[mask], 1)
        return float(coeffs[0])

    def spacetime_points(self, max_slices: int = 60) -> np.ndarray:
        """Front samples as (t, y, h) rows, subsampled to max_slices times."""
        count = len(self.fronts)
        idx = np.unique(np.linspace(0, count - 1, min(max_slices, count)).astype(int))
        ys = self.config.domain.y_nodes
        rows = []
        for i in idx:
            f = self.fronts[i]
            rows.append(np.column_stack(
                [np.full(ys.size, f.t), ys, f.heights]))
        return np.concatenate(rows, axis=0)

    def final_points(self) -> np.ndarray:
        """Final front as (y, h) rows."""
        f = self.final_front
        return np.column_stack([self.config.domain.y_nodes, f.heights])


def simulate(config: SimConfig, max_steps: int = 200000) -> SimHistory:
    """Run the explicit front dynamics to time T, saving every save_every steps."""
    state = config.initial_front()
    times = [0.0]
    fronts = [state]
    u_mins, u_maxs = [], []
    k = 0
    while state.t < config.T - 1e-12:
        state, info = _advance(state, config, dt_cap=config.T - state.t)
        k += 1
        if k > max_steps:
            raise NumericalError(f"exceeded {max_steps} steps before reaching T")
        if k % config.save_every == 0 or state.t >= config.T - 1e-12:
            times.append(state.t)
            fronts.append(state)
            u_mins.append(info["u_min"])
            u_maxs.append(info["u_max"])
    return SimHistory(config=config, times=np.array(times), fronts=tuple(fronts),
                      u_min=np.array(u_mins), u_max=np.array(u_maxs),
                      total_steps=k)


def hausdorff(A, B, period: Optional[float] = None,
              axis: Optional[int] = None) -> float:
    """Hausdorff distance between finite point sets, optionally periodic.

    When period is given, coordinate `axis` of B is additionally shifted by
    -period, 0, +period and the pointwise minimum over shifts is used.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if A.ndim != 2 or B.ndim != 2:
        raise ValidationError("point sets must be 1- or 2-dimensional arrays")
    if A.shape[0] == 0 or B.shape[0] == 0:
        raise ValidationError("point sets must be non-empty")
    if A.shape[1] != B.shape[1]:
        raise ValidationError(
            f"point dimension mismatch: {A.shape[1]} vs {B.shape[1]}"
        )
    if period is not None:
        if axis is None or not 0 <= axis < A.shape[1]:
            raise ValidationError("periodic hausdorff needs a valid axis")
        dist = None
        for k in (-1.0, 0.0, 1.0):
            shifted = B.copy()
            shifted[:, axis] += k * period
            d = cdist(A, shifted)
            dist = d if dist is None else np.minimum(dist, d)
    else:
        dist = cdist(A, B)
    return float(max(dist.min(axis=1).max(), dist.min(axis=0).max()))


@dataclass(frozen=True)
class PairDistance:
    eps_a: float
    eps_b: float
    final_distance: float
    spacetime_distance: float


@dataclass(frozen=True, eq=False)
class HausdorffReport:
    """Consecutive-eps front distances and per-run speed estimates."""

    eps_list: tuple
    pairs: tuple
    speeds: tuple

    def distances_decreasing(self) -> bool:
        d = [p.spacetime_distance for p in self.pairs]
        return all(b <= a for a, b in zip(d, d[1:]))


def convergence_study(config: SimConfig, eps_list: Sequence[float],
                      max_slices: int = 60) -> HausdorffReport:
    """Re-run the same data per eps and compare space-time fronts pairwise."""
    eps_list = tuple(float(e) for e in eps_list)
    if len(eps_list) < 3:
        raise ValidationError("eps_list needs at least 3 values")
    if any(e <= 0 for e in eps_list):
        raise ValidationError("eps values must be > 0")
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValidationError("eps_list must be strictly decreasing")
    for e in eps_list:
        cells_y = e / config.domain.dy
        cells_x = e / config.domain.dx_ref
        if cells_y < 4 or cells_x < 4:
            raise ValidationError(
                f"resolution check failure: eps={e} has {cells_y:.2f} cells per "
                f"period in y and {cells_x:.2f} in x (need >= 4)"
            )

    histories = []
    for e in eps_list:
        cap = e / 8.0 if config.dt is None else min(config.dt, e / 8.0)
        histories.append(simulate(replace(config, eps=e, dt=cap)))

    Ly = config.domain.Ly
    speeds = tuple(h.front_speed(0.25 * config.T, config.T) for h in histories)
    pairs = []
    for (ea, ha), (eb, hb) in zip(zip(eps_list, histories),
                                  zip(eps_list[1:], histories[1:])):
        d_final = hausdorff(ha.final_points(), hb.final_points(),
                            period=Ly, axis=0)
        d_st = hausdorff(ha.spacetime_points(max_slices),
                         hb.spacetime_points(max_slices), period=Ly, axis=1)
        pairs.append(PairDistance(eps_a=ea, eps_b=eb, final_distance=d_final,
                                  spacetime_distance=d_st))
    return HausdorffReport(eps_list=eps_list, pairs=tuple(pairs), speeds=speeds)


def flatness2d(history: SimHistory, P: PlanarWave) -> FlatnessTrace:
    """Running max excess of the simulated front over the planar front of P.

    The wave must propagate along the depth axis (nu close to e_x) so the
    planar front is the graph x = r t + eta0, anchored to the initial front.
    """
    nu = P.nu
    if nu.shape != (2,) or abs(nu[0] - 1.0) > 1e-9 or abs(nu[1]) > 1e-9:
        raise ValidationError(
            "planar wave must propagate along the depth axis (+x) for "
            "graph-front comparison"
        )
    f0 = history.fronts[0]
    eta0 = float(np.max(f0.heights)) - P.r * f0.t
    detach = np.array([float(np.max(f.heights)) - (P.r * f.t + eta0)
                       for f in history.fronts])
    phi = np.maximum.accumulate(np.maximum(detach, 0.0))
    return FlatnessTrace(times=np.asarray(history.times, dtype=float),
                         phi=phi, side=Side.SUPER)
