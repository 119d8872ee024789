"""Explicit finite-volume solver for ``u_t = div(|grad u^m|^{p-2} grad u^m) + f(u)``.

One-dimensional problems live on ``[-L, L]``; radially symmetric problems in
N dimensions on ``[0, L]`` with a symmetry face at ``r = 0``. Fluxes are
evaluated at cell faces from the two adjacent cells and the update is forward
Euler, which is monotone below the step bound of :func:`stable_dt`. Cells
outside the support of a degenerate solution stay exactly zero, so each step
only touches the current support plus one cell on either side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
import sympy as sp
from scipy.special import gamma as gamma_fn

from .core import Params, Reaction, ReactionKind
from .errors import CFLError, DomainError, GridTooSmall, InsufficientData
from .wave_finder import change_sign_tw, critical_delta, find_cstar, zero_to_a_tw

SIGMA_D = 0.4
SIGMA_R = 0.1
D_MIN = 1e-14
U_TINY = 1e-10
DT_MAX = 0.1
# for p < 2 the diffusivity |dw|^(p-2) is unbounded at flat spots; the step
# bound uses gradients floored at this fraction of the largest one
GRAD_FLOOR = 1e-3
BOUND_SLACK = 1e-12


class GridKind(str, Enum):
    Line1D = "line"
    RadialND = "radial"


@dataclass(frozen=True)
class Grid:
    """Uniform cell-centred grid.

    ``Line1D`` covers ``[-L, L]``; ``RadialND`` covers ``[0, L]`` in the
    radial variable of an N-dimensional radially symmetric problem.
    """

    kind: GridKind
    L: float
    dx: float
    N: int = 1

    def __post_init__(self) -> None:
        if not (self.dx > 0 and self.L > 0):
            raise DomainError("L and dx must be positive")
        if self.kind is GridKind.RadialND and self.N < 2:
            raise DomainError("radial grids need N >= 2")
        if self.kind is GridKind.Line1D and self.N != 1:
            raise DomainError("line grids have N = 1")
        extent = self.L * (2.0 if self.kind is GridKind.Line1D else 1.0)
        n = extent / self.dx
        if abs(n - round(n)) > 1e-8 * n:
            raise DomainError("the extent must be a whole number of cells")

    @property
    def n(self) -> int:
        factor = 2.0 if self.kind is GridKind.Line1D else 1.0
        return int(round(factor * self.L / self.dx))

    @cached_property
    def x(self) -> np.ndarray:
        lo = -self.L if self.kind is GridKind.Line1D else 0.0
        return lo + (np.arange(self.n) + 0.5) * self.dx

    @cached_property
    def volumes(self) -> np.ndarray:
        """Cell measures: dx in 1D, shell volumes (without the sphere area) radially."""
        if self.kind is GridKind.Line1D:
            return np.full(self.n, self.dx)
        N = self.N
        edges = np.arange(self.n + 1) * self.dx
        return (edges[1:] ** N - edges[:-1] ** N) / N

    @cached_property
    def coeffs(self) -> tuple[np.ndarray, np.ndarray]:
        """Face area over cell volume for the right and left face of each cell.

        Boundary faces carry no flux and get coefficient 0.
        """
        n = self.n
        if self.kind is GridKind.Line1D:
            area = np.ones(n + 1)
        else:
            area = (np.arange(n + 1) * self.dx) ** (self.N - 1)
        area[0] = area[-1] = 0.0
        return area[1:] / self.volumes, area[:-1] / self.volumes

    @property
    def sphere_area(self) -> float:
        """Area of the unit sphere in R^N (1 for the line, counting one side)."""
        if self.kind is GridKind.Line1D:
            return 1.0
        return 2.0 * math.pi ** (self.N / 2.0) / gamma_fn(self.N / 2.0)

    def mass(self, u: np.ndarray) -> float:
        """Discrete integral of u, the quantity the scheme conserves."""
        return float(self.sphere_area * np.dot(self.volumes, u))


def line_grid(L: float, dx: float) -> Grid:
    return Grid(GridKind.Line1D, float(L), float(dx), 1)


def radial_grid(L: float, dx: float, N: int) -> Grid:
    return Grid(GridKind.RadialND, float(L), float(dx), int(N))


@dataclass
class PdeState:
    u: np.ndarray
    t: float
    mass: float


def make_state(grid: Grid, u, t: float = 0.0) -> PdeState:
    """Wrap cell values, checking ``0 <= u <= 1``."""
    u = np.array(u, dtype=float)
    if u.shape != (grid.n,):
        raise DomainError(f"expected {grid.n} cell values, got shape {u.shape}")
    _check_bounds(u)
    return PdeState(u, float(t), grid.mass(u))


def _check_bounds(u: np.ndarray) -> None:
    lo, hi = float(u.min()), float(u.max())
    if lo < -BOUND_SLACK or hi > 1.0 + BOUND_SLACK or not math.isfinite(lo + hi):
        raise DomainError(f"u left [0, 1]: min {lo:.3g}, max {hi:.3g}")


@dataclass
class FrontTrace:
    """Right-hand front positions sampled in time."""

    level: float
    times: list = field(default_factory=list)
    positions: list = field(default_factory=list)
    support_edge: list = field(default_factory=list)

    def record(self, grid: Grid, state: PdeState) -> None:
        if self.times and state.t <= self.times[-1]:
            return
        self.times.append(state.t)
        self.positions.append(level_position(grid, state.u, self.level))
        self.support_edge.append(support_edge(grid, state.u))

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (np.asarray(self.times, float), np.asarray(self.positions, float),
                np.asarray(self.support_edge, float))


def level_position(grid: Grid, u: np.ndarray, level: float) -> float:
    """Outermost crossing of ``level`` on the right half, by linear interpolation.

    NaN when u stays below the level everywhere.
    """
    above = np.flatnonzero(u >= level)
    if above.size == 0:
        return math.nan
    i = int(above[-1])
    if i == u.size - 1:
        return float(grid.x[-1])
    x0, x1 = grid.x[i], grid.x[i + 1]
    u0, u1 = u[i], u[i + 1]
    return float(x0 + (u0 - level) / (u0 - u1) * (x1 - x0))


def support_edge(grid: Grid, u: np.ndarray) -> float:
    """Centre of the last cell with ``u > U_TINY`` (NaN if there is none)."""
    pos = np.flatnonzero(u > U_TINY)
    return float(grid.x[pos[-1]]) if pos.size else math.nan


# ------------------------------------------------------------------ scheme

def _face_flux(dw: np.ndarray, p: float) -> np.ndarray:
    if p == 2.0:
        return dw
    return np.sign(dw) * np.abs(dw) ** (p - 1.0)


def dnl_flux(params: Params, u_left, u_right, dx: float):
    """Face flux ``|dw|^(p-2) dw`` with ``dw = (u_right^m - u_left^m)/dx``."""
    ul = np.asarray(u_left, dtype=float)
    ur = np.asarray(u_right, dtype=float)
    if np.any(ul < 0) or np.any(ur < 0):
        raise DomainError("u must be nonnegative")
    out = _face_flux((ur ** params.m - ul ** params.m) / dx, params.p)
    return float(out) if np.ndim(out) == 0 else out


def _face_diffusivity(params: Params, u: np.ndarray, w: np.ndarray, dw: np.ndarray) -> np.ndarray:
    """``(p-1) |dw|^(p-2) * dw/du`` per face, with the secant of ``u -> u^m``."""
    m, p = params.m, params.p
    du = np.diff(u)
    dwdu = np.empty_like(du)
    flat = du == 0.0
    np.divide(np.diff(w), du, out=dwdu, where=~flat)
    if np.any(flat):
        uf = u[:-1][flat]
        with np.errstate(divide="ignore"):
            dwdu[flat] = np.where(uf > 0, m * uf ** (m - 1.0), m if m == 1.0 else 0.0)
    if p == 2.0:
        g = 1.0
    else:
        a = np.abs(dw)
        if p < 2.0:
            a = np.maximum(a, max(GRAD_FLOOR * float(a.max(initial=0.0)), 1e-12))
        g = a ** (p - 2.0)
    return (p - 1.0) * g * dwdu


def _diffusive_dt_from(D: np.ndarray, dx: float, cp: np.ndarray, cm: np.ndarray) -> float:
    load = np.zeros(cp.size)
    load[:-1] += cp[:-1] * D
    load[1:] += cm[1:] * D
    worst = max(float(load.max(initial=0.0)), 2.0 * D_MIN / dx)
    return SIGMA_D * 2.0 * dx / worst


def _diffusive_dt(params: Params, u: np.ndarray, dx: float, cp: np.ndarray,
                  cm: np.ndarray) -> float:
    w = u ** params.m
    D = _face_diffusivity(params, u, w, np.diff(w) / dx)
    return _diffusive_dt_from(D, dx, cp, cm)


def stable_dt(params: Params, reaction: Reaction | None, state: PdeState, grid: Grid,
              dt_max: float = DT_MAX) -> float:
    """Largest forward-Euler step keeping the scheme monotone.

    Diffusion: ``SIGMA_D * dx^2 / max D`` on a line, with ``D`` the face
    diffusivity ``(p-1) |dw|^(p-2) dw/du`` floored at ``D_MIN``; on radial
    grids the face-area weights replace the factor ``2/dx^2``. Reaction:
    ``SIGMA_R / max|f'|``. Both are capped by ``dt_max``.
    """
    cp, cm = grid.coeffs
    dt = min(_diffusive_dt(params, state.u, grid.dx, cp, cm), dt_max)
    if reaction is not None:
        dt = min(dt, SIGMA_R / max(reaction.lipschitz(), 1e-300))
    return dt


def _rates(params: Params, reaction: Reaction | None, seg: np.ndarray, dx: float,
           cp: np.ndarray, cm: np.ndarray) -> tuple[np.ndarray, float]:
    """Time derivative on a run of cells whose outer neighbours are inert, and its step bound."""
    w = seg ** params.m
    dw = np.diff(w) / dx
    dt = _diffusive_dt_from(_face_diffusivity(params, seg, w, dw), dx, cp, cm)
    F = _face_flux(dw, params.p)
    div = np.zeros_like(seg)
    div[:-1] += cp[:-1] * F
    div[1:] -= cm[1:] * F
    if reaction is not None:
        div += reaction.f(seg)
    return div, dt


def step(params: Params, reaction: Reaction | None, state: PdeState, grid: Grid,
         dt: float) -> PdeState:
    """One explicit Euler step; boundaries carry no flux.

    Raises
    ------
    CFLError
        If ``dt`` exceeds :func:`stable_dt` (with ``dt_max`` ignored).
    """
    bound = stable_dt(params, reaction, state, grid, dt_max=math.inf)
    if dt > bound * (1.0 + 1e-12):
        raise CFLError(f"dt={dt:.3g} exceeds the stable bound {bound:.3g}")
    cp, cm = grid.coeffs
    rate, _ = _rates(params, reaction, state.u, grid.dx, cp, cm)
    u = state.u + dt * rate
    return PdeState(u, state.t + dt, grid.mass(u))


def _active_range(u: np.ndarray) -> tuple[int, int]:
    nz = np.flatnonzero(u)
    if nz.size == 0:
        return 0, 0
    return max(int(nz[0]) - 1, 0), min(int(nz[-1]) + 2, u.size)


def simulate(params: Params, reaction: Reaction | None, grid: Grid, u0, t_end: float,
             callbacks: Sequence[Callable[[PdeState], None]] = (), sample_dt: float = 1.0,
             level: float = 0.5, stop: Callable[[PdeState], bool] | None = None,
             dt_max: float = DT_MAX, t0: float = 0.0) -> tuple[PdeState, FrontTrace]:
    """March from ``u0`` at ``t0`` to ``t_end`` with the adaptive stable step.

    Every ``sample_dt`` (and at the end) the front trace is updated, the
    bounds ``0 <= u <= 1`` are checked, each callback receives the current
    state, and ``stop(state)`` may end the run early.
    """
    if not t_end > t0:
        raise DomainError("t_end must exceed the start time")
    if not sample_dt > 0:
        raise DomainError("sample_dt must be positive")
    state = make_state(grid, u0, t0)
    u = state.u
    trace = FrontTrace(level)
    cp, cm = grid.coeffs
    lip = reaction.lipschitz() if reaction is not None else 0.0
    dt_cap = min(dt_max, SIGMA_R / lip) if lip > 0 else dt_max
    lo, hi = _active_range(u)
    t = t0
    n_samples = 0

    def sample() -> bool:
        _check_bounds(u)
        st = PdeState(u.copy(), t, grid.mass(u))
        trace.record(grid, st)
        for cb in callbacks:
            cb(st)
        return bool(stop is not None and stop(st))

    if sample():
        return PdeState(u, t, grid.mass(u)), trace
    next_sample = t0 + sample_dt
    while t < t_end:
        t_target = min(next_sample, t_end)
        dt = dt_cap
        if hi > lo:
            rate, dt_d = _rates(params, reaction, u[lo:hi], grid.dx, cp[lo:hi], cm[lo:hi])
            dt = min(dt, dt_d)
        reached = t + dt >= t_target - 1e-12 * max(1.0, abs(t_target))
        if reached:
            dt = t_target - t
        if hi > lo:
            u[lo:hi] += dt * rate
            if lo > 0 and u[lo] != 0.0:
                lo -= 1
            if hi < grid.n and u[hi - 1] != 0.0:
                hi += 1
        t = t_target if reached else t + dt
        if reached:
            n_samples += 1
            next_sample = t0 + (n_samples + 1) * sample_dt
            if sample():
                break
    return PdeState(u, t, grid.mass(u)), trace


# ------------------------------------------------------------- Barenblatt

def _barenblatt_exponents(params: Params, N: int) -> tuple[float, float]:
    p = params.p
    if params.pseudo_linear:
        return N / p, 1.0 / p
    alpha = 1.0 / (params.gamma + p / N)
    return alpha, alpha / N


def barenblatt_k(params: Params, N: int) -> float:
    """Shape constant of the self-similar profile of pure diffusion.

    ``(gamma/(m p)) (alpha/N)^(1/(p-1))`` for gamma > 0 and
    ``(p-1) p^(-p/(p-1)) / m`` for gamma = 0; both agree with
    :func:`barenblatt_k_residual`.
    """
    if N < 1:
        raise DomainError("N must be a positive integer")
    m, p = params.m, params.p
    if params.pseudo_linear:
        return (p - 1.0) * p ** (-p / (p - 1.0)) / m
    alpha, _ = _barenblatt_exponents(params, N)
    return params.gamma / (m * p) * (alpha / N) ** (1.0 / (p - 1.0))


def barenblatt_k_residual(params: Params, N: int, points=((0.3, 1.3), (0.7, 2.0)),
                          k_guess: float = 0.1) -> list[float]:
    """Solve for k by substituting the self-similar ansatz into the radial PDE.

    The residual ``u_t - r^(1-N) (r^(N-1) |w_r|^(p-2) w_r)_r`` of
    ``u = t^(-alpha) F(r t^(-alpha/N))`` with ``C = 1`` is formed
    symbolically and its root in k found at each ``(r, t)`` in ``points``;
    a consistent ansatz gives the same k everywhere.
    """
    r, t, k = sp.symbols("r t k", positive=True)
    m = sp.nsimplify(params.m)
    p = sp.nsimplify(params.p)
    N_ = sp.Integer(N)
    q = p / (p - 1)
    if params.pseudo_linear:
        alpha = N_ / p
        shape = lambda e: sp.exp(-k * e ** q)  # noqa: E731
    else:
        g = m * (p - 1) - 1
        alpha = 1 / (g + p / N_)
        shape = lambda e: (1 - k * e ** q) ** ((p - 1) / g)  # noqa: E731
    u = t ** (-alpha) * shape(r * t ** (-alpha / N_))
    wr = sp.diff(u ** m, r)
    flux = -(-wr) ** (p - 1)  # w decreases in r inside the support
    resid = sp.diff(u, t) - sp.diff(r ** (N_ - 1) * flux, r) / r ** (N_ - 1)
    return [float(sp.nsolve(resid.subs({r: rr, t: tt}), k, k_guess)) for rr, tt in points]


def barenblatt(params: Params, N: int, C: float, x, t: float, k: float | None = None):
    """Self-similar solution ``t^(-alpha) F(|x| t^(-alpha/N))`` of pure diffusion.

    ``F(s) = (C - k s^(p/(p-1)))_+^((p-1)/gamma)`` for gamma > 0 and
    ``C exp(-k s^(p/(p-1)))`` for gamma = 0.
    """
    if not t > 0:
        raise DomainError("t must be positive")
    if not C > 0:
        raise DomainError("C must be positive")
    k = barenblatt_k(params, N) if k is None else k
    alpha, beta = _barenblatt_exponents(params, N)
    p = params.p
    s = np.abs(np.asarray(x, dtype=float)) * t ** (-beta)
    q = p / (p - 1.0)
    if params.pseudo_linear:
        F = C * np.exp(-k * s ** q)
    else:
        F = np.maximum(C - k * s ** q, 0.0) ** ((p - 1.0) / params.gamma)
    out = t ** (-alpha) * F
    return float(out) if np.ndim(out) == 0 else out


def barenblatt_radius(params: Params, N: int, C: float, t: float) -> float:
    """Free-boundary radius ``(C/k)^((p-1)/p) t^(alpha/N)`` (gamma > 0)."""
    if params.pseudo_linear:
        raise DomainError("gamma = 0 profiles are positive everywhere")
    _, beta = _barenblatt_exponents(params, N)
    k = barenblatt_k(params, N)
    return (C / k) ** ((params.p - 1.0) / params.p) * t ** beta


def barenblatt_error(params: Params, grid: Grid, C: float, t0: float = 1.0,
                     t1: float = 2.0) -> float:
    """Relative L1 error at ``t1`` of the run started from the exact profile at ``t0``."""
    N = grid.N
    u0 = barenblatt(params, N, C, grid.x, t0)
    if u0.max() > 1.0:
        raise DomainError("initial profile exceeds 1; lower C or raise t0")
    if u0[-1] > U_TINY or (grid.kind is GridKind.Line1D and u0[0] > U_TINY):
        raise GridTooSmall("the initial profile must vanish at the grid edge")
    state, _ = simulate(params, None, grid, u0, t1, t0=t0, sample_dt=t1 - t0)
    exact = barenblatt(params, N, C, grid.x, t1)
    w = grid.volumes
    return float(np.dot(w, np.abs(state.u - exact)) / np.dot(w, exact))


# ----------------------------------------------------------- initial data

def _on_grid(grid: Grid, support: float) -> None:
    if support > grid.L - 2.0 * grid.dx:
        raise GridTooSmall(f"datum needs half-width {support:.4g} but L = {grid.L:.4g}")


def make_not_reacting_datum(params: Params, reaction: Reaction, grid: Grid,
                            c_star: float | None = None, eps: float = 1e-3,
                            shrink: float = 0.99, plateau: float = 0.0) -> np.ndarray:
    """Datum below the minimum of the clamped 0-to-a wave and its reflection.

    The 0-to-a wave at speed c* is clamped at a from the point where it
    reaches a on its rising flank; the reflected wave is placed ``2 * plateau``
    further right. Their minimum is a plateau at level a over
    ``|x| <= plateau`` with the two rising flanks outside, scaled by ``shrink``.
    """
    if reaction.kind is not ReactionKind.TypeC:
        raise DomainError("not-reacting data are built for bistable reactions")
    if plateau < 0:
        raise DomainError("plateau must be nonnegative")
    if c_star is None:
        c_star = find_cstar(params, reaction, tol=1e-7, with_profile=False).c_star
    wave = zero_to_a_tw(params, reaction, c_star, eps=eps, c_star=c_star)
    a = reaction.a
    rising = wave.xi <= 0.0
    xi_r, phi_r = wave.xi[rising], wave.phi[rising]
    s = -float(np.interp(a, phi_r, xi_r))  # phi(-s) = a on the rising flank
    xi0 = wave.fb[0]
    _on_grid(grid, plateau - xi0 - s)
    r = np.abs(grid.x) if grid.kind is GridKind.Line1D else grid.x
    return shrink * np.clip(wave(-np.maximum(r - plateau, 0.0) - s), 0.0, a)


def reacting_wave(params: Params, reaction: Reaction, c: float, delta: float | None = None,
                  c_star: float | None = None):
    """Change-sign wave used by :func:`make_reacting_datum`.

    Without ``delta`` the peak offset is half way between the detected
    threshold and its upper limit.
    """
    if reaction.kind is not ReactionKind.TypeC:
        raise DomainError("reacting data are built for bistable reactions")
    if c_star is None:
        c_star = find_cstar(params, reaction, tol=1e-7, with_profile=False).c_star
    if not 0.0 <= c < c_star:
        raise DomainError(f"need 0 <= c < c* = {c_star:.6g}")
    if delta is None:
        top = 1.0 - reaction.a
        d_c = critical_delta(params, reaction, c)
        delta = d_c + 0.5 * (top - d_c)
    return change_sign_tw(params, reaction, c, delta)


def make_reacting_datum(params: Params, reaction: Reaction, grid: Grid, c: float,
                        R: float = 0.0, delta: float | None = None,
                        c_star: float | None = None) -> np.ndarray:
    """Datum above the maximum of a change-sign wave and its reflection.

    The wave has speed ``c < c*`` and its peak at the origin; ``R > 0``
    inserts a plateau at the peak height over ``|x| <= R`` (required on
    radial grids, where the wave is glued to the plateau edge).
    """
    wave = reacting_wave(params, reaction, c, delta, c_star)
    if grid.kind is GridKind.RadialND and not R > 0:
        raise DomainError("radial reacting data need a plateau R > 0")
    xi0, xi1 = wave.fb
    height = wave.peak[1]
    _on_grid(grid, R + max(-xi0, xi1))
    r = np.abs(grid.x) if grid.kind is GridKind.Line1D else grid.x
    shifted = np.maximum(r - R, 0.0)
    u0 = np.maximum(wave(shifted), wave(-shifted))
    u0[r <= R] = height
    return np.clip(u0, 0.0, 1.0)


def compact_bump(grid: Grid, height: float = 1.0, width: float = 10.0) -> np.ndarray:
    """``height * (1 - (x/width)^2)_+``, a compactly supported datum."""
    if not 0 < height <= 1:
        raise DomainError("height must lie in (0, 1]")
    _on_grid(grid, width)
    return height * np.maximum(1.0 - (grid.x / width) ** 2, 0.0)


# ------------------------------------------------------------ measurement

def measure_speed(trace: FrontTrace, window_frac: float = 0.5, which: str = "level") -> float:
    """Least-squares slope of front position over the last ``window_frac`` of the record."""
    if not 0 < window_frac <= 1:
        raise DomainError("window_frac must lie in (0, 1]")
    t, pos, edge = trace.as_arrays()
    y = pos if which == "level" else edge
    if t.size == 0:
        raise InsufficientData("empty trace")
    t_cut = t[-1] - window_frac * (t[-1] - t[0])
    sel = (t >= t_cut) & np.isfinite(y)
    if int(sel.sum()) < 10:
        raise InsufficientData(f"{int(sel.sum())} samples in the fit window, need 10")
    slope, _ = np.polyfit(t[sel], y[sel], 1)
    return float(slope)


def saturation_experiment(params: Params, reaction: Reaction, grid: Grid, u0, eps: float,
                          t_end: float = 200.0, c_star: float | None = None,
                          sample_dt: float = 1.0) -> dict:
    """Run a monostable problem and report how u settles at the intermediate zero a.

    The report holds the first sample time with ``max u <= a + eps``, the
    deviation ``max |u - a|`` over ``|x| <= 0.8 c* t`` and the maximum of u
    over ``|x| >= 1.2 c* t`` at the final time. ``converged`` is False
    (not an exception) when a threshold is missed.
    """
    if reaction.kind is not ReactionKind.TypeCPrime:
        raise DomainError("saturation runs need a monostable reaction")
    if c_star is None:
        c_star = find_cstar(params, reaction, tol=1e-7, with_profile=False).c_star
    a = reaction.a
    r = np.abs(grid.x)
    t_eps = [None]
    max_u = []

    def watch(st: PdeState) -> None:
        mu = float(st.u.max())
        max_u.append((st.t, mu))
        if t_eps[0] is None and mu <= a + eps:
            t_eps[0] = st.t

    state, trace = simulate(params, reaction, grid, u0, t_end, callbacks=[watch],
                            sample_dt=sample_dt, level=0.5 * a)
    t = state.t
    inner = r <= 0.8 * c_star * t
    outer = r >= 1.2 * c_star * t
    inner_dev = float(np.max(np.abs(state.u[inner] - a))) if inner.any() else math.nan
    outer_max = float(np.max(state.u[outer])) if outer.any() else 0.0
    try:
        speed = measure_speed(trace)
    except InsufficientData:
        speed = math.nan
    report = {
        "a": a, "eps": eps, "c_star": c_star, "t_end": t,
        "t_eps": t_eps[0],
        "max_u_final": float(state.u.max()),
        "inner_speed": 0.8 * c_star, "inner_max_dev": inner_dev,
        "outer_speed": 1.2 * c_star, "outer_max": outer_max,
        "front_speed": speed,
    }
    report["converged"] = bool(t_eps[0] is not None and inner_dev <= eps and outer_max <= eps)
    return report
