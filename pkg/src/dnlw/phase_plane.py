"""Phase-plane trajectories for traveling waves.

A wave ``u = phi(x - c t)`` is described by the density ``X = phi`` and
``Z = -m X^(gamma/(p-1)-1) phi'``. In the parameter tau the system

    dX/dtau = (p-1) X |Z|^(p-2) Z
    dZ/dtau = c Z - |Z|^p - f_mp(X)

is free of the ``1/X`` singularity, and the physical coordinate follows
from ``dxi/dtau = -m (p-1) X^(gamma/(p-1)) |Z|^(p-2)``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np
from scipy import optimize
from scipy.integrate import BDF, LSODA
from scipy.interpolate import CubicHermiteSpline

from .core import (Params, Reaction, ReactionKind, f_mp, f_mp_at_zero, f_mp_prime,
                   weighted_integral)
from .errors import DomainError, StepFailure
from .rk import DormandPrince


class Fate(str, Enum):
    HitsAxisAboveTarget = "HitsAxisAboveTarget"
    HitsAxisBelowTarget = "HitsAxisBelowTarget"
    CrossesZZero = "CrossesZZero"
    Diverged = "Diverged"
    ReachedTarget = "ReachedTarget"


@dataclass(frozen=True)
class PhasePoint:
    X: float
    Z: float


@dataclass(frozen=True)
class CriticalPoint:
    label: str
    X: float
    Z: float


@dataclass
class IntegrationOptions:
    """Tolerances and stopping rules for :func:`integrate_Tc`.

    ``decide_below`` enables an early stop once ``X < decide_below * s`` and
    Z has left the band ``[Zt/2, 2 Zt]``: past that point the comparison with
    the target can no longer change. ``decide_turn`` stops a trajectory that
    is below Zt and already moving away from it (``dZ/dtau > 0``) once X is
    left of :func:`turn_abscissa`; the critical curve never does this there
    when gamma > 0.
    """

    eps: float = 1e-5
    rtol: float = 1e-8
    atol: float = 1e-10
    x_min: float = 1e-4
    z_cap: float | None = None
    max_dlogx: float | None = 0.02
    max_steps: int = 200_000
    decide_below: float | None = None
    decide_turn: bool = False
    target_tol: float = 1e-4


@dataclass
class Trajectory:
    """Sampled phase-plane curve with its classification."""

    params: Params
    reaction: Reaction
    c: float
    tau: np.ndarray
    X: np.ndarray
    Z: np.ndarray
    xi: np.ndarray
    fate: Fate
    z_target: float
    x_min: float
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return self.X.size

    @property
    def end(self) -> PhasePoint:
        return PhasePoint(float(self.X[-1]), float(self.Z[-1]))

    def monotone_part(self) -> slice:
        """Leading samples along which X strictly decreases and Z > 0."""
        dX = np.diff(self.X)
        bad = np.nonzero((dX >= 0) | (self.Z[1:] <= 0))[0]
        stop = self.X.size if bad.size == 0 else int(bad[0]) + 1
        return slice(0, stop)

    def z_of_x(self, Xq):
        """Cubic Hermite interpolation of Z(X) on the monotone part."""
        sl = self.monotone_part()
        X, Z = self.X[sl][::-1], self.Z[sl][::-1]
        dZ = np.array([slope_H(self.params, self.reaction, x, z, self.c)
                       for x, z in zip(X, Z)])
        spline = CubicHermiteSpline(X, Z, dZ, extrapolate=False)
        return spline(Xq)


def _fmp_scalar(params: Params, reaction: Reaction) -> Callable[[float], float]:
    m, e, f = params.m, params.fmp_exponent, reaction.f
    zero_val = f_mp_at_zero(params, reaction)
    g = 0.0 if params.pseudo_linear else params.gamma
    lim_coef = params.m * float(reaction.fprime(0.0))
    lim_exp = g / (params.p - 1.0)

    def fmp(X: float) -> float:
        if X <= 0.0:
            return zero_val
        if X < 1e-250:
            # f(X) underflows; use its linearization
            return lim_coef * X ** lim_exp
        return m * X ** e * f(X)

    return fmp


def make_rhs(params: Params, reaction: Reaction, c: float):
    """Right-hand side of the non-singular system in the state ``(ln X, Z, xi)``.

    Using ``ln X`` keeps the relative accuracy of X when it becomes tiny.
    """
    p, m = params.p, params.m
    g = 0.0 if params.pseudo_linear else params.gamma
    gx = g / (p - 1.0)
    fmp = _fmp_scalar(params, reaction)
    pm1 = p - 1.0
    mpm1 = m * pm1

    def rhs(_t, y):
        L, Z = y[0], y[1]
        X = math.exp(L) if L > -745.0 else 0.0
        az = abs(Z)
        if az > 0.0:
            zp1 = az ** pm1
            zp2 = zp1 / az
        else:
            zp1 = 0.0
            zp2 = 0.0 if p > 2 else (1.0 if p == 2 else 1e300)
        return (pm1 * (zp1 if Z >= 0 else -zp1),
                c * Z - az * zp1 - fmp(X),
                -mpm1 * (math.exp(gx * L) if gx != 0.0 else 1.0) * zp2)

    return rhs


def trajectory_rhs(params: Params, reaction: Reaction, point: PhasePoint | tuple,
                   c: float) -> tuple[float, float]:
    """``(dX/dtau, dZ/dtau)`` at a phase point."""
    X, Z = (point.X, point.Z) if isinstance(point, PhasePoint) else point
    X, Z = float(X), float(Z)
    p = params.p
    az = abs(Z)
    zp1 = az ** (p - 1.0) if az > 0 else 0.0
    fm = f_mp_at_zero(params, reaction) if X <= 0 else _fmp_scalar(params, reaction)(X)
    return ((p - 1.0) * X * (zp1 if Z >= 0 else -zp1), c * Z - az * zp1 - fm)


def slope_H(params: Params, reaction: Reaction, X: float, Z: float, c: float) -> float:
    """``dZ/dX`` along trajectories (singular where X or Z vanish)."""
    dX, dZ = trajectory_rhs(params, reaction, (X, Z), c)
    return dZ / dX


def null_isocline(params: Params, reaction: Reaction, c: float, X: float) -> list[float]:
    """Real roots Z of ``c Z - |Z|^p = f_mp(X)``, ascending."""
    p = params.p
    v = f_mp_at_zero(params, reaction) if X <= 0 else f_mp(params, reaction, float(X))
    return _isocline_roots(p, c, v)


def _isocline_roots(p: float, c: float, v: float) -> list[float]:
    if c < 0:
        raise DomainError("speed must be nonnegative")
    if v == 0.0:
        return [0.0] if c == 0 else [0.0, c ** (1.0 / (p - 1.0))]

    def g(z):
        return c * z - abs(z) ** p - v

    roots: list[float] = []
    if v < 0:
        # one root on each side of the origin
        r = (-v) ** (1.0 / p)
        lo = -r
        while g(lo) > 0:
            lo *= 2
        roots.append(optimize.brentq(g, lo, 0.0, xtol=1e-15, rtol=1e-15))
        hi = max(r, c ** (1.0 / (p - 1.0)) if c > 0 else 0.0) * 2 + 1.0
        while g(hi) > 0:
            hi *= 2
        zv = (c / p) ** (1.0 / (p - 1.0)) if c > 0 else 0.0
        roots.append(optimize.brentq(g, zv, hi, xtol=1e-15, rtol=1e-15))
        return roots
    if c == 0:
        return []
    zv = (c / p) ** (1.0 / (p - 1.0))
    gmax = g(zv)
    if gmax < 0:
        return []
    if gmax == 0:
        return [zv]
    zc = c ** (1.0 / (p - 1.0))
    roots.append(optimize.brentq(g, 0.0, zv, xtol=1e-15, rtol=1e-15))
    roots.append(optimize.brentq(g, zv, zc, xtol=1e-15, rtol=1e-15))
    return roots


def r_point_roots(params: Params, reaction: Reaction, c: float) -> list[float]:
    """Ordinates of the critical points on the axis X = 0 when gamma = 0."""
    return _isocline_roots(params.p, c, f_mp_at_zero(params, reaction))


def explicit_cstar_formula(params: Params, reaction: Reaction) -> tuple[float, float]:
    """``p (m^2 f'(0))^(1/(mp))`` and ``(m^2 f'(0))^(1/p)`` without domain checks."""
    m, p = params.m, params.p
    base = m * m * float(reaction.fprime(0.0))
    return p * base ** (1.0 / (m * p)), base ** (1.0 / p)


def critical_points(params: Params, reaction: Reaction, c: float) -> list[CriticalPoint]:
    """Stationary points of the tau-system for speed ``c``."""
    p = params.p
    pts = []
    if not params.pseudo_linear:
        pts.append(CriticalPoint("O", 0.0, 0.0))
    if reaction.kind is not ReactionKind.KPP:
        pts.append(CriticalPoint("A", reaction.a, 0.0))
    pts.append(CriticalPoint("S", 1.0, 0.0))
    if not params.pseudo_linear:
        pts.append(CriticalPoint("R_c", 0.0, c ** (1.0 / (p - 1.0))))
        return pts
    if reaction.kind is ReactionKind.TypeC:
        lam1, lam2 = r_point_roots(params, reaction, c)
        pts += [CriticalPoint("R_lambda1", 0.0, lam1), CriticalPoint("R_lambda2", 0.0, lam2)]
        return pts
    cstar, lamstar = explicit_cstar_formula(params, reaction)
    if abs(c - cstar) <= 1e-12 * max(1.0, cstar):
        pts.append(CriticalPoint("R_lambdastar", 0.0, lamstar))
    elif c > cstar:
        roots = r_point_roots(params, reaction, c)
        if len(roots) == 2:
            pts += [CriticalPoint("R_lambda1", 0.0, roots[0]),
                    CriticalPoint("R_lambda2", 0.0, roots[1])]
        else:
            pts.append(CriticalPoint("R_lambdastar", 0.0, roots[0]))
    return pts


def target_z(params: Params, reaction: Reaction, c: float) -> float:
    """Ordinate on X = 0 that the admissible trajectory must reach."""
    p = params.p
    if not params.pseudo_linear:
        return c ** (1.0 / (p - 1.0))
    roots = r_point_roots(params, reaction, c)
    pos = [r for r in roots if r > 0]
    if pos:
        return max(pos)
    # no critical point on the axis: use the top of the isocline parabola
    return (c / p) ** (1.0 / (p - 1.0)) if c > 0 else 0.0


def launch_slope(params: Params, reaction: Reaction, c: float) -> tuple[float, float, float]:
    """Leading-order slope data ``(lambda, sigma, lambda0)`` at the saddle.

    ``Z ~ lambda (s - X)^sigma`` along the incoming separatrix. For p > 2
    and c > 0 the linear balance ``lambda = -f_mp'(s)/c`` holds only very
    close to the saddle; ``lambda0`` is the c = 0 balance with exponent
    ``2/p`` that takes over further out.
    """
    p = params.p
    s = reaction.saddle
    q = -f_mp_prime(params, reaction, s)
    if not q > 0:
        raise DomainError("saddle requires f'(s) < 0")
    lam0 = (p * q / (2.0 * (p - 1.0) * s)) ** (1.0 / p)
    if p == 2.0:
        lam = (-c + math.sqrt(c * c + 4.0 * s * q)) / (2.0 * s)
        return lam, 1.0, lam0
    if p < 2.0 or c == 0.0:
        return lam0, 2.0 / p, lam0
    return q / c, 1.0, lam0


def launch_from_saddle(params: Params, reaction: Reaction, c: float,
                       eps: float = 1e-5) -> PhasePoint:
    """Starting point ``(s - eps, Z0)`` on the separatrix entering the saddle."""
    if not 1e-12 <= eps <= 1e-2:
        raise DomainError("eps must lie in [1e-12, 1e-2]")
    if c < 0:
        raise DomainError("speed must be nonnegative")
    lam, sigma, lam0 = launch_slope(params, reaction, c)
    z = lam * eps ** sigma
    if params.p > 2.0 and c > 0.0:
        z = min(z, lam0 * eps ** (2.0 / params.p))
    return PhasePoint(reaction.saddle - eps, z)


STIFF_RATIO = 20.0
STIFF_LSODA_BUDGET = 5000


def stiff_start(rhs, y0, direction: float, p: float, c: float,
                log_stop: float | None = None,
                stop_above: bool = False) -> tuple[np.ndarray, np.ndarray, bool]:
    """Stiff-solver segment away from Z = 0 when p > 2 and c > 0.

    There X moves at rate ``|Z|^(p-1)`` while Z relaxes at rate c, which is
    stiff for an explicit method. The segment ends once the ratio of the two
    rates falls below ``STIFF_RATIO`` or X passes ``exp(log_stop)``, from
    above unless ``stop_above``.

    Returns
    -------
    t, y : ndarray
        Times and states (one column per sample), the first column being y0.
    stopped : bool
        False when the solver gave up before either stopping condition,
        typically because the state settled onto a critical point.
    """
    pm1 = p - 1.0
    y0 = np.asarray(y0, dtype=float)
    if not (p > 2.0 and c > 0.0) or STIFF_RATIO * pm1 * abs(y0[1]) ** pm1 >= c:
        return np.array([0.0]), y0[:, None], True

    def stop_value(y):
        g = STIFF_RATIO * pm1 * abs(y[1]) ** pm1 - c
        if log_stop is not None:
            g = max(g, y[0] - log_stop if stop_above else log_stop - y[0])
        return g

    atol = [1e-12, max(min(1e-12, 1e-6 * abs(y0[1])), 1e-300), 1e-10]
    span = direction * 1e14
    # LSODA can stay in its non-stiff mode at the stability limit; BDF cannot
    for method, budget in ((LSODA, STIFF_LSODA_BUDGET), (BDF, 100 * STIFF_LSODA_BUDGET)):
        solver = method(lambda t, y: rhs(t, y), 0.0, y0, span, rtol=1e-10, atol=atol)
        ts, ys = [0.0], [y0]
        with np.errstate(over="ignore"):
            while solver.status == "running" and len(ts) <= budget:
                solver.step()
                if solver.status == "failed":
                    break
                if stop_value(solver.y) >= 0.0:
                    dense = solver.dense_output()
                    t_hit = optimize.brentq(lambda t: stop_value(dense(t)), solver.t_old,
                                            solver.t, xtol=1e-14 * max(1.0, abs(solver.t)))
                    ts.append(t_hit)
                    ys.append(dense(t_hit))
                    return np.array(ts), np.array(ys).T, True
                ts.append(solver.t)
                ys.append(solver.y.copy())
        if solver.status != "running":
            break
    return np.array(ts), np.array(ys).T, False


def integrate_Tc(params: Params, reaction: Reaction, c: float,
                 opts: IntegrationOptions | None = None) -> Trajectory:
    """Follow the separatrix entering the saddle backwards in tau.

    The trajectory is launched next to the saddle (``S`` for bistable and
    KPP reactions, ``A`` for monostable ones) and classified by how it
    reaches the axis X = 0 relative to the target ordinate.
    """
    opts = opts or IntegrationOptions()
    p = params.p
    start = launch_from_saddle(params, reaction, c, opts.eps)
    zt = target_z(params, reaction, c)
    z_cap = opts.z_cap if opts.z_cap is not None else 100.0 * max(1.0, c ** (1.0 / (p - 1.0)), zt)
    s = reaction.saddle
    rhs = make_rhs(params, reaction, c)

    x_turn = turn_abscissa(params, reaction) if opts.decide_turn else 0.0
    h_limit = None
    if opts.max_dlogx is not None:
        mdl = opts.max_dlogx
        pm1 = p - 1.0

        def h_limit(_t, _y, f):
            rate = abs(f[0])
            return mdl / rate if rate > 0 else math.inf

    t_pre, y_pre, _ = stiff_start(rhs, (math.log(start.X), start.Z, 0.0), -1.0, p, c,
                               log_stop=math.log(max(opts.x_min, x_turn)))
    solver = DormandPrince(rhs, t_pre[-1], y_pre[:, -1], direction=-1.0,
                           rtol=opts.rtol, atol=opts.atol, n_err=2, h_limit=h_limit)
    tau, Xs, Zs = list(t_pre), list(np.exp(y_pre[0])), list(y_pre[1])
    xis = list(y_pre[2])
    fate = None
    tol_t = opts.target_tol * (1.0 + zt)

    def classify(z):
        if abs(z - zt) < tol_t:
            return Fate.ReachedTarget
        return Fate.HitsAxisAboveTarget if z > zt else Fate.HitsAxisBelowTarget

    def push(t, y):
        tau.append(t)
        Xs.append(math.exp(y[0]))
        Zs.append(y[1])
        xis.append(y[2])

    x_dec = None if opts.decide_below is None else opts.decide_below * s
    log_xmin = math.log(opts.x_min)
    try:
        while fate is None:
            if solver.n_steps >= opts.max_steps:
                fate = classify(solver.y[1])
                break
            solver.step()
            X, Z = math.exp(solver.y[0]), solver.y[1]
            if abs(Z) > z_cap:
                push(solver.t, solver.y)
                fate = Fate.Diverged
            elif Z <= 0.0:
                t, y = solver.locate(lambda v: v[1])
                push(t, y)
                fate = Fate.CrossesZZero
            elif X <= opts.x_min:
                t, y = solver.locate(lambda v: v[0] - log_xmin)
                push(t, y)
                fate = classify(y[1])
            else:
                push(solver.t, solver.y)
                if x_dec is not None and X < x_dec and zt > 0 and not 0.5 * zt <= Z <= 2.0 * zt:
                    fate = classify(Z)
                elif opts.decide_turn and X < x_turn and Z < zt and solver.f[1] > 0:
                    fate = Fate.HitsAxisBelowTarget
                elif Z < 1e-6 * (1.0 + zt) and s - X > 1e-3 * s:
                    # settling onto a critical point on Z = 0 (A or O)
                    fate = Fate.HitsAxisBelowTarget
                elif solver.n_steps > 50 and _stalled(solver):
                    fate = classify(Z)
    except StepFailure:
        fate = Fate.Diverged if abs(solver.y[1]) > 0.5 * z_cap else classify(solver.y[1])
    return Trajectory(params, reaction, float(c), np.array(tau), np.array(Xs), np.array(Zs),
                      np.array(xis), fate, zt, opts.x_min,
                      {"eps": opts.eps, "steps": solver.n_steps})


def turn_abscissa(params: Params, reaction: Reaction) -> float:
    """Abscissa left of which ``dZ/dtau > 0`` with ``Z < Zt`` is final (gamma > 0).

    There a point with ``dZ/dtau > 0`` lies between the two isocline
    branches; moving left the upper branch stays above Zt while Z keeps
    falling. For bistable reactions this holds up to the peak of f_mp on
    (a, 1), where f_mp still decreases towards X = a.
    """
    a = reaction.a
    if reaction.kind is not ReactionKind.TypeC:
        return 0.5 * a
    X = np.linspace(a, 1.0, 2001)[1:-1]
    peak = float(X[int(np.argmax(f_mp(params, reaction, X)))])
    return a + 0.9 * (peak - a)


def _stalled(solver: DormandPrince) -> bool:
    """True when the state no longer moves (approach to a critical point)."""
    Z = solver.y[1]
    dL, dZ = solver.f[0], solver.f[1]
    return abs(dL) < 1e-13 and abs(dZ) < 1e-13 * max(abs(Z), 1e-13)


def explicit_c0_trajectory(params: Params, reaction: Reaction, X):
    """Closed-form trajectory for c = 0 through the saddle ``S(1, 0)``.

    ``T0(X) = X^(-1/(p-1)) [h - mp/(p-1) int_0^X u^(m-1) f du]^(1/p)`` where
    h makes the bracket vanish at X = 1.
    """
    m, p = params.m, params.p
    k = m * p / (p - 1.0)
    total = weighted_integral(reaction, m, 1.0)
    if not total > 0:
        raise DomainError("needs a positive weighted integral of f")
    h = k * total

    def one(x):
        x = float(x)
        if not 0.0 < x <= 1.0:
            raise DomainError("X must lie in (0, 1]")
        br = h - k * weighted_integral(reaction, m, x)
        if br < 0:
            if br < -1e-13:
                raise DomainError(f"negative bracket {br:.3g} at X={x}")
            br = 0.0
        return x ** (-1.0 / (p - 1.0)) * br ** (1.0 / p)

    if np.ndim(X) == 0:
        return one(X)
    return np.array([one(x) for x in np.asarray(X, dtype=float)])


def write_trajectory_csv(traj: Trajectory, path) -> None:
    """CSV with columns tau, X, Z, xi at full precision."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["tau", "X", "Z", "xi"])
        for row in zip(traj.tau, traj.X, traj.Z, traj.xi):
            w.writerow([repr(float(v)) for v in row])


def integrate_from_axis(params: Params, reaction: Reaction, c: float, x_start: float = 1e-12,
                        x_stop: float = 0.1, rtol: float = 1e-10, atol: float = 1e-13,
                        max_dlogx: float = 0.05) -> Trajectory:
    """Separatrix leaving ``R_c = (0, c^(1/(p-1)))`` towards larger X (gamma > 0).

    Near the axis ``Z = Zt + beta X^kappa`` with ``kappa = gamma/(p-1)`` and
    ``beta = -m f'(0) / ((p-1) c (kappa+1))``. Integrating towards larger X
    is stable, unlike following the saddle separatrix into the axis. At the
    critical speed the two curves coincide.
    """
    if params.pseudo_linear:
        raise DomainError("the axis separatrix is built for gamma > 0")
    if not c > 0:
        raise DomainError("speed must be positive")
    p = params.p
    kappa = params.gamma / (p - 1.0)
    zt = c ** (1.0 / (p - 1.0))
    beta = -params.m * float(reaction.fprime(0.0)) / ((p - 1.0) * c * (kappa + 1.0))
    z0 = zt + beta * x_start ** kappa
    rhs = make_rhs(params, reaction, c)

    def h_limit(_t, _y, f):
        rate = abs(f[0])
        return max_dlogx / rate if rate > 0 else math.inf

    solver = DormandPrince(rhs, 0.0, (math.log(x_start), z0, 0.0), direction=1.0,
                           rtol=rtol, atol=atol, n_err=2, h_limit=h_limit)
    rows = [(0.0, x_start, z0, 0.0)]
    log_stop = math.log(x_stop)
    while solver.n_steps < 100_000:
        solver.step()
        if solver.y[0] >= log_stop:
            t, y = solver.locate(lambda v: v[0] - log_stop)
            rows.append((t, x_stop, y[1], y[2]))
            break
        if solver.y[1] <= 0:
            raise DomainError("axis separatrix reached Z = 0 before x_stop")
        rows.append((solver.t, math.exp(solver.y[0]), solver.y[1], solver.y[2]))
    arr = np.array(rows)
    return Trajectory(params, reaction, float(c), arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3],
                      Fate.ReachedTarget, zt, x_start, {"beta": beta})
