"""Critical speeds, wave profiles and the special barrier waves."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
from scipy.interpolate import PchipInterpolator

from .core import Params, Reaction, ReactionKind, c0_bound, f_mp_prime
from .errors import (AnchorError, BracketError, DeltaTooSmall, DomainError, SpeedTooLow,
                     StepFailure, TailTooShort, WindowError)
from .phase_plane import (Fate, IntegrationOptions, Trajectory, explicit_cstar_formula,
                          integrate_from_axis, integrate_Tc, make_rhs, stiff_start)
from .rk import DormandPrince


class ProfileKind(str, Enum):
    FiniteFB = "FiniteFB"
    Positive = "Positive"
    ChangeSign2 = "ChangeSign2"
    ZeroToA = "ZeroToA"
    AToZero = "AToZero"
    IncreasingAToOne = "IncreasingAToOne"


@dataclass
class WaveProfile:
    """Profile ``phi(xi)`` sampled on a non-uniform increasing grid.

    ``fb`` holds the left and right free-boundary coordinates (``None`` for
    an end without one). Evaluation outside the grid returns the end values.
    """

    xi: np.ndarray
    phi: np.ndarray
    c: float
    kind: ProfileKind
    fb: tuple[float | None, float | None] | None = None
    peak: tuple[float, float] | None = None
    n_fit: int | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.xi = np.asarray(self.xi, dtype=float)
        self.phi = np.asarray(self.phi, dtype=float)
        if np.any(np.diff(self.xi) <= 0):
            raise ValueError("profile grid must increase strictly")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        interp = PchipInterpolator(self.xi, self.phi, extrapolate=False)
        inside = interp(np.clip(x, self.xi[0], self.xi[-1]))
        out = np.where(x <= self.xi[0], self.phi[0],
                       np.where(x >= self.xi[-1], self.phi[-1], inside))
        return float(out) if out.ndim == 0 else out

    def reflected(self, kind: ProfileKind | None = None) -> "WaveProfile":
        """The profile ``psi(xi) = phi(-xi)``."""
        fb = None
        if self.fb is not None:
            lo, hi = self.fb
            fb = (None if hi is None else -hi, None if lo is None else -lo)
        peak = None if self.peak is None else (-self.peak[0], self.peak[1])
        return WaveProfile(-self.xi[::-1], self.phi[::-1].copy(), -self.c,
                           kind or self.kind, fb, peak, None, dict(self.meta))

    def resample(self, n: int) -> "WaveProfile":
        """Uniform resampling by monotone cubic interpolation."""
        x = np.linspace(self.xi[0], self.xi[-1], n)
        return replace(self, xi=x, phi=np.asarray(self(x)), n_fit=None)


@dataclass
class WaveResult:
    params: Params
    reaction: Reaction
    c_star: float
    bracket: tuple[float, float]
    iterations: int
    profile: WaveProfile | None
    eps: float = 1e-5

    def to_dict(self) -> dict:
        fb = None
        if self.profile is not None and self.profile.fb is not None:
            fb = list(self.profile.fb)
        return {
            "m": self.params.m, "p": self.params.p, "gamma": self.params.gamma,
            "kind": self.reaction.kind.value, "a": self.reaction.a,
            "c_star": self.c_star, "bracket": list(self.bracket),
            "iterations": self.iterations, "fb": fb,
        }


# ---------------------------------------------------------------- bisection

def _search_options(params: Params, reaction: Reaction, eps: float) -> IntegrationOptions:
    if not params.pseudo_linear:
        return IntegrationOptions(eps=eps, x_min=1e-10, max_dlogx=None, decide_turn=True)
    if reaction.kind is ReactionKind.TypeC:
        return IntegrationOptions(eps=eps, x_min=1e-10, max_dlogx=None, decide_below=1e-3)
    # the axis critical points appear through a saddle-node: resolving c to
    # about 1e-5 needs ln(1/x_min) ~ pi lambda* / sqrt(c - c*)
    return IntegrationOptions(eps=eps, x_min=1e-250, max_dlogx=None, decide_below=1e-3)


def speed_side(params: Params, reaction: Reaction, c: float,
               opts: IntegrationOptions) -> tuple[int, Trajectory]:
    """+1 when ``c`` is below the critical speed, -1 when above."""
    tr = integrate_Tc(params, reaction, c, opts)
    if tr.fate in (Fate.HitsAxisAboveTarget, Fate.Diverged):
        return 1, tr
    if tr.fate in (Fate.CrossesZZero, Fate.HitsAxisBelowTarget):
        return -1, tr
    return (1 if tr.Z[-1] > tr.z_target else -1), tr


def _initial_bracket(params: Params, reaction: Reaction) -> tuple[float, float]:
    if reaction.kind is ReactionKind.TypeC:
        return 1e-6, c0_bound(params, reaction)
    analog, _ = explicit_cstar_formula(params, reaction)
    fp0 = float(reaction.fprime(0.0))
    return 1e-6, max(2.0 * analog, 4.0 * math.sqrt(params.m * fp0))


def _bisect(params, reaction, lo, hi, tol, opts, max_expand=8):
    s_lo, _ = speed_side(params, reaction, lo, opts)
    s_hi, _ = speed_side(params, reaction, hi, opts)
    expand = 0
    while s_hi > 0 and reaction.kind is not ReactionKind.TypeC and expand < max_expand:
        lo, hi = hi, 2.0 * hi
        s_hi, _ = speed_side(params, reaction, hi, opts)
        expand += 1
    if s_lo == s_hi:
        raise BracketError(
            f"speed bracket [{lo:.6g}, {hi:.6g}] does not change sign; "
            "check the sign conditions on the reaction")
    it = 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        s, _ = speed_side(params, reaction, mid, opts)
        if s > 0:
            lo = mid
        else:
            hi = mid
        it += 1
    return lo, hi, it


def find_cstar(params: Params, reaction: Reaction, tol: float = 1e-6,
               c_hint: float | None = None, eps: float = 1e-5,
               with_profile: bool = True, anchor: float | None = None) -> WaveResult:
    """Critical speed by bisection on the fate of the saddle separatrix.

    Parameters
    ----------
    tol : float
        Final bracket width (at least 1e-10).
    c_hint : float, optional
        Guess used to shrink the initial bracket; ignored if it does not
        bracket the critical speed.
    anchor : float, optional
        Profile value placed at ``xi = 0``; defaults to half the saddle abscissa.
    eps : float
        Launch offset from the saddle. Halving it must not change the
        classification at the bracket ends, otherwise it is reduced.
    """
    if tol < 1e-10:
        raise DomainError("tol must be at least 1e-10")
    lo0, hi0 = _initial_bracket(params, reaction)
    for _ in range(4):
        opts = _search_options(params, reaction, eps)
        lo, hi = lo0, hi0
        if c_hint is not None and c_hint > 0:
            w = max(50 * tol, 0.02 * c_hint)
            a, b = max(c_hint - w, 1e-9), c_hint + w
            if (speed_side(params, reaction, a, opts)[0] > 0
                    and speed_side(params, reaction, b, opts)[0] < 0):
                lo, hi = a, b
        lo, hi, it = _bisect(params, reaction, lo, hi, tol, opts)
        half = replace(opts, eps=eps / 2)
        if (speed_side(params, reaction, lo, half)[0] > 0
                and speed_side(params, reaction, hi, half)[0] < 0):
            break
        eps /= 10.0
    c_star = 0.5 * (lo + hi)
    profile = None
    if with_profile:
        gamma0_mono = params.pseudo_linear and reaction.kind is not ReactionKind.TypeC
        c_prof = hi if gamma0_mono else c_star
        x_min = 1e-40 if gamma0_mono else 1e-12
        axis = None
        if not params.pseudo_linear and c_star > 0:
            x_min = 0.05 * reaction.saddle
            axis = integrate_from_axis(params, reaction, c_star, x_stop=0.1 * reaction.saddle)
        tr = integrate_Tc(params, reaction, c_prof,
                          IntegrationOptions(eps=eps, x_min=x_min, max_dlogx=0.05,
                                             max_steps=400_000))
        x_ref = 0.5 * reaction.saddle if anchor is None else anchor
        profile = reconstruct_profile(tr, (0.0, x_ref), axis)
    return WaveResult(params, reaction, c_star, (lo, hi), it, profile, eps)


def explicit_cstar_gamma0_cprime(params: Params, reaction: Reaction) -> tuple[float, float]:
    """Exact critical speed and axis ordinate for gamma = 0 monostable reactions.

    Returns ``(c*, lambda*)`` with ``c* = p (m^2 f'(0))^(1/(mp))`` and
    ``lambda* = (m^2 f'(0))^(1/p)``.
    """
    if not params.pseudo_linear:
        raise DomainError("explicit speed holds only for gamma = 0")
    if reaction.kind is ReactionKind.TypeC:
        raise DomainError("explicit speed holds only for monostable reactions")
    return explicit_cstar_formula(params, reaction)


# ------------------------------------------------------------- profiles

def reconstruct_profile(traj: Trajectory, anchor: tuple[float, float] = (0.0, 0.5),
                        axis_branch: Trajectory | None = None) -> WaveProfile:
    """Map a saddle separatrix to ``(xi, phi)`` and locate its free boundary.

    Samples are kept up to the point closest to the target ordinate, so a
    trajectory computed slightly off the critical speed is truncated where
    it starts to leave the critical one. If ``axis_branch`` (the separatrix
    leaving the axis, see :func:`integrate_from_axis`) is given, it replaces
    the saddle samples below its largest X. With gamma > 0 the free boundary
    ``xi0`` follows from the Darcy law ``X^(gamma/(p-1)) ~ gamma Zt (xi0 - xi)/(m(p-1))``.
    """
    params = traj.params
    s = traj.reaction.saddle
    sl = traj.monotone_part()
    X, Z, xi = traj.X[sl], traj.Z[sl], traj.xi[sl]
    zt = traj.z_target
    near = False
    if axis_branch is not None:
        x_match = float(axis_branch.X[-1])
        if not X[-1] < x_match < X[0]:
            raise AnchorError("axis branch does not overlap the saddle trajectory")
        xi_match = float(np.interp(x_match, X[::-1], xi[::-1]))
        keep = X > x_match
        ax_X = axis_branch.X[::-1]
        ax_xi = axis_branch.xi[::-1] - axis_branch.xi[-1] + xi_match
        ax_Z = axis_branch.Z[::-1]
        X = np.concatenate([X[keep], ax_X])
        Z = np.concatenate([Z[keep], ax_Z])
        xi = np.concatenate([xi[keep], ax_xi])
        near = True
    else:
        tail = np.nonzero(X < 0.5 * s)[0]
        if tail.size and zt > 0:
            d = np.abs(Z[tail] - zt)
            k = int(tail[np.argmin(d)])
            if d.min() <= 1e-2 * (1.0 + zt):
                near = True
                X, Z, xi = X[:k + 1], Z[:k + 1], xi[:k + 1]
    xi_ref, x_ref = anchor
    if not X[-1] <= x_ref <= X[0]:
        raise AnchorError(f"anchor value {x_ref} outside sampled range [{X[-1]:.3g}, {X[0]:.3g}]")
    # xi increases while X decreases
    xi_at = float(np.interp(x_ref, X[::-1], xi[::-1]))
    j = int(np.searchsorted(-X, -x_ref))
    xi = xi - xi_at + xi_ref
    if j < X.size and X[j] == x_ref:
        xi[j] = xi_ref
    else:
        X = np.insert(X, j, x_ref)
        xi = np.insert(xi, j, xi_ref)
    xi, X = _strict(xi, X)
    n_fit = X.size
    fb = None
    kind = ProfileKind.Positive
    if near and not params.pseudo_linear:
        g, p, m = params.gamma, params.p, params.m
        xi0 = xi[-1] + m * (p - 1.0) * X[-1] ** (g / (p - 1.0)) / (g * zt)
        xi = np.append(xi, xi0)
        X = np.append(X, 0.0)
        fb = (float(xi0), None)
        kind = ProfileKind.FiniteFB
    return WaveProfile(xi, X, traj.c, kind, fb, None, n_fit,
                       {"fate": traj.fate.value, "m": params.m, "p": params.p})


def darcy_exponent(profile: WaveProfile, window: float | None = None) -> float:
    """Slope of ``log phi`` against ``log(xi0 - xi)`` next to the free boundary.

    The default window covers the samples with ``phi < 1e-3``.
    """
    if profile.kind is not ProfileKind.FiniteFB or profile.fb is None:
        raise DomainError("profile has no free boundary")
    xi0 = profile.fb[0]
    n = profile.n_fit or profile.xi.size
    xi, phi = profile.xi[:n], profile.phi[:n]
    if window is None:
        small = np.nonzero(phi < 1e-3)[0]
        if small.size == 0:
            raise WindowError("profile never drops below 1e-3")
        window = xi0 - xi[small[0]]
    sel = (xi > xi0 - window) & (xi < xi0) & (phi > 0)
    if np.count_nonzero(sel) < 20:
        raise WindowError(f"only {np.count_nonzero(sel)} samples in window")
    slope, _ = np.polyfit(np.log(xi0 - xi[sel]), np.log(phi[sel]), 1)
    return float(slope)


def tail_fit_gamma0(profile: WaveProfile, reaction: Reaction, params: Params,
                    phi_hi: float = 1e-4, phi_lo: float = 1e-14) -> tuple[float, float]:
    """Exponential decay rate of a positive critical profile when gamma = 0.

    Fits ``log phi - (2/p) log|xi| = const - rate xi`` over ``phi_lo < phi < phi_hi``
    and returns ``(rate, 2/p)``.
    """
    if not params.pseudo_linear:
        raise DomainError("tail fit applies only for gamma = 0")
    power = 2.0 / params.p
    n = profile.n_fit or profile.xi.size
    xi, phi = profile.xi[:n], profile.phi[:n]
    if not np.any(phi < phi_hi):
        raise TailTooShort(f"profile does not drop below {phi_hi}")
    sel = (phi < phi_hi) & (phi > phi_lo) & (xi > 0)
    if np.count_nonzero(sel) < 10:
        raise TailTooShort("too few tail samples")
    y = np.log(phi[sel]) - power * np.log(np.abs(xi[sel]))
    slope, _ = np.polyfit(xi[sel], y, 1)
    return float(-slope), power


# ------------------------------------------------------- special waves

Z_BLOWUP = 1e4


def _run_branch(params: Params, reaction: Reaction, c: float, X0: float, Z0: float,
                direction: float, stop_x: float | None = None, max_steps: int = 100_000):
    """Integrate from ``(X0, Z0)`` until Z blows up, Z changes sign, or X hits ``stop_x``.

    Returns ``(status, tau, X, Z, xi)`` with status in
    {"blowup", "crossed", "reached", "stalled"}.
    """
    rhs = make_rhs(params, reaction, c)
    p = params.p
    pm1 = p - 1.0

    def h_limit(_t, _y, f):
        rate = abs(f[0])
        return 0.05 / rate if rate > 0 else math.inf

    solver = DormandPrince(rhs, 0.0, (math.log(X0), Z0, 0.0), direction=direction, rtol=1e-9,
                           atol=1e-12, n_err=2, h_limit=h_limit)
    sign0 = 1.0 if Z0 > 0 or (Z0 == 0 and direction < 0) else -1.0
    cap = Z_BLOWUP * max(1.0, c ** (1.0 / pm1) if c > 0 else 0.0)
    out = [(0.0, X0, Z0, 0.0)]
    status = "stalled"
    try:
        while solver.n_steps < max_steps:
            solver.step()
            X, Z = math.exp(solver.y[0]), solver.y[1]
            if stop_x is not None and X <= stop_x:
                t, y = solver.locate(lambda v: v[0] - math.log(stop_x))
                out.append((t, math.exp(y[0]), y[1], y[2]))
                status = "reached"
                break
            if sign0 * Z <= 0 and solver.n_steps > 1:
                t, y = solver.locate(lambda v: v[1])
                out.append((t, math.exp(y[0]), y[1], y[2]))
                status = "crossed"
                break
            out.append((solver.t, X, Z, solver.y[2]))
            if abs(Z) > cap:
                status = "blowup"
                break
            if X < 1e-14:
                status = "stalled"
                break
            if (abs(solver.f[0]) < 1e-14
                    and abs(solver.f[1]) < 1e-14 * max(abs(Z), 1e-14)):
                break
    except StepFailure:
        status = "blowup" if abs(solver.y[1]) > 0.1 * cap else "stalled"
    arr = np.array(out)
    return status, arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3]


def _blowup_gap(params: Params, X: float, Z: float) -> float:
    """Remaining |xi| travelled while X -> 0 with ``Z ~ K X^(-1/(p-1))``."""
    K = abs(Z) * X ** (1.0 / (params.p - 1.0))
    return X ** params.m / K


def _cs_branches(params, reaction, c, peak):
    z0 = 0.0 if params.p >= 2 else 1e-10
    right = _run_branch(params, reaction, c, peak, z0, -1.0)
    left = _run_branch(params, reaction, c, peak, -z0, 1.0)
    return left, right


def _cs_ok(params, reaction, c, peak) -> bool:
    left, right = _cs_branches(params, reaction, c, peak)
    return left[0] == "blowup" and right[0] == "blowup"


def _peak_range(reaction: Reaction) -> tuple[float, float]:
    if reaction.kind is ReactionKind.TypeC:
        return reaction.a, 1.0
    return 0.0, reaction.a


def critical_delta(params: Params, reaction: Reaction, c: float, tol: float = 1e-6) -> float:
    """Smallest peak offset for which a change-sign wave with speed c exists."""
    base, top = _peak_range(reaction)
    lo, hi = 1e-6, (top - base) - 1e-6

    def ok(d):
        return _cs_ok(params, reaction, c, base + d)

    if not ok(hi):
        raise DeltaTooSmall(f"no change-sign wave at speed {c:.6g}")
    if ok(lo):
        return lo
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def change_sign_tw(params: Params, reaction: Reaction, c: float, delta: float) -> WaveProfile:
    """Compactly supported bump with peak ``a + delta`` (bistable) or ``delta`` (monostable).

    Both flanks are integrated from the peak until Z blows up; the last bit
    of each flank up to X = 0 is added from the blow-up asymptotics, which
    gives the two finite free boundaries.
    """
    if c < 0:
        raise DomainError("speed must be nonnegative")
    base, top = _peak_range(reaction)
    peak = base + delta
    if not base < peak < top:
        raise DomainError(f"peak {peak} outside ({base}, {top})")
    left, right = _cs_branches(params, reaction, c, peak)
    for name, br in (("left", left), ("right", right)):
        if br[0] != "blowup":
            raise DeltaTooSmall(f"{name} flank does not reach zero ({br[0]}); delta too small")
    _, _, XL, ZL, xiL = left
    _, _, XR, ZR, xiR = right
    xi0 = xiL[-1] - _blowup_gap(params, XL[-1], ZL[-1])
    xi1 = xiR[-1] + _blowup_gap(params, XR[-1], ZR[-1])
    xi = np.concatenate([[xi0], xiL[::-1], xiR[1:], [xi1]])
    phi = np.concatenate([[0.0], XL[::-1], XR[1:], [0.0]])
    xi, phi = _strict(xi, phi)
    return WaveProfile(xi, phi, c, ProfileKind.ChangeSign2, (float(xi0), float(xi1)),
                       (0.0, peak), None, {"delta": delta})


def _strict(xi, phi):
    keep = np.concatenate([[True], np.diff(xi) > 0])
    return xi[keep], phi[keep]


def zero_to_a_tw(params: Params, reaction: Reaction, c: float, eps: float = 1e-3,
                 c_star: float | None = None, reflect: bool = False) -> WaveProfile:
    """Wave rising from a free boundary to ``1 - eps`` and relaxing to ``a``.

    With ``reflect=True`` the mirrored a-to-0 wave is returned.
    """
    if reaction.kind is not ReactionKind.TypeC:
        raise DomainError("0-to-a waves need a bistable reaction")
    a = reaction.a
    if not 0 < eps < 1 - a:
        raise DomainError("eps must lie in (0, 1-a)")
    if c_star is None:
        c_star = find_cstar(params, reaction, tol=1e-7, with_profile=False).c_star
    if c < c_star - 1e-6:
        raise SpeedTooLow(f"c={c:.6g} below critical speed {c_star:.6g}")
    top = 1.0 - eps
    z0 = 0.0 if params.p >= 2 else 1e-10
    st_r, _, XR, ZR, xiR = _run_branch(params, reaction, c, top, z0, -1.0, stop_x=a)
    st_l, _, XL, ZL, xiL = _run_branch(params, reaction, c, top, -z0, 1.0)
    if st_l != "blowup":
        raise DeltaTooSmall(f"rising flank does not reach zero ({st_l})")
    xi0 = xiL[-1] - _blowup_gap(params, XL[-1], ZL[-1])
    xi1 = xiR[-1]
    far = xi1 + max(10.0, xi1 - xi0)
    xi = np.concatenate([[xi0], xiL[::-1], xiR[1:], [far]])
    phi = np.concatenate([[0.0], XL[::-1], np.maximum(XR[1:], a), [a]])
    xi, phi = _strict(xi, phi)
    prof = WaveProfile(xi, phi, c, ProfileKind.ZeroToA, (float(xi0), None), (0.0, top),
                       None, {"eps": eps, "xi_a": float(xi1), "status_right": st_r})
    return prof.reflected(ProfileKind.AToZero) if reflect else prof


def increasing_a_to_1_tw(params: Params, reaction: Reaction, c: float,
                         eps: float = 1e-5) -> WaveProfile:
    """Increasing wave leaving ``a`` at minus infinity and reaching 1 at a finite point."""
    if reaction.kind is not ReactionKind.TypeCPrime:
        raise DomainError("a-to-1 waves need a monostable reaction")
    if not c > 0:
        raise DomainError("speed must be positive")
    a, p = reaction.a, params.p
    q = f_mp_prime(params, reaction, a)  # negative at a
    # Z < 0 branch leaving A into X > a: same leading balances as the saddle launch
    lam0 = (-p * q / (2.0 * (p - 1.0) * a)) ** (1.0 / p)
    if p == 2.0:
        z0 = -(-c + math.sqrt(c * c - 4.0 * a * q)) / (2.0 * a) * eps
    elif p < 2.0:
        z0 = -lam0 * eps ** (2.0 / p)
    else:
        z0 = -min(-q / c * eps, lam0 * eps ** (2.0 / p))
    rhs = make_rhs(params, reaction, c)
    into_s = DomainError(f"at c={c:.6g} the trajectory from A settles onto S(1, 0) "
                         "instead of crossing X = 1; use a smaller speed")
    t_pre, y_pre, stopped = stiff_start(rhs, (math.log(a + eps), z0, 0.0), -1.0, p, c,
                                        log_stop=0.0, stop_above=True)
    if not stopped:
        raise into_s
    rows = list(zip(np.exp(y_pre[0]), y_pre[2]))
    reached = y_pre[0, -1] >= -1e-12
    if not reached:
        solver = DormandPrince(rhs, t_pre[-1], y_pre[:, -1], direction=-1.0, rtol=1e-9,
                               atol=1e-12, n_err=2)
        while solver.n_steps < 100_000:
            solver.step()
            if solver.y[0] >= 0.0:
                _, y = solver.locate(lambda v: v[0])
                rows.append((1.0, y[2]))
                reached = True
                break
            if solver.y[1] >= 0:
                raise DomainError("trajectory returned to Z = 0 before reaching 1")
            if -solver.y[0] < 1e-6 and -solver.y[1] < 1e-4:
                raise into_s
            rows.append((math.exp(solver.y[0]), solver.y[2]))
    if not reached:
        raise into_s
    rows[-1] = (1.0, rows[-1][1])
    X = np.array([r[0] for r in rows])
    xi = np.array([r[1] for r in rows])
    xi = xi - xi[-1]
    xi, X = _strict(xi, X)
    return WaveProfile(xi, X, c, ProfileKind.IncreasingAToOne, (0.0, None), None, None,
                       {"eps": eps})


# --------------------------------------------------------------- export

def write_profile_csv(profile: WaveProfile, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["xi", "phi"])
        for x, v in zip(profile.xi, profile.phi):
            w.writerow([repr(float(x)), repr(float(v))])


def write_result_json(result: WaveResult, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(result.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
