"""Diffusion parameters and reaction terms.

The equation is ``u_t = div(|grad u^m|^{p-2} grad u^m) + f(u)``. The
homogeneity ``gamma = m(p-1) - 1`` separates slow diffusion (gamma > 0,
free boundaries) from the pseudo-linear case (gamma = 0, positivity).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np
from scipy import integrate, optimize
from scipy.interpolate import PchipInterpolator

from .errors import DomainError

ZERO_TOL = 1e-12
N_VALIDATE = 1000


@dataclass(frozen=True)
class Params:
    """Diffusion exponents ``m > 0`` and ``p > 1`` with ``gamma >= 0``."""

    m: float
    p: float

    def __post_init__(self) -> None:
        if not (self.m > 0 and math.isfinite(self.m)):
            raise DomainError(f"m must be positive, got {self.m}")
        if not (self.p > 1 and math.isfinite(self.p)):
            raise DomainError(f"p must exceed 1, got {self.p}")
        if self.gamma < -1e-12:
            raise DomainError(
                f"fast-diffusion range unsupported: gamma = m(p-1)-1 = {self.gamma:.6g} < 0"
            )

    @property
    def gamma(self) -> float:
        return self.m * (self.p - 1.0) - 1.0

    @property
    def pseudo_linear(self) -> bool:
        """True on the line gamma = 0 (up to rounding)."""
        return abs(self.gamma) < 1e-12

    @property
    def fmp_exponent(self) -> float:
        """Exponent ``gamma/(p-1) - 1`` multiplying f in the phase plane."""
        g = 0.0 if self.pseudo_linear else self.gamma
        return g / (self.p - 1.0) - 1.0


def make_params(m: float, p: float) -> Params:
    """Validate and build a :class:`Params`.

    Raises
    ------
    DomainError
        If ``m <= 0``, ``p <= 1`` or ``m(p-1) - 1 < 0``.
    """
    return Params(float(m), float(p))


class ReactionKind(str, Enum):
    TypeC = "C"
    TypeCPrime = "Cprime"
    KPP = "KPP"


@dataclass(frozen=True)
class Reaction:
    """A reaction term with its derivative.

    For ``KPP`` the intermediate zero plays no role and ``a`` is 1: the
    reaction is positive on (0, 1) and vanishes at 0 and 1.
    """

    kind: ReactionKind
    a: float
    f: Callable = field(compare=False)
    fprime: Callable = field(compare=False)
    model_flag: bool = False
    label: str = "custom"

    def __post_init__(self) -> None:
        _validate_reaction(self)

    @property
    def saddle(self) -> float:
        """Abscissa of the saddle the admissible trajectory enters."""
        return self.a if self.kind is ReactionKind.TypeCPrime else 1.0

    @property
    def positivity_interval(self) -> tuple[float, float]:
        if self.kind is ReactionKind.TypeC:
            return (self.a, 1.0)
        if self.kind is ReactionKind.TypeCPrime:
            return (0.0, self.a)
        return (0.0, 1.0)

    def lipschitz(self, n: int = 2001) -> float:
        """Sampled ``max |f'|`` on [0, 1]."""
        u = np.linspace(0.0, 1.0, n)
        return float(np.max(np.abs(self.fprime(u))))

    def scaled(self, s: float) -> "Reaction":
        """The reaction ``s * f`` (same kind and zeros)."""
        if not s > 0:
            raise DomainError("scale factor must be positive")
        f, fp = self.f, self.fprime
        return Reaction(self.kind, self.a, lambda u: s * f(u), lambda u: s * fp(u),
                        False, f"{self.label}*{s:g}")


def _validate_reaction(r: Reaction) -> None:
    if r.kind is ReactionKind.KPP:
        if r.a != 1.0:
            raise DomainError("KPP reactions carry a = 1")
    elif not 0.0 < r.a < 1.0:
        raise DomainError(f"a must lie in (0, 1), got {r.a}")
    zeros = [0.0, 1.0] if r.kind is ReactionKind.KPP else [0.0, r.a, 1.0]
    for z in zeros:
        if abs(float(r.f(z))) > ZERO_TOL:
            raise DomainError(f"f({z}) = {float(r.f(z))} is not zero")
    u = np.linspace(0.0, 1.0, N_VALIDATE)
    fu = np.asarray(r.f(u), dtype=float)
    inner = (u > 0.0) & (u < 1.0) & (np.abs(u - r.a) > 1e-12 * (r.kind is not ReactionKind.KPP))
    if r.kind is ReactionKind.KPP:
        expected = np.ones_like(u)
    else:
        sign = 1.0 if r.kind is ReactionKind.TypeC else -1.0
        expected = np.where(u < r.a, -sign, sign)
    bad = inner & (np.sign(fu) != expected)
    if np.any(bad):
        raise DomainError(
            f"sign pattern of f violates kind {r.kind.value} at u = {u[bad][0]:.6g}"
        )
    if r.kind is ReactionKind.TypeC and not float(r.fprime(0.0)) < 0:
        raise DomainError("bistable reaction needs f'(0) < 0")
    if r.kind is ReactionKind.TypeCPrime and not float(r.fprime(1.0)) > 0:
        raise DomainError("monostable reaction needs f'(1) > 0")
    if r.kind is ReactionKind.KPP and not float(r.fprime(0.0)) > 0:
        raise DomainError("KPP reaction needs f'(0) > 0")


def cubic_reaction(kind: ReactionKind | str, a: float) -> Reaction:
    """The model cubic ``u(1-u)(u-a)`` (bistable) or ``u(1-u)(a-u)`` (monostable)."""
    kind = ReactionKind(kind)
    if kind is ReactionKind.KPP:
        raise DomainError("the cubic family is bistable or monostable; use scale_to_kpp")
    a = float(a)
    if not 0.0 < a < 1.0:
        raise DomainError(f"a must lie in (0, 1), got {a}")
    s = 1.0 if kind is ReactionKind.TypeC else -1.0

    def f(u):
        return s * u * (1.0 - u) * (u - a)

    def fprime(u):
        return s * (-3.0 * u * u + 2.0 * (1.0 + a) * u - a)

    return Reaction(kind, a, f, fprime, True, "cubic")


def tabulated_reaction(kind: ReactionKind | str, u, fvals) -> Reaction:
    """Reaction from samples ``(u_i, f_i)`` via monotone cubic interpolation.

    The zeros 0, a and 1 must be sample points so that the interpolant keeps
    the sign pattern between them. Concavity is not checked.
    """
    kind = ReactionKind(kind)
    u = np.asarray(u, dtype=float)
    fvals = np.asarray(fvals, dtype=float)
    if u.ndim != 1 or u.shape != fvals.shape or u.size < 4:
        raise DomainError("need matching 1-d arrays with at least 4 samples")
    if u[0] != 0.0 or u[-1] != 1.0 or np.any(np.diff(u) <= 0):
        raise DomainError("samples must increase strictly from 0 to 1")
    if kind is ReactionKind.KPP:
        a = 1.0
    else:
        interior = np.nonzero((np.abs(fvals) <= ZERO_TOL) & (u > 0) & (u < 1))[0]
        if interior.size != 1:
            raise DomainError("exactly one interior zero sample is required")
        a = float(u[interior[0]])
    interp = PchipInterpolator(u, fvals, extrapolate=True)
    deriv = interp.derivative()

    def f(x):
        return interp(x) if np.ndim(x) else float(interp(x))

    def fprime(x):
        return deriv(x) if np.ndim(x) else float(deriv(x))

    return Reaction(kind, a, f, fprime, False, "tabulated")


def f_mp(params: Params, reaction: Reaction, X):
    """Phase-plane reaction ``m X^(gamma/(p-1)-1) f(X)``.

    Raises
    ------
    DomainError
        At ``X = 0``, where the caller must use :func:`f_mp_at_zero`.
    """
    Xa = np.asarray(X, dtype=float)
    if np.any(Xa <= 0.0):
        raise DomainError("f_mp is singular at X = 0; use its limit")
    out = params.m * Xa ** params.fmp_exponent * reaction.f(Xa)
    return float(out) if np.ndim(X) == 0 else out


def f_mp_at_zero(params: Params, reaction: Reaction) -> float:
    """Limit of f_mp as X -> 0+: ``m f'(0)`` when gamma = 0, else 0."""
    if params.pseudo_linear:
        return params.m * float(reaction.fprime(0.0))
    return 0.0


def f_mp_prime(params: Params, reaction: Reaction, X: float) -> float:
    """Derivative of f_mp at ``X > 0``."""
    e = params.fmp_exponent
    return params.m * (e * X ** (e - 1.0) * float(reaction.f(X))
                       + X ** e * float(reaction.fprime(X)))


def _cubic_weighted(m: float, a: float, U: float) -> float:
    return (-U ** (m + 3) / (m + 3) + (1 + a) * U ** (m + 2) / (m + 2)
            - a * U ** (m + 1) / (m + 1))


def weighted_integral(reaction: Reaction, m: float, upper: float) -> float:
    """``int_0^upper u^(m-1) f(u) du``; closed form for the model cubic."""
    if not 0.0 <= upper <= 1.0:
        raise DomainError("upper limit must lie in [0, 1]")
    if upper == 0.0:
        return 0.0
    if reaction.model_flag:
        sign = 1.0 if reaction.kind is ReactionKind.TypeC else -1.0
        return sign * _cubic_weighted(m, reaction.a, upper)
    f = reaction.f

    def integrand(u):
        return u ** (m - 1.0) * float(f(u))

    lo, head = 0.0, 0.0
    if m < 1.0:
        # f(u) ~ f'(0) u near 0: integrate that part exactly
        lo = min(1e-6, upper)
        head = float(reaction.fprime(0.0)) * lo ** (m + 1.0) / (m + 1.0)
    points = [reaction.a] if lo < reaction.a < upper else None
    val, _ = integrate.quad(integrand, lo, upper, epsabs=1e-12, epsrel=1e-10,
                            limit=200, points=points)
    return head + val


def c0_bound(params: Params, reaction: Reaction) -> float:
    """Speed above which the admissible trajectory cannot exist (bistable case).

    ``c0 = p (F/(p-1))^((p-1)/p)`` with F the maximum of f_mp on the
    interval where f is positive.
    """
    lo, hi = reaction.positivity_interval
    X = np.linspace(lo, hi, 4001)[1:-1]
    vals = f_mp(params, reaction, X)
    i = int(np.argmax(vals))
    F = float(vals[i])
    if lo == 0.0 and params.pseudo_linear:
        F = max(F, f_mp_at_zero(params, reaction))
    a_br, b_br = X[max(i - 1, 0)], X[min(i + 1, X.size - 1)]
    if b_br > a_br:
        res = optimize.minimize_scalar(lambda x: -f_mp(params, reaction, x),
                                       bounds=(a_br, b_br), method="bounded",
                                       options={"xatol": 1e-13})
        F = max(F, -float(res.fun))
    p = params.p
    return p * (F / (p - 1.0)) ** ((p - 1.0) / p)


def scale_to_kpp(reaction: Reaction, params: Params) -> tuple[Reaction, float]:
    """Map a monostable reaction restricted to [0, a] onto a KPP reaction on [0, 1].

    With ``w = u/a`` the reaction becomes ``g(w) = f(a w)/a``. Lengths scale
    by ``a^(gamma/p)``, so a speed on [0, a] equals that factor times the
    speed of the KPP problem.
    """
    if reaction.kind is not ReactionKind.TypeCPrime:
        raise DomainError("scale_to_kpp needs a monostable reaction")
    a, f, fp = reaction.a, reaction.f, reaction.fprime

    def g(w):
        return f(a * w) / a

    def gprime(w):
        return fp(a * w)

    kpp = Reaction(ReactionKind.KPP, 1.0, g, gprime, False, f"kpp({reaction.label})")
    gamma = 0.0 if params.pseudo_linear else params.gamma
    return kpp, a ** (gamma / params.p)
