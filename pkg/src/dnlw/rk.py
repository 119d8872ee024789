"""Adaptive Dormand-Prince 5(4) stepper for small systems.

The phase-plane systems have two or three components, so a scalar
pure-Python stepper is much cheaper per step than a general vectorised
solver, and it exposes every accepted step so callers can apply their
own stopping rules and event location.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

from .errors import StepFailure

_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
)
_B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84)
# difference between the 5th and embedded 4th order weights (7 stages, FSAL)
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0


class DormandPrince:
    """Step-by-step integrator of ``y' = rhs(t, y)``.

    Parameters
    ----------
    rhs : callable
        ``rhs(t, y) -> list`` of the same length as ``y``.
    t0, y0 : float, sequence of float
        Initial time and state.
    direction : {1, -1}
        Integrate forward or backward in t.
    rtol, atol : float
        Local error tolerances.
    n_err : int, optional
        Only the first ``n_err`` components enter the error norm; trailing
        components are carried along as quadratures.
    h0 : float, optional
        Initial step magnitude.
    h_limit : callable, optional
        ``h_limit(t, y, dy) -> float`` caps the next step magnitude.
    """

    def __init__(self, rhs: Callable, t0: float, y0: Sequence[float], direction: float = 1.0,
                 rtol: float = 1e-8, atol: float = 1e-10, n_err: int | None = None,
                 h0: float | None = None, h_limit: Callable | None = None,
                 h_min: float = 1e-15):
        self.rhs = rhs
        self.t = float(t0)
        self.y = [float(v) for v in y0]
        self.dir = 1.0 if direction >= 0 else -1.0
        self.rtol, self.atol = rtol, atol
        self.n_err = len(self.y) if n_err is None else n_err
        self.h_limit = h_limit
        self.h_min = h_min
        self.f = list(rhs(self.t, self.y))
        self.h = h0 if h0 is not None else self._initial_step()
        self.t_old, self.y_old, self.f_old = self.t, list(self.y), list(self.f)
        self.n_steps = 0

    def _initial_step(self) -> float:
        n = self.n_err
        d0 = math.sqrt(sum((self.y[i] / (self.atol + self.rtol * abs(self.y[i]))) ** 2
                           for i in range(n)) / n)
        d1 = math.sqrt(sum((self.f[i] / (self.atol + self.rtol * abs(self.y[i]))) ** 2
                           for i in range(n)) / n)
        h = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
        return min(h, 1.0)

    def _attempt(self, h: float):
        t, y, n = self.t, self.y, len(self.y)
        s = self.dir * h
        k = [self.f]
        for i in range(1, 6):
            a = _A[i]
            yi = [y[j] + s * sum(a[q] * k[q][j] for q in range(i)) for j in range(n)]
            k.append(list(self.rhs(t + _C[i] * s, yi)))
        y_new = [y[j] + s * sum(_B[q] * k[q][j] for q in range(6)) for j in range(n)]
        f_new = list(self.rhs(t + s, y_new))
        k.append(f_new)
        err = 0.0
        for j in range(self.n_err):
            e = s * sum(_E[q] * k[q][j] for q in range(7))
            sc = self.atol + self.rtol * max(abs(y[j]), abs(y_new[j]))
            err += (e / sc) ** 2
        err = math.sqrt(err / self.n_err)
        return y_new, f_new, err

    def step(self) -> None:
        """Advance by one accepted step."""
        h = self.h
        if self.h_limit is not None:
            h = min(h, self.h_limit(self.t, self.y, self.f))
        while True:
            if h < self.h_min * max(1.0, abs(self.t)):
                raise StepFailure(f"step size underflow at t={self.t:.6g}")
            try:
                y_new, f_new, err = self._attempt(h)
                finite = all(math.isfinite(v) for v in y_new) and math.isfinite(err)
            except (OverflowError, ZeroDivisionError, ValueError):
                finite = False
            if finite and err <= 1.0:
                break
            fac = MIN_FACTOR if not finite else max(MIN_FACTOR, SAFETY * err ** -0.2)
            h *= fac
        self.t_old, self.y_old, self.f_old = self.t, self.y, self.f
        self.t = self.t + self.dir * h
        self.y, self.f = y_new, f_new
        fac = MAX_FACTOR if err == 0.0 else min(MAX_FACTOR, SAFETY * err ** -0.2)
        self.h = h * fac
        self.n_steps += 1

    def dense(self, theta: float) -> list[float]:
        """Cubic Hermite value at ``t_old + theta (t - t_old)``."""
        s = self.t - self.t_old
        h00 = 2 * theta ** 3 - 3 * theta ** 2 + 1
        h10 = theta ** 3 - 2 * theta ** 2 + theta
        h01 = -2 * theta ** 3 + 3 * theta ** 2
        h11 = theta ** 3 - theta ** 2
        return [h00 * y0 + h10 * s * f0 + h01 * y1 + h11 * s * f1
                for y0, f0, y1, f1 in zip(self.y_old, self.f_old, self.y, self.f)]

    def locate(self, g: Callable[[list[float]], float], tol: float = 1e-14) -> tuple[float, list[float]]:
        """Root of ``g`` on the last step, assuming a sign change across it."""
        g0, g1 = g(self.y_old), g(self.y)
        lo, hi = 0.0, 1.0
        if g0 == 0.0:
            return self.t_old, list(self.y_old)
        for _ in range(100):
            mid = 0.5 * (lo + hi)
            gm = g(self.dense(mid))
            if (gm > 0) == (g0 > 0) and gm != 0.0:
                lo = mid
            else:
                hi = mid
            if hi - lo < tol:
                break
        theta = 0.5 * (lo + hi) if g1 != 0.0 else hi
        return self.t_old + theta * (self.t - self.t_old), self.dense(theta)
